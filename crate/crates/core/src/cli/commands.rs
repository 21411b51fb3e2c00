//! Table computation behind the `bounds`, `reproduce` and `spectrum`
//! subcommands. Cells are computed on the rayon pool and joined by key.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::exact::{critical_coupling_eigen, critical_coupling_shooting, ShootingConfig};
use crate::kernel::{build_kernel_matrix, KernelSpectrum, Refined, DEFAULT_EIGEN_TOL};
use crate::necessary::{
    ladder_from_spectrum, optimize_glaser, optimize_hoelder, square_well_closed_forms, BoundKind, BoundResult,
    Detail, Method,
};
use crate::potentials::PotentialShape;
use crate::quadrature::{QuadratureGrid, Resolution};
use crate::reference::{ReferenceColumn, ReferenceTable};
use crate::sufficient::sufficient_bound;
use crate::{Error, Result};

use super::config::MethodChoice;

/// One column of a bounds table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "method", content = "n", rename_all = "snake_case")]
pub enum Column {
    Trace(usize),
    ClosedForm(usize),
    Glaser,
    Hoelder,
    Sufficient,
    ExactEigen,
    ExactShooting,
}

impl Column {
    /// Machine key, used for csv headers.
    pub fn key(self) -> String {
        match self {
            Column::Trace(n) => format!("trace_n{n}"),
            Column::ClosedForm(n) => format!("closed_form_n{n}"),
            Column::Glaser => "glaser".into(),
            Column::Hoelder => "hoelder".into(),
            Column::Sufficient => "sufficient".into(),
            Column::ExactEigen => "exact_eigen".into(),
            Column::ExactShooting => "exact_shooting".into(),
        }
    }

    /// Human header, used for markdown.
    pub fn title(self) -> String {
        match self {
            Column::Trace(n) => format!("trace n={n}"),
            Column::ClosedForm(n) => format!("closed form n={n}"),
            Column::Glaser => "glaser".into(),
            Column::Hoelder => "hoelder".into(),
            Column::Sufficient => "sufficient".into(),
            Column::ExactEigen => "exact (eigen)".into(),
            Column::ExactShooting => "exact (shooting)".into(),
        }
    }
}

/// Columns for a method selection, in selection order.
pub fn columns_for(methods: &[MethodChoice], ns: &[usize]) -> Vec<Column> {
    let mut out = Vec::new();
    for m in methods {
        match m {
            MethodChoice::Trace => out.extend(ns.iter().map(|&n| Column::Trace(n))),
            MethodChoice::ClosedForm => out.extend(ns.iter().filter(|&&n| n <= 3).map(|&n| Column::ClosedForm(n))),
            MethodChoice::Glaser => out.push(Column::Glaser),
            MethodChoice::Hoelder => out.push(Column::Hoelder),
            MethodChoice::Sufficient => out.push(Column::Sufficient),
            MethodChoice::ExactEigen => out.push(Column::ExactEigen),
            MethodChoice::ExactShooting => out.push(Column::ExactShooting),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Cell {
    Ok(BoundResult),
    /// The method does not apply to this shape or channel.
    NotApplicable { reason: String },
    Failed { error: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsTable {
    pub shape: String,
    pub resolution: Resolution,
    pub grid_nodes: usize,
    pub y_max: f64,
    pub columns: Vec<Column>,
    /// `(ℓ, cells)` with cells aligned to `columns`.
    pub rows: Vec<(u32, Vec<Cell>)>,
}

impl BoundsTable {
    pub fn failures(&self) -> Vec<(u32, Column, &str)> {
        let mut out = Vec::new();
        for (ell, cells) in &self.rows {
            for (col, cell) in self.columns.iter().zip(cells) {
                if let Cell::Failed { error } = cell {
                    out.push((*ell, *col, error.as_str()));
                }
            }
        }
        out
    }

    pub fn result(&self, ell: u32, column: Column) -> Option<&BoundResult> {
        let c = self.columns.iter().position(|&k| k == column)?;
        let (_, cells) = self.rows.iter().find(|(l, _)| *l == ell)?;
        match &cells[c] {
            Cell::Ok(b) => Some(b),
            _ => None,
        }
    }
}

/// Work units; one kernel spectrum per channel serves every trace column
/// and the eigen oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Task {
    Spectrum { n_max: usize, eigen: bool },
    Single(Column),
}

fn not_applicable(error: &Error) -> Option<String> {
    match error {
        Error::UnsupportedChannel(ell) => Some(format!("not defined for ℓ = {ell}")),
        Error::NotMonotone => Some("shape is not monotone".into()),
        _ => None,
    }
}

fn cell_from(result: Result<BoundResult>) -> Cell {
    match result {
        Ok(b) => Cell::Ok(b),
        Err(e) => match not_applicable(&e) {
            Some(reason) => Cell::NotApplicable { reason },
            None => Cell::Failed { error: e.to_string() },
        },
    }
}

fn closed_form_cell(shape: &PotentialShape, ell: u32, n: usize) -> Cell {
    if shape.name() != "square_well" {
        return Cell::NotApplicable {
            reason: "closed forms exist for the square well only".into(),
        };
    }
    cell_from(square_well_closed_forms(ell, n).map(|value| BoundResult {
        value,
        kind: BoundKind::Lower,
        method: Method::ClosedForm,
        ell,
        detail: Detail::TraceOrder { n },
        error_estimate: 0.0,
    }))
}

fn run_task(shape: &PotentialShape, ell: u32, grid: &QuadratureGrid, task: Task) -> Vec<(Column, Cell)> {
    match task {
        Task::Spectrum { n_max, eigen } => match KernelSpectrum::compute(shape, ell, grid, n_max, eigen) {
            Ok(spectrum) => {
                let mut out: Vec<(Column, Cell)> = match ladder_from_spectrum(&spectrum) {
                    Ok(ladder) => ladder.into_iter().map(|b| (trace_column(b.detail), Cell::Ok(b))).collect(),
                    Err(e) => (1..=n_max)
                        .map(|n| (Column::Trace(n), Cell::Failed { error: e.to_string() }))
                        .collect(),
                };
                if eigen {
                    let cell = match spectrum.mu_max() {
                        Some(mu) => Cell::Ok(eigen_result(mu, ell, grid)),
                        None => Cell::Failed {
                            error: Error::ZeroKernel.to_string(),
                        },
                    };
                    out.push((Column::ExactEigen, cell));
                }
                out
            }
            Err(e) => {
                let mut out: Vec<(Column, Cell)> = (1..=n_max)
                    .map(|n| (Column::Trace(n), Cell::Failed { error: e.to_string() }))
                    .collect();
                if eigen {
                    out.push((Column::ExactEigen, Cell::Failed { error: e.to_string() }));
                }
                out
            }
        },
        Task::Single(column) => {
            let cell = match column {
                Column::Glaser => cell_from(optimize_glaser(shape, ell, grid)),
                Column::Hoelder => cell_from(optimize_hoelder(shape, ell, grid)),
                Column::Sufficient => cell_from(sufficient_bound(shape, ell, grid)),
                Column::ExactShooting => cell_from(critical_coupling_shooting(shape, ell, &ShootingConfig::default())),
                Column::ClosedForm(n) => closed_form_cell(shape, ell, n),
                Column::ExactEigen => cell_from(critical_coupling_eigen(shape, ell, grid)),
                Column::Trace(_) => unreachable!("trace columns come from the spectrum task"),
            };
            vec![(column, cell)]
        }
    }
}

fn trace_column(detail: Detail) -> Column {
    match detail {
        Detail::TraceOrder { n } => Column::Trace(n),
        other => unreachable!("trace ladder produced {other:?}"),
    }
}

fn eigen_result(mu: Refined, ell: u32, grid: &QuadratureGrid) -> BoundResult {
    let value = 1.0 / mu.value();
    let fine = 1.0 / mu.fine;
    BoundResult {
        value,
        kind: BoundKind::Exact,
        method: Method::ExactEigen,
        ell,
        detail: Detail::Grid { nodes: grid.len() },
        error_estimate: ((value - fine) / value).abs(),
    }
}

/// All requested cells for every channel in `ells`.
pub fn compute_bounds(
    shape: &PotentialShape,
    ells: &[u32],
    columns: &[Column],
    resolution: &Resolution,
) -> Result<BoundsTable> {
    let grid = resolution.grid(shape)?;
    let n_max = columns
        .iter()
        .filter_map(|c| match c {
            Column::Trace(n) => Some(*n),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let eigen = columns.contains(&Column::ExactEigen);
    let mut tasks = Vec::new();
    for &ell in ells {
        if n_max > 0 || eigen {
            tasks.push((ell, Task::Spectrum { n_max, eigen }));
        }
        for &c in columns {
            if !matches!(c, Column::Trace(_) | Column::ExactEigen) {
                tasks.push((ell, Task::Single(c)));
            }
        }
    }
    let produced: Vec<(u32, Vec<(Column, Cell)>)> = tasks
        .par_iter()
        .map(|&(ell, task)| (ell, run_task(shape, ell, &grid, task)))
        .collect();
    let mut keyed: BTreeMap<(u32, Column), Cell> = BTreeMap::new();
    for (ell, cells) in produced {
        for (col, cell) in cells {
            keyed.insert((ell, col), cell);
        }
    }
    let rows = ells
        .iter()
        .map(|&ell| {
            let cells = columns
                .iter()
                .map(|&c| {
                    keyed.remove(&(ell, c)).unwrap_or(Cell::Failed {
                        error: "cell was not computed".into(),
                    })
                })
                .collect();
            (ell, cells)
        })
        .collect();
    Ok(BoundsTable {
        shape: shape.to_string(),
        resolution: *resolution,
        grid_nodes: grid.len(),
        y_max: grid.y_max(),
        columns: columns.to_vec(),
        rows,
    })
}

/// One compared cell of a published table.
#[derive(Debug, Clone, Serialize)]
pub struct ComparedCell {
    pub ell: u32,
    pub column: ReferenceColumn,
    pub computed: Option<f64>,
    pub published: f64,
    pub deviation: Option<f64>,
    pub within_tolerance: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Reproduction {
    pub table: &'static str,
    pub shape: &'static str,
    pub tolerance: f64,
    pub cells: Vec<ComparedCell>,
}

impl Reproduction {
    pub fn offending(&self) -> Vec<&ComparedCell> {
        self.cells.iter().filter(|c| !c.within_tolerance).collect()
    }
}

fn column_for(reference: ReferenceColumn) -> Column {
    match reference {
        ReferenceColumn::Trace1 => Column::Trace(1),
        ReferenceColumn::Trace2 => Column::Trace(2),
        ReferenceColumn::Trace3 => Column::Trace(3),
        ReferenceColumn::Trace4 => Column::Trace(4),
        ReferenceColumn::Glaser => Column::Glaser,
        ReferenceColumn::Exact => Column::ExactEigen,
    }
}

/// Recomputes every cell of a published table and compares.
pub fn reproduce(table: &'static ReferenceTable, resolution: &Resolution) -> Result<Reproduction> {
    let shape = crate::potentials::builtin_shape(table.shape, &[])?;
    let ells: Vec<u32> = table.ells().collect();
    let columns: Vec<Column> = ReferenceColumn::ALL.iter().map(|&c| column_for(c)).collect();
    let computed = compute_bounds(&shape, &ells, &columns, resolution)?;
    let mut cells = Vec::new();
    for &ell in &ells {
        for &rc in &ReferenceColumn::ALL {
            let published = table.value(ell, rc);
            let c = columns.iter().position(|&k| k == column_for(rc)).unwrap();
            let (value, error) = match &computed.rows[ell as usize].1[c] {
                Cell::Ok(b) => (Some(b.value), None),
                Cell::NotApplicable { reason } => (None, Some(reason.clone())),
                Cell::Failed { error } => (None, Some(error.clone())),
            };
            let deviation = value.map(|v| ((v - published) / published).abs());
            cells.push(ComparedCell {
                ell,
                column: rc,
                computed: value,
                published,
                deviation,
                within_tolerance: deviation.is_some_and(|d| d <= table.tolerance),
                error,
            });
        }
    }
    Ok(Reproduction {
        table: table.id,
        shape: table.shape,
        tolerance: table.tolerance,
        cells,
    })
}

/// Leading eigenvalues of the unit-strength kernel in one channel.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRow {
    pub ell: u32,
    /// Extrapolated eigenvalues, largest first.
    pub mu: Vec<f64>,
    /// Relative change of each eigenvalue under one grid refinement.
    pub error_estimate: Vec<f64>,
    pub grid_nodes: usize,
}

pub const SPECTRUM_COUNT: usize = 5;

pub fn spectrum(shape: &PotentialShape, ell: u32, resolution: &Resolution) -> Result<SpectrumRow> {
    let grid = resolution.grid(shape)?;
    let fine_grid = grid.bisected();
    let (coarse, fine) = rayon::join(
        || build_kernel_matrix(shape, ell, &grid)?.leading_eigenvalues(SPECTRUM_COUNT, DEFAULT_EIGEN_TOL),
        || build_kernel_matrix(shape, ell, &fine_grid)?.leading_eigenvalues(SPECTRUM_COUNT, DEFAULT_EIGEN_TOL),
    );
    let (coarse, fine) = (coarse?, fine?);
    if coarse.first().is_none_or(|&m| m <= 0.0) {
        return Err(Error::ZeroKernel);
    }
    let refined: Vec<Refined> = coarse.iter().zip(&fine).map(|(&c, &f)| Refined { coarse: c, fine: f }).collect();
    Ok(SpectrumRow {
        ell,
        mu: refined.iter().map(Refined::value).collect(),
        error_estimate: refined.iter().map(Refined::relative_error).collect(),
        grid_nodes: grid.len(),
    })
}
