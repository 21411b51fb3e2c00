//! Rendering of computed tables as markdown, csv or json.
//!
//! Markdown and csv round to five significant figures; json keeps full
//! double precision.

use std::fmt::Write as _;

use serde_json::json;

use super::commands::{BoundsTable, Cell, Reproduction, SpectrumRow};
use super::config::Format;

/// `x` with `digits` significant figures, trailing zeros dropped, in the
/// style of C's `%g`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn format_value(x: f64) -> String {
    format_sig(x, 5)
}

fn format_error(x: f64) -> String {
    format_sig(x, 2)
}

fn md_cell(cell: &Cell) -> String {
    match cell {
        Cell::Ok(b) => format!("{} ±{}", format_value(b.value), format_error(b.error_estimate)),
        Cell::NotApplicable { .. } => "n/a".into(),
        Cell::Failed { .. } => "failed".into(),
    }
}

pub fn render_bounds(table: &BoundsTable, format: Format) -> String {
    match format {
        Format::Md => bounds_md(table),
        Format::Csv => bounds_csv(table),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(table).expect("table serializes");
            s.push('\n');
            s
        }
    }
}

fn bounds_md(table: &BoundsTable) -> String {
    let mut out = String::new();
    let r = &table.resolution;
    writeln!(out, "## critical coupling limits: {}", table.shape).unwrap();
    writeln!(out).unwrap();
    writeln!(
        out,
        "grid: {} nodes on [0, {}] ({} points per panel, tail eps {}); cells show value ±relative error estimate",
        table.grid_nodes,
        format_value(table.y_max),
        r.points_per_panel,
        format_sig(r.tail_eps, 3)
    )
    .unwrap();
    writeln!(out).unwrap();
    let mut header = String::from("| ℓ |");
    let mut rule = String::from("|---|");
    for c in &table.columns {
        write!(header, " {} |", c.title()).unwrap();
        rule.push_str("---|");
    }
    writeln!(out, "{header}").unwrap();
    writeln!(out, "{rule}").unwrap();
    for (ell, cells) in &table.rows {
        let mut line = format!("| {ell} |");
        for cell in cells {
            write!(line, " {} |", md_cell(cell)).unwrap();
        }
        writeln!(out, "{line}").unwrap();
    }
    let notes: Vec<String> = table
        .rows
        .iter()
        .flat_map(|(ell, cells)| {
            table.columns.iter().zip(cells).filter_map(move |(c, cell)| match cell {
                Cell::NotApplicable { reason } => Some(format!("- ℓ = {ell}, {}: {reason}", c.title())),
                Cell::Failed { error } => Some(format!("- ℓ = {ell}, {}: failed: {error}", c.title())),
                Cell::Ok(_) => None,
            })
        })
        .collect();
    if !notes.is_empty() {
        writeln!(out).unwrap();
        for n in notes {
            writeln!(out, "{n}").unwrap();
        }
    }
    out
}

fn bounds_csv(table: &BoundsTable) -> String {
    let mut out = String::from("ell");
    for c in &table.columns {
        write!(out, ",{0},{0}_err", c.key()).unwrap();
    }
    out.push('\n');
    for (ell, cells) in &table.rows {
        write!(out, "{ell}").unwrap();
        for cell in cells {
            match cell {
                Cell::Ok(b) => write!(out, ",{},{}", format_value(b.value), format_error(b.error_estimate)).unwrap(),
                Cell::NotApplicable { .. } => out.push_str(",n/a,"),
                Cell::Failed { .. } => out.push_str(",failed,"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn render_reproduction(rep: &Reproduction, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rep).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut out = String::from("ell,column,computed,published,deviation,within_tolerance\n");
            for c in &rep.cells {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    c.ell,
                    c.column.label(),
                    c.computed.map(format_value).unwrap_or_else(|| "failed".into()),
                    format_value(c.published),
                    c.deviation.map(format_error).unwrap_or_default(),
                    c.within_tolerance
                )
                .unwrap();
            }
            out
        }
        Format::Md => {
            let mut out = String::new();
            writeln!(out, "## {} ({}), tolerance {}", rep.table, rep.shape, format_sig(rep.tolerance, 2)).unwrap();
            writeln!(out).unwrap();
            writeln!(out, "| ℓ | column | computed | published | deviation | ok |").unwrap();
            writeln!(out, "|---|---|---|---|---|---|").unwrap();
            for c in &rep.cells {
                writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} |",
                    c.ell,
                    c.column.label(),
                    c.computed.map(format_value).unwrap_or_else(|| "failed".into()),
                    format_value(c.published),
                    c.deviation.map(format_error).unwrap_or_else(|| "-".into()),
                    if c.within_tolerance { "yes" } else { "NO" }
                )
                .unwrap();
            }
            let bad = rep.offending();
            writeln!(out).unwrap();
            writeln!(out, "{} of {} cells within tolerance", rep.cells.len() - bad.len(), rep.cells.len()).unwrap();
            out
        }
    }
}

pub fn render_spectrum(shape: &str, rows: &[SpectrumRow], format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json!({ "shape": shape, "channels": rows })).unwrap();
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut out = String::from("ell,k,mu,mu_err,coupling,grid_nodes\n");
            for row in rows {
                for (k, (mu, err)) in row.mu.iter().zip(&row.error_estimate).enumerate() {
                    writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        row.ell,
                        k + 1,
                        format_value(*mu),
                        format_error(*err),
                        format_value(1.0 / mu),
                        row.grid_nodes
                    )
                    .unwrap();
                }
            }
            out
        }
        Format::Md => {
            let mut out = String::new();
            writeln!(out, "## kernel spectrum: {shape}").unwrap();
            writeln!(out).unwrap();
            writeln!(out, "| ℓ | k | μ_k | 1/μ_k | error | nodes |").unwrap();
            writeln!(out, "|---|---|---|---|---|---|").unwrap();
            for row in rows {
                for (k, (mu, err)) in row.mu.iter().zip(&row.error_estimate).enumerate() {
                    writeln!(
                        out,
                        "| {} | {} | {} | {} | {} | {} |",
                        row.ell,
                        k + 1,
                        format_value(*mu),
                        format_value(1.0 / mu),
                        format_error(*err),
                        row.grid_nodes
                    )
                    .unwrap();
                }
            }
            out
        }
    }
}
