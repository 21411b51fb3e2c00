//! Lower limits on the critical coupling `g_c`.
//!
//! A coupling `g` can bind a zero-energy state in channel `ℓ` only if
//! `gⁿ T_n ≥ 1` for every `n`, where `T_n = trace(Kⁿ)` of the unit-strength
//! kernel; hence `g_c ≥ T_n^{-1/n}`. The sequence is nondecreasing in `n`
//! and tends to `1/μ_max = g_c`. The `n = 1` member is the
//! Bargmann–Schwinger condition. Two moment conditions of the form
//! `[C(p, ℓ) ∫ y^{2p-1} v^p dy]^{-1/p}` complete the set.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{KernelSpectrum, Refined};
use crate::optimize::maximize_scanned;
use crate::potentials::PotentialShape;
use crate::quadrature::{nested_ordered_integral_2, nested_ordered_integral_3, QuadratureGrid, Resolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Lower,
    Upper,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    TraceN,
    Glaser,
    Hoelder,
    Sufficient,
    ExactEigen,
    ExactShooting,
    ClosedForm,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::TraceN => "trace_n",
            Method::Glaser => "glaser",
            Method::Hoelder => "hoelder",
            Method::Sufficient => "sufficient",
            Method::ExactEigen => "exact_eigen",
            Method::ExactShooting => "exact_shooting",
            Method::ClosedForm => "closed_form",
        }
    }
}

/// Method parameters attached to a [`BoundResult`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Detail {
    TraceOrder { n: usize },
    Exponent { p: f64, at_bracket_edge: bool },
    CrossingRadius { alpha: f64 },
    Grid { nodes: usize },
    Shooting { r_start: f64, r_end: f64 },
    None,
}

/// One bound on `g_c` in channel `ell`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundResult {
    pub value: f64,
    pub kind: BoundKind,
    pub method: Method,
    pub ell: u32,
    pub detail: Detail,
    /// Relative error figure from one grid refinement.
    pub error_estimate: f64,
}

fn from_refined_trace(trace: Refined, n: usize, ell: u32) -> Result<BoundResult> {
    let t = trace.value();
    if !(t > 0.0) {
        return Err(Error::EmptyShape);
    }
    let exponent = -1.0 / n as f64;
    let value = t.powf(exponent);
    let fine = trace.fine.powf(exponent);
    Ok(BoundResult {
        value,
        kind: BoundKind::Lower,
        method: Method::TraceN,
        ell,
        detail: Detail::TraceOrder { n },
        error_estimate: ((value - fine) / value).abs(),
    })
}

/// `g_c ≥ trace(Kⁿ)^{-1/n}`.
pub fn trace_lower_limit(
    shape: &PotentialShape,
    ell: u32,
    n: usize,
    grid: &QuadratureGrid,
) -> Result<BoundResult> {
    if n == 0 || n > crate::kernel::MAX_TRACE_POWER {
        return Err(Error::TraceOrder(n));
    }
    let spectrum = KernelSpectrum::compute(shape, ell, grid, n, false)?;
    from_refined_trace(spectrum.trace(n)?, n, ell)
}

/// Trace limits for `n = 1..=n_max` sharing one pair of kernel matrices.
pub fn trace_ladder(
    shape: &PotentialShape,
    ell: u32,
    n_max: usize,
    grid: &QuadratureGrid,
) -> Result<Vec<BoundResult>> {
    let spectrum = KernelSpectrum::compute(shape, ell, grid, n_max, false)?;
    ladder_from_spectrum(&spectrum)
}

pub fn ladder_from_spectrum(spectrum: &KernelSpectrum) -> Result<Vec<BoundResult>> {
    (1..=spectrum.max_order())
        .map(|n| from_refined_trace(spectrum.trace(n)?, n, spectrum.channel.ell))
        .collect()
}

/// Left-hand side of the explicit `n = 2` condition at unit strength:
/// `2/(2ℓ+1)² ∫ dr₁ r₁^{-2ℓ} v(r₁) ∫^{r₁} dr₂ r₂^{2ℓ+2} v(r₂)`.
pub fn explicit_condition_n2(shape: &PotentialShape, ell: u32, grid: &QuadratureGrid) -> Result<f64> {
    let l = ell as i32;
    let d = 2.0 * ell as f64 + 1.0;
    let nested = nested_ordered_integral_2(
        |r| r.powi(-2 * l) * shape.value(r),
        |r| r.powi(2 * l + 2) * shape.value(r),
        grid,
    )?;
    Ok(2.0 / (d * d) * nested)
}

/// Left-hand side of the explicit `n = 3` condition at unit strength:
/// `6/(2ℓ+1)³ ∫ dr₁ r₁^{-2ℓ} v ∫^{r₁} dr₂ r₂ v ∫^{r₂} dr₃ r₃^{2ℓ+2} v`.
pub fn explicit_condition_n3(shape: &PotentialShape, ell: u32, grid: &QuadratureGrid) -> Result<f64> {
    let l = ell as i32;
    let d = 2.0 * ell as f64 + 1.0;
    let nested = nested_ordered_integral_3(
        |r| r.powi(-2 * l) * shape.value(r),
        |r| r * shape.value(r),
        |r| r.powi(2 * l + 2) * shape.value(r),
        grid,
    )?;
    Ok(6.0 / (d * d * d) * nested)
}

/// Square-well lower limits for `n = 1, 2, 3` in closed form.
pub fn square_well_closed_forms(ell: u32, n: usize) -> Result<f64> {
    let d = 2.0 * ell as f64 + 1.0;
    match n {
        1 => Ok(2.0 * d),
        2 => Ok(d * (2.0 * (d + 2.0)).sqrt()),
        3 => Ok(d * ((d + 2.0) * (d + 4.0)).cbrt()),
        _ => Err(Error::UnsupportedOrder(n)),
    }
}

/// `ln C(p, ℓ)` with
/// `C = (p-1)^{p-1} Γ(2p) / [(2ℓ+1)^{2p-1} p^p Γ(p)²]`.
pub fn glaser_log_constant(p: f64, ell: u32) -> f64 {
    let d = 2.0 * ell as f64 + 1.0;
    let pm1 = p - 1.0;
    let head = if pm1 == 0.0 { 0.0 } else { pm1 * pm1.ln() };
    head + libm::lgamma(2.0 * p) - (2.0 * p - 1.0) * d.ln() - p * p.ln() - 2.0 * libm::lgamma(p)
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("exponent p = {p} must exceed 1")));
    }
    Ok(())
}

fn moment_limit(log_constant: f64, moment: f64, p: f64) -> Result<f64> {
    if !(moment > 0.0) {
        return Err(Error::EmptyShape);
    }
    Ok((-(log_constant + moment.ln()) / p).exp())
}

/// `[C(p, ℓ) ∫ y^{2p-1} v^p dy]^{-1/p}`.
pub fn glaser_limit(shape: &PotentialShape, ell: u32, p: f64, grid: &QuadratureGrid) -> Result<f64> {
    check_exponent(p)?;
    let moment = shape.weighted_moment(2.0 * p - 1.0, p, grid)?;
    moment_limit(glaser_log_constant(p, ell), moment, p)
}

/// `ln D(p, ℓ)` with
/// `D = [(2ℓ+1) p (p-1) / (p²(ℓ+2)(ℓ-1) + 3p - 1)]^{p-1}`.
pub fn hoelder_log_constant(p: f64, ell: u32) -> Result<f64> {
    if ell == 0 {
        return Err(Error::UnsupportedChannel(0));
    }
    check_exponent(p)?;
    let l = ell as f64;
    let denominator = p * p * (l + 2.0) * (l - 1.0) + 3.0 * p - 1.0;
    if !(denominator > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "nonpositive denominator at p = {p}, ℓ = {ell}"
        )));
    }
    Ok((p - 1.0) * ((2.0 * l + 1.0) * p * (p - 1.0) / denominator).ln())
}

/// `[D(p, ℓ) ∫ y^{2p-1} v^p dy]^{-1/p}`, defined for `ℓ ≥ 1`.
pub fn hoelder_limit(shape: &PotentialShape, ell: u32, p: f64, grid: &QuadratureGrid) -> Result<f64> {
    let log_constant = hoelder_log_constant(p, ell)?;
    let moment = shape.weighted_moment(2.0 * p - 1.0, p, grid)?;
    moment_limit(log_constant, moment, p)
}

/// Search interval for the moment exponent `p`.
pub const P_BRACKET: (f64, f64) = (1.0 + 1e-3, 30.0);
const P_SCAN_POINTS: usize = 48;

fn optimize_exponent(
    limit: impl Fn(f64, &QuadratureGrid) -> Result<f64>,
    method: Method,
    ell: u32,
    grid: &QuadratureGrid,
) -> Result<BoundResult> {
    let objective = |t: f64| limit(t.exp(), grid).unwrap_or(f64::NAN);
    let scan = maximize_scanned(objective, P_BRACKET.0.ln(), P_BRACKET.1.ln(), P_SCAN_POINTS, 1e-9)?;
    let p = scan.argmax.exp();
    if scan.at_edge {
        log::warn!(
            "{} optimum for ℓ = {ell} sits at the p-bracket edge (p = {p:.4})",
            method.label()
        );
    }
    let fine = limit(p, &grid.bisected())?;
    Ok(BoundResult {
        value: scan.max,
        kind: BoundKind::Lower,
        method,
        ell,
        detail: Detail::Exponent {
            p,
            at_bracket_edge: scan.at_edge,
        },
        error_estimate: ((scan.max - fine) / scan.max).abs(),
    })
}

/// Best Glaser-type limit over `p ∈ [1.001, 30]` (golden section in `ln p`).
pub fn optimize_glaser(shape: &PotentialShape, ell: u32, grid: &QuadratureGrid) -> Result<BoundResult> {
    optimize_exponent(|p, g| glaser_limit(shape, ell, p, g), Method::Glaser, ell, grid)
}

/// Best Hölder-type limit over the same `p` interval; `ℓ ≥ 1` only.
pub fn optimize_hoelder(shape: &PotentialShape, ell: u32, grid: &QuadratureGrid) -> Result<BoundResult> {
    if ell == 0 {
        return Err(Error::UnsupportedChannel(0));
    }
    optimize_exponent(|p, g| hoelder_limit(shape, ell, p, g), Method::Hoelder, ell, grid)
}

/// Large-coupling estimate of the number of bound states,
/// `(√g / π) ∫ √v dy`. Diagnostic only.
pub fn asymptotic_count(shape: &PotentialShape, g: f64, resolution: &Resolution) -> Result<f64> {
    if !(g >= 0.0) {
        return Err(Error::InvalidParameter(format!("coupling {g}")));
    }
    let y_max = shape.tail_cutoff_for(0.0, 0.5, resolution.tail_eps)?;
    let grid = resolution.grid_with_cutoff(shape, y_max)?;
    let moment = shape.weighted_moment(0.0, 0.5, &grid)?;
    Ok(g.sqrt() / std::f64::consts::PI * moment)
}
