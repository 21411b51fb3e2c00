//! Upper limit on `g_c` for monotone s-wave potentials.
//!
//! If `g v` and a zero-energy square well of radius `s` cross twice, the
//! comparison theorem for ground states bounds `g_c` from above by
//! `F(α) = (π²/12) α / ∫₀^α y² v(y) dy`, `α = R/s`. The best bound is the
//! minimum of `F` over `α > 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::necessary::{BoundKind, BoundResult, Detail, Method};
use crate::optimize::maximize_scanned;
use crate::potentials::PotentialShape;
use crate::quadrature::{gauss_legendre, QuadratureGrid};

const PI2_OVER_12: f64 = std::f64::consts::PI * std::f64::consts::PI / 12.0;
/// Samples of the log-spaced α scan.
pub const ALPHA_SCAN_POINTS: usize = 1001;
/// The α bracket spans this factor on either side of the first-moment scale.
pub const ALPHA_SPAN: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SufficientResult {
    pub g_up: f64,
    pub alpha: f64,
    /// `|∫₀^α y²v dy − α³ v(α)|` relative to the integral.
    pub stationarity_residual: f64,
    /// `v` has no jump at `alpha`; the residual is only meaningful then.
    pub continuous_at_alpha: bool,
    /// Refinement delta of `g_up` relative to its value.
    pub error_estimate: f64,
    /// `(α, F(α))` along the scan.
    pub objective_curve: Vec<(f64, f64)>,
}

/// `α ↦ ∫₀^α y² v(y) dy` from panel prefix sums plus one partial panel.
pub struct PartialMoment<'a> {
    shape: &'a PotentialShape,
    boundaries: Vec<f64>,
    prefix: Vec<f64>,
    rule: (Vec<f64>, Vec<f64>),
}

impl<'a> PartialMoment<'a> {
    pub fn new(shape: &'a PotentialShape, grid: &QuadratureGrid) -> Result<Self> {
        let boundaries = grid.panel_boundaries().to_vec();
        let rule = gauss_legendre(grid.points_per_panel());
        let mut prefix = vec![0.0];
        let mut acc = 0.0;
        for pair in boundaries.windows(2) {
            acc += panel_integral(shape, &rule, pair[0], pair[1])?;
            prefix.push(acc);
        }
        Ok(Self {
            shape,
            boundaries,
            prefix,
            rule,
        })
    }

    pub fn total(&self) -> f64 {
        *self.prefix.last().unwrap()
    }

    pub fn at(&self, alpha: f64) -> Result<f64> {
        if alpha <= 0.0 {
            return Ok(0.0);
        }
        let y_max = *self.boundaries.last().unwrap();
        if alpha >= y_max {
            return Ok(self.total());
        }
        let k = self.boundaries.partition_point(|&b| b <= alpha) - 1;
        Ok(self.prefix[k] + panel_integral(self.shape, &self.rule, self.boundaries[k], alpha)?)
    }
}

fn panel_integral(shape: &PotentialShape, rule: &(Vec<f64>, Vec<f64>), a: f64, b: f64) -> Result<f64> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    for (x, w) in rule.0.iter().zip(&rule.1) {
        let y = mid + half * x;
        let v = shape.try_value(y)?;
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand { r: y });
        }
        sum += w * y * y * v;
    }
    Ok(half * sum)
}

/// `F(α)`; infinite where the partial moment vanishes.
pub fn sufficient_objective(moment: &PartialMoment<'_>, alpha: f64) -> Result<f64> {
    let integral = moment.at(alpha)?;
    if integral > 0.0 {
        Ok(PI2_OVER_12 * alpha / integral)
    } else {
        Ok(f64::INFINITY)
    }
}

fn first_moment_scale(shape: &PotentialShape, grid: &QuadratureGrid) -> Result<f64> {
    let zeroth = shape.weighted_moment(0.0, 1.0, grid)?;
    let first = shape.weighted_moment(1.0, 1.0, grid)?;
    if !(zeroth > 0.0) {
        return Err(Error::EmptyShape);
    }
    Ok(first / zeroth)
}

fn minimize(moment: &PartialMoment<'_>, y_ref: f64) -> Result<(f64, f64, Vec<(f64, f64)>)> {
    let lo = (y_ref / ALPHA_SPAN).ln();
    let hi = (y_ref * ALPHA_SPAN).ln();
    let neg = |t: f64| -sufficient_objective(moment, t.exp()).unwrap_or(f64::NAN);
    let scan = maximize_scanned(neg, lo, hi, ALPHA_SCAN_POINTS, 1e-13)?;
    let curve = scan.samples.iter().map(|&(t, f)| (t.exp(), -f)).collect();
    Ok((scan.argmax.exp(), -scan.max, curve))
}

/// Minimum of `F(α)` over the bracket `[10⁻³, 10³]·y_ref`, where `y_ref`
/// is the first-moment scale of `v`. Requires a nonincreasing shape.
pub fn sufficient_upper_limit(shape: &PotentialShape, grid: &QuadratureGrid) -> Result<SufficientResult> {
    if !shape.is_monotone_nonincreasing() {
        return Err(Error::NotMonotone);
    }
    let moment = PartialMoment::new(shape, grid)?;
    if !(moment.total() > 0.0) {
        return Err(Error::EmptyShape);
    }
    let y_ref = first_moment_scale(shape, grid)?;
    let (alpha, g_up, objective_curve) = minimize(&moment, y_ref)?;

    let fine = sufficient_objective(&PartialMoment::new(shape, &grid.bisected())?, alpha)?;
    let integral = moment.at(alpha)?;
    let stationarity_residual = (integral - alpha.powi(3) * shape.value(alpha)).abs() / integral;
    let continuous_at_alpha = !shape
        .discontinuities()
        .iter()
        .any(|&d| (d - alpha).abs() <= 1e-6 * d.abs().max(1.0));
    Ok(SufficientResult {
        g_up,
        alpha,
        stationarity_residual,
        continuous_at_alpha,
        error_estimate: ((g_up - fine) / g_up).abs(),
        objective_curve,
    })
}

/// [`sufficient_upper_limit`] as a [`BoundResult`]; `ℓ = 0` only.
pub fn sufficient_bound(shape: &PotentialShape, ell: u32, grid: &QuadratureGrid) -> Result<BoundResult> {
    if ell != 0 {
        return Err(Error::UnsupportedChannel(ell));
    }
    let out = sufficient_upper_limit(shape, grid)?;
    Ok(BoundResult {
        value: out.g_up,
        kind: BoundKind::Upper,
        method: Method::Sufficient,
        ell,
        detail: Detail::CrossingRadius { alpha: out.alpha },
        error_estimate: out.error_estimate,
    })
}
