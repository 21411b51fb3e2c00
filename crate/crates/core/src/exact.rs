//! The critical coupling itself, computed two independent ways.
//!
//! The eigen route takes `g_c = 1/μ_max` of the discretized kernel. The
//! shooting route integrates the zero-energy radial equation
//! `u'' = [ℓ(ℓ+1)/r² − g v(r)] u` outward and bisects on `g` for the
//! appearance of the first bound state.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::KernelSpectrum;
use crate::necessary::{BoundKind, BoundResult, Detail, Method};
use crate::potentials::PotentialShape;
use crate::quadrature::{QuadratureGrid, Resolution};
use crate::sufficient::sufficient_upper_limit;

/// `g_c = 1/μ_max` of the unit-strength kernel, extrapolated in the panel
/// width from the grid and its bisection.
pub fn critical_coupling_eigen(shape: &PotentialShape, ell: u32, grid: &QuadratureGrid) -> Result<BoundResult> {
    let spectrum = KernelSpectrum::compute(shape, ell, grid, 1, true)?;
    let mu = spectrum.mu_max().ok_or(Error::ZeroKernel)?;
    let value = 1.0 / mu.value();
    let fine = 1.0 / mu.fine;
    Ok(BoundResult {
        value,
        kind: BoundKind::Exact,
        method: Method::ExactEigen,
        ell,
        detail: Detail::Grid { nodes: grid.len() },
        error_estimate: ((value - fine) / value).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingConfig {
    pub r_start: f64,
    /// Outer radius; `None` picks the shape's support end or its
    /// first-moment tail cutoff at `tail_eps`.
    pub r_end: Option<f64>,
    pub tail_eps: f64,
    /// Relative local error per step.
    pub step_tol: f64,
    /// Relative width of the final bisection bracket on `g`.
    pub g_tol: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            r_start: 1e-6,
            r_end: None,
            tail_eps: 1e-12,
            step_tol: 1e-11,
            g_tol: 1e-12,
        }
    }
}

impl ShootingConfig {
    pub fn validate(&self) -> Result<()> {
        let ok_tol = |t: f64| t > 0.0 && t < 1e-2;
        if !(self.r_start > 0.0) {
            return Err(Error::InvalidParameter(format!("r_start = {}", self.r_start)));
        }
        if let Some(end) = self.r_end {
            if !(end > self.r_start && end.is_finite()) {
                return Err(Error::InvalidParameter(format!("r_end = {end}")));
            }
        }
        for (name, t) in [("tail_eps", self.tail_eps), ("step_tol", self.step_tol), ("g_tol", self.g_tol)] {
            if !ok_tol(t) {
                return Err(Error::InvalidParameter(format!("{name} = {t} outside (0, 1e-2)")));
            }
        }
        Ok(())
    }

    pub fn outer_radius(&self, shape: &PotentialShape) -> Result<f64> {
        match self.r_end {
            Some(end) => Ok(end),
            None => shape.tail_cutoff(self.tail_eps),
        }
    }
}

/// State of the zero-energy solution at `r_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShotOutcome {
    /// Coefficient of the growing free solution `r^{ℓ+1}`, up to a
    /// positive factor.
    pub coefficient: f64,
    /// Zeros of `u` on `(r_start, r_end)`.
    pub nodes: usize,
    pub u_end: f64,
    /// Zeros of the full solution on `(0, ∞)`, which equals the number of
    /// bound states at coupling `g`.
    pub bound_states: usize,
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 2_000_000;
const RESCALE_ABOVE: f64 = 1e100;

struct Radial<'a> {
    shape: &'a PotentialShape,
    centrifugal: f64,
    g: f64,
}

impl Radial<'_> {
    /// `v` is sampled strictly inside `[lo, hi]` so that a jump sitting on
    /// a segment end is seen from the correct side.
    fn rhs(&self, r: f64, y: [f64; 2], lo: f64, hi: f64) -> Result<[f64; 2]> {
        let rc = r.clamp(lo.next_up(), hi.next_down());
        let v = self.shape.try_value(rc)?;
        Ok([y[1], (self.centrifugal / (r * r) - self.g * v) * y[0]])
    }
}

/// Integrates the zero-energy equation at coupling `g` from `r_start` to
/// the outer radius and classifies the solution there.
pub fn shoot(shape: &PotentialShape, ell: u32, g: f64, config: &ShootingConfig) -> Result<ShotOutcome> {
    config.validate()?;
    let r_end = config.outer_radius(shape)?;
    shoot_to(shape, ell, g, config, r_end)
}

fn shoot_to(shape: &PotentialShape, ell: u32, g: f64, config: &ShootingConfig, r_end: f64) -> Result<ShotOutcome> {
    let l = ell as f64;
    let system = Radial {
        shape,
        centrifugal: l * (l + 1.0),
        g,
    };
    let r0 = config.r_start;
    // series start u = r^{ℓ+1}(1 + c r²), divided by r0^ℓ
    let c = -g * shape.try_value(r0)? / (2.0 * (2.0 * l + 3.0));
    let mut y = [r0 * (1.0 + c * r0 * r0), (l + 1.0) + c * (l + 3.0) * r0 * r0];

    let mut breaks = vec![r0];
    breaks.extend(shape.discontinuities().iter().copied().filter(|&d| d > r0 && d < r_end));
    breaks.push(r_end);

    let mut nodes = 0;
    let mut sign = 1.0;
    let mut h = r0 * 0.1;
    let mut steps = 0;
    for seg in breaks.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let mut r = lo;
        while r < hi {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::StepFailure { r });
            }
            let last = r + h >= hi;
            let step = if last { hi - r } else { h };
            let (next, err) = dp_step(&system, r, y, step, lo, hi)?;
            let scale_u = |s: [f64; 2], r: f64| s[0].abs() + r * s[1].abs();
            let scale_d = |s: [f64; 2], r: f64| s[0].abs() / r + s[1].abs();
            let rn = if last { hi } else { r + step };
            let su = scale_u(y, r).max(scale_u(next, rn));
            let sd = scale_d(y, r).max(scale_d(next, rn));
            let norm = (err[0].abs() / su).max(err[1].abs() / sd) / config.step_tol;
            if !norm.is_finite() {
                return Err(Error::StepFailure { r });
            }
            if norm <= 1.0 {
                if next[0] != 0.0 && next[0].signum() != sign {
                    nodes += 1;
                    sign = next[0].signum();
                }
                r = rn;
                y = next;
                if y[0].abs().max(y[1].abs() * r) > RESCALE_ABOVE {
                    y = [y[0] / RESCALE_ABOVE, y[1] / RESCALE_ABOVE];
                }
            }
            let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
            if !last || norm > 1.0 {
                h = step * factor;
            }
            if h <= r.abs() * f64::EPSILON * 4.0 {
                return Err(Error::StepFailure { r });
            }
        }
    }
    let coefficient = (r_end * y[1] + l * y[0]) / ((2.0 * l + 1.0) * r_end.powi(ell as i32 + 1));
    let extra = usize::from(coefficient * y[0] < 0.0);
    Ok(ShotOutcome {
        coefficient,
        nodes,
        u_end: y[0],
        bound_states: nodes + extra,
    })
}

fn dp_step(sys: &Radial<'_>, r: f64, y: [f64; 2], h: f64, lo: f64, hi: f64) -> Result<([f64; 2], [f64; 2])> {
    let mut k = [[0.0; 2]; 7];
    for s in 0..7 {
        let mut ys = y;
        for (j, kj) in k.iter().enumerate().take(s) {
            ys[0] += h * A[s][j] * kj[0];
            ys[1] += h * A[s][j] * kj[1];
        }
        k[s] = sys.rhs(r + C[s] * h, ys, lo, hi)?;
    }
    let mut next = y;
    let mut err = [0.0; 2];
    for s in 0..7 {
        for i in 0..2 {
            next[i] += h * B[s] * k[s][i];
            err[i] += h * E[s] * k[s][i];
        }
    }
    Ok((next, err))
}

const MAX_EXPANSIONS: usize = 60;

/// Smallest `g` at which the shooting solution acquires a bound state.
pub fn critical_coupling_shooting(shape: &PotentialShape, ell: u32, config: &ShootingConfig) -> Result<BoundResult> {
    config.validate()?;
    let r_end = config.outer_radius(shape)?;
    let value = bisect_threshold(shape, ell, config, r_end)?;
    let loose = ShootingConfig {
        step_tol: (config.step_tol * 100.0).min(1e-3),
        ..*config
    };
    let rough = bisect_threshold(shape, ell, &loose, r_end)?;
    Ok(BoundResult {
        value,
        kind: BoundKind::Exact,
        method: Method::ExactShooting,
        ell,
        detail: Detail::Shooting {
            r_start: config.r_start,
            r_end,
        },
        error_estimate: ((value - rough) / value).abs(),
    })
}

fn bisect_threshold(shape: &PotentialShape, ell: u32, config: &ShootingConfig, r_end: f64) -> Result<f64> {
    let binds = |g: f64| -> Result<bool> { Ok(shoot_to(shape, ell, g, config, r_end)?.bound_states >= 1) };
    let grid = Resolution::default().grid(shape)?;
    let first = shape.weighted_moment(1.0, 1.0, &grid)?;
    if !(first > 0.0) {
        return Err(Error::EmptyShape);
    }
    // the first trace limit never exceeds g_c
    let mut lo = (2.0 * ell as f64 + 1.0) / first;
    while binds(lo)? {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::NoBracket(lo));
        }
    }
    let mut hi = if ell == 0 && shape.is_monotone_nonincreasing() {
        sufficient_upper_limit(shape, &grid).map(|s| s.g_up * (1.0 + 1e-6)).unwrap_or(2.0 * lo)
    } else {
        2.0 * lo
    };
    let mut expansions = 0;
    while !binds(hi)? {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > MAX_EXPANSIONS {
            return Err(Error::NoBracket(hi));
        }
    }
    while hi - lo > config.g_tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if binds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Highest channel handled by [`square_well_exact`].
pub const SQUARE_WELL_MAX_ELL: u32 = 12;

/// `j_n(x)` for `n ≥ -1` by upward recurrence from `j_{-1} = cos x / x`
/// and `j_0 = sin x / x`; accurate for `x` beyond about `n`.
pub fn spherical_bessel(n: i32, x: f64) -> f64 {
    let mut prev = x.cos() / x;
    if n == -1 {
        return prev;
    }
    let mut cur = x.sin() / x;
    for k in 0..n {
        let next = (2 * k + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Critical coupling of the unit square well, `g_c = x²` with `x` the
/// first positive zero of `j_{ℓ-1}`.
pub fn square_well_exact(ell: u32) -> Result<f64> {
    match ell {
        0 => return Ok(std::f64::consts::PI.powi(2) / 4.0),
        1 => return Ok(std::f64::consts::PI.powi(2)),
        l if l > SQUARE_WELL_MAX_ELL => return Err(Error::UnsupportedChannel(l)),
        _ => {}
    }
    let n = ell as i32 - 1;
    let f = |x: f64| spherical_bessel(n, x);
    let mut a = n as f64 + 0.5;
    let mut fa = f(a);
    let mut b = a + 0.1;
    while f(b).signum() == fa.signum() {
        a = b;
        fa = f(a);
        b += 0.1;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a <= 1e-14 * b {
            break;
        }
        if f(m).signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    let x = 0.5 * (a + b);
    Ok(x * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::builtin_shape;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn square_well_closed_form() {
        assert!(rel(square_well_exact(0).unwrap(), 2.4674011) < 1e-7);
        assert!(rel(square_well_exact(1).unwrap(), 9.8696044) < 1e-7);
        for (ell, zero) in [(2, 4.493409457909), (3, 5.763459196895), (4, 6.987932000501), (5, 8.182561452571)] {
            assert!(rel(square_well_exact(ell).unwrap(), zero * zero) < 1e-11, "ℓ={ell}");
        }
        assert!(square_well_exact(13).is_err());
    }

    #[test]
    fn bessel_recurrence() {
        let x = 2.7f64;
        let j1 = x.sin() / (x * x) - x.cos() / x;
        assert!((spherical_bessel(1, x) - j1).abs() < 1e-15);
        let j2 = (3.0 / (x * x) - 1.0) * x.sin() / x - 3.0 * x.cos() / (x * x);
        assert!((spherical_bessel(2, x) - j2).abs() < 1e-14);
    }

    #[test]
    fn shooting_square_well_and_exponential() {
        let cfg = ShootingConfig::default();
        let sq = builtin_shape("square_well", &[]).unwrap();
        let b = critical_coupling_shooting(&sq, 0, &cfg).unwrap();
        assert!(rel(b.value, std::f64::consts::PI.powi(2) / 4.0) < 1e-9, "{}", b.value);
        let b = critical_coupling_shooting(&sq, 3, &cfg).unwrap();
        assert!(rel(b.value, square_well_exact(3).unwrap()) < 1e-9, "{}", b.value);

        let exp = builtin_shape("exponential", &[]).unwrap();
        let z0 = 2.404825557695773f64;
        let b = critical_coupling_shooting(&exp, 0, &cfg).unwrap();
        assert!(rel(b.value, z0 * z0 / 4.0) < 1e-9, "{}", b.value);
        assert!(b.error_estimate < 1e-6);
    }

    #[test]
    fn coefficient_changes_sign_at_threshold() {
        let cfg = ShootingConfig::default();
        let exp = builtin_shape("exponential", &[]).unwrap();
        let gc = critical_coupling_shooting(&exp, 1, &cfg).unwrap().value;
        let below = shoot(&exp, 1, gc * (1.0 - 1e-3), &cfg).unwrap();
        let above = shoot(&exp, 1, gc * (1.0 + 1e-3), &cfg).unwrap();
        assert!(below.coefficient > 0.0 && above.coefficient < 0.0);
        assert_eq!((below.bound_states, above.bound_states), (0, 1));
    }

    #[test]
    fn eigen_route() {
        let sq = builtin_shape("square_well", &[]).unwrap();
        let grid = Resolution::default().grid(&sq).unwrap();
        let b = critical_coupling_eigen(&sq, 0, &grid).unwrap();
        assert!(rel(b.value, 2.4674011) < 1e-5, "{}", b.value);
        assert_eq!(b.kind, BoundKind::Exact);
    }
}
