//! Dimensionless potential shapes `v(y; k)` and the moments built from them.
//!
//! A shape always encodes the attractive magnitude `|V⁻|`, so `v ≥ 0`. The
//! physical potential is recovered through [`ScaledPotential`] as
//! `V(r) = -g s⁻² v(r/s; k)`. Every bound in this crate is computed at
//! `s = 1` and reported as the dimensionless coupling `g`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::dsl::{self, Expr};
use crate::error::{Error, Result};
use crate::quadrature::{build_grid, QuadratureGrid};

/// How an infinite-range shape decays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Decay {
    /// Faster than any power (exponential, Gaussian, Wood–Saxon).
    Exponential,
    /// `v ~ y^{-exponent}` at large `y`.
    Power { exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Support {
    /// `v ≡ 0` beyond `y_max`.
    Finite { y_max: f64 },
    Infinite { decay: Decay },
}

impl Support {
    pub fn is_finite(&self) -> bool {
        matches!(self, Support::Finite { .. })
    }
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Butland slopes).
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    ys: Vec<f64>,
    vs: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    fn new(ys: Vec<f64>, vs: Vec<f64>) -> Self {
        let n = ys.len();
        let h: Vec<f64> = ys.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (vs[k + 1] - vs[k]) / h[k]).collect();
        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes = vec![delta[0]; 2];
        } else {
            for k in 1..n - 1 {
                let (d0, d1) = (delta[k - 1], delta[k]);
                if d0 * d1 > 0.0 {
                    let (h0, h1) = (h[k - 1], h[k]);
                    slopes[k] = 3.0 * (h0 + h1) / ((2.0 * h1 + h0) / d0 + (h1 + 2.0 * h0) / d1);
                }
            }
            slopes[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            slopes[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Self { ys, vs, slopes }
    }

    fn eval(&self, y: f64) -> f64 {
        let n = self.ys.len();
        if y <= self.ys[0] {
            return self.vs[0];
        }
        if y > self.ys[n - 1] {
            return 0.0;
        }
        let k = match self.ys.binary_search_by(|probe| probe.total_cmp(&y)) {
            Ok(i) => return self.vs[i],
            Err(i) => i - 1,
        };
        let h = self.ys[k + 1] - self.ys[k];
        let t = (y - self.ys[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.vs[k]
            + (t3 - 2.0 * t2 + t) * h * self.slopes[k]
            + (-2.0 * t3 + 3.0 * t2) * self.vs[k + 1]
            + (t3 - t2) * h * self.slopes[k + 1]
    }
}

/// One-sided three-point end slope, limited to keep the end interval monotone.
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Profile {
    SquareWell,
    Exponential,
    Gaussian,
    WoodSaxon { radius: f64, diffuseness: f64 },
    Tabulated(MonotoneCubic),
    Expression(Expr),
}

/// Dimensionless shape `v(y; k) ≥ 0` with its support and jump metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialShape {
    name: String,
    profile: Profile,
    params: BTreeMap<String, f64>,
    support: Support,
    discontinuities: Vec<f64>,
    monotone_nonincreasing: bool,
    amplitude: f64,
}

impl fmt::Display for PotentialShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.params.is_empty() {
            let parts: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", parts.join(", "))?;
        }
        Ok(())
    }
}

pub const BUILTIN_NAMES: [&str; 4] = ["square_well", "exponential", "gaussian", "wood_saxon"];

/// Default Wood–Saxon radius `c` and diffuseness `a`.
pub const WOOD_SAXON_DEFAULTS: (f64, f64) = (1.0, 0.2);

/// Built-in families. `wood_saxon` accepts `c` (radius) and `a`
/// (diffuseness); the other families take no parameters.
pub fn builtin_shape(name: &str, params: &[(&str, f64)]) -> Result<PotentialShape> {
    let allowed: &[&str] = match name {
        "square_well" | "exponential" | "gaussian" => &[],
        "wood_saxon" => &["c", "a"],
        _ => return Err(Error::UnknownShape(name.to_string())),
    };
    let mut bound = BTreeMap::new();
    for &(key, value) in params {
        if !allowed.contains(&key) {
            return Err(Error::InvalidParameter(format!(
                "`{key}` is not a parameter of {name}"
            )));
        }
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!("{key} = {value}")));
        }
        bound.insert(key.to_string(), value);
    }
    let exponential = Support::Infinite {
        decay: Decay::Exponential,
    };
    let (profile, support, discontinuities) = match name {
        "square_well" => (Profile::SquareWell, Support::Finite { y_max: 1.0 }, vec![1.0]),
        "exponential" => (Profile::Exponential, exponential, vec![]),
        "gaussian" => (Profile::Gaussian, exponential, vec![]),
        _ => {
            let radius = *bound.entry("c".into()).or_insert(WOOD_SAXON_DEFAULTS.0);
            let diffuseness = *bound.entry("a".into()).or_insert(WOOD_SAXON_DEFAULTS.1);
            if radius <= 0.0 || diffuseness <= 0.0 {
                return Err(Error::InvalidParameter(
                    "wood_saxon needs c > 0 and a > 0".into(),
                ));
            }
            (
                Profile::WoodSaxon {
                    radius,
                    diffuseness,
                },
                exponential,
                vec![],
            )
        }
    };
    Ok(PotentialShape {
        name: name.to_string(),
        profile,
        params: bound,
        support,
        discontinuities,
        monotone_nonincreasing: true,
        amplitude: 1.0,
    })
}

/// Shape interpolated through `(y, v)` samples, zero beyond the last sample.
pub fn tabulated_shape(samples: &[(f64, f64)]) -> Result<PotentialShape> {
    if samples.len() < 2 {
        return Err(Error::InvalidTable(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    for (i, &(y, v)) in samples.iter().enumerate() {
        if !y.is_finite() || !v.is_finite() || y < 0.0 {
            return Err(Error::InvalidTable(format!("bad sample ({y}, {v})")));
        }
        if v < 0.0 {
            return Err(Error::InvalidTable(format!("negative value {v} at y = {y}")));
        }
        if i > 0 && y <= samples[i - 1].0 {
            return Err(Error::InvalidTable(format!(
                "y must be strictly increasing (at y = {y})"
            )));
        }
    }
    let ys: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let vs: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let y_last = *ys.last().unwrap();
    let monotone = vs.windows(2).all(|w| w[1] <= w[0]);
    let discontinuities = if *vs.last().unwrap() > 0.0 {
        vec![y_last]
    } else {
        vec![]
    };
    Ok(PotentialShape {
        name: "tabulated".into(),
        profile: Profile::Tabulated(MonotoneCubic::new(ys, vs)),
        params: BTreeMap::new(),
        support: Support::Finite { y_max: y_last },
        discontinuities,
        monotone_nonincreasing: monotone,
        amplitude: 1.0,
    })
}

/// Parses the tabulated-shape text format: one `y v` pair per line,
/// whitespace separated, `#` starts a comment.
pub fn parse_table(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|_| {
                Error::InvalidTable(format!("line {}: cannot parse `{s}`", lineno + 1))
            })
        };
        match fields.as_slice() {
            [y, v] => samples.push((parse(y)?, parse(v)?)),
            _ => {
                return Err(Error::InvalidTable(format!(
                    "line {}: expected two columns",
                    lineno + 1
                )))
            }
        }
    }
    Ok(samples)
}

pub fn load_table(path: &Path) -> Result<PotentialShape> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    tabulated_shape(&parse_table(&text)?)
}

/// Largest radius probed when classifying expression shapes.
const PROBE_LIMIT: f64 = 1.0e4;

/// Shape defined by a parsed expression in the variable `r`. Negative values
/// of the expression are clipped to zero. Support, decay, jump locations and
/// monotonicity are inferred by sampling.
pub fn expression_shape(text: &str, params: &[(&str, f64)]) -> Result<PotentialShape> {
    let ast = dsl::parse(text)?;
    let bound: BTreeMap<String, f64> = params.iter().map(|&(k, v)| (k.to_string(), v)).collect();
    for name in ast.parameters() {
        if !bound.contains_key(&name) {
            return Err(Error::UnboundParameter(name));
        }
    }
    let mut shape = PotentialShape {
        name: text.to_string(),
        profile: Profile::Expression(ast),
        params: bound,
        support: Support::Infinite {
            decay: Decay::Exponential,
        },
        discontinuities: vec![],
        monotone_nonincreasing: false,
        amplitude: 1.0,
    };
    // surface evaluation errors (domain, unbound) before any integration
    for k in 0..=1000 {
        shape.try_value(k as f64 * 0.01)?;
    }
    shape.support = shape.infer_support()?;
    let end = match shape.support {
        Support::Finite { y_max } => y_max,
        // slowly decaying shapes are accepted here and rejected by the
        // integrals that need a finite moment
        Support::Infinite { .. } => shape.tail_cutoff(1e-6).unwrap_or(100.0),
    };
    shape.discontinuities = shape.detect_jumps(end);
    if let Support::Finite { y_max } = shape.support {
        if shape.value(y_max * (1.0 - 1e-12)) > 0.0 && !shape.discontinuities.contains(&y_max) {
            shape.discontinuities.push(y_max);
        }
    }
    shape.monotone_nonincreasing = shape.sampled_monotone(end, 10_000);
    if shape.is_zero() {
        return Err(Error::EmptyShape);
    }
    Ok(shape)
}

/// Rounds a bisection endpoint to nine decimals when that moves it by less
/// than the bisection resolution.
fn snap_decimal(y: f64) -> f64 {
    let snapped = (y * 1e9).round() / 1e9;
    if (snapped - y).abs() < 1e-11 * y.max(1.0) {
        snapped
    } else {
        y
    }
}

/// `max(0, -V(r))`.
pub fn negative_part(raw_potential: impl Fn(f64) -> f64, r: f64) -> Result<f64> {
    let value = raw_potential(r);
    if !value.is_finite() {
        return Err(Error::Evaluation { r });
    }
    Ok((-value).max(0.0))
}

impl PotentialShape {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn discontinuities(&self) -> &[f64] {
        &self.discontinuities
    }

    pub fn is_monotone_nonincreasing(&self) -> bool {
        self.monotone_nonincreasing
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// The same shape multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::InvalidParameter(format!("scale factor {factor}")));
        }
        let mut out = self.clone();
        out.amplitude *= factor;
        Ok(out)
    }

    /// Replaces the jump list (strictly increasing, nonnegative).
    pub fn with_discontinuities(mut self, jumps: Vec<f64>) -> Result<Self> {
        if jumps.iter().any(|&d| !(d >= 0.0) || !d.is_finite())
            || jumps.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::InvalidParameter(
                "discontinuities must be finite, nonnegative and strictly increasing".into(),
            ));
        }
        self.discontinuities = jumps;
        Ok(self)
    }

    /// `v(y)`; `NaN` when an expression fails to evaluate.
    pub fn value(&self, y: f64) -> f64 {
        self.try_value(y).unwrap_or(f64::NAN)
    }

    pub fn try_value(&self, y: f64) -> Result<f64> {
        let v = match &self.profile {
            Profile::SquareWell => dsl::heaviside(1.0 - y),
            Profile::Exponential => (-y).exp(),
            Profile::Gaussian => (-y * y).exp(),
            Profile::WoodSaxon {
                radius,
                diffuseness,
            } => 1.0 / (1.0 + ((y - radius) / diffuseness).exp()),
            Profile::Tabulated(table) => table.eval(y),
            Profile::Expression(ast) => {
                if let Support::Finite { y_max } = self.support {
                    if y > y_max {
                        return Ok(0.0);
                    }
                }
                ast.evaluate(y, &self.params)?.max(0.0)
            }
        };
        Ok(self.amplitude * v)
    }

    fn is_zero(&self) -> bool {
        (0..=2000).all(|k| self.value(k as f64 * 0.005) == 0.0)
            && (0..=40).all(|k| self.value(2f64.powi(k - 20) * 10.0) == 0.0)
    }

    fn infer_support(&self) -> Result<Support> {
        let probes: Vec<f64> = (0..=40).map(|k| 0.01 * 2f64.powf(k as f64 * 0.5)).collect();
        let last_nonzero = probes.iter().rposition(|&y| self.value(y) > 0.0);
        let Some(idx) = last_nonzero else {
            return Err(Error::EmptyShape);
        };
        if probes[idx] < PROBE_LIMIT * 0.5 {
            // v vanishes identically beyond some radius: locate it
            let (mut lo, mut hi) = (probes[idx], probes[idx + 1]);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if self.value(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-14 * hi {
                    break;
                }
            }
            let peak = probes.iter().map(|&y| self.value(y)).fold(0.0, f64::max);
            if self.value(lo) < 1e-200 * peak {
                // underflow of a rapidly decaying tail, not a true edge
                return Ok(Support::Infinite {
                    decay: Decay::Exponential,
                });
            }
            return Ok(Support::Finite { y_max: snap_decimal(hi) });
        }
        let exponent = |a: f64| -(self.value(2.0 * a) / self.value(a)).log2();
        let (m1, m2) = (exponent(1.0e3), exponent(2.0e3));
        let decay = if m1.is_finite() && m2.is_finite() && (m1 - m2).abs() < 0.05 * m2.abs() {
            Decay::Power { exponent: m2 }
        } else {
            Decay::Exponential
        };
        Ok(Support::Infinite { decay })
    }

    /// Jump locations found by refining large sample differences.
    fn detect_jumps(&self, end: f64) -> Vec<f64> {
        const SAMPLES: usize = 8192;
        let ys: Vec<f64> = (0..=SAMPLES).map(|k| end * k as f64 / SAMPLES as f64).collect();
        let vs: Vec<f64> = ys.iter().map(|&y| self.value(y)).collect();
        let scale = vs.iter().cloned().fold(0.0, f64::max);
        let threshold = 1e-3 * scale;
        let mut jumps = Vec::new();
        for k in 0..SAMPLES {
            if (vs[k + 1] - vs[k]).abs() <= threshold {
                continue;
            }
            let (mut lo, mut hi) = (ys[k], ys[k + 1]);
            let (vlo, vhi) = (vs[k], vs[k + 1]);
            let mut is_jump = true;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let vm = self.value(mid);
                if (vm - vlo).abs() > (vhi - vm).abs() {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo < 1e-13 * end.max(1.0) {
                    break;
                }
            }
            if (self.value(hi) - self.value(lo)).abs() <= threshold {
                is_jump = false;
            }
            if is_jump && lo > 0.0 {
                // snap to short decimals when the jump lands there
                jumps.push(snap_decimal(hi));
            }
        }
        jumps.dedup();
        jumps
    }

    fn sampled_monotone(&self, end: f64, count: usize) -> bool {
        let mut prev = self.value(0.0);
        for k in 1..=count {
            let v = self.value(end * k as f64 / count as f64);
            if v > prev * (1.0 + 1e-14) + 1e-300 {
                return false;
            }
            prev = v;
        }
        true
    }

    /// Checks `v ≥ 0` and, when flagged, monotonicity on a uniform sample.
    pub fn validate_samples(&self, end: f64, count: usize) -> Result<()> {
        for k in 0..=count {
            let y = end * k as f64 / count as f64;
            let v = self.try_value(y)?;
            if v < 0.0 {
                return Err(Error::Evaluation { r: y });
            }
        }
        if self.monotone_nonincreasing && !self.sampled_monotone(end, count) {
            return Err(Error::NotMonotone);
        }
        Ok(())
    }

    /// Smallest `y_max` whose first-moment tail `∫_{y_max}^∞ y v dy` is below
    /// `eps` times `∫_0^{y_max} y v dy`. Finite-support shapes return their
    /// cutoff.
    pub fn tail_cutoff(&self, eps: f64) -> Result<f64> {
        self.tail_cutoff_for(1.0, 1.0, eps)
    }

    /// Tail cutoff driven by the moment integrand `y^a v^p`.
    pub fn tail_cutoff_for(&self, a: f64, p: f64, eps: f64) -> Result<f64> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("tail tolerance {eps}")));
        }
        let decay = match self.support {
            Support::Finite { y_max } => return Ok(y_max),
            Support::Infinite { decay } => decay,
        };
        if let Decay::Power { exponent } = decay {
            if a - exponent * p >= -1.0 {
                return Err(Error::SlowDecay(format!(
                    "y^{a} v^{p} with v ~ y^-{exponent} is not integrable"
                )));
            }
        }
        let integrand = |y: f64| y.powf(a) * self.value(y).powf(p);
        let satisfied = |y: f64| -> Result<bool> {
            let head = self.head_integral(&integrand, y)?;
            let tail = tail_integral(&integrand, y)?;
            Ok(tail < eps * head)
        };
        let mut hi = 1.0;
        while !satisfied(hi)? {
            hi *= 2.0;
            if hi > 1.0e6 {
                return Err(Error::SlowDecay(format!(
                    "tail above {eps:e} at y = {hi:e}"
                )));
            }
        }
        let mut lo = if hi > 1.0 { 0.5 * hi } else { 0.0 };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if satisfied(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-10 * hi {
                break;
            }
        }
        Ok(hi)
    }

    fn head_integral(&self, f: &impl Fn(f64) -> f64, y: f64) -> Result<f64> {
        let mut breaks: Vec<f64> = (1..64).map(|k| y * k as f64 / 64.0).collect();
        breaks.extend(self.discontinuities.iter().copied().filter(|&d| d < y));
        breaks.sort_by(f64::total_cmp);
        let grid = build_grid(y, 16, &breaks)?;
        Ok(grid.sum(&grid.sample(f)?))
    }

    /// `∫_0^∞ y^a v(y)^p dy` on the grid.
    pub fn weighted_moment(&self, a: f64, p: f64, grid: &QuadratureGrid) -> Result<f64> {
        self.check_moment(a, p)?;
        let values = grid.sample(|y| {
            let v = self.value(y);
            if v == 0.0 {
                0.0
            } else {
                y.powf(a) * v.powf(p)
            }
        })?;
        Ok(grid.sum(&values))
    }

    fn check_moment(&self, a: f64, p: f64) -> Result<()> {
        if !(p > 0.0) {
            return Err(Error::InvalidParameter(format!("moment power {p}")));
        }
        if a <= -1.0 && self.value(0.0) > 0.0 {
            return Err(Error::Divergent(format!(
                "∫ y^{a} v^{p} diverges at the origin"
            )));
        }
        if let Support::Infinite {
            decay: Decay::Power { exponent },
        } = self.support
        {
            if a - exponent * p >= -1.0 {
                return Err(Error::Divergent(format!(
                    "∫ y^{a} v^{p} diverges at infinity for v ~ y^-{exponent}"
                )));
            }
        }
        Ok(())
    }
}

/// `∫_y^{10⁴ y} f` on geometrically growing panels.
fn tail_integral(f: &impl Fn(f64) -> f64, y: f64) -> Result<f64> {
    // panels in the shifted variable t = x - y
    let mut breaks = Vec::new();
    let mut edge = y;
    while edge < 1e4 * y {
        edge *= 1.25;
        breaks.push(edge - y);
    }
    let grid = build_grid(*breaks.last().unwrap(), 16, &breaks)?;
    Ok(grid.sum(&grid.sample(|t| f(t + y))?))
}

/// `V(r) = -g s⁻² v(r/s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledPotential {
    pub shape: PotentialShape,
    pub strength: f64,
    pub scale: f64,
}

impl ScaledPotential {
    pub fn new(shape: PotentialShape, strength: f64, scale: f64) -> Result<Self> {
        if !(strength > 0.0) || !(scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "strength {strength} and scale {scale} must be positive"
            )));
        }
        Ok(Self {
            shape,
            strength,
            scale,
        })
    }

    pub fn value(&self, r: f64) -> f64 {
        -self.attractive_magnitude(r)
    }

    /// `|V⁻(r)| = g s⁻² v(r/s)`.
    pub fn attractive_magnitude(&self, r: f64) -> f64 {
        self.strength / (self.scale * self.scale) * self.shape.value(r / self.scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Resolution;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn negative_part_examples() {
        assert_eq!(negative_part(|_| -3.0, 1.0).unwrap(), 3.0);
        assert_eq!(negative_part(|_| 5.0, 2.0).unwrap(), 0.0);
        assert_eq!(negative_part(|r: f64| 1.0 - 2.0 * (-r).exp(), 0.0).unwrap(), 1.0);
        assert_eq!(
            negative_part(|_| f64::NAN, 0.25),
            Err(Error::Evaluation { r: 0.25 })
        );
    }

    #[test]
    fn builtin_values() {
        let sq = builtin_shape("square_well", &[]).unwrap();
        assert_eq!(sq.value(0.5), 1.0);
        assert_eq!(sq.value(2.0), 0.0);
        assert_eq!(sq.discontinuities(), &[1.0]);
        assert!(sq.support().is_finite());
        let exp = builtin_shape("exponential", &[]).unwrap();
        assert_eq!(exp.value(0.0), 1.0);
        let gauss = builtin_shape("gaussian", &[]).unwrap();
        assert!(close(gauss.value(2.0), (-4f64).exp(), 1e-15));
        let ws = builtin_shape("wood_saxon", &[("c", 2.0), ("a", 0.5)]).unwrap();
        assert_eq!(ws.value(2.0), 0.5);
        assert!(BUILTIN_NAMES
            .iter()
            .all(|n| builtin_shape(n, &[]).unwrap().is_monotone_nonincreasing()));
    }

    #[test]
    fn builtin_errors() {
        assert!(matches!(
            builtin_shape("yukawa", &[]),
            Err(Error::UnknownShape(_))
        ));
        assert!(matches!(
            builtin_shape("wood_saxon", &[("a", -1.0)]),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            builtin_shape("exponential", &[("c", 1.0)]),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn tabulated_examples() {
        let t = tabulated_shape(&[(0.0, 1.0), (1.0, 0.0)]).unwrap();
        assert_eq!(t.value(0.0), 1.0);
        assert_eq!(t.value(2.0), 0.0);
        assert!(t.is_monotone_nonincreasing());
        let flat = tabulated_shape(&[(0.0, 1.0), (2.0, 1.0)]).unwrap();
        assert!(flat.is_monotone_nonincreasing());
        assert_eq!(flat.discontinuities(), &[2.0]);
        let bump = tabulated_shape(&[(0.0, 0.5), (1.0, 1.0), (2.0, 0.0)]).unwrap();
        assert!(!bump.is_monotone_nonincreasing());
    }

    #[test]
    fn tabulated_errors() {
        assert!(tabulated_shape(&[(0.0, 1.0)]).is_err());
        assert!(tabulated_shape(&[(1.0, 1.0), (0.5, 0.0)]).is_err());
        assert!(tabulated_shape(&[(0.0, 1.0), (1.0, -0.1)]).is_err());
    }

    #[test]
    fn monotone_cubic_stays_nonnegative_and_monotone() {
        let samples = [(0.0, 3.0), (0.5, 2.9), (1.0, 0.4), (1.2, 0.39), (3.0, 0.0)];
        let t = tabulated_shape(&samples).unwrap();
        t.validate_samples(3.0, 10_000).unwrap();
        for &(y, v) in &samples {
            assert_eq!(t.value(y), v);
        }
    }

    #[test]
    fn table_file_format() {
        let text = "# radius depth\n0 1.0\n  0.5\t0.5  # mid\n\n1 0\n";
        assert_eq!(
            parse_table(text).unwrap(),
            vec![(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)]
        );
        assert!(parse_table("0 1 2\n").is_err());
        assert!(parse_table("0 x\n").is_err());
    }

    #[test]
    fn moments() {
        let res = Resolution::default();
        let sq = builtin_shape("square_well", &[]).unwrap();
        let grid = res.grid(&sq).unwrap();
        assert!(close(sq.weighted_moment(1.0, 1.0, &grid).unwrap(), 0.5, 1e-14));
        let exp = builtin_shape("exponential", &[]).unwrap();
        let grid = res.grid(&exp).unwrap();
        assert!(close(exp.weighted_moment(1.0, 1.0, &grid).unwrap(), 1.0, 1e-9));
        let y_max = exp.tail_cutoff_for(0.0, 0.5, 1e-12).unwrap();
        let grid = crate::quadrature::build_grid(
            y_max,
            24,
            &(1..64).map(|k| y_max * k as f64 / 64.0).collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(close(exp.weighted_moment(0.0, 0.5, &grid).unwrap(), 2.0, 1e-10));
        assert!(matches!(
            sq.weighted_moment(-1.0, 1.0, &grid),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn tail_cutoff_finite_and_exponential() {
        let sq = builtin_shape("square_well", &[]).unwrap();
        assert_eq!(sq.tail_cutoff(1e-8).unwrap(), 1.0);
        let exp = builtin_shape("exponential", &[]).unwrap();
        let y = exp.tail_cutoff(1e-8).unwrap();
        // ∫_Y^∞ y e^{-y} = (1+Y) e^{-Y}; head = 1 - that
        let tail = |y: f64| (1.0 + y) * (-y).exp();
        assert!(tail(y) < 1e-8 * (1.0 - tail(y)) * (1.0 + 1e-6));
        assert!(tail(y * (1.0 - 1e-6)) > 1e-8 * (1.0 - tail(y)));
        assert!(exp.tail_cutoff(0.0).is_err());
    }

    #[test]
    fn expression_shapes_infer_metadata() {
        let sq = expression_shape("theta(1-r)", &[]).unwrap();
        assert_eq!(sq.support(), Support::Finite { y_max: 1.0 });
        assert_eq!(sq.discontinuities(), &[1.0]);
        assert!(sq.is_monotone_nonincreasing());
        let exp = expression_shape("exp(-r)", &[]).unwrap();
        assert_eq!(
            exp.support(),
            Support::Infinite {
                decay: Decay::Exponential
            }
        );
        assert!(exp.discontinuities().is_empty());
        let ws = expression_shape("1/(1+exp((r-c)/a))", &[("c", 1.0), ("a", 0.2)]).unwrap();
        assert!(close(ws.value(1.0), 0.5, 1e-15));
        let power = expression_shape("1/(1+r^4)", &[]).unwrap();
        match power.support() {
            Support::Infinite {
                decay: Decay::Power { exponent },
            } => assert!((exponent - 4.0).abs() < 1e-3),
            other => panic!("{other:?}"),
        }
        let slow = expression_shape("1/(1+r)", &[]).unwrap();
        assert!(matches!(slow.tail_cutoff(1e-6), Err(Error::SlowDecay(_))));
        assert!(expression_shape("exp(-r/b)", &[]).is_err());
        assert!(matches!(expression_shape("0*r", &[]), Err(Error::EmptyShape)));
    }

    #[test]
    fn scaled_potential_sign_convention() {
        let sq = builtin_shape("square_well", &[]).unwrap();
        let pot = ScaledPotential::new(sq, 2.0, 2.0).unwrap();
        assert_eq!(pot.value(1.0), -0.5);
        assert_eq!(pot.attractive_magnitude(3.0), 0.0);
        assert!(ScaledPotential::new(pot.shape.clone(), -1.0, 1.0).is_err());
    }
}
