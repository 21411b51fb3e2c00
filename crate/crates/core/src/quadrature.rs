//! Composite Gauss–Legendre quadrature on the truncated radial domain.
//!
//! A [`QuadratureGrid`] is a list of panels with the same `p`-point
//! Gauss–Legendre rule mapped onto each. Panel boundaries always include the
//! jump points of the shape, so every integrand that is smooth between jumps
//! is integrated spectrally. Ordered (nested) integrals reuse the same nodes
//! through a per-panel cumulative integration matrix, which integrates the
//! degree `p - 1` interpolant of the inner integrand from the panel start up
//! to each node.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::potentials::PotentialShape;

/// `n`-point Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let values = legendre_values(n, x);
    let p = values[n];
    let pm1 = if n == 0 { 0.0 } else { values[n - 1] };
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

/// `[P_0(x), ..., P_n(x)]`.
fn legendre_values(n: usize, x: f64) -> Vec<f64> {
    let mut values = Vec::with_capacity(n + 2);
    values.push(1.0);
    if n >= 1 {
        values.push(x);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * values[k] - kf * values[k - 1]) / (kf + 1.0);
        values.push(next);
    }
    values
}

/// Reference rule on `[-1, 1]` shared by every panel of a grid.
#[derive(Debug, Clone)]
pub struct PanelRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `cumulative[i][j]`: weight of node `j` in `∫_{-1}^{x_i} f`.
    cumulative: Vec<Vec<f64>>,
}

impl PanelRule {
    pub fn new(points: usize) -> Self {
        let (nodes, weights) = gauss_legendre(points);
        // Expand the interpolant in Legendre polynomials (exact discrete
        // orthogonality for degree < p) and integrate term by term using
        // ∫_{-1}^{x} P_k = (P_{k+1} - P_{k-1}) / (2k + 1).
        let at_nodes: Vec<Vec<f64>> = nodes.iter().map(|&x| legendre_values(points, x)).collect();
        let cumulative = (0..points)
            .map(|i| {
                let pi = &at_nodes[i];
                let xi = nodes[i];
                (0..points)
                    .map(|j| {
                        let pj = &at_nodes[j];
                        let mut s = 0.5 * (xi + 1.0);
                        for k in 1..points {
                            s += 0.5 * pj[k] * (pi[k + 1] - pi[k - 1]);
                        }
                        weights[j] * s
                    })
                    .collect()
            })
            .collect();
        Self {
            nodes,
            weights,
            cumulative,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Composite Gauss–Legendre grid on `[0, y_max]`.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    boundaries: Vec<f64>,
    rule: Arc<PanelRule>,
}

/// Builds the composite rule with one Gauss–Legendre panel per interval of
/// `panel_boundaries`. `0` and `y_max` are added when absent.
pub fn build_grid(
    y_max: f64,
    points_per_panel: usize,
    panel_boundaries: &[f64],
) -> Result<QuadratureGrid> {
    if !(y_max > 0.0) || !y_max.is_finite() {
        return Err(Error::InvalidGrid(format!("empty domain [0, {y_max}]")));
    }
    if points_per_panel < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 points per panel, got {points_per_panel}"
        )));
    }
    let mut boundaries = vec![0.0];
    for &b in panel_boundaries {
        if !(0.0..=y_max).contains(&b) {
            return Err(Error::InvalidGrid(format!(
                "boundary {b} outside [0, {y_max}]"
            )));
        }
        let last = *boundaries.last().unwrap();
        if b < last {
            return Err(Error::InvalidGrid("boundaries must be sorted".into()));
        }
        if b > last {
            boundaries.push(b);
        }
    }
    if *boundaries.last().unwrap() < y_max {
        boundaries.push(y_max);
    }
    let rule = Arc::new(PanelRule::new(points_per_panel));
    Ok(QuadratureGrid::from_parts(boundaries, rule))
}

impl QuadratureGrid {
    fn from_parts(boundaries: Vec<f64>, rule: Arc<PanelRule>) -> Self {
        let p = rule.len();
        let panels = boundaries.len() - 1;
        let mut nodes = Vec::with_capacity(panels * p);
        let mut weights = Vec::with_capacity(panels * p);
        for pair in boundaries.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                nodes.push(mid + half * x);
                weights.push(half * w);
            }
        }
        Self {
            nodes,
            weights,
            boundaries,
            rule,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn panel_boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn points_per_panel(&self) -> usize {
        self.rule.len()
    }

    pub fn panel_count(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn y_max(&self) -> f64 {
        *self.boundaries.last().unwrap()
    }

    /// Same rule with every panel split in half.
    pub fn bisected(&self) -> Self {
        let mut boundaries = Vec::with_capacity(2 * self.boundaries.len() - 1);
        boundaries.push(self.boundaries[0]);
        for pair in self.boundaries.windows(2) {
            boundaries.push(0.5 * (pair[0] + pair[1]));
            boundaries.push(pair[1]);
        }
        Self::from_parts(boundaries, Arc::clone(&self.rule))
    }

    /// Same panels with a different number of points per panel.
    pub fn with_points_per_panel(&self, points: usize) -> Result<Self> {
        build_grid(self.y_max(), points, &self.boundaries)
    }

    /// Evaluates `f` at every node, rejecting non-finite values.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
        self.nodes
            .iter()
            .map(|&r| {
                let value = f(r);
                if value.is_finite() {
                    Ok(value)
                } else {
                    Err(Error::NonFiniteIntegrand { r })
                }
            })
            .collect()
    }

    /// `Σ w_i f_i` for values already sampled on the nodes.
    pub fn sum(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, f)| w * f).sum()
    }

    /// Running integral `∫_0^{r_i} f` at every node, from sampled values.
    pub fn cumulative(&self, values: &[f64]) -> Vec<f64> {
        let p = self.rule.len();
        let mut out = vec![0.0; values.len()];
        let mut offset = 0.0;
        for (panel, pair) in self.boundaries.windows(2).enumerate() {
            let half = 0.5 * (pair[1] - pair[0]);
            let base = panel * p;
            let local = &values[base..base + p];
            let mut total = 0.0;
            for (i, row) in self.rule.cumulative.iter().enumerate() {
                let partial: f64 = row.iter().zip(local).map(|(s, f)| s * f).sum();
                out[base + i] = offset + half * partial;
            }
            for (w, f) in self.rule.weights.iter().zip(local) {
                total += w * f;
            }
            offset += half * total;
        }
        out
    }
}

/// `Σ w_i f(r_i)`.
pub fn integrate(f: impl Fn(f64) -> f64, grid: &QuadratureGrid) -> Result<f64> {
    Ok(grid.sum(&grid.sample(f)?))
}

impl QuadratureGrid {
    /// `∫_0^x f` by the panel rule mapped onto `[0, x]`.
    fn origin_integral(&self, f: &dyn Fn(f64) -> Result<f64>, x: f64) -> Result<f64> {
        let half = 0.5 * x;
        let mut total = 0.0;
        for (t, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            total += w * f(half * (t + 1.0))?;
        }
        Ok(half * total)
    }

    /// Running integral `∫_0^{r_i} f` at every node. Nodes in the panel
    /// touching the origin integrate `[0, r_i]` directly: interpolating
    /// integrands like `r^{2ℓ+3}` there leaves an absolute error of the
    /// panel's scale, which later `r^{-2ℓ}` factors blow up.
    fn running_integral(&self, f: &dyn Fn(f64) -> Result<f64>) -> Result<Vec<f64>> {
        let values: Vec<f64> = self.nodes.iter().map(|&r| f(r)).collect::<Result<_>>()?;
        let mut out = self.cumulative(&values);
        if self.boundaries[0] == 0.0 {
            for (slot, &r) in out.iter_mut().zip(&self.nodes).take(self.rule.len()) {
                *slot = self.origin_integral(f, r)?;
            }
        }
        Ok(out)
    }
}

fn checked(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> Result<f64> {
    move |r| {
        let value = f(r);
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonFiniteIntegrand { r })
        }
    }
}

/// `∫_0^∞ dr₁ f_outer(r₁) ∫_0^{r₁} dr₂ f_inner(r₂)` on the grid.
pub fn nested_ordered_integral_2(
    f_outer: impl Fn(f64) -> f64,
    f_inner: impl Fn(f64) -> f64,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let inner = grid.running_integral(&checked(f_inner))?;
    let outer = grid.sample(f_outer)?;
    let products: Vec<f64> = outer.iter().zip(&inner).map(|(a, b)| a * b).collect();
    Ok(grid.sum(&products))
}

/// `∫ dr₁ f1(r₁) ∫^{r₁} dr₂ f2(r₂) ∫^{r₂} dr₃ f3(r₃)` over `r₁ > r₂ > r₃`.
pub fn nested_ordered_integral_3(
    f1: impl Fn(f64) -> f64,
    f2: impl Fn(f64) -> f64,
    f3: impl Fn(f64) -> f64,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let f2 = checked(f2);
    let f3 = checked(f3);
    let innermost = |r: f64| grid.origin_integral(&f3, r);
    let middle_at = |r: f64| -> Result<f64> { Ok(f2(r)? * innermost(r)?) };
    let innermost_nodes = grid.running_integral(&f3)?;
    let middle_values: Vec<f64> = grid
        .nodes
        .iter()
        .zip(&innermost_nodes)
        .map(|(&r, c)| Ok(f2(r)? * c))
        .collect::<Result<_>>()?;
    let mut middle = grid.cumulative(&middle_values);
    if grid.boundaries[0] == 0.0 {
        for (slot, &r) in middle.iter_mut().zip(&grid.nodes).take(grid.rule.len()) {
            *slot = grid.origin_integral(&middle_at, r)?;
        }
    }
    let outer = grid.sample(f1)?;
    let products: Vec<f64> = outer.iter().zip(&middle).map(|(a, b)| a * b).collect();
    Ok(grid.sum(&products))
}

/// Grid resolution knobs.
///
/// The domain `[0, y_max]` is cut at the shape's jumps, `panels` uniform
/// panels cover the core `[0, y_core]`, the first panel is split
/// geometrically `origin_panels` times toward the origin, and for
/// infinite-range shapes the tail `[y_core, y_max]` is covered by
/// `tail_panels` panels whose widths double outward.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Resolution {
    pub panels: usize,
    pub points_per_panel: usize,
    pub origin_panels: usize,
    pub tail_panels: usize,
    /// Relative tail tolerance for truncating infinite-range shapes.
    pub tail_eps: f64,
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            panels: 44,
            points_per_panel: 24,
            origin_panels: 8,
            tail_panels: 8,
            tail_eps: 1e-10,
        }
    }
}

/// Relative first-moment tail beyond which the uniform core ends.
const CORE_EPS: f64 = 1e-4;

impl Resolution {
    pub fn validate(&self) -> Result<()> {
        if self.panels == 0 {
            return Err(Error::InvalidGrid("panels must be positive".into()));
        }
        if self.points_per_panel < 2 {
            return Err(Error::InvalidGrid(
                "points_per_panel must be at least 2".into(),
            ));
        }
        if !(self.tail_eps > 0.0 && self.tail_eps < 1.0) {
            return Err(Error::InvalidGrid("tail_eps must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Panel boundaries for `shape` on `[0, y_max]`, with `y_max` set by the
    /// first-moment tail tolerance.
    pub fn layout(&self, shape: &PotentialShape) -> Result<Vec<f64>> {
        self.validate()?;
        let y_max = shape.tail_cutoff(self.tail_eps)?;
        self.layout_to(shape, y_max)
    }

    /// Panel boundaries for `shape` on `[0, y_max]` for a caller-chosen cutoff.
    pub fn layout_to(&self, shape: &PotentialShape, y_max: f64) -> Result<Vec<f64>> {
        self.validate()?;
        if !(y_max > 0.0 && y_max.is_finite()) {
            return Err(Error::InvalidGrid(format!("cutoff {y_max}")));
        }
        let y_core = if shape.support().is_finite() {
            y_max
        } else {
            shape.tail_cutoff(CORE_EPS.max(self.tail_eps))?.min(y_max)
        };
        let jumps: Vec<f64> = shape
            .discontinuities()
            .iter()
            .copied()
            .filter(|&d| d > 0.0 && d < y_max)
            .collect();

        let mut breaks = vec![0.0];
        breaks.extend(jumps.iter().copied().filter(|&d| d < y_core));
        breaks.push(y_core);
        let mut boundaries = vec![0.0];
        for seg in breaks.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let count = ((self.panels as f64 * (b - a) / y_core).round() as usize).max(1);
            for k in 1..=count {
                boundaries.push(a + (b - a) * k as f64 / count as f64);
            }
        }
        // geometric refinement of the first panel toward the origin
        let first = boundaries[1];
        let mut origin: Vec<f64> = (1..=self.origin_panels)
            .rev()
            .map(|k| first * 0.5f64.powi(k as i32))
            .collect();
        origin.insert(0, 0.0);
        boundaries.splice(0..1, origin);

        if y_max > y_core {
            let n = self.tail_panels.max(1);
            let total: f64 = (0..n).map(|k| 2f64.powi(k as i32)).sum();
            let mut edge = y_core;
            for k in 0..n {
                edge += (y_max - y_core) * 2f64.powi(k as i32) / total;
                boundaries.push(if k + 1 == n { y_max } else { edge });
            }
            boundaries.extend(jumps.iter().copied().filter(|&d| d > y_core));
            boundaries.sort_by(f64::total_cmp);
            boundaries.dedup();
        }
        Ok(boundaries)
    }

    /// Grid adapted to `shape`.
    pub fn grid(&self, shape: &PotentialShape) -> Result<QuadratureGrid> {
        let boundaries = self.layout(shape)?;
        let y_max = *boundaries.last().unwrap();
        build_grid(y_max, self.points_per_panel, &boundaries)
    }

    /// Grid adapted to `shape` but truncated at `y_max`.
    pub fn grid_with_cutoff(&self, shape: &PotentialShape, y_max: f64) -> Result<QuadratureGrid> {
        let boundaries = self.layout_to(shape, y_max)?;
        build_grid(y_max, self.points_per_panel, &boundaries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::builtin_shape;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [2, 5, 16, 24, 40] {
            let (x, w) = gauss_legendre(n);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            let sum: f64 = w.iter().sum();
            assert!((sum - 2.0).abs() < 1e-14, "n={n} sum={sum}");
            for deg in 0..(2 * n) {
                let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
                let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!((approx - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn four_point_grid_on_unit_interval() {
        let grid = build_grid(1.0, 4, &[]).unwrap();
        assert_eq!(grid.len(), 4);
        let total: f64 = grid.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!(grid.nodes().iter().all(|&r| r > 0.0 && r < 1.0));
    }

    #[test]
    fn linear_moment_is_exact() {
        let grid = build_grid(1.0, 16, &[]).unwrap();
        assert!((integrate(|y| y, &grid).unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(integrate(|_| 0.0, &grid).unwrap(), 0.0);
        let grid = build_grid(2.0, 8, &[0.5, 1.0]).unwrap();
        assert!((integrate(|_| 1.0, &grid).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn truncated_gamma_integrals() {
        let shape = builtin_shape("exponential", &[]).unwrap();
        let grid = Resolution::default().grid(&shape).unwrap();
        // Γ(3) = 2 minus the truncated tail, bounded by tail_eps
        let value = integrate(|y| y * y * (-y).exp(), &grid).unwrap();
        assert!((value - 2.0).abs() < 1e-8, "{value}");
        let grid = build_grid(40.0, 24, &(1..40).map(f64::from).collect::<Vec<_>>()).unwrap();
        let value = integrate(|y| y * (-y).exp(), &grid).unwrap();
        // ∫_0^40 y e^{-y} = 1 - 41 e^{-40}
        assert!((value - (1.0 - 41.0 * (-40f64).exp())).abs() < 1e-12);
        assert!((value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn non_finite_integrand_reports_node() {
        let grid = build_grid(1.0, 4, &[]).unwrap();
        let err = integrate(|y| if y > 0.5 { f64::NAN } else { 1.0 }, &grid).unwrap_err();
        assert!(matches!(err, Error::NonFiniteIntegrand { r } if r > 0.5));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(build_grid(0.0, 4, &[]).is_err());
        assert!(build_grid(1.0, 1, &[]).is_err());
        assert!(build_grid(1.0, 4, &[0.7, 0.3]).is_err());
        assert!(build_grid(1.0, 4, &[1.5]).is_err());
    }

    #[test]
    fn nested_integrals_match_closed_forms() {
        let grid = build_grid(1.0, 16, &[]).unwrap();
        let two = nested_ordered_integral_2(|_| 1.0, |y| y * y, &grid).unwrap();
        assert!((two - 1.0 / 12.0).abs() < 1e-14);
        let three = nested_ordered_integral_3(|_| 1.0, |_| 1.0, |_| 1.0, &grid).unwrap();
        assert!((three - 1.0 / 6.0).abs() < 1e-14);
        // ∫ dr1 ∫^{r1} r2 dr2 ∫^{r2} r3^2 dr3 = 1/90
        let cyclic = nested_ordered_integral_3(|_| 1.0, |y| y, |y| y * y, &grid).unwrap();
        assert!((cyclic - 1.0 / 90.0).abs() < 1e-14);
        assert_eq!(nested_ordered_integral_2(|_| 0.0, |y| y, &grid).unwrap(), 0.0);
        assert_eq!(
            nested_ordered_integral_3(|y| y, |_| 0.0, |y| y, &grid).unwrap(),
            0.0
        );
    }

    #[test]
    fn cumulative_is_spectral_on_smooth_integrands() {
        let grid = build_grid(3.0, 12, &[1.0, 2.0]).unwrap();
        let values = grid.sample(|y| y.cos()).unwrap();
        let cum = grid.cumulative(&values);
        for (r, c) in grid.nodes().iter().zip(cum) {
            assert!((c - r.sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn bisection_preserves_total_weight() {
        let grid = build_grid(2.5, 6, &[0.25, 1.0]).unwrap();
        let fine = grid.bisected();
        assert_eq!(fine.panel_count(), 2 * grid.panel_count());
        let total: f64 = fine.weights().iter().sum();
        assert!((total - 2.5).abs() < 1e-14);
    }

    #[test]
    fn layout_honors_jumps_and_refines_origin() {
        let res = Resolution::default();
        let sq = builtin_shape("square_well", &[]).unwrap();
        let grid = res.grid(&sq).unwrap();
        assert_eq!(grid.y_max(), 1.0);
        assert_eq!(grid.panel_count(), res.panels + res.origin_panels);
        let b = grid.panel_boundaries();
        assert_eq!(b[1], 1.0 / res.panels as f64 / 256.0);
        let exp = builtin_shape("exponential", &[]).unwrap();
        let grid = res.grid(&exp).unwrap();
        let total: f64 = grid.weights().iter().sum();
        assert!((total / grid.y_max() - 1.0).abs() < 1e-12);
        assert_eq!(grid.panel_count(), res.panels + res.origin_panels + res.tail_panels);
    }

    #[test]
    fn layout_places_interior_jumps_on_boundaries() {
        let shape = crate::potentials::tabulated_shape(&[(0.0, 2.0), (3.0, 1.0)]).unwrap();
        let shape = shape.with_discontinuities(vec![1.3]).unwrap();
        let b = Resolution::default().layout(&shape).unwrap();
        assert!(b.contains(&1.3));
    }
}
