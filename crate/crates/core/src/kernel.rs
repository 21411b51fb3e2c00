//! Zero-energy Green function, the symmetrized Birman–Schwinger kernel and
//! its Nyström matrix.
//!
//! At unit strength the kernel is
//! `k(r, r') = √v(r) · g_ℓ(r, r') · √v(r')` with
//! `g_ℓ(r, r') = r_<^{ℓ+1} r_>^{-ℓ} / (2ℓ + 1)`. On a quadrature grid the
//! matrix `A_ij = √w_i k(r_i, r_j) √w_j` is symmetric and entrywise
//! nonnegative; its eigenvalues `μ` approximate the operator spectrum, and a
//! coupling `g` binds a zero-energy state in the channel when `g μ = 1`.
//!
//! The kernel has a derivative jump along `r = r'`, so point-Nyström
//! quantities converge as `h²` under panel bisection. [`KernelSpectrum`]
//! evaluates on a grid and its bisection and removes that term.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::potentials::PotentialShape;
use crate::quadrature::QuadratureGrid;

/// Angular-momentum channel `ℓ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelSpec {
    pub ell: u32,
}

impl ChannelSpec {
    pub fn new(ell: u32) -> Self {
        Self { ell }
    }

    /// `2ℓ + 1`.
    pub fn degeneracy(self) -> f64 {
        2.0 * self.ell as f64 + 1.0
    }
}

/// Largest trace power accepted by [`KernelMatrix::trace_power`].
pub const MAX_TRACE_POWER: usize = 64;
pub const DEFAULT_EIGEN_TOL: f64 = 1e-10;
const MAX_ITERATIONS: usize = 100_000;
const START_SEED: u64 = 0x5eed_b5c0;

/// `g_ℓ(r, r') = r_<^{ℓ+1} r_>^{-ℓ} / (2ℓ + 1)`.
pub fn green_function(ell: u32, r: f64, rp: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    if !(rp > 0.0) {
        return Err(Error::NonPositiveRadius(rp));
    }
    Ok(green_unchecked(ell, r, rp))
}

#[inline]
fn green_unchecked(ell: u32, r: f64, rp: f64) -> f64 {
    let (lo, hi) = if r < rp { (r, rp) } else { (rp, r) };
    lo * (lo / hi).powi(ell as i32) / (2.0 * ell as f64 + 1.0)
}

/// Unit-strength kernel `√v(r) g_ℓ(r, r') √v(r')`.
pub fn kernel_value(ell: u32, shape: &PotentialShape, r: f64, rp: f64) -> Result<f64> {
    let g = green_function(ell, r, rp)?;
    let vr = shape.try_value(r)?;
    let vrp = shape.try_value(rp)?;
    Ok(vr.sqrt() * g * vrp.sqrt())
}

/// Symmetric Nyström discretization of the unit-strength kernel.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub channel: ChannelSpec,
    pub grid: QuadratureGrid,
    pub entries: DMatrix<f64>,
}

pub fn build_kernel_matrix(
    shape: &PotentialShape,
    ell: u32,
    grid: &QuadratureGrid,
) -> Result<KernelMatrix> {
    let nodes = grid.nodes();
    let values = grid.sample(|r| shape.value(r))?;
    let scale: Vec<f64> = values
        .iter()
        .zip(grid.weights())
        .map(|(v, w)| (v * w).sqrt())
        .collect();
    let n = nodes.len();
    let mut entries = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let a = scale[i] * green_unchecked(ell, nodes[i], nodes[j]) * scale[j];
            entries[(i, j)] = a;
            entries[(j, i)] = a;
        }
    }
    Ok(KernelMatrix {
        channel: ChannelSpec::new(ell),
        grid: grid.clone(),
        entries,
    })
}

impl KernelMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `trace(Aⁿ)` for `1 ≤ n ≤ 64`.
    pub fn trace_power(&self, n: usize) -> Result<f64> {
        Ok(self.trace_powers(n)?[n - 1])
    }

    /// `[trace(A¹), …, trace(A^{n_max})]`.
    ///
    /// Only powers up to `⌈n_max/2⌉` are formed; higher traces use
    /// `trace(A^{a+b}) = Σ_ij (Aᵃ)_ij (Aᵇ)_ij` for symmetric powers.
    pub fn trace_powers(&self, n_max: usize) -> Result<Vec<f64>> {
        if n_max == 0 || n_max > MAX_TRACE_POWER {
            return Err(Error::TraceOrder(n_max));
        }
        let half = n_max.div_ceil(2);
        let mut powers = vec![self.entries.clone()];
        for k in 2..=half {
            let next = if k % 2 == 0 {
                symmetric_product(&powers[k / 2 - 1], &powers[k / 2 - 1])
            } else {
                symmetric_product(&powers[k - 2], &self.entries)
            };
            powers.push(next);
        }
        let mut traces = Vec::with_capacity(n_max);
        traces.push(self.entries.trace());
        for n in 2..=n_max {
            let a = n.div_ceil(2);
            let b = n - a;
            traces.push(powers[a - 1].dot(&powers[b - 1]));
        }
        Ok(traces)
    }

    /// Largest eigenvalue by power iteration from a seeded positive start
    /// vector; stops when successive Rayleigh quotients agree to `tol`
    /// relative.
    pub fn dominant_eigenvalue(&self, tol: f64) -> Result<f64> {
        let n = self.dim();
        if n == 0 || self.entries.iter().all(|&a| a == 0.0) {
            return Err(Error::ZeroKernel);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
        let mut x = DVector::from_fn(n, |_, _| rng.random_range(0.5..1.5));
        x.normalize_mut();
        let mut previous = f64::INFINITY;
        let mut delta = f64::INFINITY;
        for _ in 0..MAX_ITERATIONS {
            let y = &self.entries * &x;
            let rayleigh = x.dot(&y);
            let norm = y.norm();
            if norm == 0.0 {
                return Err(Error::ZeroKernel);
            }
            x = y / norm;
            delta = ((rayleigh - previous) / rayleigh).abs();
            if delta < tol {
                return Ok(rayleigh);
            }
            previous = rayleigh;
        }
        Err(Error::NoConvergence {
            iterations: MAX_ITERATIONS,
            delta,
        })
    }

    /// The `count` largest eigenvalues by block subspace iteration with a
    /// Rayleigh–Ritz projection, in descending order.
    pub fn leading_eigenvalues(&self, count: usize, tol: f64) -> Result<Vec<f64>> {
        let n = self.dim();
        if n == 0 || self.entries.iter().all(|&a| a == 0.0) {
            return Err(Error::ZeroKernel);
        }
        let count = count.min(n);
        let block = (count + 4).min(n);
        let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
        let mut basis = DMatrix::from_fn(n, block, |_, _| rng.random_range(-1.0..1.0));
        let mut previous = vec![f64::INFINITY; count];
        let mut delta = f64::INFINITY;
        for _ in 0..MAX_ITERATIONS / 10 {
            basis = (&self.entries * basis).qr().q();
            let projected = basis.transpose() * &self.entries * &basis;
            let eig = SymmetricEigen::new(0.5 * (&projected + projected.transpose()));
            let mut ritz: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            ritz.sort_by(|a, b| b.total_cmp(a));
            ritz.truncate(count);
            let top = ritz[0].abs().max(f64::MIN_POSITIVE);
            delta = ritz
                .iter()
                .zip(&previous)
                .map(|(a, b)| (a - b).abs() / top)
                .fold(0.0, f64::max);
            if delta < tol {
                return Ok(ritz);
            }
            previous = ritz;
        }
        Err(Error::NoConvergence {
            iterations: MAX_ITERATIONS / 10,
            delta,
        })
    }
}

const TILE: usize = 256;

/// `a·b` for commuting symmetric matrices, whose product is symmetric:
/// only the upper tiles are multiplied and then mirrored.
fn symmetric_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut c = DMatrix::<f64>::zeros(n, n);
    for j0 in (0..n).step_by(TILE) {
        let cols = TILE.min(n - j0);
        let rows = j0 + cols;
        c.view_mut((0, j0), (rows, cols))
            .gemm(1.0, &a.view((0, 0), (rows, n)), &b.view((0, j0), (n, cols)), 0.0);
    }
    for j in 0..n {
        for i in j + 1..n {
            c[(i, j)] = c[(j, i)];
        }
    }
    c
}

/// A quantity computed on a grid and on its bisection, extrapolated to zero
/// panel width under the `h²` error law.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Refined {
    pub coarse: f64,
    pub fine: f64,
}

impl Refined {
    pub fn value(&self) -> f64 {
        (4.0 * self.fine - self.coarse) / 3.0
    }

    /// Relative distance between the extrapolated and the fine value.
    pub fn relative_error(&self) -> f64 {
        let v = self.value();
        ((v - self.fine) / v).abs()
    }
}

/// Trace powers and (optionally) the dominant eigenvalue of the kernel on a
/// grid and on its bisection.
#[derive(Debug, Clone)]
pub struct KernelSpectrum {
    pub channel: ChannelSpec,
    pub coarse_dim: usize,
    traces: Vec<Refined>,
    mu_max: Option<Refined>,
}

impl KernelSpectrum {
    pub fn compute(
        shape: &PotentialShape,
        ell: u32,
        grid: &QuadratureGrid,
        n_max: usize,
        with_eigenvalue: bool,
    ) -> Result<Self> {
        let fine_grid = grid.bisected();
        let (coarse, fine) = rayon::join(
            || Self::level(shape, ell, grid, n_max, with_eigenvalue),
            || Self::level(shape, ell, &fine_grid, n_max, with_eigenvalue),
        );
        let (coarse_traces, coarse_mu) = coarse?;
        let (fine_traces, fine_mu) = fine?;
        let traces = coarse_traces
            .iter()
            .zip(&fine_traces)
            .map(|(&c, &f)| Refined { coarse: c, fine: f })
            .collect();
        let mu_max = match (coarse_mu, fine_mu) {
            (Some(c), Some(f)) => Some(Refined { coarse: c, fine: f }),
            _ => None,
        };
        Ok(Self {
            channel: ChannelSpec::new(ell),
            coarse_dim: grid.len(),
            traces,
            mu_max,
        })
    }

    fn level(
        shape: &PotentialShape,
        ell: u32,
        grid: &QuadratureGrid,
        n_max: usize,
        with_eigenvalue: bool,
    ) -> Result<(Vec<f64>, Option<f64>)> {
        let matrix = build_kernel_matrix(shape, ell, grid)?;
        let traces = if n_max > 0 {
            matrix.trace_powers(n_max)?
        } else {
            Vec::new()
        };
        if traces.first().is_some_and(|&t| t == 0.0) {
            return Err(Error::EmptyShape);
        }
        let mu = if with_eigenvalue {
            Some(matrix.dominant_eigenvalue(DEFAULT_EIGEN_TOL)?)
        } else {
            None
        };
        Ok((traces, mu))
    }

    pub fn max_order(&self) -> usize {
        self.traces.len()
    }

    /// Extrapolated `trace(Kⁿ)` of the integral operator.
    pub fn trace(&self, n: usize) -> Result<Refined> {
        if n == 0 || n > self.traces.len() {
            return Err(Error::TraceOrder(n));
        }
        Ok(self.traces[n - 1])
    }

    pub fn mu_max(&self) -> Option<Refined> {
        self.mu_max
    }
}
