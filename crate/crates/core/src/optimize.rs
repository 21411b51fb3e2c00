//! One-dimensional maximization: a coarse scan to locate the best bracket,
//! then golden-section refinement inside it.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizer of `f` on `[a, b]` by golden-section search, assuming `f` is
/// unimodal there. Stops once the bracket is shorter than
/// `tol * max(1, |x|)`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..500 {
        if (b - a).abs() <= tol * x1.abs().max(1.0) {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Outcome of [`maximize_scanned`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScanMax {
    pub argmax: f64,
    pub max: f64,
    /// The best scan sample sat on an end of the interval.
    pub at_edge: bool,
    /// Scan samples `(x, f(x))`; non-finite values are kept as `NaN`.
    pub samples: Vec<(f64, f64)>,
}

/// Samples `f` at `count` equispaced points of `[lo, hi]`, then refines the
/// best sample with golden-section search between its neighbours.
/// Non-finite samples are skipped.
pub fn maximize_scanned(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    count: usize,
    tol: f64,
) -> Result<ScanMax> {
    let count = count.max(3);
    let xs: Vec<f64> = (0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .collect();
    let samples: Vec<(f64, f64)> = xs.iter().map(|&x| (x, f(x))).collect();
    let best = samples
        .iter()
        .enumerate()
        .filter(|(_, (_, y))| y.is_finite())
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .ok_or(Error::NoFiniteObjective)?;
    let at_edge = best == 0 || best == count - 1;
    let a = xs[best.saturating_sub(1)];
    let b = xs[(best + 1).min(count - 1)];
    let guarded = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            y
        } else {
            f64::NEG_INFINITY
        }
    };
    let (mut argmax, mut max) = golden_section_max(guarded, a, b, tol);
    if samples[best].1 > max {
        argmax = samples[best].0;
        max = samples[best].1;
    }
    Ok(ScanMax {
        argmax,
        max,
        at_edge,
        samples,
    })
}
