//! Property checks over randomly generated inputs.

use std::collections::BTreeMap;

use critcoupling::dsl::{parse, BinOp, Expr, Func};
use critcoupling::kernel::build_kernel_matrix;
use critcoupling::potentials::{builtin_shape, tabulated_shape, PotentialShape};
use critcoupling::quadrature::{build_grid, QuadratureGrid};
use proptest::prelude::*;

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0.0f64..1e6).prop_map(Expr::Const),
        Just(Expr::Pi),
        Just(Expr::Var),
        prop_oneof![Just("a"), Just("depth"), Just("k_2")].prop_map(|s| Expr::Param(s.to_string())),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (
                prop_oneof![
                    Just(BinOp::Add),
                    Just(BinOp::Sub),
                    Just(BinOp::Mul),
                    Just(BinOp::Div),
                    Just(BinOp::Pow)
                ],
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, a, b)| Expr::Binary(op, Box::new(a), Box::new(b))),
            (
                prop_oneof![
                    Just(Func::Exp),
                    Just(Func::Log),
                    Just(Func::Sqrt),
                    Just(Func::Abs),
                    Just(Func::Theta)
                ],
                inner.clone()
            )
                .prop_map(|(f, a)| Expr::Call(f, vec![a])),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Call(Func::Pow, vec![a, b])),
        ]
    })
}

fn builtin_strategy() -> impl Strategy<Value = PotentialShape> {
    prop_oneof![
        Just(builtin_shape("square_well", &[]).unwrap()),
        Just(builtin_shape("exponential", &[]).unwrap()),
        Just(builtin_shape("gaussian", &[]).unwrap()),
        (0.5f64..3.0, 0.05f64..1.0)
            .prop_map(|(c, a)| builtin_shape("wood_saxon", &[("c", c), ("a", a)]).unwrap()),
    ]
}

/// A small grid that still respects the shape's jumps.
fn small_grid(shape: &PotentialShape) -> QuadratureGrid {
    let y_max = if shape.support().is_finite() { 1.0 } else { 8.0 };
    let jumps: Vec<f64> = shape.discontinuities().iter().copied().filter(|&d| d < y_max).collect();
    build_grid(y_max, 8, &jumps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn expressions_round_trip_through_text(e in expr_strategy()) {
        let text = e.to_string();
        prop_assert_eq!(parse(&text).unwrap(), e);
    }

    #[test]
    fn power_of_r_matches_multiplication(r in 0.0f64..1e3) {
        let v = parse("r^2").unwrap().evaluate(r, &BTreeMap::new()).unwrap();
        prop_assert!((v - r * r).abs() <= 1e-15 * (r * r).max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn builtins_are_nonnegative(shape in builtin_strategy(), y in 0.0f64..50.0) {
        let v = shape.value(y);
        prop_assert!(v >= 0.0 && v.is_finite());
    }

    #[test]
    fn moments_scale_with_amplitude(
        shape in builtin_strategy(),
        c in 0.1f64..10.0,
        a in 0.0f64..3.0,
        p in 1.0f64..4.0,
    ) {
        let grid = small_grid(&shape);
        let base = shape.weighted_moment(a, p, &grid).unwrap();
        let scaled = shape.scaled(c).unwrap().weighted_moment(a, p, &grid).unwrap();
        prop_assert!((scaled / base / c.powf(p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tables_pass_through_their_knots(
        values in prop::collection::vec(0.0f64..5.0, 2..12),
        steps in prop::collection::vec(0.05f64..1.0, 12),
    ) {
        let mut y = 0.0;
        let samples: Vec<(f64, f64)> = values
            .iter()
            .zip(&steps)
            .map(|(&v, &s)| {
                y += s;
                (y, v)
            })
            .collect();
        let shape = tabulated_shape(&samples).unwrap();
        for &(y, v) in &samples[..samples.len() - 1] {
            prop_assert!((shape.value(y) - v).abs() <= 1e-12 * v.max(1.0));
        }
    }

    #[test]
    fn monotone_tables_interpolate_without_overshoot(
        drops in prop::collection::vec(0.0f64..1.0, 2..10),
        t in 0.0f64..1.0,
    ) {
        let mut v = drops.iter().sum::<f64>() + 0.1;
        let samples: Vec<(f64, f64)> = drops
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let sample = (i as f64 + 0.5, v);
                v -= d;
                sample
            })
            .collect();
        let shape = tabulated_shape(&samples).unwrap();
        prop_assert!(shape.is_monotone_nonincreasing());
        for pair in samples.windows(2) {
            let y = pair[0].0 + t * (pair[1].0 - pair[0].0);
            let value = shape.value(y);
            prop_assert!(value <= pair[0].1 + 1e-12 && value >= pair[1].1 - 1e-12);
        }
    }

    #[test]
    fn kernel_invariants(shape in builtin_strategy(), ell in 0u32..6, c in 0.2f64..5.0) {
        let grid = small_grid(&shape);
        let matrix = build_kernel_matrix(&shape, ell, &grid).unwrap();
        prop_assert_eq!(&matrix.entries, &matrix.entries.transpose());

        let traces = matrix.trace_powers(6).unwrap();
        let mu = matrix.dominant_eigenvalue(1e-12).unwrap();
        let roots: Vec<f64> = traces.iter().enumerate().map(|(k, t)| t.powf(1.0 / (k + 1) as f64)).collect();
        for pair in roots.windows(2) {
            prop_assert!(pair[1] <= pair[0] * (1.0 + 1e-12));
        }
        for (k, t) in traces.iter().enumerate() {
            prop_assert!(*t >= mu.powi(k as i32 + 1) * (1.0 - 1e-9));
        }

        let stronger = build_kernel_matrix(&shape.scaled(c).unwrap(), ell, &grid).unwrap();
        let scaled_traces = stronger.trace_powers(6).unwrap();
        for (k, (t, s)) in traces.iter().zip(&scaled_traces).enumerate() {
            prop_assert!((s / t / c.powi(k as i32 + 1) - 1.0).abs() < 1e-11);
        }
        let scaled_mu = stronger.dominant_eigenvalue(1e-12).unwrap();
        prop_assert!((scaled_mu / mu / c - 1.0).abs() < 1e-9);
    }
}
