mod common;

use common::{close, naive_f, richardson};
use proptest::prelude::*;
use sosgibbs::{
    inflection_point, kernel_f, kernel_f_derivative, kernel_f_second, map_f, operator_w, reduced_rhs, BranchPattern,
    FieldVector, ModelParams, ReducedField,
};

/// Component `i` of the boundary-law map from the untransformed sums, spins `0..=m`.
fn direct_map(h: &[f64], theta: f64) -> Vec<f64> {
    let m = h.len();
    let full: Vec<f64> = h.iter().copied().chain(std::iter::once(0.0)).collect();
    let z = |i: usize| -> f64 {
        full.iter()
            .enumerate()
            .map(|(j, hj)| theta.powi(i.abs_diff(j) as i32) * hj.exp())
            .sum()
    };
    let den = z(m);
    (0..m).map(|i| (z(i) / den).ln()).collect()
}

fn theta_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![0.05f64..0.999, 1.001f64..20.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn derivative_sign_and_bounds(x in -30.0f64..30.0, theta in theta_strategy()) {
        let f = kernel_f(x, theta).unwrap();
        let lo = (1.0 / theta).ln().min((2.0 * theta / (theta * theta + 1.0)).ln());
        let hi = (1.0 / theta).ln().max((2.0 * theta / (theta * theta + 1.0)).ln());
        prop_assert!(f >= lo - 1e-15 && f <= hi + 1e-15);
        let df = kernel_f_derivative(x, theta).unwrap();
        if theta > 1.0 {
            prop_assert!(df <= 0.0);
        } else {
            prop_assert!(df >= 0.0);
        }
    }

    #[test]
    fn derivatives_match_finite_differences(x in -12.0f64..12.0, theta in theta_strategy()) {
        let df = kernel_f_derivative(x, theta).unwrap();
        let fd = richardson(|t| naive_f(t, theta), x, 1e-3);
        prop_assert!(close(df, fd, 1e-5, 1e-9), "f' {} vs {}", df, fd);
        let d2f = kernel_f_second(x, theta).unwrap();
        let fd2 = richardson(|t| kernel_f_derivative(t, theta).unwrap(), x, 1e-3);
        prop_assert!(close(d2f, fd2, 1e-5, 1e-9), "f'' {} vs {}", d2f, fd2);
    }

    #[test]
    fn kernel_matches_definition(x in -30.0f64..30.0, theta in 0.05f64..20.0) {
        prop_assert!(close(kernel_f(x, theta).unwrap(), naive_f(x, theta), 1e-12, 1e-3));
    }

    #[test]
    fn map_matches_direct_sums(h0 in -20.0f64..20.0, h1 in -20.0f64..20.0, theta in 0.05f64..20.0) {
        let p = ModelParams::three_state(theta, 2).unwrap();
        let got = map_f(&[h0, h1], &p).unwrap();
        let want = direct_map(&[h0, h1], theta);
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-12 * w.abs().max(1.0), "{} vs {}", g, w);
        }
        let f = kernel_f(h1, theta).unwrap();
        let on_set = map_f(&[0.0, h1], &p).unwrap();
        prop_assert!((on_set[1] - f).abs() < 1e-12 * f.abs().max(1.0));
    }
}

#[test]
fn second_derivative_changes_sign_at_inflection() {
    for &theta in &[0.05, 0.3, 0.8, 1.2, 2.0, 7.5, 20.0] {
        let xs = inflection_point(theta).unwrap();
        let (lo, hi) = (xs - 5.0, xs + 5.0);
        let n = 1000;
        let mut changes = Vec::new();
        let mut prev = kernel_f_second(lo, theta).unwrap();
        for i in 1..n {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let cur = kernel_f_second(x, theta).unwrap();
            if (prev < 0.0) != (cur < 0.0) {
                changes.push(x);
            }
            prev = cur;
        }
        assert_eq!(changes.len(), 1, "theta = {theta}");
        assert!((changes[0] - xs).abs() <= (hi - lo) / (n - 1) as f64 + 1e-12);
    }
}

#[test]
fn general_m_map_matches_direct_sums() {
    let hs = [0.3, -1.2, 2.5, 0.0, -4.0];
    for m in 1..=5 {
        for &theta in &[0.2, 1.7, 6.0] {
            let p = ModelParams::new(theta, 3, m).unwrap();
            let got = map_f(&hs[..m], &p).unwrap();
            let want = direct_map(&hs[..m], theta);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-12 * w.abs().max(1.0));
            }
        }
    }
}

#[test]
fn operator_restricts_to_reduced_system() {
    let p = ModelParams::three_state(0.35, 4).unwrap();
    let pat = BranchPattern::new(1, 3, 2, 2);
    for &(h2, l2) in &[(0.1, 2.0), (-3.0, 1.5), (4.0, 4.0)] {
        let r = ReducedField::new(h2, l2).unwrap();
        let full = operator_w(&r.lift(), &pat, &p).unwrap();
        let red = reduced_rhs(&r, &pat, &p).unwrap();
        assert!(full.h1.abs() < 1e-14 && full.l1.abs() < 1e-14);
        assert!((full.h2 - red.h2).abs() < 1e-12 && (full.l2 - red.l2).abs() < 1e-12);
        let f = |x: f64| naive_f(x, 0.35);
        assert!((red.h2 - (f(h2) + 3.0 * f(l2))).abs() < 1e-12);
        assert!((red.l2 - (2.0 * f(h2) + 2.0 * f(l2))).abs() < 1e-12);
    }
    let off = FieldVector::new(0.4, 0.1, -0.2, 0.3).unwrap();
    assert!(!operator_w(&off, &pat, &p).unwrap().on_invariant_set());
}
