use maxprod::functions::{abs_diff, scaled, REGISTRY_IDS};
use maxprod::kernel::ratio_row;
use maxprod::moduli::{classical_modulus, weighted_modulus_rho0};
use maxprod::{
    eval_classical, eval_max_product, get_function, interval_index, log_basis_weight,
    max_scale_combine, weight_ratio_m, DEFAULT_TOL,
};
use proptest::prelude::*;

/// `ln b_{n,k}(x)` by summing `ln((n+i)/(i+1))` term by term.
fn log_weight_oracle(n: u64, k: u64, x: f64) -> f64 {
    let lc: f64 = (0..k).map(|i| ((n + i) as f64 / (i + 1) as f64).ln()).sum();
    lc + k as f64 * x.ln() - (n + k) as f64 * x.ln_1p()
}

/// Brute-force `V_n(f)(x)` from the log-weight oracle over `k <= k_max`.
fn brute_max(f: &maxprod::FuncSpec, n: u64, x: f64, k_max: u64) -> f64 {
    let lw: Vec<f64> = (0..=k_max).map(|k| log_weight_oracle(n, k, x)).collect();
    let top = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (0..=k_max)
        .map(|k| (lw[k as usize] - top).exp() * f.eval(k as f64 / n as f64))
        .fold(0.0, f64::max)
}

fn registry_id() -> impl Strategy<Value = &'static str> {
    prop::sample::select(REGISTRY_IDS.to_vec())
}

fn bounded_id() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["e0", "ratio", "expneg", "vee1", "bump"])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn log_weight_matches_oracle(n in 1u64..200, k in 0u64..300, x in 0.01f64..20.0) {
        let got = log_basis_weight(n, k, x).unwrap().log_value();
        let want = log_weight_oracle(n, k, x);
        prop_assert!((got - want).abs() <= 1e-11 * want.abs().max(1.0), "{got} {want}");
    }

    #[test]
    fn ratios_never_exceed_one(n in 2u64..300, x in 0.0f64..30.0, dk in 0u64..400) {
        let j = interval_index(n, x).unwrap();
        let k = j.saturating_sub(200) + dk;
        let m = weight_ratio_m(n, k, j, x).unwrap();
        prop_assert!(m <= 1.0 + 1e-12);
        prop_assert!(m >= 0.0);
    }

    #[test]
    fn ratio_row_agrees_with_pointwise(n in 2u64..64, x in 0.0f64..5.0) {
        let j = interval_index(n, x).unwrap();
        let row = ratio_row(n, j, x, j + 50).unwrap();
        for (k, &m) in row.iter().enumerate() {
            prop_assert_eq!(m, weight_ratio_m(n, k as u64, j, x).unwrap());
        }
    }

    #[test]
    fn operator_matches_brute_force(id in bounded_id(), n in 2u64..64, x in 0.001f64..3.0) {
        let f = get_function(id).unwrap();
        let r = eval_max_product(&f, n, x, DEFAULT_TOL).unwrap();
        let want = brute_max(&f, n, x, 600);
        prop_assert!(r.certified);
        prop_assert!((r.value - want).abs() <= 1e-11 * want.max(1e-300), "{} {}", r.value, want);
    }

    #[test]
    fn operator_stays_within_range_of_bounded_functions(id in bounded_id(), n in 2u64..128, x in 0.0f64..20.0) {
        let f = get_function(id).unwrap();
        let v = eval_max_product(&f, n, x, DEFAULT_TOL).unwrap().value;
        prop_assert!(v >= 0.0);
        prop_assert!(v <= f.sup_bound().unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn pseudo_linearity(f in registry_id(), g in registry_id(),
                        a in 0.0f64..3.0, b in 0.0f64..3.0,
                        n in 3u64..40, x in 0.0f64..4.0) {
        let (f, g) = (get_function(f).unwrap(), get_function(g).unwrap());
        let h = max_scale_combine(&f, &g, a, b).unwrap();
        let lhs = eval_max_product(&h, n, x, DEFAULT_TOL).unwrap().value;
        let vf = eval_max_product(&f, n, x, DEFAULT_TOL).unwrap().value;
        let vg = eval_max_product(&g, n, x, DEFAULT_TOL).unwrap().value;
        let rhs = (a * vf).max(b * vg);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(rhs).max(1e-300));
    }

    #[test]
    fn homogeneity_and_contraction(f in registry_id(), g in registry_id(),
                                   lambda in 0.0f64..5.0, n in 3u64..40, x in 0.0f64..4.0) {
        let (f, g) = (get_function(f).unwrap(), get_function(g).unwrap());
        let vf = eval_max_product(&f, n, x, DEFAULT_TOL).unwrap().value;
        let vg = eval_max_product(&g, n, x, DEFAULT_TOL).unwrap().value;
        let vl = eval_max_product(&scaled(&f, lambda).unwrap(), n, x, DEFAULT_TOL).unwrap().value;
        prop_assert!((vl - lambda * vf).abs() <= 1e-12 * vl.max(lambda * vf).max(1e-300));
        let vd = eval_max_product(&abs_diff(&f, &g), n, x, DEFAULT_TOL).unwrap().value;
        prop_assert!((vf - vg).abs() <= vd + 1e-10 * vd.max(1.0));
    }

    #[test]
    fn tighter_tolerance_moves_values_by_at_most_tol(id in registry_id(), n in 2u64..64, x in 0.0f64..6.0) {
        let f = get_function(id).unwrap();
        let loose = eval_max_product(&f, n, x, 1e-4).unwrap();
        let tight = eval_max_product(&f, n, x, 1e-14).unwrap();
        prop_assert!(tight.value >= loose.value);
        prop_assert!(tight.value - loose.value <= 1e-4 * loose.value);
        prop_assert!(loose.tail_bound <= 1e-4 * loose.value);
    }

    #[test]
    fn classical_preserves_constants_and_linear(n in 1u64..100, x in 0.0f64..10.0) {
        let e0 = eval_classical(&get_function("e0").unwrap(), n, x, 1e-14).unwrap().value;
        let e1 = eval_classical(&get_function("e1").unwrap(), n, x, 1e-14).unwrap().value;
        prop_assert!((e0 - 1.0).abs() <= 1e-10);
        prop_assert!((e1 - x).abs() <= 1e-10 * x.max(1.0));
    }

    #[test]
    fn modulus_is_monotone_in_delta(id in bounded_id(), d in 0.01f64..2.0, extra in 0.0f64..2.0) {
        let f = get_function(id).unwrap();
        let a = classical_modulus(&f, d, 20.0, 1024).unwrap();
        let b = classical_modulus(&f, d + extra, 20.0, 1024).unwrap();
        prop_assert!(b.lower >= a.lower);
        if let (Some(ua), Some(ub)) = (a.upper, b.upper) {
            prop_assert!(ub >= ua - 1e-15);
            prop_assert!(a.lower <= ua + 1e-15);
        }
    }

    #[test]
    fn nested_grids_never_lose_the_lower_bound(id in bounded_id(), d in 0.05f64..3.0, p in 7u32..11) {
        let f = get_function(id).unwrap();
        let coarse = (1usize << p) + 1;
        let fine = 2 * coarse - 1;
        let a = weighted_modulus_rho0(&f, d, 50.0, coarse).unwrap();
        let b = weighted_modulus_rho0(&f, d, 50.0, fine).unwrap();
        prop_assert!(b.lower >= a.lower - 1e-15);
        prop_assert!(b.lower <= b.upper.unwrap() + 1e-15);
        prop_assert!(a.lower <= a.upper.unwrap() + 1e-15);
    }
}
