use growthlab::checks::CheckReport;
use growthlab::growth::{ball_samples, estimate_rate, log_spaced, GrowthSample, Regime};
use growthlab::params::{comparison_constants, compute_c0, liouville_check, solve_c1, LiouvilleVerdict, Params};
use growthlab::radial::{fd_cross_check, p_laplacian_radial, potential_sharp, ModelManifold, RadialProfile, Warp};
use growthlab::report::csv_string;
use growthlab::sharp::{build_sharp_example, choose_ac};
use growthlab::QuadOptions;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = Params> {
    (1.05f64..6.0, 0.01f64..8.0, 0.0f64..1.0, 0.01f64..20.0, 0.1f64..5.0)
        .prop_map(|(p, dq, mu_frac, lambda, k)| Params::new(p, p - 1.0 + dq, mu_frac * p, lambda, k).unwrap())
}

proptest! {
    #[test]
    fn c1_lies_between_c0_and_c0_plus_p(params in params()) {
        let c0 = compute_c0(&params);
        let c1 = solve_c1(params.p(), c0).unwrap();
        prop_assert!(c0 > 0.0);
        prop_assert!(c0 < c1 && c1 < c0 + params.p(), "{c0} {c1}");
    }

    #[test]
    fn c1_is_increasing_in_c0(p in 1.05f64..6.0, x in 1e-3f64..1e3, factor in 1.001f64..3.0) {
        prop_assert!(solve_c1(p, x).unwrap() < solve_c1(p, x * factor).unwrap());
    }

    #[test]
    fn c1_closed_form_for_p_two(log_c0 in -3.0f64..3.0) {
        let c0 = 10f64.powf(log_c0);
        let want = 1.0 + (1.0 + c0 * c0).sqrt();
        prop_assert!((solve_c1(2.0, c0).unwrap() - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn unrelaxed_c3_is_c0(params in params()) {
        let c0 = compute_c0(&params);
        let cc = comparison_constants(&params, 0.0).unwrap();
        prop_assert!((cc.c3 - c0).abs() <= 1e-12 * c0);
    }

    #[test]
    fn liouville_is_antitone(params in params(), growth in 0.0f64..30.0, drop in 0.0f64..30.0) {
        if liouville_check(&params, growth) == LiouvilleVerdict::ForcedZero {
            prop_assert_eq!(liouville_check(&params, growth - drop), LiouvilleVerdict::ForcedZero);
        }
    }

    #[test]
    fn chosen_ac_is_extremal(p in 1.05f64..5.0, dq in 0.01f64..10.0) {
        let q = p - 1.0 + dq;
        let (a, c) = choose_ac(p, q).unwrap();
        let pc = p / (p - 1.0);
        prop_assert!(c > 0.0 && (p - 1.0) * c + a > 0.0);
        prop_assert!(((p - 1.0) * a - (q - p * (p - 1.0)) * c).abs() <= 1e-12 * c.max(1.0));
        let rhs = p * (q - p + 1.0).powf(1.0 / pc) * c.powf(1.0 / pc) * ((p - 1.0) * c + a).powf(1.0 / p)
            / (p - 1.0).powf(1.0 / pc);
        prop_assert!((a + q * c - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn analytic_derivatives_match_differences(
        family in 0usize..4,
        r in 2.0f64..200.0,
        p in 1.3f64..4.0,
        c in 0.2f64..3.0,
        beta in 0.1f64..1.0,
    ) {
        let (model, profile, p) = match family {
            0 => (ModelManifold::surface(Warp::PowerLaw { exponent: c - 0.5 }), RadialProfile::power_law(c).unwrap(), p),
            1 => (ModelManifold::surface(Warp::ExpPower { a: 0.5 - c, beta }), RadialProfile::exp_power(c, beta).unwrap(), p),
            2 => (ModelManifold::euclidean(3), RadialProfile::affine(c, 1.0).unwrap(), p),
            _ => (ModelManifold::euclidean(2), RadialProfile::p_harmonic_rn(2, 2.0 + p).unwrap(), 2.0 + p),
        };
        let dev = fd_cross_check(&model, &profile, p, r, 1e-5 * r).unwrap();
        prop_assert!(dev <= 1e-6, "family {family}: {dev}");
    }

    #[test]
    fn rn_profile_is_p_harmonic(n in 2u32..6, dp in 0.1f64..4.0, r in 1.5f64..100.0) {
        let p = n as f64 + dp;
        let model = ModelManifold::euclidean(n);
        let profile = RadialProfile::p_harmonic_rn(n, p).unwrap();
        prop_assert!(p_laplacian_radial(&model, &profile, p, r).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn sharp_potential_is_positive_beyond_reported_radius(
        branch in 0usize..3, p in 1.2f64..4.0, mu_frac in 0.0f64..0.9, stretch in 1.0f64..100.0,
    ) {
        let knee = p * (p - 1.0);
        let q = [0.5 * (p - 1.0 + knee), knee, 2.0 * knee][branch];
        let ex = build_sharp_example(p, q, mu_frac * p).unwrap();
        let r = ex.positive_radius * stretch * 1.0001;
        prop_assert!(potential_sharp(p, ex.params.mu(), ex.a, ex.c, r).unwrap() > 0.0);
    }

    #[test]
    fn check_pass_flag_matches_margin(lhs in -1e3f64..1e3, rhs in -1e3f64..1e3, tol in 0.0f64..1.0) {
        let up = CheckReport::at_least("x", lhs, rhs, tol);
        prop_assert_eq!(up.passed, up.margin >= -tol);
        let down = CheckReport::at_most("x", lhs, rhs, tol);
        prop_assert_eq!(down.passed, down.margin >= -tol);
    }

    #[test]
    fn csv_row_count(n in 1usize..40) {
        let rows: Vec<_> = (0..n).map(|i| GrowthSample { r: i as f64 + 1.0, log_g: i as f64, quad_error: 0.0 }).collect();
        prop_assert_eq!(csv_string(&rows).unwrap().lines().count(), n + 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ball_integral_is_monotone(idx in 0usize..27) {
        let (p, q, mu) = growthlab::sharp::verification_grid()[idx];
        let ex = build_sharp_example(p, q, mu).unwrap();
        let radii = log_spaced(ex.t0 * 1.01, 50.0 * ex.t0, 25).unwrap();
        let samples = ball_samples(&ex.model, &ex.profile, q, ex.s0, &radii, &QuadOptions::default()).unwrap();
        for w in samples.windows(2) {
            prop_assert!(w[1].log_g >= w[0].log_g);
        }
    }
}

#[test]
fn rate_error_shrinks_as_the_window_moves_out() {
    let ex = build_sharp_example(2.0, 2.0, 2.0).unwrap();
    let mut last = f64::INFINITY;
    for j in 1..6 {
        let lo = 10f64.powi(j);
        let radii = log_spaced(lo, 10.0 * lo, 6).unwrap();
        let samples = ball_samples(&ex.model, &ex.profile, 2.0, ex.s0, &radii, &QuadOptions::default()).unwrap();
        let err = (estimate_rate(&samples, Regime::Logarithmic).unwrap().rate - ex.expected_rate).abs();
        assert!(err < last, "window [{lo}, {}]: {err} >= {last}", 10.0 * lo);
        last = err;
    }
}
