use proptest::prelude::*;
use vortex_core::profile::*;

fn grid(p: &Profile, n: usize) -> impl Iterator<Item = f64> {
    let (lo, hi) = (p.params.log_m1 - 4.0, p.params.log_m + 6.0);
    (0..=n).map(move |i| lo + (hi - lo) * i as f64 / n as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constructed_profiles_are_in_the_class(alpha in 0.1f64..1.9, b in prop_oneof![Just(0.0), 0.0f64..1000.0]) {
        let p = build_deep_well(&ProfileParams::baseline(alpha).with_well_strength(b)).unwrap();
        let report = validate_class_c(&p);
        prop_assert!(report.passed(), "{:?}", report.first_failure());
        for t in grid(&p, 4000) {
            prop_assert!(p.weighted_area(t) < 0.0, "weighted area at {}", t);
            prop_assert!(p.omega_prime(t) < 0.0, "Omega' at {}", t);
        }
    }

    #[test]
    fn a_is_the_second_order_combination_of_omega(alpha in 0.1f64..1.9, b in 0.0f64..300.0) {
        let p = build_deep_well(&ProfileParams::baseline(alpha).with_well_strength(b)).unwrap();
        let h = 1e-3;
        // Richardson-combined central differences, fourth order
        let comb = |t: f64, h: f64| {
            let d1 = (p.omega(t + h) - p.omega(t - h)) / (2.0 * h);
            let d2 = (p.omega(t + h) - 2.0 * p.omega(t) + p.omega(t - h)) / (h * h);
            d2 + 2.0 * d1
        };
        for t in grid(&p, 997) {
            let fd = (4.0 * comb(t, 0.5 * h) - comb(t, h)) / 3.0;
            prop_assert!((fd - p.a(t)).abs() < 1e-5 * (1.0 + p.a(t).abs()), "t = {}: {} vs {}", t, fd, p.a(t));
            // G = 2 Omega + Omega' and G' = A
            prop_assert!((p.g(t) - 2.0 * p.omega(t) - p.omega_prime(t)).abs() < 1e-9 * (1.0 + p.g(t).abs()));
            // A is only C2 across the knots, so keep the step small
            let k = 1e-4;
            let dg = (8.0 * (p.g(t + k) - p.g(t - k)) - p.g(t + 2.0 * k) + p.g(t - 2.0 * k)) / (12.0 * k);
            prop_assert!((dg - p.a(t)).abs() < 1e-5 * (1.0 + p.a(t).abs()));
        }
    }

    #[test]
    fn blend_is_linear_in_a(alpha in 0.1f64..1.9, b in 1.0f64..500.0, theta in 0.0f64..=1.0) {
        let p0 = build_deep_well(&ProfileParams::baseline(alpha)).unwrap();
        let p1 = build_deep_well(&ProfileParams::baseline(alpha).with_well_strength(b)).unwrap();
        let pt = blend(&p0, &p1, theta).unwrap();
        for t in grid(&p0, 500) {
            let want = theta * p1.a(t) + (1.0 - theta) * p0.a(t);
            prop_assert!((pt.a(t) - want).abs() <= 1e-12 * (1.0 + p0.a(t).abs() + p1.a(t).abs()));
            let want = theta * p1.omega(t) + (1.0 - theta) * p0.omega(t);
            prop_assert!((pt.omega(t) - want).abs() <= 1e-11 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn left_tail_is_exact(alpha in 0.1f64..1.9, b in 0.0f64..500.0, s in 0.0f64..1.0) {
        let p = build_deep_well(&ProfileParams::baseline(alpha).with_well_strength(b)).unwrap();
        let t = p.params.log_m1 - 12.0 * s;
        let c0 = p.params.c0;
        prop_assert!((p.omega(t) - (p.omega_inf() - c0 * (2.0 * t).exp())).abs() < 1e-13);
        prop_assert!((p.a(t) + 8.0 * c0 * (2.0 * t).exp()).abs() < 1e-13);
    }
}

#[test]
fn right_tail_matches_closed_forms_for_every_constructed_profile() {
    for alpha in [0.5, 1.0, 1.5] {
        for b in [0.0, 31.6, 100.0] {
            let p = build_deep_well(&ProfileParams::baseline(alpha).with_well_strength(b)).unwrap();
            let c = p.tail_constant();
            for k in 0..20 {
                let t = p.params.log_m + 0.5 * k as f64;
                let g = (-alpha * t).exp();
                assert!((p.g(t) - g).abs() <= 1e-14 * g);
                let w = c * alpha * (-2.0 * t).exp() + g / (2.0 - alpha);
                assert!((p.omega(t) - w).abs() <= 1e-12 * w.abs());
            }
        }
    }
}

#[test]
fn deep_wells_keep_two_zeros_of_a() {
    for b in [0.0, 10.0, 100.0, 1000.0] {
        let p = build_deep_well(&ProfileParams::baseline(1.0).with_well_strength(b)).unwrap();
        let report = validate_class_c(&p);
        assert!(report.get(checks::ZERO_COUNT).unwrap().passed, "B = {b}");
        // A < 0 left of a, > 0 between the zeros, < 0 right of b
        assert!(p.a(-0.1) < 0.0 && p.a(0.5) > 0.0 && p.a(1.1) < 0.0, "B = {b}");
        assert!(p.a(0.0).abs() < 1e-12 && p.a(1.0).abs() < 1e-12);
    }
}
