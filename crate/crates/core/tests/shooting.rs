use num_complex::Complex64;
use proptest::prelude::*;
use vortex_core::profile::{build_deep_well, Profile, ProfileParams};
use vortex_core::shooting::*;
use vortex_core::sturm::{critical_wavenumbers, SturmOptions};

fn deep_well() -> Profile {
    build_deep_well(&ProfileParams::baseline(1.0).with_well_strength(31.6)).unwrap()
}

fn upper_mu() -> impl Strategy<Value = Complex64> {
    (-0.2f64..1.0, 0.005f64..0.5).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn wronskian_is_constant_along_the_line(mu in upper_mu(), m in 1.0f64..6.0) {
        let p = deep_well();
        let c = ProfileCoefficients { profile: &p, mu };
        let ws = wronskian_profile(&c, m, &[0.0, -2.0, 2.0], &ShootingOptions::default()).unwrap();
        let scale = 1.0 + ws[0].norm();
        for w in &ws[1..] {
            prop_assert!((w - ws[0]).norm() < 1e-8 * scale, "{} vs {}", w, ws[0]);
        }
    }

    #[test]
    fn matching_is_conjugate_symmetric(mu in upper_mu(), m in 1.0f64..6.0) {
        let p = deep_well();
        let so = ShootingOptions::default();
        let w = matching(&p, m, mu, &so).unwrap();
        let wc = matching(&p, m, mu.conj(), &so).unwrap();
        prop_assert!((wc - w.conj()).norm() < 1e-9 * (1.0 + w.norm()), "{} vs {}", wc, w.conj());
    }

    #[test]
    fn even_potentials_shoot_symmetrically(depth in 0.1f64..3.0, m in 0.5f64..4.0, im in -0.5f64..0.5) {
        let c = FnCoefficients {
            v: move |t: f64| Complex64::new(-depth, im) / t.cosh().powi(2),
            rates: (2.0, 2.0),
        };
        let so = ShootingOptions::default();
        let minus = shoot_minus(&c, m, &so).unwrap();
        let plus = shoot_plus(&c, m, &so).unwrap();
        prop_assert!((minus.psi - plus.psi).norm() < 1e-8 * minus.psi.norm());
        prop_assert!((minus.dpsi + plus.dpsi).norm() < 1e-8 * (1.0 + minus.dpsi.norm()));
    }
}

#[test]
fn large_wavenumbers_approach_the_born_limit() {
    // W/(-2m) = 1 + (1/2m) int v + O(m^-2)
    let p = deep_well();
    let mu = Complex64::new(0.4, 0.2);
    let c = ProfileCoefficients { profile: &p, mu };
    let (lo, hi, n) = (-40.0, 80.0, 240_001);
    let h = (hi - lo) / (n - 1) as f64;
    let half_int: Complex64 = (0..n)
        .map(|i| {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            c.v(lo + i as f64 * h) * (w * h)
        })
        .sum::<Complex64>()
        * 0.5;
    let so = ShootingOptions::default();
    let errs: Vec<f64> = [10.0, 20.0, 40.0]
        .iter()
        .map(|&m| ((matching(&p, m, mu, &so).unwrap() - 1.0) * m - half_int).norm())
        .collect();
    assert!(errs[1] < 0.6 * errs[0] && errs[2] < 0.6 * errs[1], "{errs:?}");
    assert!(errs[2] < 0.05 * half_int.norm(), "{errs:?}");
}

#[test]
fn branch_satisfies_the_eigenpair_identities() {
    let p = deep_well();
    let crit = critical_wavenumbers(&p, &SturmOptions::default()).unwrap();
    let br = trace_branch(&p, &crit, &BranchOptions::default()).unwrap();
    assert!(br.samples.len() > 20);
    for s in &br.samples {
        assert!(s.mu.im > 0.0);
        assert!(s.residuals.imag_identity.abs() < 1e-6, "m = {}: {:e}", s.m, s.residuals.imag_identity);
        assert!(s.residuals.potential_error() < 1e-5, "m = {}: {}", s.m, s.residuals.potential_integral);
    }
    // strictly decreasing m
    assert!(br.samples.windows(2).all(|w| w[1].m < w[0].m));
    let (oa, ob) = (p.omega(p.params.a), p.omega(p.params.b));
    assert!((br.endpoint_a - oa).norm() < 1e-2 * oa, "{} vs {oa}", br.endpoint_a);
    assert!((br.endpoint_b - ob).norm() < 1e-2 * ob, "{} vs {ob}", br.endpoint_b);

    // the slope formula, away from the steep approach to m_b
    let width = br.m_a - br.m_b;
    let checks: Vec<_> = derivative_checks(&br)
        .into_iter()
        .filter(|c| c.m > br.m_b + 0.15 * width && c.m < br.m_a - 0.05 * width)
        .collect();
    assert!(checks.len() > 10);
    for c in &checks {
        assert!(c.relative_error < 1e-3, "m = {}: {:e}", c.m, c.relative_error);
    }
}

#[test]
fn eigenvalue_is_reproducible_from_random_seeds() {
    let p = deep_well();
    let m = 2.0;
    let reference = find_eigenvalue(&p, m, Complex64::new(0.45, 0.02), &RootOptions::default()).unwrap();
    let box_ = Contour::enclosing(&p, m, 1e-3 * p.omega_inf());
    let mut rng = 0x2545_f491_4f6c_dd1d_u64;
    let mut next = || {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        (rng >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..5 {
        // seeds near the critical values, where the local iteration is meant to start
        let seed = Complex64::new(
            0.8 * reference.mu.re + 0.4 * reference.mu.re * next(),
            box_.im_lo + 0.05 * next(),
        );
        let pair = find_eigenvalue(&p, m, seed, &RootOptions::default()).unwrap();
        assert!((pair.mu - reference.mu).norm() < 1e-8, "seed {seed}: {} vs {}", pair.mu, reference.mu);
    }
}

#[test]
fn no_unstable_modes_at_large_wavenumbers() {
    let p = deep_well();
    let crit = critical_wavenumbers(&p, &SturmOptions::default()).unwrap();
    let top = crit.m_a.ceil();
    for m in [top + 1.0, 2.0 * top] {
        let contour = Contour::enclosing(&p, m, 1e-3 * p.omega_inf());
        let cert = scan_no_eigenvalue(&p, m, &contour, &ScanOptions::default()).unwrap();
        assert!(cert.certifies_empty(), "m = {m}: winding {}", cert.winding);
        assert!(cert.quadrature_error < 0.1);
    }
    // and exactly one inside the window
    let m = 0.5 * (crit.m_a + crit.m_b);
    let contour = Contour::enclosing(&p, m, 1e-3 * p.omega_inf());
    let cert = scan_no_eigenvalue(&p, m, &contour, &ScanOptions::default()).unwrap();
    assert_eq!(cert.winding, 1);
}
