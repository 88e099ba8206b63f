use proptest::prelude::*;
use vortex_core::greens::*;
use vortex_core::grid::GridFunction;
use vortex_core::profile::{build_deep_well, ProfileParams};

fn bump(t: f64, c: f64, w: f64) -> f64 {
    let x = (t - c) / w;
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

/// Sum of smooth bumps, all supported well inside `[-6, 6]`.
fn source(bumps: &[(f64, f64, f64)], dt: f64) -> GridFunction {
    let n = (12.0 / dt).round() as usize + 1;
    GridFunction::sample(-6.0, 6.0, n, |t| bumps.iter().map(|&(c, w, h)| h * bump(t, c, w)).sum())
}

fn residual(m: f64, bumps: &[(f64, f64, f64)], dt: f64) -> (f64, f64) {
    let f = source(bumps, dt);
    let psi = apply_k(m, &f, TailRates::default()).unwrap().psi;
    (second_order_residual(m, &psi, &f).unwrap(), f.max_abs())
}

fn bumps() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((-2.5f64..2.5, 1.2f64..3.0, -1.0f64..1.0), 1..4)
        .prop_filter("nonzero source", |b| b.iter().any(|x| x.2.abs() > 0.1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn greens_identity_is_second_order(b in bumps()) {
        for m in [1.0, 2.0, 5.0] {
            let (e1, scale) = residual(m, &b, 4e-3);
            let (e2, _) = residual(m, &b, 2e-3);
            let (e3, _) = residual(m, &b, 1e-3);
            let order = (e2 / e3).log2();
            prop_assert!(order >= 1.9, "m = {}: order {} ({:e}, {:e}, {:e})", m, order, e1, e2, e3);
            prop_assert!(e3 < 1e-6 * scale.max(1.0), "m = {}: residual {:e} at dt = 1e-3", m, e3);
        }
    }

    #[test]
    fn matrix_and_recursion_agree(b in bumps(), m in 0.5f64..6.0) {
        let f = source(&b, 0.05);
        let psi = apply_k(m, &f, TailRates::default()).unwrap().psi;
        let k = kernel_matrix(m, f.len(), f.dt);
        for (i, row) in k.iter().enumerate() {
            let mv: f64 = row.iter().zip(&f.values).map(|(a, x)| a * x).sum();
            prop_assert!((mv - psi.values[i]).abs() < 1e-12 * (1.0 + psi.max_abs()));
        }
    }
}

#[test]
fn kernel_matrix_is_symmetric_away_from_the_edges() {
    for m in [1.0, 2.0, 5.0] {
        let n = 80;
        let k = kernel_matrix(m, n, 0.1);
        let scale = k[n / 2][n / 2];
        for i in 4..n - 4 {
            for j in 4..n - 4 {
                assert!((k[i][j] - k[j][i]).abs() < 1e-13 * scale, "m = {m}, ({i}, {j})");
            }
        }
    }
}

/// Least-squares slope of `log|v|` against `t`.
fn log_slope(v: &Potential, ts: impl Iterator<Item = f64>) -> f64 {
    let pts: Vec<(f64, f64)> = ts.map(|t| (t, v.real(t).abs().ln())).collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    num / den
}

#[test]
fn critical_potential_decays_on_both_tails() {
    for alpha in [0.5, 1.0, 1.5] {
        for b in [0.0, 100.0] {
            let p = build_deep_well(&ProfileParams::baseline(alpha).with_well_strength(b)).unwrap();
            for d in [Critical::A, Critical::B] {
                let v = Potential::critical(&p, d);
                let left = log_slope(&v, (0..50).map(|i| -25.0 + 0.2 * i as f64));
                let right = log_slope(&v, (0..50).map(|i| 30.0 + 0.4 * i as f64));
                assert!((left - 2.0).abs() < 0.1, "alpha {alpha}, B {b}, {d:?}: left rate {left}");
                assert!((right + alpha).abs() < 0.05 * alpha, "alpha {alpha}, B {b}, {d:?}: right rate {right}");
            }
        }
    }
}

#[test]
fn sampled_potential_matches_pointwise_evaluation() {
    let p = build_deep_well(&ProfileParams::baseline(1.0).with_well_strength(31.6)).unwrap();
    let mu = num_complex::Complex64::new(0.5, 0.01);
    let g = potential_v(&p, SpectralParam::Complex(mu), -10.0, 0.01, 2001).unwrap();
    let v = Potential::new(&p, SpectralParam::Complex(mu)).unwrap();
    for (i, t) in g.times().enumerate() {
        let direct = num_complex::Complex64::new(p.a(t), 0.0) / (p.omega(t) - mu);
        assert!((g.values[i] - direct).norm() <= 1e-14 * direct.norm().max(1e-300));
        assert_eq!(g.values[i], v.eval(t));
    }
}
