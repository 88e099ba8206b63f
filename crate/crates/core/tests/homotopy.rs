use proptest::prelude::*;
use vortex_core::homotopy::*;
use vortex_core::par::Parallelism;
use vortex_core::profile::{build_deep_well, ProfileParams};
use vortex_core::sturm::SturmOptions;
use vortex_core::Error;

/// Monotone synthetic curves: `N` rises from `n0` to `n1`, `W` stays near 1.
#[derive(Clone, Copy, Debug)]
struct Synthetic {
    n0: f64,
    n1: f64,
    power: f64,
    w0: f64,
    w_slope: f64,
}

impl Synthetic {
    fn n(&self, theta: f64) -> f64 {
        self.n0 + (self.n1 - self.n0) * theta.powf(self.power)
    }
}

impl GapEvaluator for Synthetic {
    fn eval(&self, theta: f64) -> vortex_core::Result<GapPoint> {
        Ok(GapPoint {
            theta,
            n: self.n(theta),
            w: self.w0 + self.w_slope * theta,
        })
    }
}

fn synthetic() -> impl Strategy<Value = Synthetic> {
    (1.05f64..1.9, 2.3f64..4.0, 0.3f64..3.0, 1.0f64..1.3, 0.0f64..0.5).prop_map(|(n0, n1, power, w0, w_slope)| Synthetic {
        n0,
        n1,
        power,
        w0,
        w_slope,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta0_is_the_last_crossing(s in synthetic(), samples in 5usize..30) {
        let m = 2.0;
        let mut curves = gap_curves(&s, &uniform_theta_grid(samples), Parallelism::Sequential).unwrap();
        let theta0 = find_theta0(&mut curves, m, &s, 1e-9).unwrap();
        prop_assert!((s.n(theta0) - m).abs() < 1e-9);
        prop_assert!(curves.points.iter().filter(|p| p.theta > theta0).all(|p| p.n > m));
        prop_assert!(curves.points.windows(2).all(|w| w[0].theta < w[1].theta));
    }

    #[test]
    fn selected_delta_satisfies_the_chain(s in synthetic(), margin in 0.05f64..0.45, refinements in 0usize..12) {
        let m = 2.0;
        let mut curves = gap_curves(&s, &uniform_theta_grid(21), Parallelism::Sequential).unwrap();
        let theta0 = find_theta0(&mut curves, m, &s, 1e-9).unwrap();
        match select_delta(&mut curves, theta0, m, margin, &s, refinements) {
            Ok(sel) => {
                let p = sel.point;
                prop_assert!(sel.delta > 0.0);
                prop_assert!((p.theta - theta0 - sel.delta).abs() < 1e-15);
                prop_assert!(p.w < m - margin && p.n > m + margin && p.n < m + 1.0 - margin);
                prop_assert_eq!(sel.history.len(), refinements + 1);
                prop_assert!(sel.history.windows(2).all(|w| w[1] <= w[0]));
            }
            Err(Error::NoAdmissibleDelta(_)) => {
                // then no recorded sample right of theta0 meets the chain
                let ok = |p: &GapPoint| p.w < m - margin && p.n > m + margin && p.n < m + 1.0 - margin;
                prop_assert!(!curves.points.iter().any(|p| p.theta > theta0 && ok(p)));
            }
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }

    #[test]
    fn sequential_and_parallel_curves_agree(s in synthetic(), samples in 2usize..40) {
        let grid = uniform_theta_grid(samples);
        let a = gap_curves(&s, &grid, Parallelism::Sequential).unwrap();
        let b = gap_curves(&s, &grid, Parallelism::Rayon).unwrap();
        prop_assert_eq!(a.points, b.points);
    }

    #[test]
    fn blends_along_the_path_stay_in_the_class(alpha in 0.3f64..1.7, b in 1.0f64..200.0, theta in 0.0f64..=1.0) {
        let p0 = build_deep_well(&ProfileParams::baseline(alpha)).unwrap();
        let p1 = build_deep_well(&ProfileParams::baseline(alpha).with_well_strength(b)).unwrap();
        let ev = BlendEvaluator { p0: &p0, p1: &p1, sturm: SturmOptions::default() };
        prop_assert!(ev.profile(theta).is_ok());
    }
}

#[test]
fn out_of_range_margin_is_rejected() {
    let s = Synthetic {
        n0: 1.4,
        n1: 2.6,
        power: 1.0,
        w0: 1.01,
        w_slope: 0.0,
    };
    let mut curves = gap_curves(&s, &uniform_theta_grid(21), Parallelism::Sequential).unwrap();
    for margin in [0.0, 0.5, -0.1, 0.7] {
        assert!(matches!(
            select_delta(&mut curves, 0.5, 2.0, margin, &s, 4),
            Err(Error::InvalidParameter(_))
        ));
    }
}

#[test]
fn crossing_must_be_bracketed() {
    for (n0, n1) in [(2.1, 3.0), (1.2, 1.9)] {
        let s = Synthetic {
            n0,
            n1,
            power: 1.0,
            w0: 1.01,
            w_slope: 0.0,
        };
        let mut curves = gap_curves(&s, &uniform_theta_grid(11), Parallelism::Sequential).unwrap();
        assert!(matches!(find_theta0(&mut curves, 2.0, &s, 1e-9), Err(Error::NotBracketed(_))));
    }
}

#[test]
fn gap_violation_is_reported() {
    let s = Synthetic {
        n0: 1.4,
        n1: 2.6,
        power: 1.0,
        w0: 1.9,
        w_slope: -1.0,
    };
    // W crosses N near theta = 0.5
    let curves = gap_curves(&s, &uniform_theta_grid(11), Parallelism::Sequential).unwrap();
    let v = curves.gap_violation().unwrap();
    assert!(v.w >= v.n);
    assert_eq!(v.theta, 0.0);
    let fine = gap_curves(&Synthetic { w0: 1.2, ..s }, &uniform_theta_grid(11), Parallelism::Sequential).unwrap();
    assert!(fine.gap_violation().is_none());
}

#[test]
fn real_gap_curves_are_increasing_in_theta() {
    let p0 = build_deep_well(&ProfileParams::baseline(1.0)).unwrap();
    let p1 = build_deep_well(&ProfileParams::baseline(1.0).with_well_strength(31.6)).unwrap();
    let ev = BlendEvaluator {
        p0: &p0,
        p1: &p1,
        sturm: SturmOptions::default(),
    };
    let curves = gap_curves(&ev, &uniform_theta_grid(6), Parallelism::default()).unwrap();
    assert!(curves.gap_violation().is_none());
    assert!(curves.points.windows(2).all(|w| w[1].n > w[0].n));
    assert!(curves.points.iter().all(|p| p.w > 1.0));
}
