//! Sequential against rayon on the three data-parallel hot spots: the Sturm
//! refinement ladder, the homotopy gap curves and the dense oracle assembly.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use vortex_core::homotopy::{gap_curves, uniform_theta_grid, BlendEvaluator};
use vortex_core::oracle::{lambda_matrix, oracle_mesh};
use vortex_core::par::Parallelism;
use vortex_core::profile::{build_deep_well, ProfileParams};
use vortex_core::sturm::{critical_wavenumbers, SturmOptions};

const MODES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("rayon", Parallelism::Rayon)];

fn bench_critical_wavenumbers(c: &mut Criterion) {
    let p = build_deep_well(&ProfileParams::baseline(1.0).with_well_strength(31.6)).unwrap();
    let mut g = c.benchmark_group("critical_wavenumbers");
    for (name, mode) in MODES {
        let opts = SturmOptions {
            parallelism: mode,
            ..SturmOptions::default()
        };
        g.bench_function(name, |b| b.iter(|| critical_wavenumbers(&p, &opts).unwrap()));
    }
    g.finish();
}

fn bench_gap_curves(c: &mut Criterion) {
    let p0 = build_deep_well(&ProfileParams::baseline(1.0)).unwrap();
    let p1 = build_deep_well(&ProfileParams::baseline(1.0).with_well_strength(31.6)).unwrap();
    let eval = BlendEvaluator {
        p0: &p0,
        p1: &p1,
        sturm: SturmOptions::default(),
    };
    let grid = uniform_theta_grid(8);
    let mut g = c.benchmark_group("gap_curves");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_function(name, |b| b.iter(|| gap_curves(&eval, &grid, mode).unwrap()));
    }
    g.finish();
}

fn bench_lambda_matrix(c: &mut Criterion) {
    let p = build_deep_well(&ProfileParams::baseline(1.0).with_well_strength(31.6)).unwrap();
    let mut g = c.benchmark_group("lambda_matrix");
    g.sample_size(10);
    for n in [400, 1000] {
        let mesh = oracle_mesh(&p, 1.5, n).unwrap();
        for (name, mode) in MODES {
            g.bench_with_input(BenchmarkId::new(name, n), &mesh, |b, mesh| {
                b.iter(|| lambda_matrix(&p, 1.5, mesh, mode))
            });
        }
    }
    g.finish();
}

criterion_group!(benches, bench_critical_wavenumbers, bench_gap_curves, bench_lambda_matrix);
criterion_main!(benches);
