//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any failed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{rngs::StdRng, Rng, SeedableRng};
use vortex_cli::commands::physical_mode;
use vortex_core::greens::{apply_k, second_order_residual, Critical, Potential, TailRates};
use vortex_core::grid::GridFunction;
use vortex_core::homotopy::{half_decade_grid, sweep_well_strength, uniform_theta_grid};
use vortex_core::oracle::{compare_with_oracle, OracleOptions};
use vortex_core::profile::{blend, build_deep_well, Profile, ProfileParams};
use vortex_core::shooting::{
    derivative_checks, find_eigenvalue, scan_no_eigenvalue, trace_branch, BranchOptions, Contour, DispersionBranch,
    RootOptions, ScanOptions, ShootingOptions,
};
use vortex_core::sturm::{
    count_below, critical_test_function, critical_wavenumbers, profile_mesh, rayleigh_quotient_refined,
    CriticalWavenumbers, SturmOptions,
};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

const ALPHAS: [f64; 3] = [0.5, 1.0, 1.5];

/// Output of one end-to-end CLI run.
struct Run {
    alpha: f64,
    dir: PathBuf,
    code: Option<i32>,
    seconds: f64,
}

impl Run {
    fn summary(&self) -> serde_json::Value {
        let text = fs::read_to_string(self.dir.join("summary.json")).unwrap_or_default();
        serde_json::from_str(&text).unwrap_or(serde_json::Value::Null)
    }

    fn profile(&self) -> Result<Profile, String> {
        let text = fs::read_to_string(self.dir.join("profile.json")).map_err(|e| e.to_string())?;
        Profile::from_json(&text).map_err(|e| e.to_string())
    }
}

fn run_cli(alpha: f64, root: &Path) -> Run {
    let dir = root.join(format!("alpha-{alpha}"));
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_vortex"))
        .args(["theorem11", "--alpha", &alpha.to_string(), "--out"])
        .arg(&dir)
        .output()
        .expect("vortex binary runs");
    Run {
        alpha,
        dir,
        code: status.status.code(),
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// The final profile at `alpha = 1` and its window, shared by several criteria.
struct Final {
    p: Profile,
    crit: CriticalWavenumbers,
    m: usize,
    well_strength: f64,
}

fn final_profile(runs: &[Run]) -> Result<Final, String> {
    let run = runs.iter().find(|r| r.alpha == 1.0).ok_or("no alpha = 1 run")?;
    let p = run.profile()?;
    let crit = critical_wavenumbers(&p, &SturmOptions::default()).map_err(|e| e.to_string())?;
    let s = run.summary();
    let m = s["result"]["m"].as_u64().ok_or("summary lacks m")? as usize;
    let well_strength = s["result"]["well_strength"].as_f64().ok_or("summary lacks well_strength")?;
    Ok(Final { p, crit, m, well_strength })
}

// ---------------------------------------------------------------------------

fn bump(t: f64, c: f64, w: f64) -> f64 {
    let x = (t - c) / w;
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

fn greens_identity() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2024);
    let sources: Vec<Vec<(f64, f64, f64)>> = (0..10)
        .map(|_| {
            let k = rng.gen_range(1..4);
            (0..k)
                .map(|_| (rng.gen_range(-2.5..2.5), rng.gen_range(1.2..3.0), rng.gen_range(0.2..1.0)))
                .collect()
        })
        .collect();
    let residual = |m: f64, b: &[(f64, f64, f64)], dt: f64| {
        let n = (12.0 / dt).round() as usize + 1;
        let f = GridFunction::sample(-6.0, 6.0, n, |t| b.iter().map(|&(c, w, h)| h * bump(t, c, w)).sum());
        let psi = apply_k(m, &f, TailRates::default()).unwrap().psi;
        second_order_residual(m, &psi, &f).unwrap() / f.max_abs()
    };
    let (mut worst_order, mut worst_res) = (f64::INFINITY, 0.0f64);
    for m in [1.0, 2.0, 5.0] {
        for b in &sources {
            let e2 = residual(m, b, 2e-3);
            let e3 = residual(m, b, 1e-3);
            worst_order = worst_order.min((e2 / e3).log2());
            worst_res = worst_res.max(e3);
        }
    }
    ensure!(worst_order >= 1.9, "observed order {worst_order:.3} < 1.9");
    ensure!(worst_res < 1e-6, "relative residual {worst_res:e} at dt = 1e-3");
    Ok(format!("min order {worst_order:.3}, max residual {worst_res:.2e} at dt = 1e-3"))
}

/// Baseline, swept deep wells, blends along the homotopy and the final profiles.
fn constructed_profiles(runs: &[Run], fin: &Final) -> Result<Vec<(String, Profile)>, String> {
    let mut out = Vec::new();
    let base = build_deep_well(&ProfileParams::baseline(1.0)).map_err(|e| e.to_string())?;
    let deep = build_deep_well(&ProfileParams::baseline(1.0).with_well_strength(fin.well_strength))
        .map_err(|e| e.to_string())?;
    for b in half_decade_grid(fin.well_strength) {
        let p = build_deep_well(&ProfileParams::baseline(1.0).with_well_strength(b)).map_err(|e| e.to_string())?;
        out.push((format!("B = {b}"), p));
    }
    for theta in uniform_theta_grid(6) {
        out.push((format!("blend {theta:.2}"), blend(&base, &deep, theta).map_err(|e| e.to_string())?));
    }
    for r in runs {
        out.push((format!("final alpha = {}", r.alpha), r.profile()?));
    }
    Ok(out)
}

fn rayleigh_identity(runs: &[Run], fin: &Final) -> Outcome {
    let opts = SturmOptions::default();
    let profiles = constructed_profiles(runs, fin)?;
    let mut worst = 0.0f64;
    for (name, p) in &profiles {
        let mesh = profile_mesh(p, &opts).map_err(|e| e.to_string())?;
        for d in [Critical::A, Critical::B] {
            let v = Potential::critical(p, d);
            let q = rayleigh_quotient_refined(|t| v.real(t), critical_test_function(p, d), &mesh)
                .map_err(|e| e.to_string())?;
            ensure!((q + 1.0).abs() < 1e-6, "{name}, {d:?}: quotient {q}");
            worst = worst.max((q + 1.0).abs());
        }
        let c = critical_wavenumbers(p, &opts).map_err(|e| e.to_string())?;
        ensure!(c.m_a > 1.0 && c.m_b > 1.0, "{name}: m_a = {}, m_b = {}", c.m_a, c.m_b);
    }
    Ok(format!("{} profiles, max |q + 1| = {worst:.1e}, m_a, m_b > 1", profiles.len()))
}

fn single_bound_state(runs: &[Run], fin: &Final) -> Outcome {
    let opts = SturmOptions::default();
    let mut list = vec![
        ("baseline".to_string(), build_deep_well(&ProfileParams::baseline(1.0)).map_err(|e| e.to_string())?),
        (
            format!("deep well B = {}", fin.well_strength),
            build_deep_well(&ProfileParams::baseline(1.0).with_well_strength(fin.well_strength))
                .map_err(|e| e.to_string())?,
        ),
    ];
    for r in runs {
        list.push((format!("final alpha = {}", r.alpha), r.profile()?));
    }
    for (name, p) in &list {
        let mesh = profile_mesh(p, &opts).map_err(|e| e.to_string())?;
        let fine = mesh.refine();
        for d in [Critical::A, Critical::B] {
            let v = Potential::critical(p, d);
            let n = count_below(|t| v.real(t), &mesh, -1.0).map_err(|e| e.to_string())?;
            let nf = count_below(|t| v.real(t), &fine, -1.0).map_err(|e| e.to_string())?;
            ensure!(n == 1 && nf == 1, "{name}, {d:?}: counts {n} and {nf} after refinement");
        }
    }
    Ok(format!("count 1 at a and b on {} profiles, stable under refinement", list.len()))
}

fn well_sweep() -> Outcome {
    let base = ProfileParams::baseline(1.0);
    let sweep = sweep_well_strength(&base, &half_decade_grid(1e4), 4.0, false, &SturmOptions::default())
        .map_err(|e| e.to_string())?;
    let star = sweep.well_strength.ok_or("no swept strength reaches N = 4")?;
    let at_star = sweep.points.iter().find(|s| s.well_strength == star).unwrap();
    ensure!(at_star.bottom <= -16.0, "bottom {} at B* = {star}", at_star.bottom);
    // trend over the positive strengths
    let pts: Vec<_> = sweep.points.iter().filter(|s| s.well_strength > 0.0).collect();
    let decades = (pts.last().unwrap().well_strength / pts[0].well_strength).log10();
    ensure!(decades >= 3.0, "only {decades:.1} decades swept");
    for w in pts.windows(2) {
        ensure!(
            w[1].bump_energy < w[0].bump_energy,
            "bump energy rises from {} to {} between B = {} and {}",
            w[0].bump_energy,
            w[1].bump_energy,
            w[0].well_strength,
            w[1].well_strength
        );
    }
    // unbounded: the drop per decade does not shrink
    let per_decade: Vec<f64> = pts
        .windows(3)
        .step_by(2)
        .map(|w| w[0].bump_energy - w[2].bump_energy)
        .collect();
    ensure!(
        per_decade.windows(2).all(|d| d[1] >= 0.9 * d[0]),
        "decrease per decade shrinks: {per_decade:?}"
    );
    Ok(format!(
        "B* = {star} with bottom {:.2}; bump energy {:.3e} -> {:.3e} over {decades:.1} decades",
        at_star.bottom,
        pts[0].bump_energy,
        pts.last().unwrap().bump_energy
    ))
}

fn branch(fin: &Final) -> Result<DispersionBranch, String> {
    trace_branch(&fin.p, &fin.crit, &BranchOptions::default()).map_err(|e| e.to_string())
}

/// Three interior wavenumbers at which `Im mu` clears the contour floor comfortably.
fn interior_ms(br: &DispersionBranch, floor: f64) -> Vec<f64> {
    let good: Vec<f64> = br
        .samples
        .iter()
        .filter(|s| s.mu.im > 2.0 * floor && s.m > br.m_b && s.m < br.m_a)
        .map(|s| s.m)
        .collect();
    if good.len() < 3 {
        return good;
    }
    let (lo, hi) = (good.iter().cloned().fold(f64::INFINITY, f64::min), good.iter().cloned().fold(0.0, f64::max));
    [0.2, 0.5, 0.8].iter().map(|f| lo + f * (hi - lo)).collect()
}

fn branch_structure(fin: &Final, br: &DispersionBranch) -> Outcome {
    let p = &fin.p;
    let delta_min = 1e-3 * p.omega_inf();
    let scan = |m: f64| {
        let c = Contour::enclosing(p, m, delta_min);
        scan_no_eigenvalue(p, m, &c, &ScanOptions::default()).map_err(|e| format!("m = {m}: {e}"))
    };
    let inside = interior_ms(br, delta_min);
    ensure!(inside.len() == 3, "fewer than 3 interior samples with Im mu > 2 delta_min");
    let mut caveats = 0;
    for &m in &inside {
        let c = scan(m)?;
        ensure!(c.winding == 1, "winding {} at interior m = {m:.4}", c.winding);
        caveats += usize::from(!c.caveat.is_empty());
    }
    let mf = fin.m as f64;
    let mut outside = vec![fin.crit.m_a + 0.5, mf + 1.0, mf + 2.0, mf + 3.0, 2.0 * fin.crit.m_a.ceil()];
    if fin.crit.m_b > 1.2 {
        outside.push((fin.crit.m_b - 0.2).max(1.0));
    }
    for &m in &outside {
        let c = scan(m)?;
        ensure!(c.winding == 0, "winding {} at m = {m:.4}", c.winding);
        caveats += usize::from(!c.caveat.is_empty());
    }
    let total = inside.len() + outside.len();
    ensure!(caveats == total, "{} certificates lack the delta_min caveat", total - caveats);
    let below = if fin.crit.m_b > 1.2 { "" } else { " (m_b <= 1.2, no scan below the window)" };
    Ok(format!(
        "winding 1 at m = {:.3}, {:.3}, {:.3}; winding 0 at {} exterior m{below}",
        inside[0],
        inside[1],
        inside[2],
        outside.len()
    ))
}

fn endpoints(fin: &Final, br: &DispersionBranch) -> Outcome {
    let p = &fin.p;
    let (wa, wb) = (p.omega(p.params.a), p.omega(p.params.b));
    let ea = (br.endpoint_a - wa).norm();
    let eb = (br.endpoint_b - wb).norm();
    ensure!(ea < 1e-2 * wa, "|mu(m_a-) - Omega(a)| = {ea:e}");
    ensure!(eb < 1e-2 * wb, "|mu(m_b+) - Omega(b)| = {eb:e}");
    let interior: Vec<_> = br.samples.iter().filter(|s| s.m > br.m_b && s.m < br.m_a).collect();
    ensure!(interior.iter().all(|s| s.mu.im > 0.0), "Im mu <= 0 at an interior sample");
    Ok(format!(
        "endpoint errors {:.1e} Omega(a), {:.1e} Omega(b); Im mu > 0 at {} samples",
        ea / wa,
        eb / wb,
        interior.len()
    ))
}

fn residuals(br: &DispersionBranch, runs: &[Run]) -> Outcome {
    let mut worst = (0.0f64, 0.0f64, f64::INFINITY);
    let mut count = 0;
    let mut accept = |r: &vortex_core::shooting::Residuals, what: &str| -> Result<(), String> {
        ensure!(r.imag_identity < 1e-6, "{what}: imaginary identity {:e}", r.imag_identity);
        ensure!(r.potential_error() < 1e-5, "{what}: potential integral error {:e}", r.potential_error());
        ensure!(r.transversality.norm() > 1e-6, "{what}: transversality {:e}", r.transversality.norm());
        worst = (
            worst.0.max(r.imag_identity),
            worst.1.max(r.potential_error()),
            worst.2.min(r.transversality.norm()),
        );
        count += 1;
        Ok(())
    };
    for s in &br.samples {
        accept(&s.residuals, &format!("branch m = {:.4}", s.m))?;
    }
    // the certified eigenpair of every end-to-end run
    for r in runs {
        let text = fs::read_to_string(r.dir.join("certificates.json")).map_err(|e| e.to_string())?;
        let cert: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        let res: vortex_core::shooting::Residuals =
            serde_json::from_value(cert["residuals"].clone()).map_err(|e| e.to_string())?;
        accept(&res, &format!("certified eigenpair, alpha = {}", r.alpha))?;
    }
    Ok(format!(
        "{count} eigenpairs: imag identity <= {:.1e}, potential error <= {:.1e}, transversality >= {:.2e}",
        worst.0, worst.1, worst.2
    ))
}

fn oracle(fin: &Final, br: &DispersionBranch) -> Outcome {
    let p = &fin.p;
    let opts = OracleOptions {
        n: 2000,
        ..OracleOptions::default()
    };
    let mut worst = 0.0f64;
    let ms = interior_ms(br, 1e-3 * p.omega_inf());
    ensure!(ms.len() == 3, "fewer than 3 interior samples");
    let mut seed = br.samples[br.samples.len() / 2].mu;
    for m in ms {
        let near = br
            .samples
            .iter()
            .min_by(|a, b| (a.m - m).abs().partial_cmp(&(b.m - m).abs()).unwrap())
            .unwrap();
        seed = if near.mu.im > 0.0 { near.mu + near.dmu_dm * (m - near.m) } else { seed };
        let pair = find_eigenvalue(p, m, seed, &RootOptions::default()).map_err(|e| format!("m = {m}: {e}"))?;
        let c = compare_with_oracle(p, m, pair.mu, &opts).map_err(|e| format!("m = {m}: {e}"))?;
        let err = (c.fine - pair.mu).norm();
        ensure!(err < 1e-4, "m = {m:.4}: oracle {} vs shooting {}", c.fine, pair.mu);
        worst = worst.max(err);
    }
    Ok(format!("max |mu_oracle - mu_shooting| = {worst:.1e} at n = 2000"))
}

fn derivative(br: &DispersionBranch) -> Outcome {
    let width = br.m_a - br.m_b;
    let checks: Vec<_> = derivative_checks(br)
        .into_iter()
        .filter(|c| c.m > br.m_b + 0.15 * width && c.m < br.m_a - 0.05 * width)
        .collect();
    ensure!(checks.len() >= 5, "only {} interior samples", checks.len());
    // five samples spread across the interior
    let picks: Vec<_> = (0..5).map(|k| &checks[k * (checks.len() - 1) / 4]).collect();
    let mut worst = 0.0f64;
    for c in &picks {
        ensure!(c.relative_error < 1e-3, "m = {:.4}: relative error {:e}", c.m, c.relative_error);
        worst = worst.max(c.relative_error);
    }
    let all = checks.iter().map(|c| c.relative_error).fold(0.0, f64::max);
    Ok(format!("5 samples, max relative error {worst:.1e} (all {} interior: {all:.1e})", checks.len()))
}

fn physical(fin: &Final, runs: &[Run]) -> Outcome {
    let p = &fin.p;
    let run = runs.iter().find(|r| r.alpha == 1.0).unwrap();
    let text = fs::read_to_string(run.dir.join("certificates.json")).map_err(|e| e.to_string())?;
    let cert: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let mu: Complex64 = serde_json::from_value(cert["mu"].clone()).map_err(|e| e.to_string())?;
    let m = fin.m as f64;
    let (mode, report) = physical_mode(p, m, mu, &ShootingOptions::default()).map_err(|e| e.to_string())?;
    let expected = -(m + 2.0 + mode.alpha);
    ensure!((mode.decay_fit - expected).abs() <= 0.1, "decay fit {} vs {expected}", mode.decay_fit);
    ensure!(mode.moment_identity_error < 0.02, "moment identity error {:e}", mode.moment_identity_error);
    let growth = mode.growth_rate();
    ensure!(growth > 0.0 && (growth - m * mu.im).abs() < 1e-12 * (1.0 + growth), "Re lambda = {growth}");
    let fields = report["field_residuals"].as_array().ok_or("no field residuals")?;
    ensure!(!fields.is_empty(), "no annuli");
    let mut worst = 0.0f64;
    for f in fields {
        let (d, c) = (f["divergence"].as_f64().unwrap(), f["curl"].as_f64().unwrap());
        ensure!(d < 1e-4 && c < 1e-4, "{}: div {d:e}, curl {c:e}", f["annulus"]);
        worst = worst.max(d).max(c);
    }
    Ok(format!(
        "decay {:.4} (expected {expected}), moment error {:.1e}, Re lambda {growth:.3e}, div/curl <= {worst:.1e}",
        mode.decay_fit, mode.moment_identity_error
    ))
}

fn end_to_end(runs: &[Run]) -> Outcome {
    let mut parts = Vec::new();
    for r in runs {
        ensure!(r.code == Some(0), "alpha = {}: exit code {:?}", r.alpha, r.code);
        let s = &r.summary()["result"];
        let m = s["m"].as_u64().ok_or(format!("alpha = {}: no m", r.alpha))?;
        ensure!(m >= 2, "alpha = {}: m = {m}", r.alpha);
        ensure!(s["certification_passed"] == true, "alpha = {}: certification failed", r.alpha);
        let text = fs::read_to_string(r.dir.join("certificates.json")).map_err(|e| e.to_string())?;
        let cert: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        ensure!(cert["winding_at_m"]["winding"] == 1, "alpha = {}: winding at m is not 1", r.alpha);
        for k in 1..=3 {
            let target = (m + k) as f64;
            let hit = cert["exclusions"]
                .as_array()
                .unwrap()
                .iter()
                .find(|c| c["m"].as_f64() == Some(target))
                .ok_or(format!("alpha = {}: no certificate at m = {target}", r.alpha))?;
            ensure!(hit["winding"] == 0, "alpha = {}: eigenvalue at m = {target}", r.alpha);
        }
        ensure!(r.seconds < 1800.0, "alpha = {}: {:.0} s", r.alpha, r.seconds);
        parts.push(format!("alpha {} -> m = {m} in {:.1} s", r.alpha, r.seconds));
    }
    Ok(parts.join("; "))
}

// ---------------------------------------------------------------------------

fn main() {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let runs: Vec<Run> = ALPHAS.iter().map(|&a| run_cli(a, tmp.path())).collect();
    let fin = final_profile(&runs);
    let br = fin.as_ref().map_err(Clone::clone).and_then(branch);

    let with_final = |f: &dyn Fn(&Final) -> Outcome| fin.as_ref().map_err(|e| format!("no final profile: {e}")).and_then(f);
    let with_branch = |f: &dyn Fn(&Final, &DispersionBranch) -> Outcome| match (&fin, &br) {
        (Ok(fin), Ok(br)) => f(fin, br),
        (Err(e), _) | (_, Err(e)) => Err(format!("no branch: {e}")),
    };

    let criteria: Vec<Criterion> = vec![
        ("Green's identity", Box::new(greens_identity)),
        ("Rayleigh identity at a and b", Box::new(|| with_final(&|f| rayleigh_identity(&runs, f)))),
        ("single bound state below -1", Box::new(|| with_final(&|f| single_bound_state(&runs, f)))),
        ("deep-well sweep", Box::new(well_sweep)),
        ("branch structure and exclusions", Box::new(|| with_branch(&branch_structure))),
        ("branch endpoints", Box::new(|| with_branch(&endpoints))),
        ("eigenpair residuals", Box::new(|| with_branch(&|_, b| residuals(b, &runs)))),
        ("dense oracle agreement", Box::new(|| with_branch(&oracle))),
        ("dispersion slope formula", Box::new(|| with_branch(&|_, b| derivative(b)))),
        ("physical eigenmode", Box::new(|| with_final(&|f| physical(f, &runs)))),
        ("end-to-end construction", Box::new(|| end_to_end(&runs))),
    ];

    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1} s): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1} s): {why}", k + 1)
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
