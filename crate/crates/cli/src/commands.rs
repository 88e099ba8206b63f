use log::{info, warn};
use num_complex::Complex64;
use serde_json::json;
use vortex_core::greens::{Critical, Potential};
use vortex_core::homotopy::{construct_from_base, gap_curves, uniform_theta_grid, BlendEvaluator, HomotopyResult};
use vortex_core::physical::{
    critical_layer, eigenmode_to_physical, field_residuals, layer_resolving_dt, Annulus, PhysicalEigenmode,
};
use vortex_core::profile::{build_deep_well, validate_class_c, Profile};
use vortex_core::shooting::{assemble_eigenpair, derivative_checks, trace_branch, BranchSample, ShootingOptions};
use vortex_core::sturm::critical_wavenumbers;
use vortex_core::Error;

use crate::config::{Command, RunConfig};
use crate::output::OutDir;
use crate::CliError;

/// Runs one command, returning its warnings.
pub fn run(cmd: Command, cfg: &RunConfig, out: &mut OutDir) -> Result<Vec<String>, CliError> {
    match cmd {
        Command::ProfileBuild => profile_build(cfg, out),
        Command::BottomSpectrum => bottom_spectrum(cfg, out),
        Command::TraceBranch => trace(cfg, out),
        Command::Theorem11 => theorem11(cfg, out),
    }
}

fn load_profile(cfg: &RunConfig) -> Result<Profile, CliError> {
    match &cfg.profile_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.clone(), e))?;
            let p = Profile::from_json(&text)
                .map_err(|e| CliError::Config(format!("profile file {}: {e}", path.display())))?;
            validate_class_c(&p)
                .into_result()
                .map_err(|e| CliError::Config(format!("profile file {}: {e}", path.display())))?;
            Ok(p)
        }
        None => Ok(build_deep_well(&cfg.profile.params())?),
    }
}

fn summary(cfg: &RunConfig, cmd: Command, body: serde_json::Value) -> serde_json::Value {
    json!({
        "command": cmd.name(),
        "complete": true,
        "result": body,
        "config": cfg,
    })
}

const PROFILE_COLUMNS: &[&str] = &[
    "t=log r [1]",
    "A=Omega''+2Omega' [1/T]",
    "Omega angular velocity [1/T]",
    "G=2Omega+Omega' vorticity [1/T]",
    "Omega' [1/T]",
];

fn profile_rows(p: &Profile, dt: f64) -> Vec<Vec<f64>> {
    let lo = p.params.log_m1 - 3.0;
    let hi = p.params.log_m + 3.0;
    let n = ((hi - lo) / dt).round() as usize;
    (0..=n)
        .map(|i| {
            let t = lo + i as f64 * dt;
            vec![t, p.a(t), p.omega(t), p.g(t), p.omega_prime(t)]
        })
        .collect()
}

fn profile_build(cfg: &RunConfig, out: &mut OutDir) -> Result<Vec<String>, CliError> {
    let p = build_deep_well(&cfg.profile.params())?;
    let report = validate_class_c(&p);
    out.write_json("validation.json", &report)?;
    if let Some(c) = report.first_failure() {
        return Err(CliError::Core(Error::ClassViolation(format!("{}: {}", c.name, c.detail))));
    }
    out.write_json("profile.json", &p.to_document())?;
    out.write_csv("profile.csv", PROFILE_COLUMNS, profile_rows(&p, cfg.numerics.grid_dt))?;
    let body = json!({
        "omega_inf": p.omega_inf(),
        "tail_constant": p.tail_constant(),
        "omega_a": p.omega(p.params.a),
        "omega_b": p.omega(p.params.b),
        "checks_passed": report.checks.len(),
    });
    out.write_json("summary.json", &summary(cfg, Command::ProfileBuild, body))?;
    Ok(Vec::new())
}

fn bottom_spectrum(cfg: &RunConfig, out: &mut OutDir) -> Result<Vec<String>, CliError> {
    let p = load_profile(cfg)?;
    let sturm = cfg.sturm();
    let crit = critical_wavenumbers(&p, &sturm)?;
    info!("m_a = {:.6}, m_b = {:.6}", crit.m_a, crit.m_b);

    let mut rows = vec![vec![
        f64::NAN,
        crit.m_a,
        crit.m_b,
        crit.bottom_a.lambda_min,
        crit.bottom_b.lambda_min,
    ]];
    let mut blend_note = serde_json::Value::Null;
    if let Some(b1) = cfg.spectrum.blend_well_strength {
        if cfg.profile_file.is_some() {
            return Err(CliError::Config(
                "spectrum.blend_well_strength needs the profile block, not a profile file".into(),
            ));
        }
        let p1 = build_deep_well(&cfg.profile.params().with_well_strength(b1))?;
        let eval = BlendEvaluator {
            p0: &p,
            p1: &p1,
            sturm,
        };
        let curves = gap_curves(&eval, &uniform_theta_grid(cfg.spectrum.theta_samples), sturm.parallelism)?;
        rows = curves
            .points
            .iter()
            .map(|g| vec![g.theta, g.n, g.w, -g.n * g.n, -g.w * g.w])
            .collect();
        blend_note = json!({
            "from_well_strength": p.params.well_strength,
            "to_well_strength": b1,
            "gap_violation": curves.gap_violation(),
        });
    }
    out.write_csv(
        "spectrum.csv",
        &[
            "theta blend parameter [1] (nan: single profile)",
            "N=m_a=sqrt(-lambda_a) [1]",
            "W=m_b=sqrt(-lambda_b) [1]",
            "lambda_a bottom at Omega(a) [1]",
            "lambda_b bottom at Omega(b) [1]",
        ],
        rows,
    )?;

    let va = Potential::critical(&p, Critical::A);
    let vb = Potential::critical(&p, Critical::B);
    let mesh = &crit.bottom_a.mesh;
    let eig_rows = mesh.nodes.iter().enumerate().map(|(i, &t)| {
        vec![
            t,
            crit.bottom_a.eigvec[i],
            crit.bottom_b.eigvec_at(t),
            va.real(t),
            vb.real(t),
        ]
    });
    out.write_csv(
        "eigvec.csv",
        &[
            "t=log r [1]",
            "psi_a ground state at Omega(a) [unit L2]",
            "psi_b ground state at Omega(b) [unit L2]",
            "v_a=A/(Omega-Omega(a)) [1]",
            "v_b=A/(Omega-Omega(b)) [1]",
        ],
        eig_rows,
    )?;
    let body = json!({
        "m_a": crit.m_a,
        "m_b": crit.m_b,
        "lambda_a": crit.bottom_a.lambda_min,
        "lambda_b": crit.bottom_b.lambda_min,
        "window": crit.bottom_a.window,
        "mesh_nodes": crit.bottom_a.n,
        "target": cfg.spectrum.target,
        "meets_target": cfg.spectrum.target.map(|n| crit.m_a >= n),
        "blend": blend_note,
    });
    out.write_json("summary.json", &summary(cfg, Command::BottomSpectrum, body))?;
    Ok(Vec::new())
}

const BRANCH_COLUMNS: &[&str] = &[
    "m azimuthal wavenumber [1]",
    "Re mu [1/T]",
    "Im mu [1/T]",
    "growth Re lambda=m Im mu [1/T]",
    "Re dmu/dm [1/T]",
    "Im dmu/dm [1/T]",
    "|W/(-2m)| matching residual [1]",
    "int A|psi|^2/|Omega-mu|^2 [1]",
    "Re int A|psi|^2/(Omega-mu) (=-1) [1]",
    "Im int A|psi|^2/(Omega-mu) [1]",
    "|int A psi^2/(Omega-mu)^2| transversality [1]",
];

fn branch_row(s: &BranchSample) -> Vec<f64> {
    let r = &s.residuals;
    vec![
        s.m,
        s.mu.re,
        s.mu.im,
        s.m * s.mu.im,
        s.dmu_dm.re,
        s.dmu_dm.im,
        r.ode_residual,
        r.imag_identity,
        r.potential_integral.re,
        r.potential_integral.im,
        r.transversality.norm(),
    ]
}

fn trace(cfg: &RunConfig, out: &mut OutDir) -> Result<Vec<String>, CliError> {
    let p = load_profile(cfg)?;
    let crit = critical_wavenumbers(&p, &cfg.sturm())?;
    let lo = cfg.branch.m_min.unwrap_or(f64::NEG_INFINITY).max(crit.m_b);
    let hi = cfg.branch.m_max.unwrap_or(f64::INFINITY).min(crit.m_a);
    let mut warnings = Vec::new();
    if !(lo < hi) {
        let msg = format!(
            "requested m range [{}, {}] does not meet the instability window ({:.6}, {:.6}); the branch is empty",
            cfg.branch.m_min.map_or("-inf".into(), |x| x.to_string()),
            cfg.branch.m_max.map_or("inf".into(), |x| x.to_string()),
            crit.m_b,
            crit.m_a
        );
        warn!("{msg}");
        out.write_csv("branch.csv", BRANCH_COLUMNS, Vec::new())?;
        let body = json!({ "m_a": crit.m_a, "m_b": crit.m_b, "samples": 0, "note": msg });
        out.write_json("summary.json", &summary(cfg, Command::TraceBranch, body))?;
        warnings.push(msg);
        return Ok(warnings);
    }
    let br = trace_branch(&p, &crit, &cfg.branch_options())?;
    info!("{} branch samples, {}", br.samples.len(), br.stop_reason);
    let rows: Vec<Vec<f64>> = br
        .samples
        .iter()
        .filter(|s| s.m >= lo && s.m <= hi)
        .map(branch_row)
        .collect();
    let n_rows = rows.len();
    out.write_csv("branch.csv", BRANCH_COLUMNS, rows)?;
    let checks = derivative_checks(&br);
    let (oa, ob) = (p.omega(p.params.a), p.omega(p.params.b));
    let body = json!({
        "m_a": crit.m_a,
        "m_b": crit.m_b,
        "samples": n_rows,
        "stop_reason": br.stop_reason,
        "endpoint_a": br.endpoint_a,
        "omega_a": oa,
        "endpoint_a_error": (br.endpoint_a - oa).norm() / oa,
        "endpoint_b": br.endpoint_b,
        "omega_b": ob,
        "endpoint_b_error": (br.endpoint_b - ob).norm() / ob,
        "derivative_checks": checks,
    });
    out.write_json("summary.json", &summary(cfg, Command::TraceBranch, body))?;
    Ok(warnings)
}

/// Physical-variable version of the certified mode, sampled finely enough to
/// resolve the critical layer.
pub fn physical_mode(p: &Profile, m: f64, mu: Complex64, base: &ShootingOptions) -> Result<(PhysicalEigenmode, serde_json::Value), Error> {
    let so = ShootingOptions {
        sample_dt: layer_resolving_dt(p, mu, base.sample_dt),
        ..*base
    };
    let pair = assemble_eigenpair(p, m, mu, &so)?;
    let mode = eigenmode_to_physical(&pair, p)?;
    let mut annuli = Vec::new();
    if let Some(layer) = critical_layer(p, mu) {
        annuli.push(("critical layer", Annulus::across_layer(&layer, 256)));
        annuli.push(("inside the layer", Annulus::around(layer.t - 3.0, 1.0, 256)));
        annuli.push(("outside the layer", Annulus::around(layer.t + 6.0, 1.0, 256)));
    }
    let mut fields = Vec::new();
    for (name, ann) in annuli {
        let r = field_residuals(&mode, p, &ann)?;
        fields.push(json!({ "annulus": name, "r_in": ann.r_in, "r_out": ann.r_out, "divergence": r.divergence, "curl": r.curl }));
    }
    let report = json!({
        "lambda": mode.lambda,
        "growth_rate": mode.growth_rate(),
        "period": mode.period,
        "decay_fit": mode.decay_fit,
        "decay_expected": -(m + 2.0 + mode.alpha),
        "moment": mode.moment,
        "moment_identity_error": mode.moment_identity_error,
        "sample_dt": so.sample_dt,
        "field_residuals": fields,
    });
    Ok((mode, report))
}

fn theorem11(cfg: &RunConfig, out: &mut OutDir) -> Result<Vec<String>, CliError> {
    let opts = cfg.homotopy();
    info!("building an unstable profile for alpha = {}", cfg.profile.alpha);
    let res: HomotopyResult = construct_from_base(&cfg.profile.params(), cfg.theorem.m, &opts)?;
    let p = Profile::from_document(res.final_profile.clone())?;
    let cert = &res.certification;
    let mut warnings = Vec::new();
    if cert.weakened {
        let msg = format!(
            "delta_min = {:e} exceeds 0.1 Omega(-inf) = {:e}; exclusion certificates are weakened",
            cert.delta_min,
            0.1 * p.omega_inf()
        );
        warn!("{msg}");
        warnings.push(msg);
    }

    out.write_json("profile.json", &res.final_profile)?;
    out.write_csv("profile.csv", PROFILE_COLUMNS, profile_rows(&p, cfg.numerics.grid_dt))?;
    out.write_csv(
        "sweep.csv",
        &[
            "B well strength [1]",
            "N=m_a [1]",
            "W=m_b [1]",
            "bottom at Omega(a) [1]",
            "cosine bump energy pi^2/4+int v eta^2 [1]",
        ],
        res.sweep
            .points
            .iter()
            .map(|s| vec![s.well_strength, s.m_a, s.m_b, s.bottom, s.bump_energy]),
    )?;
    out.write_csv(
        "gap_curves.csv",
        &["theta blend parameter [1]", "N_theta=m_a [1]", "W_theta=m_b [1]"],
        res.curves.points.iter().map(|g| vec![g.theta, g.n, g.w]),
    )?;
    out.write_csv("branch.csv", BRANCH_COLUMNS, cert.branch.samples.iter().map(branch_row))?;
    let pair = &cert.eigenpair;
    out.write_csv(
        "eigenpair.csv",
        &[
            "t=log r [1]",
            "Re psi [unit energy]",
            "Im psi [unit energy]",
            "Re psi' [unit energy]",
            "Im psi' [unit energy]",
        ],
        (0..pair.psi.len()).map(|i| {
            vec![
                pair.psi.t(i),
                pair.psi.values[i].re,
                pair.psi.values[i].im,
                pair.dpsi.values[i].re,
                pair.dpsi.values[i].im,
            ]
        }),
    )?;
    let certificates = json!({
        "m": cert.m,
        "mu": pair.mu,
        "residuals": pair.residuals,
        "multistart": cert.multistart,
        "multistart_spread": cert.multistart_spread,
        "winding_at_m": cert.winding_at_m,
        "exclusions": cert.exclusions,
        "delta_min": cert.delta_min,
        "weakened": cert.weakened,
        "branch_distance": cert.branch_distance,
        "passed": cert.passed(),
    });
    out.write_json("certificates.json", &certificates)?;

    let mf = res.m as f64;
    let (mode, physical) = physical_mode(&p, mf, pair.mu, &cfg.shooting()).map_err(|e| e.in_stage("physical"))?;
    // every k-th sample keeps the table near the configured spacing
    let stride = ((cfg.numerics.grid_dt / mode.dt).round() as usize).max(1);
    out.write_csv(
        "mode.csv",
        &[
            "s=r radius [1]",
            "Re g vorticity [s^-(m+alpha+2) tail]",
            "Im g [s^-(m+alpha+2) tail]",
            "Re psi stream function [same]",
            "Im psi [same]",
        ],
        (0..mode.s.len())
            .step_by(stride)
            .map(|i| vec![mode.s[i], mode.g[i].re, mode.g[i].im, mode.psi[i].re, mode.psi[i].im]),
    )?;

    let body = json!({
        "alpha": res.alpha,
        "m": res.m,
        "mu": pair.mu,
        "n0": res.n0,
        "well_strength": res.well_strength,
        "theta0": res.theta0,
        "delta": res.delta,
        "delta_history": res.delta_history,
        "m_a": res.m_a,
        "m_b": res.m_b,
        "chain": format!("{:.6} < {} < {:.6} < {}", res.m_b, res.m, res.m_a, res.m + 1),
        "certification_passed": cert.passed(),
        "weakened": cert.weakened,
        "exclusion_windings": cert.exclusions.iter().map(|c| (c.m, c.winding)).collect::<Vec<_>>(),
        "physical": physical,
    });
    out.write_json("summary.json", &summary(cfg, Command::Theorem11, body))?;
    if !cert.passed() {
        return Err(CliError::Core(
            Error::Inconclusive(format!(
                "winding at m = {}, exclusion windings {:?}, multistart spread {:e}",
                cert.winding_at_m.winding,
                cert.exclusions.iter().map(|c| c.winding).collect::<Vec<_>>(),
                cert.multistart_spread
            ))
            .in_stage("certify"),
        ));
    }
    Ok(warnings)
}

