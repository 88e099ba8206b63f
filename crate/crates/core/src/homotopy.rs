//! Blending a baseline profile into a deep-well one until the instability window
//! `(m_b, m_a)` of the blend contains exactly one integer `m`.
//!
//! `N_theta` and `W_theta` are the critical wavenumbers `m_a`, `m_b` of the blend
//! `theta p1 + (1 - theta) p0`. Starting from `N_0 < m < N_1` we find the last
//! crossing `theta0` of `N_theta = m` and step right of it by `delta` so that
//! `W < m < N < m + 1`.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Parallelism};
use crate::profile::{blend, build_deep_well, validate_class_c, Profile, ProfileDocument, ProfileParams};
use crate::shooting::{
    find_eigenvalue, scan_no_eigenvalue, trace_branch, BranchOptions, ComplexEigenpair, Contour, DispersionBranch,
    ExclusionCertificate, ScanOptions,
};
use crate::sturm::{cos_bump_energy, critical_wavenumbers, CriticalWavenumbers, SturmOptions};

// ---------------------------------------------------------------------------
// deep-well sweep

/// `1, 10^{1/2}, 10, ...` up to `max` inclusive.
pub fn half_decade_grid(max: f64) -> Vec<f64> {
    (0..)
        .map(|k| 10f64.powf(0.5 * k as f64))
        .map(|x| if (x - x.round()).abs() < 1e-9 { x.round() } else { x })
        .take_while(|&x| x <= max * (1.0 + 1e-12))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub well_strength: f64,
    pub m_a: f64,
    pub m_b: f64,
    /// Bottom of the limiting spectrum at `a`, `-m_a^2`.
    pub bottom: f64,
    /// `pi^2/4 + int v eta^2` for the cosine bump `eta` on `[a - 1, a + 1]`.
    pub bump_energy: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WellSweep {
    pub alpha: f64,
    pub target: f64,
    pub points: Vec<SweepPoint>,
    /// Smallest swept strength with `m_a >= target`.
    pub well_strength: Option<f64>,
}

/// Critical wavenumbers and cosine-bump energy of `base` with well strength `b`.
pub fn sweep_point(base: &ProfileParams, b: f64, opts: &SturmOptions) -> Result<SweepPoint> {
    let p = build_deep_well(&base.with_well_strength(b))?;
    let crit = critical_wavenumbers(&p, opts)?;
    Ok(SweepPoint {
        well_strength: b,
        m_a: crit.m_a,
        m_b: crit.m_b,
        bottom: crit.bottom_a.lambda_min,
        bump_energy: cos_bump_energy(&p)?,
    })
}

/// Sweeps `grid` in order; with `stop_at_target` it ends at the first strength
/// whose `m_a` reaches `target`.
pub fn sweep_well_strength(
    base: &ProfileParams,
    grid: &[f64],
    target: f64,
    stop_at_target: bool,
    opts: &SturmOptions,
) -> Result<WellSweep> {
    let mut points = Vec::new();
    let mut found = None;
    for &b in grid {
        let pt = sweep_point(base, b, opts)?;
        points.push(pt);
        if found.is_none() && pt.m_a >= target {
            found = Some(b);
            if stop_at_target {
                break;
            }
        }
    }
    Ok(WellSweep {
        alpha: base.alpha,
        target,
        points,
        well_strength: found,
    })
}

// ---------------------------------------------------------------------------
// gap curves

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapPoint {
    pub theta: f64,
    /// `m_a` of the blend.
    pub n: f64,
    /// `m_b` of the blend.
    pub w: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GapCurves {
    /// Sorted by `theta`.
    pub points: Vec<GapPoint>,
}

impl GapCurves {
    pub fn insert(&mut self, p: GapPoint) {
        let i = self.points.partition_point(|q| q.theta < p.theta);
        if i < self.points.len() && self.points[i].theta == p.theta {
            self.points[i] = p;
        } else {
            self.points.insert(i, p);
        }
    }

    /// First sample with `W >= N`, if any.
    pub fn gap_violation(&self) -> Option<GapPoint> {
        self.points.iter().copied().find(|p| !(p.w < p.n))
    }
}

/// `(N_theta, W_theta)` for one blend parameter.
pub trait GapEvaluator: Sync {
    fn eval(&self, theta: f64) -> Result<GapPoint>;
}

impl<F: Fn(f64) -> Result<GapPoint> + Sync> GapEvaluator for F {
    fn eval(&self, theta: f64) -> Result<GapPoint> {
        self(theta)
    }
}

/// Evaluates blends of two profiles, each checked against the class conditions.
pub struct BlendEvaluator<'a> {
    pub p0: &'a Profile,
    pub p1: &'a Profile,
    pub sturm: SturmOptions,
}

impl BlendEvaluator<'_> {
    pub fn profile(&self, theta: f64) -> Result<Profile> {
        let p = blend(self.p0, self.p1, theta)?;
        validate_class_c(&p)
            .into_result()
            .map_err(|e| Error::ClassViolation(format!("blend at theta = {theta}: {e}")))?;
        Ok(p)
    }
}

impl GapEvaluator for BlendEvaluator<'_> {
    fn eval(&self, theta: f64) -> Result<GapPoint> {
        let p = self.profile(theta)?;
        // the two limiting problems run in sequence: theta samples are already parallel
        let opts = SturmOptions {
            parallelism: Parallelism::Sequential,
            ..self.sturm
        };
        let c = critical_wavenumbers(&p, &opts)?;
        Ok(GapPoint {
            theta,
            n: c.m_a,
            w: c.m_b,
        })
    }
}

pub fn gap_curves(eval: &impl GapEvaluator, grid: &[f64], parallelism: Parallelism) -> Result<GapCurves> {
    let pts = par::map(parallelism, grid, |&th| eval.eval(th));
    let mut curves = GapCurves::default();
    for p in pts {
        curves.insert(p?);
    }
    Ok(curves)
}

pub fn uniform_theta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// `theta0 = inf { theta : N > m on (theta, 1] }`, refined by bisection to
/// `|N_theta0 - m| < tol`. New samples are added to `curves`.
pub fn find_theta0(curves: &mut GapCurves, m: f64, eval: &impl GapEvaluator, tol: f64) -> Result<f64> {
    let pts = &curves.points;
    if pts.len() < 2 {
        return Err(Error::NotBracketed("need at least two samples".into()));
    }
    let (first, last) = (pts[0], pts[pts.len() - 1]);
    if !(first.n < m) {
        return Err(Error::NotBracketed(format!(
            "N = {} at theta = {} is not below m = {m}",
            first.n, first.theta
        )));
    }
    if !(last.n > m) {
        return Err(Error::NotBracketed(format!(
            "N = {} at theta = {} does not exceed m = {m}",
            last.n, last.theta
        )));
    }
    // last sample not above m; everything right of it is
    let k = pts.iter().rposition(|p| p.n <= m).unwrap();
    let (mut lo, mut hi) = (pts[k], pts[k + 1]);
    if (lo.n - m).abs() < tol {
        return Ok(lo.theta);
    }
    for _ in 0..200 {
        let mid = eval.eval(0.5 * (lo.theta + hi.theta))?;
        curves.insert(mid);
        if (mid.n - m).abs() < tol {
            return Ok(mid.theta);
        }
        if mid.n <= m {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi.theta - lo.theta < 1e-14 {
            break;
        }
    }
    Err(Error::NotBracketed(format!(
        "bisection stalled on [{}, {}] with N = {} .. {}",
        lo.theta, hi.theta, lo.n, hi.n
    )))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaSelection {
    pub delta: f64,
    pub point: GapPoint,
    /// Admissible `delta` after each refinement, nonincreasing.
    pub history: Vec<f64>,
}

/// Smallest `delta` found by refinement with `W < m - margin` and
/// `m + margin < N < m + 1 - margin` at `theta0 + delta`.
pub fn select_delta(
    curves: &mut GapCurves,
    theta0: f64,
    m: f64,
    margin: f64,
    eval: &impl GapEvaluator,
    refinements: usize,
) -> Result<DeltaSelection> {
    if !(margin > 0.0 && margin < 0.5) {
        return Err(Error::InvalidParameter(format!("margin {margin} must lie in (0, 0.5)")));
    }
    let ok = |p: &GapPoint| p.w < m - margin && p.n > m + margin && p.n < m + 1.0 - margin;
    let mut best = curves
        .points
        .iter()
        .copied()
        .find(|p| p.theta > theta0 && ok(p))
        .ok_or_else(|| {
            let table: Vec<String> = curves
                .points
                .iter()
                .map(|p| format!("({:.4}, N {:.4}, W {:.4})", p.theta, p.n, p.w))
                .collect();
            Error::NoAdmissibleDelta(format!(
                "no sample right of theta0 = {theta0} satisfies the chain with margin {margin}: {}",
                table.join(" ")
            ))
        })?;
    let mut lo = theta0;
    let mut history = vec![best.theta - theta0];
    for _ in 0..refinements {
        let mid = eval.eval(0.5 * (lo + best.theta))?;
        curves.insert(mid);
        if ok(&mid) {
            best = mid;
        } else {
            lo = mid.theta;
        }
        history.push(best.theta - theta0);
    }
    Ok(DeltaSelection {
        delta: best.theta - theta0,
        point: best,
        history,
    })
}

// ---------------------------------------------------------------------------
// end to end

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HomotopyOptions {
    pub theta_samples: usize,
    pub theta_tol: f64,
    pub margin: f64,
    pub delta_refinements: usize,
    /// Required headroom `N_1 >= m + headroom` of the deep-well end.
    pub headroom: f64,
    pub max_well_strength: f64,
    /// Lower edge of the exclusion contours; `None` uses `1e-3 Omega(-inf)`.
    pub delta_min: Option<f64>,
    pub multistart: usize,
    pub seed: u64,
    pub sturm: SturmOptions,
    pub branch: BranchOptions,
    pub scan: ScanOptions,
    pub parallelism: Parallelism,
}

impl Default for HomotopyOptions {
    fn default() -> Self {
        Self {
            theta_samples: 21,
            theta_tol: 1e-6,
            margin: 0.25,
            delta_refinements: 8,
            headroom: 0.5,
            max_well_strength: 1e4,
            delta_min: None,
            multistart: 5,
            seed: 7,
            sturm: SturmOptions::default(),
            branch: BranchOptions::default(),
            scan: ScanOptions::default(),
            parallelism: Parallelism::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certification {
    pub m: usize,
    pub eigenpair: ComplexEigenpair,
    /// Roots reached from the scattered starts.
    pub multistart: Vec<Complex64>,
    pub multistart_spread: f64,
    pub winding_at_m: ExclusionCertificate,
    pub exclusions: Vec<ExclusionCertificate>,
    pub branch: DispersionBranch,
    /// `|mu(m)|` distance between the traced branch (corrected at `m`) and the certified root.
    pub branch_distance: f64,
    pub delta_min: f64,
    /// `delta_min` is so large that the scans exclude little.
    pub weakened: bool,
}

impl Certification {
    /// With a weakened `delta_min` the scan at `m` may legitimately miss the root,
    /// so only the exclusions and the root itself are required.
    pub fn passed(&self) -> bool {
        (self.winding_at_m.winding == 1 || (self.weakened && self.winding_at_m.winding == 0))
            && self.exclusions.iter().all(|c| c.winding == 0)
            && self.multistart_spread < 1e-8
            && self.eigenpair.mu.im > 0.0
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomotopyResult {
    pub alpha: f64,
    pub m: usize,
    pub n0: f64,
    pub sweep: WellSweep,
    pub well_strength: f64,
    pub theta0: f64,
    pub delta: f64,
    pub delta_history: Vec<f64>,
    pub curves: GapCurves,
    pub final_profile: ProfileDocument,
    pub m_a: f64,
    pub m_b: f64,
    pub certification: Certification,
}

/// Checks `m_b < m < m_a < m + 1` for the final critical wavenumbers.
pub fn check_chain(crit: &CriticalWavenumbers, m: usize) -> Result<()> {
    let mf = m as f64;
    if crit.m_b < mf && mf < crit.m_a && crit.m_a < mf + 1.0 {
        Ok(())
    } else {
        Err(Error::ClassViolation(format!(
            "final window (m_b, m_a) = ({}, {}) does not satisfy m_b < {m} < m_a < {}",
            crit.m_b,
            crit.m_a,
            m + 1
        )))
    }
}

/// The smallest admissible integer `m >= 2` above `n0`, or the validated hint.
pub fn choose_m(n0: f64, hint: Option<usize>) -> Result<usize> {
    match hint {
        Some(m) if m < 2 || (m as f64) <= n0 => Err(Error::InvalidParameter(format!(
            "m = {m} must be at least 2 and exceed N_0 = {n0:.6}"
        ))),
        Some(m) => Ok(m),
        None => Ok(((n0.floor() as usize) + 1).max(2)),
    }
}

/// Certifies exactly one unstable eigenvalue at `m` and none at `m + 1 .. m + 3`
/// and at `2 ceil(m_a)`.
pub fn certify(p: &Profile, crit: &CriticalWavenumbers, m: usize, opts: &HomotopyOptions) -> Result<Certification> {
    let mf = m as f64;
    // the configured delta_min bounds the exclusion contours only; root finding
    // and continuation keep their own floors
    let delta_min = opts.delta_min.unwrap_or(1e-3 * p.omega_inf());
    let root = opts.branch.root;
    let branch = trace_branch(p, crit, &opts.branch).map_err(|e| e.in_stage("branch"))?;
    // predictor from the nearest branch sample
    let near = branch
        .samples
        .iter()
        .min_by(|a, b| (a.m - mf).abs().partial_cmp(&(b.m - mf).abs()).unwrap())
        .copied()
        .ok_or_else(|| Error::Continuation {
            m: mf,
            reason: "empty branch".into(),
        })?;
    let mut start = near.mu + near.dmu_dm * (mf - near.m);
    if start.im <= 0.0 {
        start.im = 0.5 * near.mu.im;
    }
    let eigenpair = find_eigenvalue(p, mf, start, &root).map_err(|e| e.in_stage("eigenpair"))?;
    let branch_distance = (eigenpair.mu - start).norm();

    let contour = Contour::enclosing(p, mf, root.delta_min.unwrap_or(1e-3 * p.omega_inf()));
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let seeds: Vec<Complex64> = (0..opts.multistart)
        .map(|_| {
            Complex64::new(
                rng.gen_range(0.0..contour.re_hi.min(p.omega_inf())),
                rng.gen_range(contour.im_lo..contour.im_hi),
            )
        })
        .collect();
    let roots = par::map(opts.parallelism, &seeds, |&s| find_eigenvalue(p, mf, s, &root).map(|e| e.mu));
    let mut multistart = Vec::with_capacity(roots.len());
    for r in roots {
        multistart.push(r.map_err(|e| e.in_stage("multistart"))?);
    }
    let multistart_spread = multistart
        .iter()
        .map(|z| (z - eigenpair.mu).norm())
        .fold(0.0, f64::max);

    let scan = |mm: f64| -> Result<ExclusionCertificate> {
        let c = Contour::enclosing(p, mm, delta_min);
        scan_no_eigenvalue(p, mm, &c, &opts.scan)
    };
    let winding_at_m = scan(mf).map_err(|e| e.in_stage("winding"))?;
    let mut targets: Vec<f64> = (1..=3).map(|l| mf + l as f64).collect();
    targets.push(crit.m_a + 0.5);
    let large = 2.0 * crit.m_a.ceil();
    if !targets.contains(&large) {
        targets.push(large);
    }
    let certs = par::map(opts.parallelism, &targets, |&mm| scan(mm));
    let mut exclusions = Vec::with_capacity(certs.len());
    for c in certs {
        exclusions.push(c.map_err(|e| e.in_stage("exclusion"))?);
    }
    Ok(Certification {
        m,
        eigenpair,
        multistart,
        multistart_spread,
        winding_at_m,
        exclusions,
        branch,
        branch_distance,
        delta_min,
        weakened: delta_min > 0.1 * p.omega_inf(),
    })
}

/// Builds a class profile with exactly one unstable azimuthal mode `m >= 2`,
/// starting from the baseline family member with exponent `alpha`.
pub fn construct_unstable_profile(alpha: f64, m_hint: Option<usize>, opts: &HomotopyOptions) -> Result<HomotopyResult> {
    construct_from_base(&ProfileParams::baseline(alpha), m_hint, opts)
}

/// As [`construct_unstable_profile`] with every structural parameter taken from
/// `base`; its well strength is ignored (the sweep chooses it).
pub fn construct_from_base(base: &ProfileParams, m_hint: Option<usize>, opts: &HomotopyOptions) -> Result<HomotopyResult> {
    let alpha = base.alpha;
    let base_params = base.with_well_strength(0.0);
    base_params.validate()?;
    let p0 = build_deep_well(&base_params).map_err(|e| e.in_stage("baseline"))?;
    validate_class_c(&p0).into_result().map_err(|e| e.in_stage("baseline"))?;
    let crit0 = critical_wavenumbers(&p0, &opts.sturm).map_err(|e| e.in_stage("baseline"))?;
    let n0 = crit0.m_a;
    let m = choose_m(n0, m_hint)?;
    let mf = m as f64;

    let grid = half_decade_grid(opts.max_well_strength);
    let sweep = sweep_well_strength(&base_params, &grid, mf + opts.headroom, true, &opts.sturm)
        .map_err(|e| e.in_stage("well_sweep"))?;
    let well_strength = sweep.well_strength.ok_or_else(|| {
        Error::Construction(format!(
            "no well strength up to {} reaches N_1 >= {}",
            opts.max_well_strength,
            mf + opts.headroom
        ))
        .in_stage("well_sweep")
    })?;
    let p1 = build_deep_well(&base_params.with_well_strength(well_strength)).map_err(|e| e.in_stage("well_sweep"))?;

    let eval = BlendEvaluator {
        p0: &p0,
        p1: &p1,
        sturm: opts.sturm,
    };
    let mut curves = gap_curves(&eval, &uniform_theta_grid(opts.theta_samples), opts.parallelism)
        .map_err(|e| e.in_stage("gap_curves"))?;
    if let Some(v) = curves.gap_violation() {
        return Err(Error::ClassViolation(format!(
            "W = {} >= N = {} at theta = {}",
            v.w, v.n, v.theta
        ))
        .in_stage("gap_curves"));
    }
    let theta0 = find_theta0(&mut curves, mf, &eval, opts.theta_tol).map_err(|e| e.in_stage("theta0"))?;
    let sel = select_delta(&mut curves, theta0, mf, opts.margin, &eval, opts.delta_refinements)
        .map_err(|e| e.in_stage("delta"))?;

    let final_profile = eval.profile(sel.point.theta).map_err(|e| e.in_stage("final"))?;
    let crit = critical_wavenumbers(&final_profile, &opts.sturm).map_err(|e| e.in_stage("final"))?;
    check_chain(&crit, m).map_err(|e| e.in_stage("final"))?;
    let certification = certify(&final_profile, &crit, m, opts).map_err(|e| e.in_stage("certify"))?;
    Ok(HomotopyResult {
        alpha,
        m,
        n0,
        sweep,
        well_strength,
        theta0,
        delta: sel.delta,
        delta_history: sel.history,
        curves,
        final_profile: final_profile.to_document(),
        m_a: crit.m_a,
        m_b: crit.m_b,
        certification,
    })
}
