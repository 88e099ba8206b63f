//! Radial vorticity profiles in log-radius coordinates.
//!
//! A profile is determined by `A(t) = G'(t) = Omega''(t) + 2 Omega'(t)`:
//!
//! * `A(t) = -8 c0 e^{2t}` for `t <= log M1` (quadratic vorticity core),
//! * `A(t) = -alpha e^{-alpha t}` for `t >= log M` (power-law tail `G = s^{-alpha}`),
//! * a C^2 piecewise quintic in between with simple zeros at `a < b`.
//!
//! Everything else follows in closed form on every piece:
//! `G(t) = -int_t^inf A`, `Omega'(t) = e^{-2t} int_{-inf}^t e^{2 tau} A`,
//! and `Omega = (G - Omega') / 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Jet, PiecewisePoly, Segment};
use crate::quad;

/// Shape knobs of the smooth gluing between the fixed pieces of `A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShapeKnobs {
    /// Plateau value of `A` on `(a, b)`; must stay below `e^{-2}`.
    pub hump_height: f64,
    /// `-A'(b)`.
    pub slope_at_b: f64,
    /// Distance from `a` to the start of the flat well bottom.
    pub well_width: f64,
    /// Target `G(a) / int_a^b A`; sizes the negative mass on `(b, log M)`.
    pub vorticity_margin: f64,
}

impl Default for ShapeKnobs {
    fn default() -> Self {
        Self {
            hump_height: 0.1,
            slope_at_b: 1.0,
            well_width: 1.0,
            vorticity_margin: 1.0,
        }
    }
}

/// Structural parameters of a profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileParams {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub c0: f64,
    pub log_m1: f64,
    pub log_m: f64,
    /// Deep-well strength `B >= 0`; zero gives the baseline profile.
    pub well_strength: f64,
    #[serde(default)]
    pub knobs: ShapeKnobs,
}

impl ProfileParams {
    /// Baseline member (`B = 0`) of the deep-well family with `a = 0`, `b = 1`.
    pub fn baseline(alpha: f64) -> Self {
        Self {
            alpha,
            a: 0.0,
            b: 1.0,
            c0: 1.0,
            log_m1: -3.0,
            log_m: 3.0,
            well_strength: 0.0,
            knobs: ShapeKnobs::default(),
        }
    }

    pub fn with_well_strength(mut self, b: f64) -> Self {
        self.well_strength = b;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let p = self;
        if !(p.alpha > 0.0 && p.alpha < 2.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {} must lie in the open interval (0, 2)",
                p.alpha
            )));
        }
        if !(p.log_m1 < p.a && p.a < p.b && p.b < p.log_m) {
            return Err(Error::InvalidParameter(format!(
                "need log M1 < a < b < log M, got {} < {} < {} < {}",
                p.log_m1, p.a, p.b, p.log_m
            )));
        }
        if !(p.c0 > 0.0) {
            return Err(Error::InvalidParameter(format!("c0 = {} must be positive", p.c0)));
        }
        if !(p.well_strength >= 0.0) || !p.well_strength.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "well strength B = {} must be finite and non-negative",
                p.well_strength
            )));
        }
        let k = &p.knobs;
        if !(k.hump_height > 0.0 && k.hump_height < (-2.0f64).exp()) {
            return Err(Error::InvalidParameter(format!(
                "hump height {} must lie in (0, e^-2)",
                k.hump_height
            )));
        }
        if !(k.slope_at_b > 0.0 && k.well_width > 0.0 && k.vorticity_margin > 0.0) {
            return Err(Error::InvalidParameter("shape knobs must be positive".into()));
        }
        Ok(())
    }
}

/// How a profile was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Origin {
    DeepWell { well_strength: f64 },
    Blend { theta: f64, well_strengths: [f64; 2] },
    Custom,
}

/// A radial profile with closed-form evaluation of `A`, `G`, `Omega` and `Omega'`.
#[derive(Clone, Debug)]
pub struct Profile {
    pub params: ProfileParams,
    pub origin: Origin,
    core: PiecewisePoly,
    /// `int_{log M1}^{x_k} A` at each segment start.
    knot_area: Vec<f64>,
    /// `int_{-inf}^{x_k} e^{2 tau} A` at each segment start.
    knot_moment: Vec<f64>,
    omega_inf: f64,
    /// Constant `C` of the right tail `Omega = C alpha e^{-2t} + e^{-alpha t} / (2 - alpha)`.
    tail_constant: f64,
}

impl Profile {
    /// Assembles a profile from its core spline without checking class conditions.
    pub fn from_parts(params: ProfileParams, origin: Origin, core: PiecewisePoly) -> Profile {
        let (tl, tr) = (core.start(), core.end());
        let mut knot_area = Vec::with_capacity(core.segments.len());
        let mut knot_moment = Vec::with_capacity(core.segments.len());
        let mut area = 0.0;
        // int_{-inf}^{tl} e^{2 tau} (-8 c0 e^{2 tau}) = -2 c0 e^{4 tl}
        let mut moment = -2.0 * params.c0 * (4.0 * tl).exp();
        for seg in &core.segments {
            knot_area.push(area);
            knot_moment.push(moment);
            area += seg.integral(seg.x1);
            moment += seg.exp2_integral(seg.x1);
        }
        let alpha = params.alpha;
        // 2 Omega(-inf) = -int A
        let omega_inf = 0.5 * (4.0 * params.c0 * (2.0 * tl).exp() - area + (-alpha * tr).exp());
        // continuity of Omega' at log M
        let tail_constant = -(moment + alpha * ((2.0 - alpha) * tr).exp() / (2.0 - alpha)) / (2.0 * alpha);
        Profile {
            params,
            origin,
            core,
            knot_area,
            knot_moment,
            omega_inf,
            tail_constant,
        }
    }

    pub fn core(&self) -> &PiecewisePoly {
        &self.core
    }

    pub fn omega_inf(&self) -> f64 {
        self.omega_inf
    }

    pub fn tail_constant(&self) -> f64 {
        self.tail_constant
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    fn left_end(&self) -> f64 {
        self.core.start()
    }

    fn right_end(&self) -> f64 {
        self.core.end()
    }

    pub fn a(&self, t: f64) -> f64 {
        let p = &self.params;
        if t <= self.left_end() {
            -8.0 * p.c0 * (2.0 * t).exp()
        } else if t >= self.right_end() {
            -p.alpha * (-p.alpha * t).exp()
        } else {
            self.core.segments[self.core.locate(t)].value(t)
        }
    }

    pub fn a_prime(&self, t: f64) -> f64 {
        let p = &self.params;
        if t <= self.left_end() {
            -16.0 * p.c0 * (2.0 * t).exp()
        } else if t >= self.right_end() {
            p.alpha * p.alpha * (-p.alpha * t).exp()
        } else {
            self.core.segments[self.core.locate(t)].slope(t)
        }
    }

    pub fn a_second(&self, t: f64) -> f64 {
        let p = &self.params;
        if t <= self.left_end() {
            -32.0 * p.c0 * (2.0 * t).exp()
        } else if t >= self.right_end() {
            -p.alpha.powi(3) * (-p.alpha * t).exp()
        } else {
            self.core.segments[self.core.locate(t)].curvature(t)
        }
    }

    /// Vorticity `G` as a function of `t = log s`.
    pub fn g(&self, t: f64) -> f64 {
        let p = &self.params;
        if t <= self.left_end() {
            2.0 * self.omega_inf - 4.0 * p.c0 * (2.0 * t).exp()
        } else if t >= self.right_end() {
            (-p.alpha * t).exp()
        } else {
            let k = self.core.locate(t);
            let g_left = 2.0 * self.omega_inf - 4.0 * p.c0 * (2.0 * self.left_end()).exp();
            g_left + self.knot_area[k] + self.core.segments[k].integral(t)
        }
    }

    /// `int_{-inf}^t e^{2 tau} A(tau) d tau`.
    pub fn weighted_area(&self, t: f64) -> f64 {
        let p = &self.params;
        if t <= self.left_end() {
            -2.0 * p.c0 * (4.0 * t).exp()
        } else if t >= self.right_end() {
            (2.0 * t).exp() * self.omega_prime(t)
        } else {
            let k = self.core.locate(t);
            self.knot_moment[k] + self.core.segments[k].exp2_integral(t)
        }
    }

    pub fn omega_prime(&self, t: f64) -> f64 {
        let p = &self.params;
        if t <= self.left_end() {
            -2.0 * p.c0 * (2.0 * t).exp()
        } else if t >= self.right_end() {
            let al = p.alpha;
            -2.0 * self.tail_constant * al * (-2.0 * t).exp() - al * (-al * t).exp() / (2.0 - al)
        } else {
            (-2.0 * t).exp() * self.weighted_area(t)
        }
    }

    pub fn omega(&self, t: f64) -> f64 {
        let p = &self.params;
        if t <= self.left_end() {
            self.omega_inf - p.c0 * (2.0 * t).exp()
        } else if t >= self.right_end() {
            let al = p.alpha;
            self.tail_constant * al * (-2.0 * t).exp() + (-al * t).exp() / (2.0 - al)
        } else {
            0.5 * (self.g(t) - self.omega_prime(t))
        }
    }

    pub fn omega_second(&self, t: f64) -> f64 {
        self.a(t) - 2.0 * self.omega_prime(t)
    }

    /// `Omega(t) - Omega(d)`, accurate as `t -> d`.
    pub fn omega_minus(&self, t: f64, d: f64) -> f64 {
        let h = t - d;
        if h.abs() < 1e-5 {
            let w1 = self.omega_prime(d);
            let w2 = self.omega_second(d);
            let w3 = self.a_prime(d) - 2.0 * w2;
            h * (w1 + h * (0.5 * w2 + h * w3 / 6.0))
        } else {
            self.omega(t) - self.omega(d)
        }
    }

    /// `A(t) / (Omega(t) - Omega(d))` for a zero `d` of `A`, with the removable
    /// singularity at `t = d` filled from the analytic Taylor expansions.
    pub fn critical_potential(&self, t: f64, d: f64) -> f64 {
        let h = t - d;
        if h.abs() < 1e-5 {
            let a1 = self.a_prime(d);
            let a2 = self.a_second(d);
            let w1 = self.omega_prime(d);
            let w2 = self.omega_second(d);
            let w3 = self.a_prime(d) - 2.0 * w2;
            // (a1 + a2 h / 2 + ...) / (w1 + w2 h / 2 + w3 h^2 / 6)
            let a3 = 0.0;
            (a1 + h * (0.5 * a2 + h * a3)) / (w1 + h * (0.5 * w2 + h * w3 / 6.0))
        } else {
            self.a(t) / (self.omega(t) - self.omega(d))
        }
    }

    /// Breakpoints of the core spline.
    pub fn knots(&self) -> Vec<f64> {
        self.core.breakpoints()
    }

    /// Smallest spatial scale in the core spline; used to size grids.
    pub fn min_feature_width(&self) -> f64 {
        self.core
            .segments
            .iter()
            .map(|s| s.x1 - s.x0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_document(&self) -> ProfileDocument {
        ProfileDocument {
            format: DOCUMENT_FORMAT.to_string(),
            params: self.params,
            origin: self.origin.clone(),
            segments: self.core.segments.clone(),
            omega_inf: self.omega_inf,
            tail_constant: self.tail_constant,
        }
    }

    pub fn from_document(doc: ProfileDocument) -> Result<Profile> {
        if doc.format != DOCUMENT_FORMAT {
            return Err(Error::InvalidParameter(format!("unknown profile format `{}`", doc.format)));
        }
        doc.params.validate()?;
        if doc.segments.is_empty() {
            return Err(Error::InvalidParameter("profile document has no segments".into()));
        }
        for w in doc.segments.windows(2) {
            if w[0].x1 != w[1].x0 || !(w[0].x1 > w[0].x0) {
                return Err(Error::InvalidParameter("profile segments are not contiguous".into()));
            }
        }
        let p = Profile::from_parts(doc.params, doc.origin, PiecewisePoly { segments: doc.segments });
        let tol = 1e-12 * (1.0 + p.omega_inf.abs());
        if (p.omega_inf - doc.omega_inf).abs() > tol {
            return Err(Error::InvalidParameter(format!(
                "stored Omega(-inf) = {} disagrees with recomputed {}",
                doc.omega_inf, p.omega_inf
            )));
        }
        Ok(p)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(s: &str) -> Result<Profile> {
        Profile::from_document(serde_json::from_str(s)?)
    }
}

const DOCUMENT_FORMAT: &str = "radial-profile/1";

/// Serialized form of a profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileDocument {
    pub format: String,
    pub params: ProfileParams,
    pub origin: Origin,
    pub segments: Vec<Segment>,
    pub omega_inf: f64,
    pub tail_constant: f64,
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

/// Builds the deep-well member of the family with strength `params.well_strength`.
///
/// With `B > 0` the spline reproduces `A(t) = (4 + B)(t - a) + B (t - a)^2` exactly on
/// `[a - 10^{-2} B^{-1/2}, a]`. Left of that piece `A` ramps down to a flat well
/// whose depth is solved so that
/// `int_{-inf}^a e^{2 tau} A = -e^{2a}`, i.e. `Omega'(a) = -1`.
pub fn build_deep_well(params: &ProfileParams) -> Result<Profile> {
    params.validate()?;
    let p = *params;
    let big_b = p.well_strength;
    let slope_a = 4.0 + big_b;
    let jet_a = Jet::new(0.0, slope_a, 2.0 * big_b);

    // end of the exact quadratic piece, or `a` itself for the baseline
    let (q, jet_q) = if big_b > 0.0 {
        let s = -1e-2 / big_b.sqrt();
        (p.a + s, Jet::new(slope_a * s + big_b * s * s, slope_a + 2.0 * big_b * s, 2.0 * big_b))
    } else {
        (p.a, jet_a)
    };

    let right = right_knots(&p, jet_a)?;
    let tl = p.log_m1;
    let e = (2.0 * tl).exp();
    let jet_tail = Jet::new(-8.0 * p.c0 * e, -16.0 * p.c0 * e, -32.0 * p.c0 * e);
    let target = -(2.0 * p.a).exp();

    // tail bridge, flat well bottom at -depth, ramp up to the quadratic piece
    let left_knots = |width: f64, depth: f64| -> Vec<(f64, Jet)> {
        let plateau_start = p.a - width;
        // slope ratio 2 keeps the ramp monotone; a steeper ramp is capped by the well width
        let ramp = (2.0 * (depth + jet_q.value) / jet_q.slope).min(q - plateau_start);
        let k = q - ramp;
        let floor = Jet::new(-depth, 0.0, 0.0);
        let mut knots = vec![(tl, jet_tail)];
        if k - plateau_start > 1e-3 * width {
            knots.push((plateau_start, floor));
        }
        knots.push((k, floor));
        knots.push((q, jet_q));
        if q < p.a {
            knots.push((p.a, jet_a));
        }
        knots
    };
    let weighted = |knots: &[(f64, Jet)]| -> f64 {
        let poly = PiecewisePoly::hermite(knots);
        let mut acc = -2.0 * p.c0 * (4.0 * tl).exp();
        for s in &poly.segments {
            acc += s.exp2_integral(s.x1);
        }
        acc
    };
    let excess = |width: f64, depth: f64| weighted(&left_knots(width, depth)) - target;

    // the floor must lie below the quadratic piece; narrow the well if even the
    // shallowest admissible floor overshoots the normalization
    let mut lo = (-jet_q.value).max(0.0) * 1.0001 + 1e-9;
    let mut width = p.knobs.well_width.min(0.75 * (p.a - tl));
    while excess(width, lo) <= 0.0 {
        width *= 0.5;
        if width < 4.0 * (p.a - q) {
            return Err(Error::Construction(
                "quadratic piece alone overshoots the normalization int e^(2t) A = -e^(2a)".into(),
            ));
        }
    }
    let mut hi = lo.max(1.0);
    while excess(width, hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::Construction("cannot reach the normalization int e^(2t) A = -e^(2a)".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(width, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let depth = 0.5 * (lo + hi);
    let mut knots = left_knots(width, depth);
    knots.extend(right.into_iter().skip(1));
    let core = PiecewisePoly::hermite(&knots);
    let profile = Profile::from_parts(p, Origin::DeepWell { well_strength: big_b }, core);
    let report = validate_class_c(&profile);
    if let Some(f) = report.first_failure() {
        return Err(Error::Construction(format!("{}: {}", f.name, f.detail)));
    }
    Ok(profile)
}

/// Knots from `a` to `log M`: ramp to the plateau, ramp down through `b`,
/// trough, and the power-law tail.
fn right_knots(p: &ProfileParams, jet_a: Jet) -> Result<Vec<(f64, Jet)>> {
    let k = &p.knobs;
    let h = k.hump_height;
    let up = 2.0 * h / jet_a.slope;
    let down = 2.0 * h / k.slope_at_b;
    if p.a + up >= p.b - down {
        return Err(Error::Construction(format!(
            "hump ramps overlap: need a + {up:.3e} < b - {down:.3e}"
        )));
    }
    let al = p.alpha;
    let tr = p.log_m;
    let et = (-al * tr).exp();
    let jet_tail = Jet::new(-al * et, al * al * et, -al.powi(3) * et);
    let plateau = Jet::new(h, 0.0, 0.0);
    let mut knots = vec![
        (p.a, jet_a),
        (p.a + up, plateau),
        (p.b - down, plateau),
        (p.b, Jet::new(0.0, -k.slope_at_b, 0.0)),
    ];
    let hump_area: f64 = PiecewisePoly::hermite(&knots)
        .segments
        .iter()
        .map(|s| s.integral(s.x1))
        .sum();

    let room = tr - p.b;
    let trough = |depth: f64| -> Vec<(f64, Jet)> {
        let r2 = (0.5 * room).min(2.0 * depth / k.slope_at_b);
        vec![
            (p.b, Jet::new(0.0, -k.slope_at_b, 0.0)),
            (p.b + r2, Jet::new(-depth, 0.0, 0.0)),
            (tr, jet_tail),
        ]
    };
    // -int_b^inf A as a function of the trough depth
    let outer_mass = |depth: f64| -> f64 {
        let poly = PiecewisePoly::hermite(&trough(depth));
        -poly.segments.iter().map(|s| s.integral(s.x1)).sum::<f64>() + et
    };
    let wanted = (1.0 + k.vorticity_margin) * hump_area;
    let d_min = al * et * (1.0 + al * 0.5 * room).max(1.25);
    let depth = if outer_mass(d_min) >= wanted {
        d_min
    } else {
        let (mut lo, mut hi) = (d_min, d_min.max(1.0));
        while outer_mass(hi) < wanted {
            hi *= 2.0;
            if hi > 1e6 {
                return Err(Error::Construction("cannot size the trough on (b, log M)".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if outer_mass(mid) < wanted {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    knots.extend(trough(depth).into_iter().skip(1));
    Ok(knots)
}

/// Convex blend `theta * p1 + (1 - theta) * p0` (pointwise in `A`, hence in `Omega`).
pub fn blend(p0: &Profile, p1: &Profile, theta: f64) -> Result<Profile> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!("blend parameter {theta} outside [0, 1]")));
    }
    let (q0, q1) = (&p0.params, &p1.params);
    let same = |x: f64, y: f64| (x - y).abs() <= 1e-12 * (1.0 + x.abs());
    for (name, x, y) in [
        ("alpha", q0.alpha, q1.alpha),
        ("a", q0.a, q1.a),
        ("b", q0.b, q1.b),
        ("log M1", q0.log_m1, q1.log_m1),
        ("log M", q0.log_m, q1.log_m),
    ] {
        if !same(x, y) {
            return Err(Error::ParameterMismatch(format!("{name}: {x} vs {y}")));
        }
    }
    let core = PiecewisePoly::combine(&p0.core, 1.0 - theta, &p1.core, theta);
    let mut params = *q0;
    params.c0 = (1.0 - theta) * q0.c0 + theta * q1.c0;
    params.well_strength = (1.0 - theta) * q0.well_strength + theta * q1.well_strength;
    let origin = Origin::Blend {
        theta,
        well_strengths: [q0.well_strength, q1.well_strength],
    };
    Ok(Profile::from_parts(params, origin, core))
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn into_result(self) -> Result<()> {
        match self.first_failure() {
            None => Ok(()),
            Some(c) => Err(Error::ClassViolation(format!("{}: {}", c.name, c.detail))),
        }
    }
}

pub mod checks {
    pub const PARAMETERS: &str = "parameters";
    pub const LEFT_TAIL: &str = "left tail";
    pub const RIGHT_TAIL: &str = "right tail";
    pub const SMOOTHNESS: &str = "C2 gluing";
    pub const ZERO_COUNT: &str = "zeros of A";
    pub const WEIGHTED_AREA: &str = "int e^(2t) A < 0";
    pub const OMEGA_DECREASING: &str = "Omega' < 0";
    pub const OMEGA_INF: &str = "Omega(-inf) > 0";
    pub const VORTICITY_POSITIVE: &str = "G > 0";
    pub const TAIL_FORMULAS: &str = "tail formulas";
}

/// Checks the class conditions on a fine grid; failures are report entries.
pub fn validate_class_c(p: &Profile) -> ValidationReport {
    use checks::*;
    let mut r = ValidationReport::default();
    let q = &p.params;

    let pv = q.validate();
    let structural_ok = q.alpha > 0.0 && q.alpha < 2.0 && q.log_m1 < q.a && q.a < q.b && q.b < q.log_m;
    r.push(
        PARAMETERS,
        structural_ok,
        match &pv {
            Ok(()) => "ok".into(),
            Err(e) => e.to_string(),
        },
    );

    // core spline must meet both closed-form tails
    let tl = p.left_end();
    let tr = p.right_end();
    let first = &p.core.segments[0];
    let last = &p.core.segments[p.core.segments.len() - 1];
    let e = (2.0 * tl).exp();
    let left_gap = (first.value(tl) + 8.0 * q.c0 * e).abs()
        + (first.slope(tl) + 16.0 * q.c0 * e).abs()
        + (first.curvature(tl) + 32.0 * q.c0 * e).abs();
    let left_ok = q.c0 > 0.0 && left_gap < 1e-9 && (tl - q.log_m1).abs() < 1e-12;
    r.push(
        LEFT_TAIL,
        left_ok,
        format!("c0 = {:.6e}, jet mismatch at log M1 = {:.3e}", q.c0, left_gap),
    );
    let et = (-q.alpha * tr).exp();
    let right_gap = (last.value(tr) + q.alpha * et).abs()
        + (last.slope(tr) - q.alpha * q.alpha * et).abs()
        + (last.curvature(tr) + q.alpha.powi(3) * et).abs();
    r.push(
        RIGHT_TAIL,
        right_gap < 1e-9 && (tr - q.log_m).abs() < 1e-12,
        format!("jet mismatch at log M = {right_gap:.3e}"),
    );

    // jumps measured in the natural scale of the shorter adjacent segment
    let mut smooth_gap: f64 = 0.0;
    for w in p.core.segments.windows(2) {
        let x = w[0].x1;
        let h = (w[0].x1 - w[0].x0).min(w[1].x1 - w[1].x0);
        let (l, rr) = (w[0].jet(x), w[1].jet(x));
        let size = l.value.abs() + l.slope.abs() * h + l.curvature.abs() * h * h + f64::MIN_POSITIVE;
        let gap = (l.value - rr.value).abs() / size
            + (l.slope - rr.slope).abs() * h / size
            + (l.curvature - rr.curvature).abs() * h * h / size;
        smooth_gap = smooth_gap.max(gap);
    }
    r.push(SMOOTHNESS, smooth_gap < 1e-8, format!("max scaled jump {smooth_gap:.3e}"));

    // sign structure of A
    let n = 40_000;
    let lo = tl - 1.0;
    let hi = tr + 1.0;
    let dt = (hi - lo) / n as f64;
    let mut sign_changes = Vec::new();
    let mut prev_sign = 0.0;
    let mut prev_t = lo;
    for i in 0..=n {
        let t = lo + i as f64 * dt;
        let v = p.a(t);
        let s = if v > 0.0 {
            1.0
        } else if v < 0.0 {
            -1.0
        } else {
            0.0
        };
        if s != 0.0 {
            if prev_sign != 0.0 && s != prev_sign {
                sign_changes.push(0.5 * (prev_t + t));
            }
            prev_sign = s;
            prev_t = t;
        }
    }
    let zero_ok = sign_changes.len() == 2
        && (sign_changes[0] - q.a).abs() < 2.0 * dt
        && (sign_changes[1] - q.b).abs() < 2.0 * dt
        && p.a_prime(q.a) > 0.0
        && p.a_prime(q.b) < 0.0
        && p.a(q.a).abs() < 1e-12
        && p.a(q.b).abs() < 1e-12
        && p.a(lo) < 0.0;
    r.push(
        ZERO_COUNT,
        zero_ok,
        format!(
            "sign changes at {:?}; A'(a) = {:.4e}, A'(b) = {:.4e}",
            sign_changes,
            p.a_prime(q.a),
            p.a_prime(q.b)
        ),
    );

    let wide_lo = tl - 10.0;
    let wide_hi = tr + 25.0;
    let m = 40_000;
    let dw = (wide_hi - wide_lo) / m as f64;
    let mut max_wa = f64::NEG_INFINITY;
    let mut max_wp = f64::NEG_INFINITY;
    let mut min_g = f64::INFINITY;
    for i in 0..=m {
        let t = wide_lo + i as f64 * dw;
        max_wa = max_wa.max(p.weighted_area(t));
        max_wp = max_wp.max(p.omega_prime(t) * (2.0 * t).exp().max(1.0));
        min_g = min_g.min(p.g(t));
    }
    r.push(WEIGHTED_AREA, max_wa < 0.0, format!("max over grid {max_wa:.4e}"));
    r.push(OMEGA_DECREASING, max_wp < 0.0, format!("max scaled Omega' {max_wp:.4e}"));
    r.push(OMEGA_INF, p.omega_inf > 0.0, format!("Omega(-inf) = {:.6e}", p.omega_inf));
    r.push(VORTICITY_POSITIVE, min_g > 0.0, format!("min G = {min_g:.4e}"));

    // independent quadrature of Omega(t) = int_{-inf}^t e^{-2(t - tau)} G(tau) d tau
    let omega_quad = |t: f64| -> f64 {
        let mut pts = vec![t - 40.0];
        pts.extend(p.knots().into_iter().filter(|&k| k > t - 40.0 && k < t));
        pts.push(t);
        quad::adaptive_simpson_pieces(|tau| (-2.0 * (t - tau)).exp() * p.g(tau), &pts, 1e-11)
    };
    let mut tail_err: f64 = 0.0;
    for &t in &[tl - 2.0, tl, q.a, tr, tr + 3.0] {
        tail_err = tail_err.max((omega_quad(t) - p.omega(t)).abs());
    }
    let t1 = tl - 1.0;
    tail_err = tail_err.max((p.omega(t1) - (p.omega_inf - q.c0 * (2.0 * t1).exp())).abs());
    r.push(TAIL_FORMULAS, tail_err < 1e-8, format!("max deviation {tail_err:.3e}"));
    r
}
