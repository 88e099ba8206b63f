//! Complex eigenvalues `mu`, `Im mu > 0`, of
//! `-psi'' + m^2 psi + A psi / (Omega - mu) = 0` by two-sided shooting.
//!
//! Each side integrates the rescaled unknown `e^{-m|t|}`-weighted solution from
//! a far end where it is the constant first Volterra iterate. The a-priori error
//! of that start, `exp((1/2m) int_tail |v|) - 1`, is the accuracy budget that
//! fixes the window.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexGridFunction, GridFunction};
use crate::greens::Critical;
use crate::ode::{self, OdeOptions, State};
use crate::par::{self, Parallelism};
use crate::profile::Profile;
use crate::sturm::CriticalWavenumbers;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Coefficients along the line: `v = A/(Omega - mu)` and the weights of the
/// eigenpair functionals.
pub trait Coefficients: Sync {
    fn v(&self, t: f64) -> Complex64;

    /// `(v, A/|Omega - mu|^2, A/(Omega - mu)^2)`.
    fn parts(&self, t: f64) -> (Complex64, f64, Complex64) {
        (self.v(t), 0.0, ZERO)
    }

    /// Upper bound for `int_{-inf}^{-T} |v|` (`Side::Minus`) or `int_T^inf |v|`.
    fn tail_integral(&self, side: Side, big_t: f64) -> f64;

    /// Smallest half-window worth trying on each side.
    fn min_window(&self) -> (f64, f64) {
        (5.0, 5.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Minus,
    Plus,
}

/// `A / (Omega - mu)` for a profile and `mu` off the singular interval.
#[derive(Clone, Copy, Debug)]
pub struct ProfileCoefficients<'a> {
    pub profile: &'a Profile,
    pub mu: Complex64,
}

impl ProfileCoefficients<'_> {
    fn dist(&self, lo: f64, hi: f64) -> f64 {
        let x = self.mu.re.clamp(lo, hi);
        Complex64::new(self.mu.re - x, self.mu.im).norm()
    }
}

impl Coefficients for ProfileCoefficients<'_> {
    #[inline]
    fn v(&self, t: f64) -> Complex64 {
        let p = self.profile;
        Complex64::new(p.a(t), 0.0) / (Complex64::new(p.omega(t), 0.0) - self.mu)
    }

    #[inline]
    fn parts(&self, t: f64) -> (Complex64, f64, Complex64) {
        let p = self.profile;
        let a = p.a(t);
        let r = (Complex64::new(p.omega(t), 0.0) - self.mu).inv();
        let v = r * a;
        (v, a * r.norm_sqr(), v * r)
    }

    fn tail_integral(&self, side: Side, big_t: f64) -> f64 {
        let p = self.profile;
        match side {
            // |A| = 8 c0 e^{2t} and Omega in [Omega(-T), Omega(-inf)]
            Side::Minus => 4.0 * p.params.c0 * (-2.0 * big_t).exp() / self.dist(p.omega(-big_t), p.omega_inf()),
            // |A| = alpha e^{-alpha t} and Omega in (0, Omega(T)]
            Side::Plus => (-p.alpha() * big_t).exp() / self.dist(0.0, p.omega(big_t)),
        }
    }

    fn min_window(&self) -> (f64, f64) {
        let p = &self.profile.params;
        (p.log_m1.abs() + 1.0, p.log_m.abs() + 1.0)
    }
}

/// A potential given by a closure, with exponential tails of the given rates
/// (`f64::INFINITY` for compact support).
pub struct FnCoefficients<F> {
    pub v: F,
    pub rates: (f64, f64),
}

impl<F: Fn(f64) -> Complex64 + Sync> Coefficients for FnCoefficients<F> {
    fn v(&self, t: f64) -> Complex64 {
        (self.v)(t)
    }

    fn tail_integral(&self, side: Side, big_t: f64) -> f64 {
        let (t, rate) = match side {
            Side::Minus => (-big_t, self.rates.0),
            Side::Plus => (big_t, self.rates.1),
        };
        if rate.is_infinite() {
            return 0.0;
        }
        // generous factor for the sub-exponential prefactor
        2.0 * (self.v)(t).norm() / rate
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShootingOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Largest accepted a-priori error of the far-end start.
    pub tail_bound: f64,
    /// Fixed half-windows; chosen from `tail_bound` when absent.
    pub t_minus: Option<f64>,
    pub t_plus: Option<f64>,
    pub max_window: f64,
    /// Root-finder stopping criterion on `|W/(-2m)|`.
    pub root_tol: f64,
    pub max_iter: usize,
    /// Spacing of the sampled eigenfunction.
    pub sample_dt: f64,
    pub parallelism: Parallelism,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-14,
            tail_bound: 1e-10,
            t_minus: None,
            t_plus: None,
            max_window: 400.0,
            root_tol: 1e-10,
            max_iter: 80,
            sample_dt: 0.01,
            parallelism: Parallelism::default(),
        }
    }
}

impl ShootingOptions {
    fn ode(&self) -> OdeOptions {
        OdeOptions {
            rtol: self.rtol,
            atol: self.atol,
            ..OdeOptions::default()
        }
    }
}

fn apriori_bound(c: &impl Coefficients, side: Side, m: f64, big_t: f64) -> f64 {
    (c.tail_integral(side, big_t) / (2.0 * m)).exp_m1()
}

/// Half-window on `side` meeting the tail budget.
pub fn choose_window(c: &impl Coefficients, side: Side, m: f64, opts: &ShootingOptions) -> Result<f64> {
    let fixed = match side {
        Side::Minus => opts.t_minus,
        Side::Plus => opts.t_plus,
    };
    let (lo_minus, lo_plus) = c.min_window();
    let lo = match side {
        Side::Minus => lo_minus,
        Side::Plus => lo_plus,
    };
    if let Some(t) = fixed {
        let bound = apriori_bound(c, side, m, t);
        if !(bound < opts.tail_bound) || t < lo {
            return Err(Error::WindowTooSmall {
                bound,
                limit: opts.tail_bound,
            });
        }
        return Ok(t);
    }
    let mut t = lo;
    loop {
        let bound = apriori_bound(c, side, m, t);
        if bound < opts.tail_bound {
            return Ok(t);
        }
        if t > opts.max_window {
            return Err(Error::WindowTooSmall {
                bound,
                limit: opts.tail_bound,
            });
        }
        t += 1.0;
    }
}

/// `(psi, psi')` at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cauchy {
    pub psi: Complex64,
    pub dpsi: Complex64,
}

fn to_cauchy(side: Side, m: f64, s: f64, y0: Complex64, y1: Complex64) -> Cauchy {
    let e = (m * s).exp();
    let d = (y1 + y0 * m) * e;
    Cauchy {
        psi: y0 * e,
        dpsi: match side {
            Side::Minus => d,
            Side::Plus => -d,
        },
    }
}

/// The reflected coordinate `s` runs from `-T` upward; `t = s` on the minus side
/// and `t = -s` on the plus side.
fn t_of(side: Side, s: f64) -> f64 {
    match side {
        Side::Minus => s,
        Side::Plus => -s,
    }
}

/// Integrates one side from `s = -T` through the increasing `stops`, returning
/// `(psi, psi')` at each stop (in `t = t_of(side, s)`).
fn shoot_side_plain(
    c: &impl Coefficients,
    side: Side,
    m: f64,
    big_t: f64,
    stops: &[f64],
    opts: &ShootingOptions,
) -> Result<Vec<Cauchy>> {
    let rhs = |s: f64, y: &State<2>| -> State<2> { [y[1], c.v(t_of(side, s)) * y[0] - y[1] * (2.0 * m)] };
    let mut y = [ONE, ZERO];
    let mut s0 = -big_t;
    let mut out = Vec::with_capacity(stops.len());
    for &s1 in stops {
        y = ode::integrate(rhs, s0, s1, y, &opts.ode(), |_, _| {})?.0;
        out.push(to_cauchy(side, m, s1, y[0], y[1]));
        s0 = s1;
    }
    Ok(out)
}

/// Solution decaying at `-inf`, normalized so that `e^{-mt} psi -> 1`; `(psi, psi')` at 0.
pub fn shoot_minus(c: &impl Coefficients, m: f64, opts: &ShootingOptions) -> Result<Cauchy> {
    let t = choose_window(c, Side::Minus, m, opts)?;
    Ok(shoot_side_plain(c, Side::Minus, m, t, &[0.0], opts)?[0])
}

/// Solution decaying at `+inf`, normalized so that `e^{mt} psi -> 1`; `(psi, psi')` at 0.
pub fn shoot_plus(c: &impl Coefficients, m: f64, opts: &ShootingOptions) -> Result<Cauchy> {
    let t = choose_window(c, Side::Plus, m, opts)?;
    Ok(shoot_side_plain(c, Side::Plus, m, t, &[0.0], opts)?[0])
}

fn wronskian(minus: Cauchy, plus: Cauchy, m: f64) -> Complex64 {
    (minus.psi * plus.dpsi - minus.dpsi * plus.psi) / (-2.0 * m)
}

/// Wronskian of the two decaying solutions at `t = 0`, divided by its
/// zero-potential value `-2m`.
pub fn matching_with(c: &impl Coefficients, m: f64, opts: &ShootingOptions) -> Result<Complex64> {
    if !(m > 0.0) {
        return Err(Error::InvalidParameter(format!("wavenumber must be positive, got {m}")));
    }
    let minus = shoot_minus(c, m, opts)?;
    let plus = shoot_plus(c, m, opts)?;
    Ok(wronskian(minus, plus, m))
}

pub fn matching(p: &Profile, m: f64, mu: Complex64, opts: &ShootingOptions) -> Result<Complex64> {
    check_mu(p, mu)?;
    matching_with(&ProfileCoefficients { profile: p, mu }, m, opts)
}

/// Normalized Wronskian evaluated at each of `ts` (all within `[-2, 2]`-ish of the
/// matching point); for an exact integration these agree.
pub fn wronskian_profile(c: &impl Coefficients, m: f64, ts: &[f64], opts: &ShootingOptions) -> Result<Vec<Complex64>> {
    let tm = choose_window(c, Side::Minus, m, opts)?;
    let tp = choose_window(c, Side::Plus, m, opts)?;
    let mut sorted: Vec<f64> = ts.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let minus = shoot_side_plain(c, Side::Minus, m, tm, &sorted, opts)?;
    let rev: Vec<f64> = sorted.iter().rev().map(|t| -t).collect();
    let mut plus = shoot_side_plain(c, Side::Plus, m, tp, &rev, opts)?;
    plus.reverse();
    let ws: Vec<Complex64> = minus.iter().zip(&plus).map(|(a, b)| wronskian(*a, *b, m)).collect();
    // back to the caller's order
    Ok(ts
        .iter()
        .map(|t| ws[sorted.iter().position(|x| x == t).unwrap()])
        .collect())
}

fn check_mu(p: &Profile, mu: Complex64) -> Result<()> {
    if mu.im == 0.0 && (0.0..=p.omega_inf()).contains(&mu.re) {
        return Err(Error::SingularPotential {
            mu: mu.re,
            omega_inf: p.omega_inf(),
        });
    }
    if !mu.re.is_finite() || !mu.im.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite spectral parameter {mu}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// eigenfunction assembly

/// Side integrals of the glued eigenfunction before scaling.
#[derive(Clone, Copy, Debug, Default)]
struct SideIntegrals {
    psi_sq: Complex64,
    abs_sq: f64,
    dabs_sq: f64,
    imag_weight: f64,
    potential: Complex64,
    transversal: Complex64,
    moment: Complex64,
}

struct SideRun {
    at_zero: Cauchy,
    ints: SideIntegrals,
    /// `(t, psi, psi')` at accepted steps, ordered by increasing `t`.
    trace: Vec<(f64, Complex64, Complex64)>,
    big_t: f64,
}

fn shoot_side_full(c: &impl Coefficients, side: Side, m: f64, big_t: f64, opts: &ShootingOptions) -> Result<SideRun> {
    let rhs = |s: f64, y: &State<9>| -> State<9> {
        let t = t_of(side, s);
        let (v, w1, w2) = c.parts(t);
        let e = (2.0 * m * s).exp();
        let dpsi = y[1] + y[0] * m;
        let abs0 = y[0].norm_sqr() * e;
        let moment = match side {
            Side::Minus => v * y[0] * e,
            Side::Plus => v * y[0],
        };
        [
            y[1],
            v * y[0] - y[1] * (2.0 * m),
            y[0] * y[0] * e,
            Complex64::new(abs0, 0.0),
            Complex64::new(dpsi.norm_sqr() * e, 0.0),
            Complex64::new(w1 * abs0, 0.0),
            v * abs0,
            w2 * y[0] * y[0] * e,
            moment,
        ]
    };
    let mut y0 = [ZERO; 9];
    y0[0] = ONE;
    let mut trace = Vec::new();
    let (y, _) = ode::integrate(rhs, -big_t, 0.0, y0, &opts.ode(), |s, y| {
        let cy = to_cauchy(side, m, s, y[0], y[1]);
        trace.push((t_of(side, s), cy.psi, cy.dpsi));
    })?;
    if side == Side::Plus {
        trace.reverse();
    }
    Ok(SideRun {
        at_zero: to_cauchy(side, m, 0.0, y[0], y[1]),
        ints: SideIntegrals {
            psi_sq: y[2],
            abs_sq: y[3].re,
            dabs_sq: y[4].re,
            imag_weight: y[5].re,
            potential: y[6],
            transversal: y[7],
            moment: y[8],
        },
        trace,
        big_t,
    })
}

/// Residuals recorded with an eigenpair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `|W/(-2m)|` at the accepted `mu`.
    pub ode_residual: f64,
    /// `int A |psi|^2 / |Omega - mu|^2`, zero for a genuine eigenvalue.
    pub imag_identity: f64,
    /// `int A |psi|^2 / (Omega - mu)`, equal to `-1` under the energy normalization.
    pub potential_integral: Complex64,
    /// `int A psi^2 / (Omega - mu)^2`, nonzero at a simple eigenvalue.
    pub transversality: Complex64,
    /// `int e^{mt} A psi / (Omega - mu)`, equal to `-2m c_+`.
    pub moment: Complex64,
}

impl Residuals {
    pub fn potential_error(&self) -> f64 {
        (self.potential_integral + 1.0).norm()
    }
}

/// Tolerances an accepted eigenpair must meet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualTolerances {
    pub imag_identity: f64,
    pub potential_integral: f64,
    pub transversality: f64,
}

impl Default for ResidualTolerances {
    fn default() -> Self {
        Self {
            imag_identity: 1e-6,
            potential_integral: 1e-5,
            transversality: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexEigenpair {
    pub m: f64,
    pub mu: Complex64,
    /// Eigenfunction with `int |psi'|^2 + m^2 |psi|^2 = 1`, phase fixed by `psi(0) > 0`.
    pub psi: ComplexGridFunction,
    pub dpsi: ComplexGridFunction,
    pub residuals: Residuals,
    pub normalized: bool,
    /// `lim e^{mt} psi(t)` as `t -> inf`.
    pub c_plus: Complex64,
    /// `int psi^2`.
    pub psi_sq: Complex64,
    pub iterations: usize,
    /// The root was isolated by winding numbers before the local iteration.
    pub localized: bool,
    pub window: (f64, f64),
}

impl ComplexEigenpair {
    /// `d mu / d m = -2m int psi^2 / int A psi^2 / (Omega - mu)^2`.
    pub fn dmu_dm(&self) -> Complex64 {
        -self.psi_sq * (2.0 * self.m) / self.residuals.transversality
    }

    pub fn check(&self, tol: &ResidualTolerances) -> Result<()> {
        let r = &self.residuals;
        if !(r.imag_identity.abs() < tol.imag_identity) {
            return Err(Error::Residual(format!(
                "imaginary identity {:e} at m = {}, mu = {}",
                r.imag_identity, self.m, self.mu
            )));
        }
        if !(r.potential_error() < tol.potential_integral) {
            return Err(Error::Residual(format!(
                "potential integral {} at m = {}, mu = {}",
                r.potential_integral, self.m, self.mu
            )));
        }
        if !(r.transversality.norm() > tol.transversality) {
            return Err(Error::Residual(format!(
                "transversality {:e} at m = {}, mu = {}",
                r.transversality.norm(),
                self.m,
                self.mu
            )));
        }
        Ok(())
    }

    /// Eigenfunction at `t` from the sampled values (cubic Hermite).
    pub fn psi_at(&self, t: f64) -> Complex64 {
        hermite_grid(&self.psi, &self.dpsi, t)
    }
}

fn hermite(t0: f64, t1: f64, y0: Complex64, d0: Complex64, y1: Complex64, d1: Complex64, t: f64) -> Complex64 {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    y0 * h00 + d0 * (h10 * h) + y1 * h01 + d1 * (h11 * h)
}

fn hermite_grid(psi: &ComplexGridFunction, dpsi: &ComplexGridFunction, t: f64) -> Complex64 {
    let n = psi.len();
    let x = ((t - psi.t0) / psi.dt).clamp(0.0, (n - 1) as f64);
    let i = (x.floor() as usize).min(n - 2);
    hermite(
        psi.t(i),
        psi.t(i + 1),
        psi.values[i],
        dpsi.values[i],
        psi.values[i + 1],
        dpsi.values[i + 1],
        t,
    )
}

/// Resamples a step trace (increasing `t`) onto a uniform grid by quintic Hermite
/// interpolation, with `psi'' = (m^2 + v) psi` supplying the second derivatives.
fn resample(
    trace: &[(f64, Complex64, Complex64)],
    curvature: impl Fn(f64) -> Complex64,
    t0: f64,
    dt: f64,
    n: usize,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let dd: Vec<Complex64> = trace.iter().map(|&(t, u, _)| curvature(t) * u).collect();
    let mut psi = Vec::with_capacity(n);
    let mut dpsi = Vec::with_capacity(n);
    let mut j = 0;
    for i in 0..n {
        let t = t0 + i as f64 * dt;
        while j + 2 < trace.len() && trace[j + 1].0 < t {
            j += 1;
        }
        let (a, b) = (trace[j], trace[j + 1]);
        let h = b.0 - a.0;
        if h <= 0.0 {
            psi.push(a.1);
            dpsi.push(a.2);
            continue;
        }
        let s = ((t - a.0) / h).clamp(0.0, 1.0);
        let (s2, s3) = (s * s, s * s * s);
        let (s4, s5) = (s3 * s, s3 * s2);
        let w = [
            1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
            (s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5) * h,
            (0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5) * h * h,
            10.0 * s3 - 15.0 * s4 + 6.0 * s5,
            (-4.0 * s3 + 7.0 * s4 - 3.0 * s5) * h,
            (0.5 * s3 - s4 + 0.5 * s5) * h * h,
        ];
        let dw = [
            (-30.0 * s2 + 60.0 * s3 - 30.0 * s4) / h,
            1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
            (s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4) * h,
            (30.0 * s2 - 60.0 * s3 + 30.0 * s4) / h,
            -12.0 * s2 + 28.0 * s3 - 15.0 * s4,
            (1.5 * s2 - 4.0 * s3 + 2.5 * s4) * h,
        ];
        let y = [a.1, a.2, dd[j], b.1, b.2, dd[j + 1]];
        psi.push((0..6).map(|k| y[k] * w[k]).sum());
        dpsi.push((0..6).map(|k| y[k] * dw[k]).sum());
    }
    (psi, dpsi)
}

/// Glues the two decaying solutions at `mu` into a normalized eigenfunction.
pub fn assemble_eigenpair(p: &Profile, m: f64, mu: Complex64, opts: &ShootingOptions) -> Result<ComplexEigenpair> {
    check_mu(p, mu)?;
    let c = ProfileCoefficients { profile: p, mu };
    let tm = choose_window(&c, Side::Minus, m, opts)?;
    let tp = choose_window(&c, Side::Plus, m, opts)?;
    let sides = [Side::Minus, Side::Plus];
    let runs = par::map(opts.parallelism, &sides, |&side| {
        shoot_side_full(&c, side, m, if side == Side::Minus { tm } else { tp }, opts)
    });
    let mut runs = runs.into_iter();
    let minus = runs.next().unwrap()?;
    let plus = runs.next().unwrap()?;
    let w = wronskian(minus.at_zero, plus.at_zero, m);

    // scale the plus solution onto the minus one at t = 0
    let (a, b) = (minus.at_zero, plus.at_zero);
    let r = if b.psi.norm() * m >= b.dpsi.norm() { a.psi / b.psi } else { a.dpsi / b.dpsi };
    let (im, ip) = (&minus.ints, &plus.ints);
    let r2 = r * r;
    let ra = r.norm_sqr();
    let energy = im.dabs_sq + ra * ip.dabs_sq + m * m * (im.abs_sq + ra * ip.abs_sq);
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::ZeroNorm);
    }
    let phase = if a.psi.norm() > 0.0 { a.psi.conj() / a.psi.norm() } else { ONE };
    let k = phase / energy.sqrt();
    let k2 = k * k;
    let ka = k.norm_sqr();

    let residuals = Residuals {
        ode_residual: w.norm(),
        imag_identity: ka * (im.imag_weight + ra * ip.imag_weight),
        potential_integral: (im.potential + ip.potential * ra) * ka,
        transversality: (im.transversal + ip.transversal * r2) * k2,
        moment: (im.moment + ip.moment * r) * k,
    };

    let dt = opts.sample_dt;
    let lo = -(tm / dt).floor() * dt;
    let n = ((tp - lo) / dt).floor() as usize + 1;
    let mut trace: Vec<(f64, Complex64, Complex64)> = minus.trace.iter().map(|&(t, u, d)| (t, u * k, d * k)).collect();
    let kr = k * r;
    trace.extend(plus.trace.iter().skip(1).map(|&(t, u, d)| (t, u * kr, d * kr)));
    let (psi, dpsi) = resample(&trace, |t| c.v(t) + m * m, lo, dt, n);

    Ok(ComplexEigenpair {
        m,
        mu,
        psi: GridFunction { t0: lo, dt, values: psi },
        dpsi: GridFunction { t0: lo, dt, values: dpsi },
        residuals,
        normalized: true,
        c_plus: kr,
        psi_sq: (im.psi_sq + ip.psi_sq * r2) * k2,
        iterations: 0,
        localized: false,
        window: (-minus.big_t, plus.big_t),
    })
}

// ---------------------------------------------------------------------------
// root finding

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RootOptions {
    pub shooting: ShootingOptions,
    pub tolerances: ResidualTolerances,
    /// Iterates with `Im mu` below this are treated as collapse onto the real axis.
    pub im_floor: f64,
    /// On local failure, isolate a root by winding numbers and restart from it.
    pub globalize: bool,
    /// Lower edge of the localization contour; `None` uses `1e-3 Omega(-inf)`.
    pub delta_min: Option<f64>,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            shooting: ShootingOptions::default(),
            tolerances: ResidualTolerances::default(),
            im_floor: 1e-9,
            globalize: true,
            delta_min: None,
        }
    }
}

fn solve_root(p: &Profile, m: f64, seed: Complex64, opts: &RootOptions) -> Result<(Complex64, usize)> {
    let so = &opts.shooting;
    let w_at = |mu: Complex64| matching(p, m, mu, so);
    let scale = p.omega_inf().max(mu_scale(seed));
    let limit = 10.0 * (p.omega_inf() + max_abs_a(p) / (m * m)) + 1.0;
    let mut x0 = seed;
    let mut f0 = w_at(x0)?;
    if f0.norm() < so.root_tol {
        return Ok((x0, 0));
    }
    let step = 1e-4 * scale;
    let mut x1 = seed + Complex64::new(step, 0.5 * step);
    let mut f1 = w_at(x1)?;
    for it in 1..=so.max_iter {
        if f1.norm() < so.root_tol {
            return Ok((x1, it));
        }
        let denom = f1 - f0;
        let mut x2 = if denom.norm() > 0.0 {
            x1 - f1 * (x1 - x0) / denom
        } else {
            // numerical derivative fallback
            let h = 1e-7 * scale;
            let d = (w_at(x1 + h)? - w_at(x1 - h)?) / (2.0 * h);
            x1 - f1 / d
        };
        // keep to the upper half-plane: shorten steps that would lose more than
        // three quarters of the imaginary part
        if x2.im < 0.25 * x1.im {
            let lam = 0.75 * x1.im / (x1.im - x2.im);
            x2 = x1 + (x2 - x1) * lam;
        }
        if x2.im < opts.im_floor {
            return Err(Error::BoundaryApproach { im: x2.im });
        }
        if !(x2.norm() < limit) {
            return Err(Error::RootNotFound(format!("iterate {x2} left the admissible region at m = {m}")));
        }
        let f2 = w_at(x2)?;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        if (x1 - x0).norm() < 1e-15 * (1.0 + x1.norm()) && f1.norm() < 1e3 * so.root_tol {
            return Ok((x1, it));
        }
    }
    // Newton polish with central differences
    for it in 0..10 {
        let h = 1e-7 * scale;
        let d = (w_at(x1 + h)? - w_at(x1 - h)?) / (2.0 * h);
        x1 -= f1 / d;
        if x1.im < opts.im_floor {
            return Err(Error::BoundaryApproach { im: x1.im });
        }
        f1 = w_at(x1)?;
        if f1.norm() < so.root_tol {
            return Ok((x1, so.max_iter + it));
        }
    }
    Err(Error::RootNotFound(format!(
        "no convergence at m = {m} from seed {seed}: last mu = {x1}, |W| = {:e}",
        f1.norm()
    )))
}

fn mu_scale(mu: Complex64) -> f64 {
    mu.norm().max(1e-3)
}

/// Largest `|A|` over the line (attained in the core or at a tail junction).
pub fn max_abs_a(p: &Profile) -> f64 {
    let (lo, hi) = (p.params.log_m1 - 1.0, p.params.log_m + 1.0);
    let n = 20_000;
    (0..=n)
        .map(|i| p.a(lo + (hi - lo) * i as f64 / n as f64).abs())
        .fold(0.0, f64::max)
}

/// Eigenvalue near `seed` with its normalized eigenfunction and residuals.
pub fn find_eigenvalue(p: &Profile, m: f64, seed: Complex64, opts: &RootOptions) -> Result<ComplexEigenpair> {
    if !(seed.im > 0.0) {
        return Err(Error::InvalidParameter(format!("seed must lie in the upper half-plane, got {seed}")));
    }
    let (mu, iterations, localized) = match solve_root(p, m, seed, opts) {
        Ok((mu, it)) => (mu, it, false),
        Err(local) if opts.globalize && matches!(local, Error::BoundaryApproach { .. } | Error::RootNotFound(_)) => {
            match localize(p, m, opts)? {
                Some(start) => {
                    let (mu, it) = solve_root(p, m, start, opts)?;
                    (mu, it, true)
                }
                None => return Err(local),
            }
        }
        Err(e) => return Err(e),
    };
    let mut pair = assemble_eigenpair(p, m, mu, &opts.shooting)?;
    pair.iterations = iterations;
    pair.localized = localized;
    pair.check(&opts.tolerances)?;
    Ok(pair)
}

/// Isolates an eigenvalue by repeated halving of the enclosing contour, keeping
/// a half with nonzero winding. `None` when the contour encloses no zero.
pub fn localize(p: &Profile, m: f64, opts: &RootOptions) -> Result<Option<Complex64>> {
    let delta_min = opts.delta_min.unwrap_or(1e-3 * p.omega_inf());
    let scan = ScanOptions {
        shooting: opts.shooting,
        ..ScanOptions::default()
    };
    let mut rect = Contour::enclosing(p, m, delta_min);
    let mut winding = scan_no_eigenvalue(p, m, &rect, &scan)?.winding;
    if winding == 0 {
        return Ok(None);
    }
    for _ in 0..60 {
        let (w, h) = (rect.re_hi - rect.re_lo, rect.im_hi - rect.im_lo);
        if w.max(h) < 0.25 * rect.im_lo {
            break;
        }
        // split slightly off-centre so a root on the symmetry line of a
        // previous cut does not sit on the new edge
        let f = 0.5 + 0.0123;
        let (first, second) = if w >= h {
            let x = rect.re_lo + f * w;
            (Contour { re_hi: x, ..rect }, Contour { re_lo: x, ..rect })
        } else {
            let y = rect.im_lo + f * h;
            (Contour { im_hi: y, ..rect }, Contour { im_lo: y, ..rect })
        };
        let w1 = scan_no_eigenvalue(p, m, &first, &scan)?.winding;
        if w1 != 0 {
            rect = first;
            winding = w1;
        } else {
            rect = second;
        }
    }
    let _ = winding;
    Ok(Some(Complex64::new(
        0.5 * (rect.re_lo + rect.re_hi),
        0.5 * (rect.im_lo + rect.im_hi),
    )))
}

// ---------------------------------------------------------------------------
// branch points

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub d: Critical,
    pub m: f64,
    pub mu: Complex64,
    /// First-order coefficient `D` of the perturbation expansion.
    pub coefficient: Complex64,
}

/// First-order guess for the eigenvalue at distance `h` from the branch point
/// `(m_d, Omega(d))`: `mu = Omega(d) - 2 m_d (m - m_d) / D` with `D` the
/// boundary value from above of `int A psi0^2 / (Omega - Omega(d))^2`.
pub fn seed_from_branch_point(p: &Profile, crit: &CriticalWavenumbers, d: Critical, h: f64) -> Result<Seed> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("offset h must be positive, got {h}")));
    }
    let (m0, bottom) = match d {
        Critical::A => (crit.m_a, &crit.bottom_a),
        Critical::B => (crit.m_b, &crit.bottom_b),
    };
    let x = d.point(p);
    let mesh = &bottom.mesh;
    let psi0 = &bottom.eigvec;
    let i0 = mesh.nearest(x);
    let psi_d = psi0[i0];
    if psi_d.abs() < 1e-8 {
        return Err(Error::DegenerateEigenfunction(psi_d.abs()));
    }
    let vd = crate::greens::Potential::critical(p, d);
    let wp = p.omega_prime(x);
    let f: Vec<f64> = mesh.nodes.iter().zip(psi0).map(|(&t, &u)| vd.real(t) * u * u).collect();
    let fd = vd.real(x) * psi_d * psi_d;
    // f/(Omega - Omega(d)) minus its simple pole, which is integrated in closed form
    let mut q: Vec<f64> = mesh
        .nodes
        .iter()
        .zip(&f)
        .map(|(&t, &ft)| if t == x { 0.0 } else { ft / p.omega_minus(t, x) - fd / (wp * (t - x)) })
        .collect();
    if mesh.nodes[i0] == x && i0 > 0 && i0 + 1 < q.len() {
        q[i0] = 0.5 * (q[i0 - 1] + q[i0 + 1]);
    }
    let pv = mesh.integrate(&q) + fd / wp * ((mesh.hi() - x) / (x - mesh.lo())).ln();
    let coefficient = Complex64::new(pv, std::f64::consts::PI * fd / wp.abs());
    let m = match d {
        Critical::A => m0 - h,
        Critical::B => m0 + h,
    };
    let mu = Complex64::new(p.omega(x), 0.0) - coefficient.inv() * (2.0 * m0 * (m - m0));
    Ok(Seed { d, m, mu, coefficient })
}

// ---------------------------------------------------------------------------
// branch tracing

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BranchOptions {
    pub n_steps: usize,
    /// Offset from the branch points; `None` picks `1%` of the window.
    pub h0: Option<f64>,
    /// Stop once `Im mu` drops below this; `None` uses `1e-3 Omega(-inf)`.
    pub delta_min: Option<f64>,
    pub min_step: f64,
    pub root: RootOptions,
}

impl Default for BranchOptions {
    fn default() -> Self {
        Self {
            n_steps: 50,
            h0: None,
            delta_min: None,
            min_step: 1e-4,
            root: RootOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchSample {
    pub m: f64,
    pub mu: Complex64,
    pub dmu_dm: Complex64,
    pub residuals: Residuals,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DispersionBranch {
    /// Ordered by strictly decreasing `m`.
    pub samples: Vec<BranchSample>,
    pub m_a: f64,
    pub m_b: f64,
    pub h0: f64,
    /// `mu` extrapolated to `m -> m_a` and `m -> m_b`.
    pub endpoint_a: Complex64,
    pub endpoint_b: Complex64,
    pub stop_reason: String,
}

/// Quadratic extrapolation of the first three samples to `m_end`.
fn extrapolate(samples: &[BranchSample], m_end: f64) -> Complex64 {
    match samples.len() {
        0 => Complex64::new(f64::NAN, f64::NAN),
        1 => samples[0].mu,
        2 => {
            let (s0, s1) = (samples[0], samples[1]);
            s0.mu + (s1.mu - s0.mu) * ((m_end - s0.m) / (s1.m - s0.m))
        }
        _ => {
            let (x, y): (Vec<f64>, Vec<Complex64>) = samples[..3].iter().map(|s| (s.m, s.mu)).unzip();
            let mut acc = ZERO;
            for i in 0..3 {
                let mut l = 1.0;
                for j in 0..3 {
                    if j != i {
                        l *= (m_end - x[j]) / (x[i] - x[j]);
                    }
                }
                acc += y[i] * l;
            }
            acc
        }
    }
}

/// Follows the unstable eigenvalue from just below `m_a` down to just above `m_b`.
pub fn trace_branch(p: &Profile, crit: &CriticalWavenumbers, opts: &BranchOptions) -> Result<DispersionBranch> {
    let (m_a, m_b) = (crit.m_a, crit.m_b);
    if !(m_a > m_b) {
        return Err(Error::InvalidParameter(format!("empty window: m_a = {m_a}, m_b = {m_b}")));
    }
    let width = m_a - m_b;
    let h0 = opts.h0.unwrap_or((0.01 * width).max(1e-3));
    let delta_min = opts.delta_min.unwrap_or(1e-3 * p.omega_inf());
    let m_stop = m_b + h0;
    let seed = seed_from_branch_point(p, crit, Critical::A, h0)?;
    let first = find_eigenvalue(p, seed.m, seed.mu, &opts.root).map_err(|e| Error::Continuation {
        m: seed.m,
        reason: format!("first corrector from the branch seed failed: {e}"),
    })?;
    let sample = |pair: &ComplexEigenpair| BranchSample {
        m: pair.m,
        mu: pair.mu,
        dmu_dm: pair.dmu_dm(),
        residuals: pair.residuals,
    };
    let mut samples = vec![sample(&first)];
    let nominal = width / opts.n_steps as f64;
    let mut step = nominal;
    let stop_reason;
    loop {
        let last = *samples.last().unwrap();
        if last.m <= m_stop + 1e-12 {
            stop_reason = format!("reached m_b + h0 = {m_stop}");
            break;
        }
        // Im mu starts small next to m_a too; only a falling Im mu ends the branch
        let falling = samples.len() >= 2 && last.mu.im < samples[samples.len() - 2].mu.im;
        if falling && last.mu.im < delta_min {
            stop_reason = format!("Im mu = {:e} fell below delta_min = {delta_min:e}", last.mu.im);
            break;
        }
        let m_next = (last.m - step).max(m_stop);
        let dm = m_next - last.m;
        let mut pred = last.mu + last.dmu_dm * dm;
        if pred.im <= 0.0 {
            pred.im = 0.5 * last.mu.im;
        }
        match find_eigenvalue(p, m_next, pred, &opts.root) {
            Ok(pair) => {
                samples.push(sample(&pair));
                step = (step * 1.5).min(nominal);
            }
            Err(e) => {
                step *= 0.5;
                if step < opts.min_step {
                    return Err(Error::Continuation {
                        m: last.m,
                        reason: format!("corrector failed with step below {}: {e}", opts.min_step),
                    });
                }
            }
        }
    }
    // Extra samples between the branch points and the first/last regular sample
    // so the endpoint extrapolation works at a scale where mu(m) is nearly linear.
    let h_end = 0.25 * h0;
    let mut head = Vec::new();
    for k in 1..=3 {
        let s = seed_from_branch_point(p, crit, Critical::A, k as f64 * h_end)?;
        if let Ok(pair) = find_eigenvalue(p, s.m, s.mu, &opts.root) {
            head.push(sample(&pair));
        }
    }
    let reached_b = samples.last().unwrap().m <= m_stop + 1e-12;
    let mut tail = Vec::new();
    if reached_b {
        let mut prev = *samples.last().unwrap();
        for k in (1..=3).rev() {
            let m = m_b + k as f64 * h_end;
            let mut pred = prev.mu + prev.dmu_dm * (m - prev.m);
            if pred.im <= 0.0 {
                pred.im = 0.5 * prev.mu.im;
            }
            match find_eigenvalue(p, m, pred, &opts.root) {
                Ok(pair) => {
                    prev = sample(&pair);
                    tail.push(prev);
                }
                Err(_) => break,
            }
        }
    }
    let endpoint_a = if head.len() == 3 { extrapolate(&head, m_a) } else { extrapolate(&samples, m_a) };
    let mut rev_tail: Vec<BranchSample> = tail.iter().rev().copied().collect();
    if rev_tail.len() < 3 {
        rev_tail = samples.iter().rev().copied().collect();
    }
    let endpoint_b = extrapolate(&rev_tail, m_b);
    head.extend(samples);
    head.extend(tail);
    let samples = head;
    Ok(DispersionBranch {
        samples,
        m_a,
        m_b,
        h0,
        endpoint_a,
        endpoint_b,
        stop_reason,
    })
}

/// Five-point centered difference of `mu(m)` against the recorded `d mu / d m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    pub m: f64,
    pub finite_difference: Complex64,
    pub formula: Complex64,
    pub relative_error: f64,
}

/// Derivative checks at every sample whose four neighbours are equally spaced.
pub fn derivative_checks(branch: &DispersionBranch) -> Vec<DerivativeCheck> {
    let s = &branch.samples;
    let mut out = Vec::new();
    for k in 2..s.len().saturating_sub(2) {
        let h = s[k].m - s[k + 1].m;
        let even = [s[k - 2].m - s[k - 1].m, s[k - 1].m - s[k].m, s[k + 1].m - s[k + 2].m]
            .iter()
            .all(|d| (d - h).abs() < 1e-9 * h.abs().max(1e-300));
        if !even || h <= 0.0 {
            continue;
        }
        // m decreases with the index
        let fd = (s[k + 2].mu - s[k + 1].mu * 8.0 + s[k - 1].mu * 8.0 - s[k - 2].mu) / (12.0 * h);
        let formula = s[k].dmu_dm;
        out.push(DerivativeCheck {
            m: s[k].m,
            finite_difference: fd,
            formula,
            relative_error: (fd - formula).norm() / formula.norm(),
        });
    }
    out
}

// ---------------------------------------------------------------------------
// argument principle

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl Contour {
    /// Rectangle enclosing every possible eigenvalue with `Im mu >= delta_min`.
    ///
    /// Testing the equation against `conj(psi)` gives
    /// `dist(mu, [0, Omega(-inf)]) <= max|A| / m^2`, which sizes the box.
    pub fn enclosing(p: &Profile, m: f64, delta_min: f64) -> Contour {
        let reach = 1.05 * max_abs_a(p) / (m * m) + 0.05 * p.omega_inf();
        Contour {
            re_lo: -reach,
            re_hi: p.omega_inf() + reach,
            im_lo: delta_min,
            im_hi: reach.max(2.0 * delta_min),
        }
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_lo, self.im_lo),
            Complex64::new(self.re_hi, self.im_lo),
            Complex64::new(self.re_hi, self.im_hi),
            Complex64::new(self.re_lo, self.im_hi),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanOptions {
    pub shooting: ShootingOptions,
    /// Initial points per edge.
    pub points_per_edge: usize,
    /// Largest accepted phase increment between neighbouring points.
    pub max_phase_step: f64,
    pub max_depth: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            shooting: ShootingOptions::default(),
            points_per_edge: 24,
            max_phase_step: std::f64::consts::FRAC_PI_4,
            max_depth: 24,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExclusionCertificate {
    pub m: f64,
    pub contour: Contour,
    pub winding: i64,
    /// Distance of the accumulated phase / 2 pi from the integer reported.
    pub quadrature_error: f64,
    pub largest_phase_step: f64,
    pub evaluations: usize,
    /// Eigenvalues with `Im mu < contour.im_lo` are not excluded.
    pub caveat: String,
}

impl ExclusionCertificate {
    pub fn certifies_empty(&self) -> bool {
        self.winding == 0
    }
}

/// Winding number of the matching function around `contour`.
pub fn scan_no_eigenvalue(p: &Profile, m: f64, contour: &Contour, opts: &ScanOptions) -> Result<ExclusionCertificate> {
    if !(contour.im_lo > 0.0) || !(contour.im_hi > contour.im_lo) || !(contour.re_hi > contour.re_lo) {
        return Err(Error::InvalidParameter(format!("degenerate contour {contour:?}")));
    }
    let so = opts.shooting;
    let w_at = |z: Complex64| -> Result<Complex64> {
        // the bottom edge may cross the real axis only outside [0, Omega(-inf)]
        matching(p, m, z, &so)
    };
    let corners = contour.corners();
    let n = opts.points_per_edge.max(2);
    let mut params = Vec::with_capacity(4 * n);
    for k in 0..4 {
        for i in 0..n {
            params.push((k, i as f64 / n as f64));
        }
    }
    let point = |k: usize, s: f64| corners[k] + (corners[(k + 1) % 4] - corners[k]) * s;
    let values = par::map(so.parallelism, &params, |&(k, s)| w_at(point(k, s)));
    let mut vals = Vec::with_capacity(values.len());
    for v in values {
        vals.push(v?);
    }
    let mut evaluations = vals.len();
    let mut total = 0.0;
    let mut largest: f64 = 0.0;
    let len = params.len();
    for j in 0..len {
        let (k, s0) = params[j];
        let (w0, w1) = (vals[j], vals[(j + 1) % len]);
        let s1 = if (j + 1) % n == 0 { 1.0 } else { params[j + 1].1 };
        let (phase, big, evals) = track(&w_at, &|s| point(k, s), s0, s1, w0, w1, opts, 0)?;
        total += phase;
        largest = largest.max(big);
        evaluations += evals;
    }
    let turns = total / std::f64::consts::TAU;
    let winding = turns.round();
    let quadrature_error = (turns - winding).abs();
    if quadrature_error > 0.1 {
        return Err(Error::Inconclusive(format!(
            "accumulated phase {turns:.4} turns is not near an integer at m = {m}"
        )));
    }
    Ok(ExclusionCertificate {
        m,
        contour: *contour,
        winding: winding as i64,
        quadrature_error,
        largest_phase_step: largest,
        evaluations,
        caveat: format!(
            "eigenvalues with Im mu < {:e} are not excluded by this scan",
            contour.im_lo
        ),
    })
}

#[allow(clippy::too_many_arguments)]
fn track<W, P>(
    w_at: &W,
    point: &P,
    s0: f64,
    s1: f64,
    w0: Complex64,
    w1: Complex64,
    opts: &ScanOptions,
    depth: usize,
) -> Result<(f64, f64, usize)>
where
    W: Fn(Complex64) -> Result<Complex64>,
    P: Fn(f64) -> Complex64,
{
    let dphi = (w1 / w0).arg();
    if dphi.abs() < opts.max_phase_step {
        return Ok((dphi, dphi.abs(), 0));
    }
    if depth >= opts.max_depth {
        return Err(Error::Inconclusive(format!(
            "phase step {dphi:.3} not resolved near mu = {}",
            point(0.5 * (s0 + s1))
        )));
    }
    let sm = 0.5 * (s0 + s1);
    let wm = w_at(point(sm))?;
    let (a, ba, ea) = track(w_at, point, s0, sm, w0, wm, opts, depth + 1)?;
    let (b, bb, eb) = track(w_at, point, sm, s1, wm, w1, opts, depth + 1)?;
    Ok((a + b, ba.max(bb), ea + eb + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero() -> FnCoefficients<impl Fn(f64) -> Complex64 + Sync> {
        FnCoefficients {
            v: |_t: f64| ZERO,
            rates: (f64::INFINITY, f64::INFINITY),
        }
    }

    #[test]
    fn zero_potential_solutions_are_pure_exponentials() {
        let o = ShootingOptions::default();
        for m in [0.5, 2.0, 7.0] {
            let a = shoot_minus(&zero(), m, &o).unwrap();
            let b = shoot_plus(&zero(), m, &o).unwrap();
            assert!((a.psi - 1.0).norm() < 1e-14 && (a.dpsi - m).norm() < 1e-13);
            assert!((b.psi - 1.0).norm() < 1e-14 && (b.dpsi + m).norm() < 1e-13);
            assert!((matching_with(&zero(), m, &o).unwrap() - 1.0).norm() < 1e-13);
        }
    }

    #[test]
    fn reflectionless_bound_state() {
        // -psi'' - 2 sech^2 psi = -psi has psi = sech: zero of the matching at m = 1
        let c = FnCoefficients {
            v: |t: f64| Complex64::new(-2.0 / t.cosh().powi(2), 0.0),
            rates: (2.0, 2.0),
        };
        let o = ShootingOptions::default();
        assert!(matching_with(&c, 1.0, &o).unwrap().norm() < 1e-8);
        assert!(matching_with(&c, 1.2, &o).unwrap().norm() > 1e-2);
        // even potential: mirrored shots
        let a = shoot_minus(&c, 1.3, &o).unwrap();
        let b = shoot_plus(&c, 1.3, &o).unwrap();
        assert!((a.psi - b.psi).norm() < 1e-9 && (a.dpsi + b.dpsi).norm() < 1e-9);
    }

    #[test]
    fn window_budget_is_enforced() {
        let c = FnCoefficients {
            v: |t: f64| Complex64::new(-1.0 / t.cosh(), 0.0),
            rates: (1.0, 1.0),
        };
        let o = ShootingOptions {
            t_minus: Some(3.0),
            ..ShootingOptions::default()
        };
        assert!(matches!(shoot_minus(&c, 1.0, &o), Err(Error::WindowTooSmall { .. })));
    }
}
