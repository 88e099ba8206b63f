//! Physical-plane quantities: radial velocity profile, vorticity eigenfunction in
//! `s = e^t`, stream function, perturbation velocity and the far-field moment.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::ComplexGridFunction;
use crate::profile::Profile;
use crate::quad::gauss_legendre;
use crate::shooting::ComplexEigenpair;

const I: Complex64 = Complex64::new(0.0, 1.0);

// ---------------------------------------------------------------------------
// background flow

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfiles {
    pub s: Vec<f64>,
    /// Vorticity `G(s)`.
    pub g: Vec<f64>,
    /// Angular velocity `R(s) = s^{-2} int_0^s tau G(tau) d tau`, by quadrature.
    pub r: Vec<f64>,
    /// `B(s) = G'(s) / s`.
    pub b: Vec<f64>,
    /// Speed `|V| = s R(s)`.
    pub speed: Vec<f64>,
}

/// `int_{-inf}^t e^{2u} G(u) du`, closed form in the two tails and
/// Gauss-Legendre over the spline pieces.
fn swirl_integral(p: &Profile, t: f64) -> f64 {
    let knots = p.knots();
    let (lo, hi) = (knots[0], knots[knots.len() - 1]);
    let c0 = p.params.c0;
    let left = |x: f64| p.omega_inf() * (2.0 * x).exp() - c0 * (4.0 * x).exp();
    if t <= lo {
        return left(t);
    }
    let mut acc = left(lo);
    let f = |u: f64| (2.0 * u).exp() * p.g(u);
    for w in knots.windows(2) {
        let (x0, x1) = (w[0], w[1].min(t));
        if x1 <= x0 {
            break;
        }
        let panels = ((x1 - x0) / 0.25).ceil().max(1.0) as usize;
        acc += gauss_legendre(f, x0, x1, panels);
    }
    if t > hi {
        let k = 2.0 - p.alpha();
        acc += ((k * t).exp() - (k * hi).exp()) / k;
    }
    acc
}

pub fn radial_profiles(p: &Profile, s: &[f64]) -> Result<RadialProfiles> {
    if let Some(&bad) = s.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::InvalidParameter(format!("radius {bad} must be positive")));
    }
    let mut out = RadialProfiles {
        s: s.to_vec(),
        g: Vec::with_capacity(s.len()),
        r: Vec::with_capacity(s.len()),
        b: Vec::with_capacity(s.len()),
        speed: Vec::with_capacity(s.len()),
    };
    for &x in s {
        let t = x.ln();
        let r = swirl_integral(p, t) / (x * x);
        out.g.push(p.g(t));
        out.r.push(r);
        // dG/ds = G_t / s and G_t = A
        out.b.push(p.a(t) / (x * x));
        out.speed.push(x * r);
    }
    Ok(out)
}

/// Least-squares `C` in `R(s) - s^{-alpha} / (2 - alpha) = C s^{-2}` over `s`.
pub fn fit_tail_constant(p: &Profile, s: &[f64]) -> Result<f64> {
    let prof = radial_profiles(p, s)?;
    let al = p.alpha();
    let (mut num, mut den) = (0.0, 0.0);
    for (x, r) in prof.s.iter().zip(&prof.r) {
        let basis = x.powi(-2);
        num += basis * (r - x.powf(-al) / (2.0 - al));
        den += basis * basis;
    }
    Ok(num / den)
}

// ---------------------------------------------------------------------------
// stream function

/// Declared power-law behavior of a vorticity sample beyond its grid:
/// `g ~ g(s_0) (s / s_0)^left` towards the origin and `g ~ g(s_end) (s / s_end)^{-right}`
/// at infinity. `None` declares that the sample already vanishes there.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PowerTails {
    pub left: Option<f64>,
    pub right: Option<f64>,
}

fn local_cubic(i: usize, n: usize) -> (usize, [f64; 4]) {
    if i == 0 {
        (0, [0.0, 1.0, 2.0, 3.0])
    } else if i + 2 >= n {
        (n - 4, [-2.0, -1.0, 0.0, 1.0])
    } else {
        (i - 1, [-1.0, 0.0, 1.0, 2.0])
    }
}

/// `int` over cell `i` of the local-cubic interpolant of `v` times `tau^power`.
fn cell_integral(v: &[Complex64], s0: f64, ds: f64, i: usize, power: f64) -> Complex64 {
    let n = v.len();
    let (j0, off) = local_cubic(i, n);
    let x0 = s0 + i as f64 * ds;
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x, w) in crate::quad::GL8.iter() {
        let u = 0.5 * (1.0 + x);
        let tau = x0 + u * ds;
        let mut val = Complex64::new(0.0, 0.0);
        for k in 0..4 {
            let mut l = 1.0;
            for j in 0..4 {
                if j != k {
                    l *= (u - off[j]) / (off[k] - off[j]);
                }
            }
            val += v[j0 + k] * l;
        }
        acc += val * (tau.powf(power) * w * 0.5 * ds);
    }
    acc
}

/// Inner and outer radial integrals `int_0^s g tau^{1+m}` and `int_s^inf g tau^{1-m}`
/// at every node of a uniform `s` grid.
pub fn radial_integrals(
    m: f64,
    g: &ComplexGridFunction,
    tails: PowerTails,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n = g.len();
    if n < 4 {
        return Err(Error::InvalidParameter("need at least four samples".into()));
    }
    let (s0, ds) = (g.t0, g.dt);
    if !(s0 > 0.0) {
        return Err(Error::InvalidParameter(format!("radial grid must start at s > 0, got {s0}")));
    }
    let v = &g.values;
    let scale = g.max_abs().max(f64::MIN_POSITIVE);
    let s_end = g.t_end();
    let mut inner = vec![Complex64::new(0.0, 0.0); n];
    inner[0] = match tails.left {
        Some(q) if q + 2.0 + m > 0.0 => v[0] * s0.powf(2.0 + m) / (q + 2.0 + m),
        Some(q) => {
            return Err(Error::InvalidParameter(format!(
                "left tail exponent {q} makes int g tau^(1+m) diverge at the origin"
            )))
        }
        None if v[0].norm() <= 1e-12 * scale => Complex64::new(0.0, 0.0),
        None => {
            return Err(Error::NonDecaying {
                side: "left",
                value: v[0].norm(),
            })
        }
    };
    for i in 0..n - 1 {
        inner[i + 1] = inner[i] + cell_integral(v, s0, ds, i, 1.0 + m);
    }
    let mut outer = vec![Complex64::new(0.0, 0.0); n];
    outer[n - 1] = match tails.right {
        Some(r) if r > 2.0 + m => v[n - 1] * s_end.powf(2.0 - m) / (r + m - 2.0),
        Some(r) => {
            return Err(Error::InvalidParameter(format!(
                "right tail exponent {r} must exceed 2 + m = {}",
                2.0 + m
            )))
        }
        None if v[n - 1].norm() <= 1e-12 * scale => Complex64::new(0.0, 0.0),
        None => {
            return Err(Error::NonDecaying {
                side: "right",
                value: v[n - 1].norm(),
            })
        }
    };
    for i in (0..n - 1).rev() {
        outer[i] = outer[i + 1] + cell_integral(v, s0, ds, i, 1.0 - m);
    }
    Ok((inner, outer))
}

/// Stream function `psi` with radial Laplacian `g`, from the two-integral formula.
pub fn stream_from_vorticity(m: f64, g: &ComplexGridFunction, tails: PowerTails) -> Result<ComplexGridFunction> {
    if !(m > 0.0) {
        return Err(Error::InvalidParameter(format!("|m| = {m} must be positive")));
    }
    let (inner, outer) = radial_integrals(m, g, tails)?;
    let values = (0..g.len())
        .map(|i| {
            let s = g.t(i);
            -(outer[i] * s.powf(m) + inner[i] * s.powf(-m)) / (2.0 * m)
        })
        .collect();
    Ok(ComplexGridFunction {
        t0: g.t0,
        dt: g.dt,
        values,
    })
}

/// `psi'' + psi'/s - m^2 psi / s^2` by centered differences; zero at the two end nodes.
pub fn radial_laplacian(m: f64, psi: &ComplexGridFunction) -> ComplexGridFunction {
    let n = psi.len();
    let h = psi.dt;
    let v = &psi.values;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 1..n.saturating_sub(1) {
        let s = psi.t(i);
        let d2 = (v[i + 1] - v[i] * 2.0 + v[i - 1]) / (h * h);
        let d1 = (v[i + 1] - v[i - 1]) / (2.0 * h);
        out[i] = d2 + d1 / s - v[i] * (m * m / (s * s));
    }
    ComplexGridFunction {
        t0: psi.t0,
        dt: psi.dt,
        values: out,
    }
}

// ---------------------------------------------------------------------------
// eigenmodes

/// An unstable mode in physical variables, normalized so that
/// `g(s) ~ s^{-(m + alpha + 2)}` at infinity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhysicalEigenmode {
    pub m: f64,
    pub alpha: f64,
    pub mu: Complex64,
    /// Growth rate, `lambda = -i m mu`.
    pub lambda: Complex64,
    /// Azimuthal period `2 pi / m`.
    pub period: f64,
    /// Log-radius grid of the samples; `s = e^t`.
    pub t0: f64,
    pub dt: f64,
    pub s: Vec<f64>,
    pub g: Vec<Complex64>,
    pub psi: Vec<Complex64>,
    /// `s dpsi/ds`, the log-radius derivative.
    pub psi_t: Vec<Complex64>,
    /// Slope of `log |g|` against `log s` over the last decade of the grid.
    pub decay_fit: f64,
    /// Far-field coefficient removed by the normalization.
    pub tail_coefficient: Complex64,
    /// `int_0^inf g tau^{1+m} d tau` from the samples plus the fitted tail.
    pub moment: Complex64,
    /// The same moment accumulated during shooting.
    pub moment_shooting: Complex64,
    /// `|mu + alpha moment / (2m)| / |mu|`.
    pub moment_identity_error: f64,
}

impl PhysicalEigenmode {
    pub fn growth_rate(&self) -> f64 {
        self.lambda.re
    }

    /// `psi'' = (m^2 + v) psi` in log radius.
    fn curvature(&self, p: &Profile, t: f64) -> Complex64 {
        p.a(t) / (p.omega(t) - self.mu) + self.m * self.m
    }

    /// `(psi, psi_t)` at log radius `t` by quintic Hermite interpolation.
    pub fn stream_at_log(&self, p: &Profile, t: f64) -> (Complex64, Complex64) {
        let n = self.psi.len();
        let x = ((t - self.t0) / self.dt).clamp(0.0, (n - 1) as f64);
        let i = (x.floor() as usize).min(n - 2);
        let (ta, tb) = (self.t0 + i as f64 * self.dt, self.t0 + (i + 1) as f64 * self.dt);
        let y = [
            self.psi[i],
            self.psi_t[i],
            self.psi[i] * self.curvature(p, ta),
            self.psi[i + 1],
            self.psi_t[i + 1],
            self.psi[i + 1] * self.curvature(p, tb),
        ];
        quintic(&y, self.dt, x - i as f64)
    }

    /// `(psi, s dpsi/ds)` at radius `s`.
    pub fn stream_at(&self, p: &Profile, s: f64) -> (Complex64, Complex64) {
        self.stream_at_log(p, s.ln())
    }

    /// Radial integrals `(int_0^s g tau^{1+m}, int_s^inf g tau^{1-m})` at `s`,
    /// recovered from `psi` and its derivative.
    pub fn integrals_at(&self, p: &Profile, s: f64) -> (Complex64, Complex64) {
        let (psi, dpsi) = self.stream_at(p, s);
        let m = self.m;
        ((dpsi - psi * m) * s.powf(m), -(psi * m + dpsi) * s.powf(-m))
    }

    /// `g` at radius `s`, from the profile and the interpolated stream function.
    pub fn vorticity_at(&self, p: &Profile, s: f64) -> Complex64 {
        let t = s.ln();
        let (psi, _) = self.stream_at(p, s);
        psi * (p.a(t) / (s * s)) / (p.omega(t) - self.mu)
    }
}

/// Quintic Hermite value and derivative from `[y0, y0', y0'', y1, y1', y1'']`
/// on a cell of width `h`, at fraction `s`.
fn quintic(y: &[Complex64; 6], h: f64, s: f64) -> (Complex64, Complex64) {
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
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for k in 0..6 {
        v += y[k] * w[k];
        d += y[k] * dw[k];
    }
    (v, d)
}

/// Translates a log-radius eigenpair into physical variables.
pub fn eigenmode_to_physical(pair: &ComplexEigenpair, p: &Profile) -> Result<PhysicalEigenmode> {
    let m = pair.m;
    let mu = pair.mu;
    let al = p.alpha();
    let grid = &pair.psi;
    let n = grid.len();
    if n < 8 {
        return Err(Error::InvalidParameter("eigenfunction grid is too short".into()));
    }
    let ts: Vec<f64> = grid.times().collect();
    // g = B psi / (R - mu) with B = A e^{-2t}
    let g: Vec<Complex64> = ts
        .iter()
        .zip(&grid.values)
        .map(|(&t, &psi)| psi * (p.a(t) * (-2.0 * t).exp()) / (p.omega(t) - mu))
        .collect();
    // g s^{m + alpha + 2} = (A e^{alpha t}) (psi e^{m t}) / (Omega - mu), no underflow
    let scaled: Vec<Complex64> = ts
        .iter()
        .zip(&grid.values)
        .map(|(&t, &psi)| psi * (m * t).exp() * (p.a(t) * (al * t).exp()) / (p.omega(t) - mu))
        .collect();

    let t_end = ts[n - 1];
    let decade = 10f64.ln();
    let tail: Vec<usize> = (0..n).filter(|&i| ts[i] >= t_end - decade).collect();
    let mut tail_coefficient = Complex64::new(0.0, 0.0);
    for &i in &tail {
        tail_coefficient += scaled[i];
    }
    tail_coefficient /= tail.len() as f64;
    if tail_coefficient.norm() == 0.0 {
        return Err(Error::DegenerateEigenfunction(0.0));
    }

    // log |g| = log |psi e^{mt}| - m t + log |A e^{alpha t}| - (alpha + 2) t - log |Omega - mu|
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &i in &tail {
        let x = ts[i];
        let y = scaled[i].norm().ln() - (m + al + 2.0) * x;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let k = tail.len() as f64;
    let decay_fit = (k * sxy - sx * sy) / (k * sxx - sx * sx);

    // moment int g tau^{1+m} d tau = int e^{mt} v psi dt: Gauss-Legendre sub-panels
    // per grid cell resolve the critical-layer peak of v
    let dt = grid.dt;
    let curv = |t: f64| p.a(t) / (p.omega(t) - mu) + m * m;
    let dd: Vec<Complex64> = ts.iter().zip(&grid.values).map(|(&t, &z)| z * curv(t)).collect();
    let sub = 4;
    let ph = dt / sub as f64;
    let mut moment = Complex64::new(0.0, 0.0);
    for i in 0..n - 1 {
        let y = [
            grid.values[i],
            pair.dpsi.values[i],
            dd[i],
            grid.values[i + 1],
            pair.dpsi.values[i + 1],
            dd[i + 1],
        ];
        for k in 0..sub {
            let mid = (k as f64 + 0.5) * ph;
            for &(x, w) in crate::quad::GL8.iter() {
                let u = mid + 0.5 * ph * x;
                let t = ts[i] + u;
                let (psi, _) = quintic(&y, dt, u / dt);
                let v = p.a(t) / (p.omega(t) - mu);
                moment += psi * v * ((m * t).exp() * w * 0.5 * ph);
            }
        }
    }
    // left: integrand ~ e^{2(m+1)t}; right: tail model kappa e^{-alpha t}
    let t0 = ts[0];
    moment += grid.values[0] * (p.a(t0) / (p.omega(t0) - mu)) * (m * t0).exp() / (2.0 * (m + 1.0));
    moment += tail_coefficient * (-al * t_end).exp() / al;

    let kappa = tail_coefficient;
    let moment_n = moment / kappa;
    if moment_n.norm() < 1e-12 {
        return Err(Error::DegenerateEigenfunction(moment_n.norm()));
    }
    let moment_identity_error = (mu + moment_n * (al / (2.0 * m))).norm() / mu.norm();
    Ok(PhysicalEigenmode {
        m,
        alpha: al,
        mu,
        lambda: -I * m * mu,
        period: 2.0 * PI / m,
        t0: grid.t0,
        dt,
        s: ts.iter().map(|t| t.exp()).collect(),
        g: g.iter().map(|z| z / kappa).collect(),
        psi: grid.values.iter().map(|z| z / kappa).collect(),
        psi_t: pair.dpsi.values.iter().map(|z| z / kappa).collect(),
        decay_fit,
        tail_coefficient: kappa,
        moment: moment_n,
        moment_shooting: pair.residuals.moment / kappa,
        moment_identity_error,
    })
}

// ---------------------------------------------------------------------------
// velocity field

/// Perturbation velocity `w(x)` (complex amplitude, Cartesian components).
pub fn perturbation_velocity(mode: &PhysicalEigenmode, p: &Profile, points: &[[f64; 2]]) -> Result<Vec<[Complex64; 2]>> {
    let sign = mode.m.signum();
    points
        .iter()
        .map(|&[x1, x2]| {
            let r2 = x1 * x1 + x2 * x2;
            if !(r2 > 0.0) {
                return Err(Error::InvalidParameter("velocity requested at the origin".into()));
            }
            let r = r2.sqrt();
            let e = Complex64::from_polar(1.0, mode.m * x2.atan2(x1));
            let (inner, outer) = mode.integrals_at(p, r);
            let m = mode.m.abs();
            let a = outer * r.powf(m - 2.0) * e;
            let b = inner * r.powf(-m - 2.0) * e;
            // x_perp = (-x2, x1)
            let perp = [-x2, x1];
            let x = [x1, x2];
            let comp = |k: usize| a * (-0.5 * perp[k]) + a * (I * 0.5 * sign * x[k]) + b * (0.5 * perp[k]) + b * (I * 0.5 * sign * x[k]);
            Ok([comp(0), comp(1)])
        })
        .collect()
}

/// Critical layer `Omega(t_c) = Re mu` and its width `Im mu / |Omega'(t_c)|` in log radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalLayer {
    pub t: f64,
    pub width: f64,
}

pub fn critical_layer(p: &Profile, mu: Complex64) -> Option<CriticalLayer> {
    if !(mu.re > 0.0 && mu.re < p.omega_inf()) {
        return None;
    }
    // Omega decreases from Omega(-inf) to 0
    let (mut lo, mut hi) = (-1.0, 1.0);
    while p.omega(lo) < mu.re {
        lo *= 2.0;
    }
    while p.omega(hi) > mu.re {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p.omega(mid) > mu.re {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    Some(CriticalLayer {
        t,
        width: mu.im.abs() / p.omega_prime(t).abs(),
    })
}

/// Sampling step that puts ten samples across the critical layer, capped at `max_dt`.
pub fn layer_resolving_dt(p: &Profile, mu: Complex64, max_dt: f64) -> f64 {
    critical_layer(p, mu).map_or(max_dt, |c| (0.1 * c.width).min(max_dt))
}

/// Polar sampling of an annulus, uniform in `log r` and in angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub r_in: f64,
    pub r_out: f64,
    pub n_r: usize,
    pub n_theta: usize,
}

impl Annulus {
    /// `n x n` annulus straddling the critical layer, three layer widths either side,
    /// so the radial spacing resolves the vorticity peak.
    pub fn across_layer(layer: &CriticalLayer, n: usize) -> Self {
        Self::around(layer.t, 3.0 * layer.width, n)
    }

    /// `n x n` annulus centred on log radius `t` with log half-width `half`.
    pub fn around(t: f64, half: f64, n: usize) -> Self {
        Self {
            r_in: (t - half).exp(),
            r_out: (t + half).exp(),
            n_r: n,
            n_theta: n,
        }
    }

    pub fn radius(&self, i: usize) -> f64 {
        let (a, b) = (self.r_in.ln(), self.r_out.ln());
        (a + (b - a) * i as f64 / (self.n_r - 1) as f64).exp()
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_theta as f64
    }

    pub fn points(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(self.n_r * self.n_theta);
        for i in 0..self.n_r {
            let r = self.radius(i);
            for j in 0..self.n_theta {
                let th = self.angle(j);
                out.push([r * th.cos(), r * th.sin()]);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldResiduals {
    /// `max |div w| / max |w| r^{-1}` over interior nodes.
    pub divergence: f64,
    /// `max |curl w - e^{i m theta} g| / max |g|` over interior nodes.
    pub curl: f64,
}

/// Fourth-order difference of `f` at index `k` with spacing `h`.
fn d4(f: impl Fn(isize) -> Complex64, k: isize, h: f64) -> Complex64 {
    (f(k - 2) - f(k - 1) * 8.0 + f(k + 1) * 8.0 - f(k + 2)) / (12.0 * h)
}

/// Discrete divergence and curl of `w` on the annulus against their exact values
/// (zero and `e^{i m theta} g`), using fourth-order differences in `log r` and angle.
pub fn field_residuals(mode: &PhysicalEigenmode, p: &Profile, ann: &Annulus) -> Result<FieldResiduals> {
    if !(ann.r_in > 0.0 && ann.r_out > ann.r_in) || ann.n_r < 5 || ann.n_theta < 5 {
        return Err(Error::InvalidParameter(format!(
            "annulus [{}, {}] with {} x {} nodes is not usable",
            ann.r_in, ann.r_out, ann.n_r, ann.n_theta
        )));
    }
    let pts = ann.points();
    let w = perturbation_velocity(mode, p, &pts)?;
    let (nr, nt) = (ann.n_r, ann.n_theta);
    // polar components: w_r = w . x / r, w_theta = w . x_perp / r
    let mut wr = vec![Complex64::new(0.0, 0.0); nr * nt];
    let mut wt = vec![Complex64::new(0.0, 0.0); nr * nt];
    let mut wmax: f64 = 0.0;
    for i in 0..nr {
        for j in 0..nt {
            let k = i * nt + j;
            let th = ann.angle(j);
            let (c, s) = (th.cos(), th.sin());
            wr[k] = w[k][0] * c + w[k][1] * s;
            wt[k] = -w[k][0] * s + w[k][1] * c;
            wmax = wmax.max((w[k][0].norm_sqr() + w[k][1].norm_sqr()).sqrt() / ann.radius(i));
        }
    }
    let hr = (ann.r_out / ann.r_in).ln() / (nr - 1) as f64;
    let ht = 2.0 * PI / nt as f64;
    let at = |v: &Vec<Complex64>, i: isize, j: isize| v[i as usize * nt + j.rem_euclid(nt as isize) as usize];
    let (mut div, mut curl, mut gmax) = (0.0_f64, 0.0_f64, 0.0_f64);
    for i in 2..nr - 2 {
        let r = ann.radius(i);
        let g = mode.vorticity_at(p, r);
        gmax = gmax.max(g.norm());
        for j in 0..nt {
            let (ii, jj) = (i as isize, j as isize);
            // with rho = log r: div = (d_rho (r w_r) + r d_theta w_theta) / r^2
            let dr_wr = d4(|k| at(&wr, k, jj) * ann.radius(k as usize), ii, hr);
            let dt_wt = d4(|k| at(&wt, ii, k), jj, ht);
            let dr_wt = d4(|k| at(&wt, k, jj) * ann.radius(k as usize), ii, hr);
            let dt_wr = d4(|k| at(&wr, ii, k), jj, ht);
            let dv = (dr_wr + dt_wt * r) / (r * r);
            let cv = (dr_wt - dt_wr * r) / (r * r);
            let exact = g * Complex64::from_polar(1.0, mode.m * ann.angle(j));
            div = div.max(dv.norm());
            curl = curl.max((cv - exact).norm());
        }
    }
    Ok(FieldResiduals {
        divergence: div / wmax.max(f64::MIN_POSITIVE),
        curl: curl / gmax.max(f64::MIN_POSITIVE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{build_deep_well, ProfileParams};

    #[test]
    fn zero_vorticity_gives_zero_stream() {
        let g = ComplexGridFunction::sample(0.1, 5.0, 200, |_| Complex64::new(0.0, 0.0));
        let psi = stream_from_vorticity(2.0, &g, PowerTails::default()).unwrap();
        assert_eq!(psi.max_abs(), 0.0);
    }

    #[test]
    fn origin_is_rejected() {
        let p = build_deep_well(&ProfileParams::baseline(1.0)).unwrap();
        assert!(radial_profiles(&p, &[0.0, 1.0]).is_err());
        let g = ComplexGridFunction::sample(0.0, 5.0, 200, |_| Complex64::new(0.0, 0.0));
        assert!(stream_from_vorticity(2.0, &g, PowerTails::default()).is_err());
    }

    #[test]
    fn undeclared_tail_is_an_error() {
        let g = ComplexGridFunction::sample(1.0, 5.0, 200, |s| Complex64::new(s.powi(-6), 0.0));
        assert!(matches!(
            stream_from_vorticity(2.0, &g, PowerTails::default()),
            Err(Error::NonDecaying { .. })
        ));
        let tails = PowerTails {
            left: Some(0.0),
            right: Some(3.0),
        };
        assert!(stream_from_vorticity(2.0, &g, tails).is_err());
    }

    #[test]
    fn angular_velocity_matches_omega() {
        let p = build_deep_well(&ProfileParams::baseline(1.0)).unwrap();
        let s: Vec<f64> = (0..200).map(|i| (-8.0 + 0.08 * i as f64).exp()).collect();
        let prof = radial_profiles(&p, &s).unwrap();
        for (i, &x) in s.iter().enumerate() {
            let t = x.ln();
            assert!((prof.r[i] - p.omega(t)).abs() < 1e-10, "R at s = {x}");
            assert!((prof.b[i] * x * x - p.a(t)).abs() < 1e-12);
        }
    }
}
