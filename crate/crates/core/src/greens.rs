//! The Green's kernel of `-d^2/dt^2 + m^2` on the line and the potentials
//! `A / (Omega - mu)` of the Rayleigh-type equation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexGridFunction, GridFunction};
use crate::profile::Profile;
use crate::quad::GL8;

/// Which zero of `A` a limiting operator is built at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Critical {
    A,
    B,
}

impl Critical {
    pub fn point(self, p: &Profile) -> f64 {
        match self {
            Critical::A => p.params.a,
            Critical::B => p.params.b,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Critical::A => "a",
            Critical::B => "b",
        }
    }
}

/// Spectral parameter at which the potential is formed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralParam {
    /// `mu` off the real axis.
    Complex(Complex64),
    /// `mu = Omega(d)`, removable singularity at `t = d`.
    Critical(Critical),
    /// Real `mu` outside `[0, Omega(-inf)]`.
    Real(f64),
}

/// `t -> A(t) / (Omega(t) - mu)` for a fixed profile and spectral parameter.
#[derive(Clone, Copy, Debug)]
pub struct Potential<'a> {
    profile: &'a Profile,
    kind: Kind,
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    Critical(f64),
    Real(f64),
    Complex(Complex64),
}

impl<'a> Potential<'a> {
    pub fn new(profile: &'a Profile, mu: SpectralParam) -> Result<Potential<'a>> {
        let kind = match mu {
            SpectralParam::Critical(d) => Kind::Critical(d.point(profile)),
            SpectralParam::Complex(z) if z.im != 0.0 => Kind::Complex(z),
            SpectralParam::Complex(z) => return Potential::new(profile, SpectralParam::Real(z.re)),
            SpectralParam::Real(x) => {
                let w = profile.omega_inf();
                for d in [Critical::A, Critical::B] {
                    if x == profile.omega(d.point(profile)) {
                        return Potential::new(profile, SpectralParam::Critical(d));
                    }
                }
                if (0.0..=w).contains(&x) {
                    return Err(Error::SingularPotential { mu: x, omega_inf: w });
                }
                Kind::Real(x)
            }
        };
        Ok(Potential { profile, kind })
    }

    pub fn critical(profile: &'a Profile, d: Critical) -> Potential<'a> {
        Potential {
            profile,
            kind: Kind::Critical(d.point(profile)),
        }
    }

    pub fn profile(&self) -> &'a Profile {
        self.profile
    }

    pub fn is_real(&self) -> bool {
        !matches!(self.kind, Kind::Complex(_))
    }

    /// Real-valued evaluation; panics for complex `mu`.
    #[inline]
    pub fn real(&self, t: f64) -> f64 {
        let p = self.profile;
        match self.kind {
            Kind::Critical(d) => {
                if t == d {
                    p.a_prime(d) / p.omega_prime(d)
                } else {
                    p.a(t) / p.omega_minus(t, d)
                }
            }
            Kind::Real(x) => p.a(t) / (p.omega(t) - x),
            Kind::Complex(_) => panic!("real evaluation of a complex potential"),
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> Complex64 {
        match self.kind {
            Kind::Complex(z) => {
                let p = self.profile;
                Complex64::new(p.a(t), 0.0) / (Complex64::new(p.omega(t), 0.0) - z)
            }
            _ => Complex64::new(self.real(t), 0.0),
        }
    }

    pub fn sample(&self, t0: f64, dt: f64, n: usize) -> ComplexGridFunction {
        GridFunction::sample_spacing(t0, dt, n, |t| self.eval(t))
    }

    pub fn sample_real(&self, t0: f64, dt: f64, n: usize) -> GridFunction {
        GridFunction::sample_spacing(t0, dt, n, |t| self.real(t))
    }
}

/// Samples `A / (Omega - mu)` on the uniform grid `t0 + i dt`.
pub fn potential_v(p: &Profile, mu: SpectralParam, t0: f64, dt: f64, n: usize) -> Result<ComplexGridFunction> {
    Ok(Potential::new(p, mu)?.sample(t0, dt, n))
}

/// Declared exponential decay of an input beyond the window:
/// `f(t) = f(end) e^{-rate |t - end|}`. A rate of zero declares a constant tail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TailRates {
    pub left: Option<f64>,
    pub right: Option<f64>,
}

impl TailRates {
    pub fn constant() -> Self {
        Self {
            left: Some(0.0),
            right: Some(0.0),
        }
    }
}

/// Result of applying `K_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelApplication {
    pub m: f64,
    pub psi: GridFunction,
    pub tails: TailRates,
    /// Nodes per interpolation stencil (local cubic).
    pub stencil: usize,
}

/// Cell weights for `int_0^h kernel(u) l_k(u) du`, `l_k` the Lagrange basis of
/// the stencil `offsets` (in units of `h`, relative to the cell's left node).
fn cell_weights(h: f64, offsets: [f64; 4], kernel: impl Fn(f64) -> f64) -> [f64; 4] {
    let mut w = [0.0; 4];
    let panels = 4;
    let ph = h / panels as f64;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * ph;
        for &(x, gw) in GL8.iter() {
            let u = mid + 0.5 * ph * x;
            let s = u / h;
            let kv = kernel(u) * gw * 0.5 * ph;
            for k in 0..4 {
                let mut l = 1.0;
                for j in 0..4 {
                    if j != k {
                        l *= (s - offsets[j]) / (offsets[k] - offsets[j]);
                    }
                }
                w[k] += kv * l;
            }
        }
    }
    w
}

/// Stencil (first node index, offsets relative to cell start) for cell `i` of `n` nodes.
fn stencil(i: usize, n: usize) -> (usize, [f64; 4]) {
    if i == 0 {
        (0, [0.0, 1.0, 2.0, 3.0])
    } else if i + 2 >= n {
        (n - 4, [-2.0, -1.0, 0.0, 1.0])
    } else {
        (i - 1, [-1.0, 0.0, 1.0, 2.0])
    }
}

fn check_tail(f: &GridFunction, side: &'static str, rate: Option<f64>) -> Result<f64> {
    let v = if side == "left" { f.values[0] } else { f.values[f.len() - 1] };
    match rate {
        Some(r) if r >= 0.0 => Ok(r),
        Some(r) => Err(Error::InvalidParameter(format!("tail rate {r} must be non-negative"))),
        None => {
            let scale = f.max_abs();
            if v.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) && v != 0.0 {
                Err(Error::NonDecaying { side, value: v.abs() })
            } else {
                Ok(f64::INFINITY)
            }
        }
    }
}

/// `psi = K_m f` with `K_m(t, s) = e^{-m|t-s|} / (2m)`.
///
/// `f` is interpolated by local cubics; the two one-sided integrals of the split
/// form are accumulated exactly for that interpolant by exponential recursions.
pub fn apply_k(m: f64, f: &GridFunction, tails: TailRates) -> Result<KernelApplication> {
    if !(m > 0.0) {
        return Err(Error::InvalidParameter(format!("wavenumber m = {m} must be positive")));
    }
    let n = f.len();
    if n < 4 {
        return Err(Error::InvalidParameter("apply_K needs at least four samples".into()));
    }
    let kl = check_tail(f, "left", tails.left)?;
    let kr = check_tail(f, "right", tails.right)?;
    let h = f.dt;
    let decay = (-m * h).exp();
    let fv = &f.values;

    // weights: forward kernel e^{-m(h-u)}, backward kernel e^{-m u}
    let kinds = [[0.0, 1.0, 2.0, 3.0], [-1.0, 0.0, 1.0, 2.0], [-2.0, -1.0, 0.0, 1.0]];
    let fw: Vec<[f64; 4]> = kinds.iter().map(|&o| cell_weights(h, o, |u| (-m * (h - u)).exp())).collect();
    let bw: Vec<[f64; 4]> = kinds.iter().map(|&o| cell_weights(h, o, |u| (-m * u).exp())).collect();
    let kind_of = |i: usize| -> usize {
        if i == 0 {
            0
        } else if i + 2 >= n {
            2
        } else {
            1
        }
    };

    // left[i] = int_{-inf}^{t_i} e^{-m(t_i - s)} f(s) ds
    let mut left = vec![0.0; n];
    left[0] = if kl.is_finite() { fv[0] / (m + kl) } else { 0.0 };
    for i in 0..n - 1 {
        let (j0, _) = stencil(i, n);
        let w = &fw[kind_of(i)];
        let cell: f64 = (0..4).map(|k| w[k] * fv[j0 + k]).sum();
        left[i + 1] = decay * left[i] + cell;
    }
    let mut right = vec![0.0; n];
    right[n - 1] = if kr.is_finite() { fv[n - 1] / (m + kr) } else { 0.0 };
    for i in (0..n - 1).rev() {
        let (j0, _) = stencil(i, n);
        let w = &bw[kind_of(i)];
        let cell: f64 = (0..4).map(|k| w[k] * fv[j0 + k]).sum();
        right[i] = decay * right[i + 1] + cell;
    }
    let values = left.iter().zip(&right).map(|(l, r)| (l + r) / (2.0 * m)).collect();
    Ok(KernelApplication {
        m,
        psi: GridFunction {
            t0: f.t0,
            dt: f.dt,
            values,
        },
        tails,
        stencil: 4,
    })
}

/// Dense matrix of `K_m` acting on the local-cubic interpolant of compactly
/// supported samples, built cell by cell from the kernel itself.
pub fn kernel_matrix(m: f64, n: usize, dt: f64) -> Vec<Vec<f64>> {
    let mut mat = vec![vec![0.0; n]; n];
    for (i, row) in mat.iter_mut().enumerate() {
        let ti = i as f64 * dt;
        for c in 0..n - 1 {
            let (j0, offsets) = stencil(c, n);
            let x0 = c as f64 * dt;
            for &(x, gw) in GL8.iter() {
                let s = 0.5 * (1.0 + x);
                let eta = x0 + s * dt;
                let kv = (-m * (ti - eta).abs()).exp() / (2.0 * m) * gw * 0.5 * dt;
                for k in 0..4 {
                    let mut l = 1.0;
                    for j in 0..4 {
                        if j != k {
                            l *= (s - offsets[j]) / (offsets[k] - offsets[j]);
                        }
                    }
                    row[j0 + k] += kv * l;
                }
            }
        }
    }
    mat
}

/// `max_i |-(D^2 psi)_i + m^2 psi_i - f_i|` over interior nodes.
pub fn second_order_residual(m: f64, psi: &GridFunction, f: &GridFunction) -> Result<f64> {
    psi.check_same_grid(f)?;
    let n = psi.len();
    if n < 3 {
        return Ok(0.0);
    }
    let h2 = psi.dt * psi.dt;
    let v = &psi.values;
    Ok((1..n - 1)
        .map(|i| {
            let d2 = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
            (-d2 + m * m * v[i] - f.values[i]).abs()
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{build_deep_well, ProfileParams};
    use crate::quad::adaptive_simpson;

    #[test]
    fn zero_in_zero_out() {
        let f = GridFunction::zeros(-5.0, 0.01, 1001);
        let k = apply_k(2.0, &f, TailRates::default()).unwrap();
        assert_eq!(k.psi.max_abs(), 0.0);
    }

    #[test]
    fn constant_input_gives_one_over_m_squared() {
        let m = 1.5;
        let f = GridFunction::sample(-10.0, 10.0, 2001, |_| 1.0);
        let k = apply_k(m, &f, TailRates::constant()).unwrap();
        for &i in &[0, 1000, 2000] {
            assert!((k.psi.values[i] - 1.0 / (m * m)).abs() < 1e-13);
        }
    }

    #[test]
    fn undeclared_tail_is_rejected() {
        let f = GridFunction::sample(-1.0, 1.0, 101, |_| 1.0);
        assert!(matches!(
            apply_k(1.0, &f, TailRates::default()),
            Err(Error::NonDecaying { .. })
        ));
    }

    #[test]
    fn gaussian_matches_direct_quadrature() {
        let m = 2.0;
        let f = GridFunction::sample(-8.0, 8.0, 3201, |t| (-t * t).exp());
        let k = apply_k(m, &f, TailRates::default()).unwrap();
        let oracle = 0.25
            * (adaptive_simpson(|s| (-2.0 * s.abs() - s * s).exp(), -8.0, 0.0, 1e-14)
                + adaptive_simpson(|s| (-2.0 * s - s * s).exp(), 0.0, 8.0, 1e-14));
        let got = k.psi.values[1600];
        assert!((got - oracle).abs() < 1e-10, "{got} vs {oracle}");
    }

    #[test]
    fn closed_form_residual_at_fine_grid() {
        let m = 2.0;
        let psi = GridFunction::sample(-6.0, 6.0, 12001, |t| (-t * t).exp());
        let f = psi.map(|t, v| -(4.0 * t * t - 2.0) * v + m * m * v);
        // absolute residual is h^2 psi''''(0) / 12 = 1.0e-6 at this spacing,
        // so the bound is taken relative to |f| as in the Green's identity check
        let r = second_order_residual(m, &psi, &f).unwrap() / f.max_abs();
        assert!(r < 1e-6, "{r:e}");
    }

    #[test]
    fn potential_limits() {
        let p = build_deep_well(&ProfileParams::baseline(1.0)).unwrap();
        let w = p.omega_inf();
        // just above Omega(-inf): v -> 8 on the left tail
        let v = Potential::new(&p, SpectralParam::Real(w + 1e-12)).unwrap();
        assert!((v.real(-5.0) - 8.0).abs() < 1e-6);
        // just below 0: v -> -alpha (2 - alpha) on the right
        let v0 = Potential::new(&p, SpectralParam::Real(-1e-30)).unwrap();
        assert!((v0.real(40.0) + 1.0).abs() < 1e-6, "{}", v0.real(40.0));
        let va = Potential::critical(&p, Critical::A);
        let want = p.a_prime(0.0) / p.omega_prime(0.0);
        assert_eq!(va.real(0.0), want);
        assert!(want < 0.0);
        assert!((va.real(1e-9) - want).abs() < 1e-6 * want.abs());
    }

    #[test]
    fn singular_interval_is_rejected() {
        let p = build_deep_well(&ProfileParams::baseline(1.0)).unwrap();
        let x = 0.5 * p.omega_inf();
        assert!(matches!(
            Potential::new(&p, SpectralParam::Real(x)),
            Err(Error::SingularPotential { .. })
        ));
        let oa = p.omega(0.0);
        assert!(Potential::new(&p, SpectralParam::Real(oa)).unwrap().is_real());
    }
}
