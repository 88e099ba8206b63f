//! Dense discretization of `(Lambda_m g)(t) = Omega(t) g(t) + A(t) (K_m g)(t)`.
//!
//! An independent check on the shooting eigenvalues: `mu` is an eigenvalue of
//! `Lambda_m` exactly when `psi = K_m g` solves the shooting equation. `g` is
//! represented by its values on a graded mesh with piecewise-linear interpolation
//! and `K_m` is integrated exactly against the hat functions.

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{Anchor, Mesh};
use crate::par::{self, Parallelism};
use crate::profile::Profile;

/// `int_0^1 e^{-beta u} (1 - u) du` and `int_0^1 e^{-beta u} u du`.
fn hat_moments(beta: f64) -> (f64, f64) {
    if beta.abs() < 1e-3 {
        // Taylor series, error O(beta^4)
        let b2 = beta * beta;
        let i0 = 1.0 - beta / 2.0 + b2 / 6.0 - b2 * beta / 24.0;
        let i1 = 0.5 - beta / 3.0 + b2 / 8.0 - b2 * beta / 30.0;
        (i0 - i1, i1)
    } else {
        let e = (-beta).exp();
        let i0 = (1.0 - e) / beta;
        let i1 = (1.0 - e * (1.0 + beta)) / (beta * beta);
        (i0 - i1, i1)
    }
}

/// Row `i` of `K_m` (and of `d/dt K_m`) against the hat basis of `nodes`.
fn kernel_rows(m: f64, nodes: &[f64], i: usize) -> (Vec<f64>, Vec<f64>) {
    let n = nodes.len();
    let ti = nodes[i];
    let mut k = vec![0.0; n];
    let mut dk = vec![0.0; n];
    for c in 0..n - 1 {
        let (x0, x1) = (nodes[c], nodes[c + 1]);
        let h = x1 - x0;
        // distance to t_i is linear on the cell since t_i is a node
        let (d0, d1) = ((ti - x0).abs(), (ti - x1).abs());
        let beta = m * (d1 - d0);
        let (w0, w1) = hat_moments(beta);
        let scale = h * (-m * d0).exp();
        let (a0, a1) = (scale * w0, scale * w1);
        k[c] += a0 / (2.0 * m);
        k[c + 1] += a1 / (2.0 * m);
        // d/dt e^{-m|t-s|} / 2m = -sign(t - s) e^{-m|t-s|} / 2
        let sgn = if x1 <= ti { -0.5 } else { 0.5 };
        dk[c] += sgn * a0;
        dk[c + 1] += sgn * a1;
    }
    (k, dk)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleOptions {
    /// Approximate number of grid points.
    pub n: usize,
    pub parallelism: Parallelism,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            n: 2000,
            parallelism: Parallelism::default(),
        }
    }
}

/// Graded mesh with about `n` nodes: packed at the spline knots, window wide
/// enough for `g ~ e^{(m+2)t}` and `e^{-(m+alpha)t}` to fall below `1e-10`.
pub fn oracle_mesh(p: &Profile, m: f64, n: usize) -> Result<Mesh> {
    let pr = &p.params;
    let lo = pr.log_m1.min(pr.a) - 23.0 / (m + 2.0);
    let hi = pr.log_m.max(pr.b) + 23.0 / (m + p.alpha());
    let knots = p.knots();
    let build = |h_max: f64| -> Result<Mesh> {
        let anchors: Vec<Anchor> = knots
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let left = if i > 0 { k - knots[i - 1] } else { f64::INFINITY };
                let right = if i + 1 < knots.len() { knots[i + 1] - k } else { f64::INFINITY };
                Anchor {
                    at: k,
                    spacing: (left.min(right) / 6.0).min(h_max),
                }
            })
            .chain(std::iter::once(Anchor { at: 0.0, spacing: h_max }))
            .collect();
        Mesh::graded(lo, hi, &anchors, h_max, 0.15)
    };
    // bisect h_max for the requested size
    let (mut a, mut b) = (1e-4_f64, 1.0_f64);
    for _ in 0..40 {
        let mid = (a * b).sqrt();
        if build(mid)?.len() > n {
            a = mid;
        } else {
            b = mid;
        }
    }
    build(b)
}

/// Dense `Lambda_m` on the nodes of `mesh`.
pub fn lambda_matrix(p: &Profile, m: f64, mesh: &Mesh, parallelism: Parallelism) -> Mat<f64> {
    let nodes = &mesh.nodes;
    let n = nodes.len();
    let rows = par::map_range(parallelism, n, |i| {
        let (k, _) = kernel_rows(m, nodes, i);
        let a = p.a(nodes[i]);
        let mut row: Vec<f64> = k.into_iter().map(|x| a * x).collect();
        row[i] += p.omega(nodes[i]);
        row
    });
    Mat::from_fn(n, n, |i, j| rows[i][j])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleSpectrum {
    pub m: f64,
    pub n: usize,
    /// All eigenvalues with `Im > 0`, by decreasing imaginary part.
    pub upper: Vec<Complex64>,
}

impl OracleSpectrum {
    pub fn nearest(&self, mu: Complex64) -> Option<Complex64> {
        self.upper
            .iter()
            .copied()
            .min_by(|a, b| (a - mu).norm().partial_cmp(&(b - mu).norm()).unwrap())
    }

    /// Eigenvalues with `Im mu >= delta`.
    pub fn count_above(&self, delta: f64) -> usize {
        self.upper.iter().filter(|z| z.im >= delta).count()
    }
}

/// Upper-half-plane eigenvalues of the dense `Lambda_m` from a general eigensolver.
pub fn oracle_spectrum(p: &Profile, m: f64, opts: &OracleOptions) -> Result<OracleSpectrum> {
    let mesh = oracle_mesh(p, m, opts.n)?;
    let mat = lambda_matrix(p, m, &mesh, opts.parallelism);
    let ev = mat
        .eigenvalues()
        .map_err(|e| Error::LinearAlgebra(format!("dense eigenvalues failed: {e:?}")))?;
    let mut upper: Vec<Complex64> = ev.into_iter().filter(|z| z.im > 0.0).collect();
    upper.sort_by(|a, b| b.im.partial_cmp(&a.im).unwrap());
    Ok(OracleSpectrum { m, n: mesh.len(), upper })
}

/// Eigenpair of the dense `Lambda_m` near `shift` by inverse iteration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleEigenpair {
    pub mu: Complex64,
    pub mesh: Mesh,
    pub g: Vec<Complex64>,
    /// `psi = K_m g` and its derivative at the mesh node nearest `t = 0`.
    pub psi0: Complex64,
    pub dpsi0: Complex64,
}

impl OracleEigenpair {
    pub fn log_derivative(&self) -> Complex64 {
        self.dpsi0 / self.psi0
    }
}

pub fn oracle_eigenpair(p: &Profile, m: f64, mesh: &Mesh, shift: Complex64, parallelism: Parallelism) -> Result<OracleEigenpair> {
    let mat = lambda_matrix(p, m, mesh, parallelism);
    let n = mesh.len();
    let shifted = Mat::<Complex64>::from_fn(n, n, |i, j| {
        let x = Complex64::new(mat[(i, j)], 0.0);
        if i == j {
            x - shift
        } else {
            x
        }
    });
    let lu = shifted.partial_piv_lu();
    let mut x = Mat::<Complex64>::from_fn(n, 1, |_, _| Complex64::new(1.0, 0.0));
    let mut mu = shift;
    for _ in 0..6 {
        let prev = x.clone();
        lu.solve_in_place(&mut x);
        // Rayleigh-type estimate from the growth factor
        let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
        for i in 0..n {
            num += prev[(i, 0)].conj() * x[(i, 0)];
            den += x[(i, 0)].norm_sqr();
        }
        // x = (M - s)^{-1} prev, so prev ~ (mu - s) x
        mu = shift + num.conj() / den;
        let norm = den.sqrt();
        for i in 0..n {
            x[(i, 0)] /= norm;
        }
    }
    let g: Vec<Complex64> = (0..n).map(|i| x[(i, 0)]).collect();
    let i0 = mesh.nearest(0.0);
    let (k, dk) = kernel_rows(m, &mesh.nodes, i0);
    let psi0 = k.iter().zip(&g).map(|(a, b)| b * a).sum();
    let dpsi0 = dk.iter().zip(&g).map(|(a, b)| b * a).sum();
    Ok(OracleEigenpair { mu, mesh: mesh.clone(), g, psi0, dpsi0 })
}

/// Oracle eigenvalue near `mu` on the default mesh and its uniform refinement,
/// with the Richardson combination of the two (second-order scheme).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleComparison {
    pub m: f64,
    pub coarse: Complex64,
    pub fine: Complex64,
    pub extrapolated: Complex64,
    pub n_coarse: usize,
    pub n_fine: usize,
    /// Eigenvalues of the coarse matrix with `Im mu >= 0.5 Im(coarse)`.
    pub upper_count: usize,
    pub log_derivative: Complex64,
}

pub fn compare_with_oracle(p: &Profile, m: f64, mu: Complex64, opts: &OracleOptions) -> Result<OracleComparison> {
    let spec = oracle_spectrum(p, m, opts)?;
    let coarse = spec
        .nearest(mu)
        .ok_or_else(|| Error::LinearAlgebra("oracle has no eigenvalue in the upper half-plane".into()))?;
    let mesh = oracle_mesh(p, m, opts.n)?;
    let fine_mesh = mesh.refine();
    let fine = oracle_eigenpair(p, m, &fine_mesh, coarse, opts.parallelism)?;
    Ok(OracleComparison {
        m,
        coarse,
        fine: fine.mu,
        extrapolated: (fine.mu * 4.0 - coarse) / 3.0,
        n_coarse: spec.n,
        n_fine: fine_mesh.len(),
        upper_count: spec.count_above(0.5 * coarse.im),
        log_derivative: fine.log_derivative(),
    })
}
