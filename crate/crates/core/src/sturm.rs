//! Bottom of the spectrum of `-d^2/dt^2 + v(t)` on the line.
//!
//! The operator is discretized on a graded mesh with Dirichlet ends as the pencil
//! `K u = lambda W u`: `K` is the linear finite-element stiffness plus the lumped
//! potential, `W` the lumped mass. On a uniform mesh this is the usual three-point
//! scheme. Eigenvalues come from Sturm counts (inertia of `K - lambda W`) and are
//! Richardson-extrapolated over two uniform refinements of the mesh.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greens::{Critical, Potential};
use crate::mesh::{Anchor, Mesh};
use crate::par::{self, Parallelism};
use crate::profile::Profile;
use crate::quad;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SturmOptions {
    /// Largest cell away from the anchors.
    pub h_max: f64,
    /// Growth of the local spacing with distance from an anchor.
    pub grading: f64,
    /// Absolute bisection tolerance.
    pub tol: f64,
    /// Accepted change between the two Richardson estimates, relative to `1 + |lambda|`.
    pub convergence: f64,
    pub parallelism: Parallelism,
}

impl Default for SturmOptions {
    fn default() -> Self {
        Self {
            h_max: 0.02,
            grading: 0.08,
            tol: 1e-10,
            convergence: 1e-5,
            parallelism: Parallelism::default(),
        }
    }
}

/// Tridiagonal pencil on the interior nodes of a mesh.
#[derive(Clone, Debug)]
pub struct Pencil {
    /// Interior diagonal of `K`.
    pub diag: Vec<f64>,
    /// Off-diagonal of `K` (`off[i]` couples interior nodes `i` and `i + 1`).
    pub off: Vec<f64>,
    /// Lumped mass.
    pub mass: Vec<f64>,
}

impl Pencil {
    pub fn assemble(mesh: &Mesh, v: &[f64]) -> Pencil {
        let t = &mesh.nodes;
        let n = t.len();
        let interior = n - 2;
        let mut diag = Vec::with_capacity(interior);
        let mut mass = Vec::with_capacity(interior);
        let mut off = Vec::with_capacity(interior.saturating_sub(1));
        for i in 1..n - 1 {
            let hm = t[i] - t[i - 1];
            let hp = t[i + 1] - t[i];
            let w = 0.5 * (hm + hp);
            diag.push(1.0 / hm + 1.0 / hp + w * v[i]);
            mass.push(w);
            if i + 1 < n - 1 {
                off.push(-1.0 / hp);
            }
        }
        Pencil { diag, off, mass }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `lambda`.
    pub fn count_below(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut d = 0.0f64;
        for i in 0..self.diag.len() {
            let a = self.diag[i] - lambda * self.mass[i];
            d = if i == 0 {
                a
            } else {
                let e = self.off[i - 1];
                a - e * e / d
            };
            if d == 0.0 {
                d = -f64::EPSILON * (a.abs() + 1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Lower Gershgorin bound of the pencil spectrum.
    fn lower_bound(&self) -> f64 {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut r = 0.0;
                if i > 0 {
                    r += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    r += self.off[i].abs();
                }
                (self.diag[i] - r) / self.mass[i]
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// The `k`-th eigenvalue (from zero) by bisection to absolute tolerance `tol`.
    pub fn eigenvalue(&self, k: usize, tol: f64) -> f64 {
        let mut lo = self.lower_bound() - 1.0;
        let mut step = 1.0;
        let mut hi = lo + step;
        while self.count_below(hi) <= k {
            lo = hi;
            step *= 2.0;
            hi = lo + step;
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves `(K - sigma W) x = rhs` by the Thomas algorithm.
    fn solve_shifted(&self, sigma: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut beta = self.diag[0] - sigma * self.mass[0];
        d[0] = rhs[0] / beta;
        for i in 1..n {
            c[i - 1] = self.off[i - 1] / beta;
            beta = self.diag[i] - sigma * self.mass[i] - self.off[i - 1] * c[i - 1];
            if beta == 0.0 {
                beta = f64::EPSILON;
            }
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / beta;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        d
    }

    /// Eigenvector for an eigenvalue `lambda` of the pencil by inverse iteration,
    /// normalized to `sum w_i x_i^2 = 1` and positive at its largest entry.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.diag.len();
        let sigma = lambda - 1e-9 * (1.0 + lambda.abs());
        let mut x = vec![1.0; n];
        for _ in 0..4 {
            let rhs: Vec<f64> = x.iter().zip(&self.mass).map(|(a, w)| a * w).collect();
            x = self.solve_shifted(sigma, &rhs);
            let norm = x.iter().zip(&self.mass).map(|(a, w)| w * a * a).sum::<f64>().sqrt();
            for a in &mut x {
                *a /= norm;
            }
        }
        let imax = (0..n).max_by(|&i, &j| x[i].abs().partial_cmp(&x[j].abs()).unwrap()).unwrap();
        if x[imax] < 0.0 {
            for a in &mut x {
                *a = -*a;
            }
        }
        x
    }
}

/// Bottom of the spectrum with its eigenvector.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BottomSpectrumResult {
    /// Richardson-extrapolated smallest eigenvalue.
    pub lambda_min: f64,
    /// Smallest eigenvalue of the finest discretization.
    pub lambda_grid: f64,
    /// Eigenvector on the finest mesh (Dirichlet zeros at both ends included),
    /// unit norm in the lumped discrete L^2 inner product.
    pub mesh: Mesh,
    pub eigvec: Vec<f64>,
    pub window: (f64, f64),
    pub n: usize,
    pub converged: bool,
    /// Raw eigenvalues per level followed by the two Richardson estimates.
    pub history: Vec<f64>,
}

impl BottomSpectrumResult {
    /// Eigenvector value at `t` (linear interpolation).
    pub fn eigvec_at(&self, t: f64) -> f64 {
        self.mesh.interpolate(&self.eigvec, t)
    }
}

fn richardson(raw: &[f64; 3]) -> (f64, f64, f64) {
    let r1 = (4.0 * raw[1] - raw[0]) / 3.0;
    let r2 = (4.0 * raw[2] - raw[1]) / 3.0;
    (r1, r2, r2 + (r2 - r1) / 15.0)
}

/// Smallest eigenvalue of `-d^2/dt^2 + v` on `mesh` and two uniform refinements.
pub fn bottom_eigenvalue<V>(v: V, mesh: &Mesh, opts: &SturmOptions) -> Result<BottomSpectrumResult>
where
    V: Fn(f64) -> f64 + Sync,
{
    let meshes = [mesh.clone(), mesh.refine(), mesh.refine().refine()];
    let pencils: Vec<Pencil> = par::map(opts.parallelism, &meshes, |m| Pencil::assemble(m, &m.sample(&v)));
    let raw_vec: Vec<f64> = par::map(opts.parallelism, &pencils, |p| p.eigenvalue(0, opts.tol));
    let raw = [raw_vec[0], raw_vec[1], raw_vec[2]];
    let (r1, r2, best) = richardson(&raw);
    let history = vec![raw[0], raw[1], raw[2], r1, r2];
    let converged = (r2 - r1).abs() <= opts.convergence * (1.0 + r2.abs());
    if !converged || !best.is_finite() {
        return Err(Error::NoConvergence { history });
    }
    let fine = &meshes[2];
    let interior = pencils[2].eigenvector(raw[2]);
    let mut eigvec = Vec::with_capacity(fine.len());
    eigvec.push(0.0);
    eigvec.extend(interior);
    eigvec.push(0.0);
    Ok(BottomSpectrumResult {
        lambda_min: best,
        lambda_grid: raw[2],
        window: (fine.lo(), fine.hi()),
        n: fine.len(),
        mesh: fine.clone(),
        eigvec,
        converged,
        history,
    })
}

/// Number of eigenvalues strictly below `threshold`, required to agree on the
/// mesh and its refinement.
pub fn count_below<V>(v: V, mesh: &Mesh, threshold: f64) -> Result<usize>
where
    V: Fn(f64) -> f64,
{
    let coarse = Pencil::assemble(mesh, &mesh.sample(&v)).count_below(threshold);
    let fine_mesh = mesh.refine();
    let fine = Pencil::assemble(&fine_mesh, &fine_mesh.sample(&v)).count_below(threshold);
    if coarse != fine {
        return Err(Error::UnstableCount { coarse, fine });
    }
    Ok(fine)
}

/// Second eigenvalue below `ceiling` on the mesh, if there is one.
pub fn second_eigenvalue<V>(v: V, mesh: &Mesh, ceiling: f64, tol: f64) -> Option<f64>
where
    V: Fn(f64) -> f64,
{
    let p = Pencil::assemble(mesh, &mesh.sample(&v));
    if p.count_below(ceiling) >= 2 {
        Some(p.eigenvalue(1, tol))
    } else {
        None
    }
}

/// `(sum (u_{i+1} - u_i)^2 / h_i + sum w_i v_i u_i^2) / sum w_i u_i^2`.
///
/// For a discrete eigenvector this reproduces its pencil eigenvalue exactly.
pub fn rayleigh_quotient(mesh: &Mesh, v: &[f64], u: &[f64]) -> Result<f64> {
    let n = mesh.len();
    if v.len() != n || u.len() != n {
        return Err(Error::GridMismatch(format!(
            "mesh has {n} nodes, potential {} and test function {}",
            v.len(),
            u.len()
        )));
    }
    let t = &mesh.nodes;
    let w = mesh.weights();
    let mut kinetic = 0.0;
    for i in 0..n - 1 {
        let du = u[i + 1] - u[i];
        kinetic += du * du / (t[i + 1] - t[i]);
    }
    let potential: f64 = (0..n).map(|i| w[i] * v[i] * u[i] * u[i]).sum();
    let norm: f64 = (0..n).map(|i| w[i] * u[i] * u[i]).sum();
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    Ok((kinetic + potential) / norm)
}

/// Rayleigh quotient of a continuous test function, Richardson-extrapolated over
/// the mesh and two refinements.
pub fn rayleigh_quotient_refined<V, U>(v: V, u: U, mesh: &Mesh) -> Result<f64>
where
    V: Fn(f64) -> f64,
    U: Fn(f64) -> f64,
{
    let mut raw = [0.0; 3];
    let mut m = mesh.clone();
    for r in raw.iter_mut() {
        *r = rayleigh_quotient(&m, &m.sample(&v), &m.sample(&u))?;
        m = m.refine();
    }
    Ok(richardson(&raw).2)
}

/// Half-width of the default window: the profile's core plus room for the
/// potential to decay below round-off.
pub fn default_half_window(p: &Profile) -> f64 {
    p.params.log_m1.abs().max(p.params.log_m) + 30.0 / p.alpha().min(2.0)
}

/// Graded mesh on `[-T, T]` resolving the spline knots of `p`.
pub fn profile_mesh(p: &Profile, opts: &SturmOptions) -> Result<Mesh> {
    let half = default_half_window(p);
    let knots = p.knots();
    let mut anchors = Vec::with_capacity(knots.len());
    for (i, &k) in knots.iter().enumerate() {
        let left = if i > 0 { k - knots[i - 1] } else { f64::INFINITY };
        let right = if i + 1 < knots.len() { knots[i + 1] - k } else { f64::INFINITY };
        anchors.push(Anchor {
            at: k,
            spacing: (left.min(right) / 8.0).min(opts.h_max),
        });
    }
    Mesh::graded(-half, half, &anchors, opts.h_max, opts.grading)
}

/// Bottom of the spectrum of `-d^2/dt^2 + (Omega - Omega(d))^{-1} A`.
pub fn limiting_bottom(p: &Profile, d: Critical, opts: &SturmOptions) -> Result<BottomSpectrumResult> {
    let v = Potential::critical(p, d);
    let mesh = profile_mesh(p, opts)?;
    bottom_eigenvalue(|t| v.real(t), &mesh, opts)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalWavenumbers {
    pub m_a: f64,
    pub m_b: f64,
    pub bottom_a: BottomSpectrumResult,
    pub bottom_b: BottomSpectrumResult,
}

/// `m_d = sqrt(-lambda_min)` for the limiting operators at `d = a, b`.
pub fn critical_wavenumbers(p: &Profile, opts: &SturmOptions) -> Result<CriticalWavenumbers> {
    let ds = [Critical::A, Critical::B];
    let mut res = par::map(opts.parallelism, &ds, |&d| limiting_bottom(p, d, opts));
    let bottom_b = res.pop().unwrap()?;
    let bottom_a = res.pop().unwrap()?;
    for (d, r) in [("a", &bottom_a), ("b", &bottom_b)] {
        if r.lambda_min >= -1.0 {
            return Err(Error::ClassViolation(format!(
                "bottom of the limiting spectrum at {d} is {:.6}, not below -1",
                r.lambda_min
            )));
        }
    }
    Ok(CriticalWavenumbers {
        m_a: (-bottom_a.lambda_min).sqrt(),
        m_b: (-bottom_b.lambda_min).sqrt(),
        bottom_a,
        bottom_b,
    })
}

/// Test function `u(t) = (Omega(t) - Omega(d)) e^t` for `t <= d`, zero beyond.
pub fn critical_test_function(p: &Profile, d: Critical) -> impl Fn(f64) -> f64 + '_ {
    let x = d.point(p);
    move |t: f64| if t <= x { p.omega_minus(t, x) * t.exp() } else { 0.0 }
}

/// `E(eta) = pi^2/4 + int v eta^2` for `eta = cos(pi (t - a) / 2)` on `[a - 1, a + 1]`,
/// by Gauss-Legendre on a mesh graded toward the spline knots.
pub fn cos_bump_energy(p: &Profile) -> Result<f64> {
    let a = p.params.a;
    let v = Potential::critical(p, Critical::A);
    let knots = p.knots();
    let anchors: Vec<Anchor> = knots
        .windows(2)
        .map(|w| Anchor {
            at: w[0],
            spacing: ((w[1] - w[0]) / 8.0).min(0.01),
        })
        .collect();
    let mesh = Mesh::graded(a - 1.0, a + 1.0, &anchors, 0.01, 0.05)?;
    let half_pi = 0.5 * std::f64::consts::PI;
    let integral: f64 = mesh
        .nodes
        .windows(2)
        .map(|w| quad::gauss_legendre(|t| v.real(t) * (half_pi * (t - a)).cos().powi(2), w[0], w[1], 1))
        .sum();
    Ok(half_pi * half_pi + integral)
}
