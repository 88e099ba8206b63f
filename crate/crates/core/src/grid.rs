//! Uniformly sampled functions on a log-radius window.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real- or complex-valued function sampled at `t0 + i * dt`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction<T = f64> {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<T>,
}

pub type ComplexGridFunction = GridFunction<Complex64>;

impl<T: Copy> GridFunction<T> {
    pub fn new(t0: f64, dt: f64, values: Vec<T>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("grid spacing must be positive, got {dt}")));
        }
        Ok(Self { t0, dt, values })
    }

    /// Samples `f` on `n` points covering `[lo, hi]` inclusive.
    pub fn sample(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> T) -> Self {
        assert!(n >= 2 && hi > lo, "need at least two points on a non-empty window");
        let dt = (hi - lo) / (n - 1) as f64;
        let values = (0..n).map(|i| f(lo + i as f64 * dt)).collect();
        Self { t0: lo, dt, values }
    }

    /// Samples `f` with spacing `dt` starting at `t0`.
    pub fn sample_spacing(t0: f64, dt: f64, n: usize, f: impl Fn(f64) -> T) -> Self {
        let values = (0..n).map(|i| f(t0 + i as f64 * dt)).collect();
        Self { t0, dt, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn t(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t(self.len().saturating_sub(1))
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.t(i))
    }

    /// Nearest grid index to `t`, clamped to the window.
    pub fn nearest_index(&self, t: f64) -> usize {
        let x = ((t - self.t0) / self.dt).round();
        x.clamp(0.0, (self.len() - 1) as f64) as usize
    }

    pub fn map<U: Copy>(&self, f: impl Fn(f64, T) -> U) -> GridFunction<U> {
        GridFunction {
            t0: self.t0,
            dt: self.dt,
            values: self.values.iter().enumerate().map(|(i, &v)| f(self.t(i), v)).collect(),
        }
    }

    pub fn same_grid<U>(&self, other: &GridFunction<U>) -> bool {
        self.values.len() == other.values.len()
            && (self.t0 - other.t0).abs() <= 1e-12 * (1.0 + self.t0.abs())
            && (self.dt - other.dt).abs() <= 1e-14 * self.dt
    }

    pub fn check_same_grid<U>(&self, other: &GridFunction<U>) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "({}, {}, {}) vs ({}, {}, {})",
                self.t0,
                self.dt,
                self.len(),
                other.t0,
                other.dt,
                other.values.len()
            )))
        }
    }
}

impl GridFunction<f64> {
    pub fn zeros(t0: f64, dt: f64, n: usize) -> Self {
        Self { t0, dt, values: vec![0.0; n] }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Trapezoid rule over the window.
    pub fn integrate(&self) -> f64 {
        trapezoid(&self.values, self.dt)
    }

    pub fn to_complex(&self) -> ComplexGridFunction {
        self.map(|_, v| Complex64::new(v, 0.0))
    }
}

impl GridFunction<Complex64> {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn integrate(&self) -> Complex64 {
        let n = self.values.len();
        if n < 2 {
            return Complex64::new(0.0, 0.0);
        }
        let inner: Complex64 = self.values[1..n - 1].iter().sum();
        (inner + 0.5 * (self.values[0] + self.values[n - 1])) * self.dt
    }
}

pub(crate) fn trapezoid(v: &[f64], dt: f64) -> f64 {
    let n = v.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = v[1..n - 1].iter().sum();
    (inner + 0.5 * (v[0] + v[n - 1])) * dt
}

/// Uniform grid on `[lo, hi]` whose nodes include every point of `anchors`
/// that lies inside the window, when the anchors are commensurate with `dt`.
pub fn aligned_grid(lo: f64, hi: f64, dt: f64, anchor: f64) -> (f64, usize) {
    let k_lo = ((anchor - lo) / dt).ceil();
    let t0 = anchor - k_lo * dt;
    let n = ((hi - t0) / dt).floor() as usize + 1;
    (t0, n)
}
