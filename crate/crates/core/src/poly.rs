//! Piecewise polynomials of degree at most five, stored in local monomial form.

use serde::{Deserialize, Serialize};

pub const DEGREE: usize = 5;

/// `p(t) = sum_k c[k] (t - x0)^k` on `[x0, x1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub x0: f64,
    pub x1: f64,
    pub c: [f64; DEGREE + 1],
}

/// Value, first and second derivative at a knot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub slope: f64,
    pub curvature: f64,
}

impl Jet {
    pub fn new(value: f64, slope: f64, curvature: f64) -> Self {
        Self { value, slope, curvature }
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.value * s, self.slope * s, self.curvature * s)
    }
}

impl Segment {
    /// Quintic Hermite interpolant matching `left` at `x0` and `right` at `x1`.
    pub fn hermite(x0: f64, x1: f64, left: Jet, right: Jet) -> Self {
        let h = x1 - x0;
        assert!(h > 0.0, "segment must have positive length");
        let dv = right.value - (left.value + left.slope * h + 0.5 * left.curvature * h * h);
        let dd = right.slope - (left.slope + left.curvature * h);
        let ds = right.curvature - left.curvature;
        let x = 10.0 * dv - 4.0 * dd * h + 0.5 * ds * h * h;
        let y = -15.0 * dv + 7.0 * dd * h - ds * h * h;
        let z = 6.0 * dv - 3.0 * dd * h + 0.5 * ds * h * h;
        Self {
            x0,
            x1,
            c: [
                left.value,
                left.slope,
                0.5 * left.curvature,
                x / h.powi(3),
                y / h.powi(4),
                z / h.powi(5),
            ],
        }
    }

    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        let s = t - self.x0;
        let c = &self.c;
        c[0] + s * (c[1] + s * (c[2] + s * (c[3] + s * (c[4] + s * c[5]))))
    }

    #[inline]
    pub fn slope(&self, t: f64) -> f64 {
        let s = t - self.x0;
        let c = &self.c;
        c[1] + s * (2.0 * c[2] + s * (3.0 * c[3] + s * (4.0 * c[4] + s * 5.0 * c[5])))
    }

    #[inline]
    pub fn curvature(&self, t: f64) -> f64 {
        let s = t - self.x0;
        let c = &self.c;
        2.0 * c[2] + s * (6.0 * c[3] + s * (12.0 * c[4] + s * 20.0 * c[5]))
    }

    pub fn jet(&self, t: f64) -> Jet {
        Jet::new(self.value(t), self.slope(t), self.curvature(t))
    }

    /// `int_{x0}^{t} p`.
    #[inline]
    pub fn integral(&self, t: f64) -> f64 {
        let s = t - self.x0;
        let c = &self.c;
        s * (c[0] + s * (c[1] / 2.0 + s * (c[2] / 3.0 + s * (c[3] / 4.0 + s * (c[4] / 5.0 + s * c[5] / 6.0)))))
    }

    /// `int_{x0}^{t} e^{2 tau} p(tau) d tau`.
    ///
    /// Gauss-Legendre on panels of length at most 1/4 is exact to round-off for a
    /// quintic times `e^{2u}`; the closed form through repeated integration by parts
    /// cancels badly on short, steep segments.
    pub fn exp2_integral(&self, t: f64) -> f64 {
        let s = t - self.x0;
        let panels = ((s.abs() * 4.0).ceil() as usize).max(1);
        let h = s / panels as f64;
        let mut acc = 0.0;
        for k in 0..panels {
            let u0 = k as f64 * h;
            acc += (2.0 * u0).exp() * gauss_small(h, |u| (2.0 * u).exp() * self.value(self.x0 + u0 + u));
        }
        (2.0 * self.x0).exp() * acc
    }

    pub fn add_scaled(&self, other: &Segment, w_self: f64, w_other: f64) -> Segment {
        debug_assert!((self.x0 - other.x0).abs() < 1e-14 && (self.x1 - other.x1).abs() < 1e-14);
        let mut c = [0.0; DEGREE + 1];
        for k in 0..=DEGREE {
            c[k] = w_self * self.c[k] + w_other * other.c[k];
        }
        Segment { x0: self.x0, x1: self.x1, c }
    }

    /// Same polynomial re-expanded about a new left end, restricted to `[x0, x1]`.
    pub fn restrict(&self, x0: f64, x1: f64) -> Segment {
        let shift = x0 - self.x0;
        // Taylor coefficients at the new origin: c'_k = p^{(k)}(shift) / k!
        let mut c = [0.0; DEGREE + 1];
        for k in 0..=DEGREE {
            let mut v = 0.0;
            for j in (k..=DEGREE).rev() {
                v = v * shift + self.c[j] * binomial(j, k);
            }
            c[k] = v;
        }
        Segment { x0, x1, c }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// 8-point Gauss-Legendre on `[0, s]` (or `[s, 0]`).
fn gauss_small(s: f64, f: impl Fn(f64) -> f64) -> f64 {
    let h = 0.5 * s;
    crate::quad::GL8
        .iter()
        .map(|&(x, w)| w * f(h * (1.0 + x)))
        .sum::<f64>()
        * h
}

/// Contiguous piecewise polynomial on `[knots[0], knots[last]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePoly {
    pub segments: Vec<Segment>,
}

impl PiecewisePoly {
    /// C^2 quintic Hermite spline through `(x_i, jet_i)`.
    pub fn hermite(knots: &[(f64, Jet)]) -> Self {
        assert!(knots.len() >= 2);
        let segments = knots
            .windows(2)
            .map(|w| Segment::hermite(w[0].0, w[1].0, w[0].1, w[1].1))
            .collect();
        Self { segments }
    }

    pub fn start(&self) -> f64 {
        self.segments[0].x0
    }

    pub fn end(&self) -> f64 {
        self.segments[self.segments.len() - 1].x1
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.segments.iter().map(|s| s.x0).collect();
        v.push(self.end());
        v
    }

    /// Index of the segment containing `t` (clamped to the ends).
    #[inline]
    pub fn locate(&self, t: f64) -> usize {
        let segs = &self.segments;
        if t <= segs[0].x1 {
            return 0;
        }
        let mut lo = 0;
        let mut hi = segs.len() - 1;
        if t >= segs[hi].x0 {
            return hi;
        }
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if segs[mid].x0 <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn value(&self, t: f64) -> f64 {
        self.segments[self.locate(t)].value(t)
    }

    /// Convex/affine combination `w0 * p0 + w1 * p1` on the union of breakpoints.
    pub fn combine(p0: &PiecewisePoly, w0: f64, p1: &PiecewisePoly, w1: f64) -> PiecewisePoly {
        let mut bps: Vec<f64> = p0.breakpoints();
        bps.extend(p1.breakpoints());
        bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        bps.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
        let segments = bps
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let s0 = p0.segments[p0.locate(mid)].restrict(w[0], w[1]);
                let s1 = p1.segments[p1.locate(mid)].restrict(w[0], w[1]);
                s0.add_scaled(&s1, w0, w1)
            })
            .collect();
        PiecewisePoly { segments }
    }
}
