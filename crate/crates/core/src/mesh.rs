//! Graded one-dimensional meshes.
//!
//! The potentials of interest have features of width `~1/B` next to the critical
//! point and are smooth elsewhere, so nodes are packed geometrically around a few
//! anchors and relaxed to a maximum spacing away from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point the mesh must contain, with the spacing wanted right at it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Anchor {
    pub at: f64,
    pub spacing: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub nodes: Vec<f64>,
}

impl Mesh {
    pub fn new(nodes: Vec<f64>) -> Result<Mesh> {
        if nodes.len() < 3 {
            return Err(Error::InvalidParameter("mesh needs at least three nodes".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("mesh nodes must be strictly increasing".into()));
        }
        Ok(Mesh { nodes })
    }

    pub fn uniform(lo: f64, hi: f64, n: usize) -> Mesh {
        let dt = (hi - lo) / (n - 1) as f64;
        Mesh {
            nodes: (0..n).map(|i| if i + 1 == n { hi } else { lo + i as f64 * dt }).collect(),
        }
    }

    /// Mesh on `[lo, hi]` containing every anchor inside the window, with local
    /// spacing `min(h_max, spacing_k + grading * |t - at_k|)`.
    pub fn graded(lo: f64, hi: f64, anchors: &[Anchor], h_max: f64, grading: f64) -> Result<Mesh> {
        if !(hi > lo) || !(h_max > 0.0) || !(grading > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bad mesh request: [{lo}, {hi}], h_max = {h_max}, grading = {grading}"
            )));
        }
        let anchors: Vec<Anchor> = anchors.iter().copied().filter(|a| a.at > lo && a.at < hi).collect();
        let spacing = |t: f64| -> f64 {
            anchors
                .iter()
                .map(|a| a.spacing + grading * (t - a.at).abs())
                .fold(h_max, f64::min)
        };
        let mut breaks: Vec<f64> = anchors.iter().map(|a| a.at).collect();
        breaks.push(lo);
        breaks.push(hi);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);

        let mut nodes = vec![lo];
        for w in breaks.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            // march, then stretch so the piece ends exactly at x1
            let mut piece = vec![x0];
            let mut t = x0;
            loop {
                let h = spacing(t + 0.5 * spacing(t));
                if t + 1.5 * h >= x1 {
                    break;
                }
                t += h;
                piece.push(t);
            }
            let last = *piece.last().unwrap();
            let span = x1 - x0;
            let covered = if piece.len() > 1 { last - x0 + spacing(last) } else { span };
            let scale = span / covered;
            for &p in &piece[1..] {
                nodes.push(x0 + (p - x0) * scale);
            }
            nodes.push(x1);
        }
        Mesh::new(nodes)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn lo(&self) -> f64 {
        self.nodes[0]
    }

    pub fn hi(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Inserts the midpoint of every cell.
    pub fn refine(&self) -> Mesh {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(self.hi());
        Mesh { nodes }
    }

    pub fn max_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn min_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Lumped (trapezoid) quadrature weights.
    pub fn weights(&self) -> Vec<f64> {
        let n = self.nodes.len();
        let mut w = vec![0.0; n];
        for i in 0..n - 1 {
            let h = self.nodes[i + 1] - self.nodes[i];
            w[i] += 0.5 * h;
            w[i + 1] += 0.5 * h;
        }
        w
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        self.nodes
            .windows(2)
            .zip(values.windows(2))
            .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
            .sum()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&t| f(t)).collect()
    }

    /// Index of the node closest to `t`.
    pub fn nearest(&self, t: f64) -> usize {
        match self.nodes.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= self.nodes.len() => self.nodes.len() - 1,
            Err(i) => {
                if t - self.nodes[i - 1] < self.nodes[i] - t {
                    i - 1
                } else {
                    i
                }
            }
        }
    }

    /// Piecewise-linear interpolation of nodal values.
    pub fn interpolate(&self, values: &[f64], t: f64) -> f64 {
        let n = self.nodes.len();
        if t <= self.nodes[0] {
            return values[0];
        }
        if t >= self.nodes[n - 1] {
            return values[n - 1];
        }
        let i = self.nodes.partition_point(|&x| x <= t) - 1;
        let (t0, t1) = (self.nodes[i], self.nodes[i + 1]);
        let s = (t - t0) / (t1 - t0);
        values[i] * (1.0 - s) + values[i + 1] * s
    }
}
