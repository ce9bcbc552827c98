//! Piecewise Chebyshev interpolation of smooth functions on a bounded interval.
//!
//! Used to tabulate expensive one-dimensional transforms (Fourier transforms of
//! tabulated potentials, radial transforms of `V j_d`) once and evaluate them
//! many times inside matrix assembly and nested quadrature.

use std::f64::consts::PI;

/// Barycentric interpolant on Chebyshev-Lobatto points, one block per panel.
#[derive(Clone, Debug)]
pub struct ChebTable {
    start: f64,
    width: f64,
    nodes: Vec<f64>,
    bary: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl ChebTable {
    /// Samples `f` on `[start, end]` split into panels no wider than `max_width`,
    /// with `order + 1` points per panel.
    pub fn build<E>(
        start: f64,
        end: f64,
        max_width: f64,
        order: usize,
        mut f: impl FnMut(f64) -> Result<f64, E>,
    ) -> Result<Self, E> {
        assert!(end > start && max_width > 0.0 && order >= 2);
        let n_panels = ((end - start) / max_width).ceil().max(1.0) as usize;
        let width = (end - start) / n_panels as f64;
        let nodes: Vec<f64> = (0..=order)
            .map(|j| -(PI * j as f64 / order as f64).cos())
            .collect();
        let bary: Vec<f64> = (0..=order)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == order {
                    0.5 * sign
                } else {
                    sign
                }
            })
            .collect();
        let mut values = Vec::with_capacity(n_panels);
        for p in 0..n_panels {
            let a = start + p as f64 * width;
            let mut block = Vec::with_capacity(order + 1);
            for &t in &nodes {
                block.push(f(a + 0.5 * width * (t + 1.0))?);
            }
            values.push(block);
        }
        Ok(Self {
            start,
            width,
            nodes,
            bary,
            values,
        })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.start + self.width * self.values.len() as f64
    }

    /// Interpolated value; arguments outside the table are clamped to its ends.
    pub fn eval(&self, x: f64) -> f64 {
        let n_panels = self.values.len();
        let rel = ((x - self.start) / self.width).max(0.0);
        let idx = (rel.floor() as usize).min(n_panels - 1);
        let a = self.start + idx as f64 * self.width;
        let t = (2.0 * (x - a) / self.width - 1.0).clamp(-1.0, 1.0);
        let block = &self.values[idx];
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&node, &w), &v) in self.nodes.iter().zip(&self.bary).zip(block) {
            let diff = t - node;
            if diff == 0.0 {
                return v;
            }
            let c = w / diff;
            num += c * v;
            den += c;
        }
        num / den
    }
}
