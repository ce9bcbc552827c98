use serde::Serialize;

use crate::kernels::{bt_p0, KernelParams};
use crate::potentials::RadialPotential;
use crate::quad::GaussLegendre;

/// Knobs for the radial momentum grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridOptions {
    /// Gauss-Legendre points per panel.
    pub order: usize,
    /// Growth factor of the geometric panels around the Fermi momentum.
    pub ratio: f64,
    /// `|V̂|` relative to `V̂(0)` below which momenta are not resolved.
    pub hat_cutoff_rel: f64,
    /// Largest admitted momentum in units of the inverse potential range.
    pub p_max_cap: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            order: 12,
            ratio: 4.0,
            hat_cutoff_rel: 1e-13,
            p_max_cap: 40.0,
        }
    }
}

/// Composite Gauss grid on `[0, p_max]` in the offset `δ = p − √μ`, with
/// geometric panels shrinking towards the Fermi momentum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SWaveDiscretization {
    pub mu: f64,
    /// Panel edges in the offset variable.
    pub edges: Vec<f64>,
    pub order: usize,
    pub nodes: Vec<f64>,
    /// `p_i − √μ`, stored separately to keep `p_i² − μ` accurate.
    pub offsets: Vec<f64>,
    pub weights: Vec<f64>,
    pub p_max: f64,
    /// Half-width of the innermost panels around `√μ`.
    pub refinement_scale: f64,
}

impl SWaveDiscretization {
    /// Grid adapted to temperature `t`.
    pub fn build(v: &RadialPotential, mu: f64, t: f64, opts: &GridOptions) -> Self {
        let s = mu.sqrt();
        let ell = v.length_scale();
        let k_cut = v.hat_cutoff(opts.hat_cutoff_rel).min(opts.p_max_cap / ell);
        let p_max = (4.0 * (2.0 * mu).sqrt()).max(s + k_cut);
        let h0 = t.min(1e-3 * s) / s;
        let wide = (0.5 * s).min(1.0 / ell);

        let mut right = vec![0.0];
        let mut h = h0;
        while h < 0.5 * s {
            right.push(h);
            h *= opts.ratio;
        }
        let mut left: Vec<f64> = right.iter().map(|x| -x).collect();
        // Uniform coverage of the remaining intervals.
        let mut x = *right.last().expect("non-empty");
        let top = p_max - s;
        let n_right = ((top - x) / wide).ceil().max(1.0) as usize;
        let step = (top - x) / n_right as f64;
        for _ in 0..n_right {
            x += step;
            right.push(x);
        }
        *right.last_mut().expect("non-empty") = top;
        let mut x = *left.last().expect("non-empty");
        let n_left = ((x + s) / wide).ceil().max(1.0) as usize;
        let step = (x + s) / n_left as f64;
        for _ in 0..n_left {
            x -= step;
            left.push(x);
        }
        *left.last_mut().expect("non-empty") = -s;
        left.reverse();
        left.pop();
        let mut edges = left;
        edges.extend(right);
        Self::from_edges(mu, edges, opts.order, h0)
    }

    fn from_edges(mu: f64, edges: Vec<f64>, order: usize, refinement_scale: f64) -> Self {
        let s = mu.sqrt();
        let rule = GaussLegendre::cached(order);
        let mut offsets = Vec::with_capacity(order * edges.len());
        let mut weights = Vec::with_capacity(order * edges.len());
        for w in edges.windows(2) {
            for (x, wt) in rule.mapped(w[0], w[1]) {
                offsets.push(x);
                weights.push(wt);
            }
        }
        let nodes = offsets.iter().map(|d| s + d).collect();
        let p_max = s + edges[edges.len() - 1];
        Self {
            mu,
            edges,
            order,
            nodes,
            offsets,
            weights,
            p_max,
            refinement_scale,
        }
    }

    /// Same grid with every panel bisected.
    pub fn doubled(&self) -> Self {
        let mut edges = Vec::with_capacity(2 * self.edges.len());
        for w in self.edges.windows(2) {
            edges.push(w[0]);
            edges.push(0.5 * (w[0] + w[1]));
        }
        edges.push(*self.edges.last().expect("non-empty"));
        Self::from_edges(self.mu, edges, self.order, 0.5 * self.refinement_scale)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `p_i² − μ` without cancellation.
    pub fn energy(&self, i: usize) -> f64 {
        let d = self.offsets[i];
        d * (2.0 * self.mu.sqrt() + d)
    }

    /// `B_T(p_i, 0)` on every node.
    pub fn bt_values(&self, params: KernelParams) -> Vec<f64> {
        (0..self.len()).map(|i| bt_p0(self.energy(i), params)).collect()
    }
}
