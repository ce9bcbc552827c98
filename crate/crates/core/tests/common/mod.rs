#![allow(dead_code)]

use std::f64::consts::PI;

use bcs_core::quad::GaussLegendre;
use bcs_core::{Dimension, RadialPotential};

/// Cyclic Jacobi rotations on a dense symmetric matrix; returns eigenvalues in
/// descending order and the matching eigenvectors as columns.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| m[i][i] * m[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j][j].total_cmp(&m[i][i]));
    let values = order.iter().map(|&i| m[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k][i]).collect())
        .collect();
    (values, vectors)
}

pub fn gaussian3() -> RadialPotential {
    RadialPotential::gaussian(1.0, 1.0, Dimension::Three).unwrap()
}

/// `(2π)^{−d/2} ∫_{S^{d−1}} V̂(|p e₁ − q ω|) dω` with an explicit sphere parametrization.
pub fn sphere_convolution(v: &RadialPotential, p: f64, q: f64) -> f64 {
    let hat = |x: [f64; 3]| v.hat((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()).unwrap();
    match v.dim() {
        Dimension::One => (hat([p - q, 0.0, 0.0]) + hat([p + q, 0.0, 0.0])) / (2.0 * PI).sqrt(),
        Dimension::Two => {
            let n = 4000;
            let h = 2.0 * PI / n as f64;
            let s: f64 = (0..n)
                .map(|k| {
                    let th = k as f64 * h;
                    hat([p - q * th.cos(), -q * th.sin(), 0.0])
                })
                .sum();
            s * h / (2.0 * PI)
        }
        Dimension::Three => {
            let gl = GaussLegendre::new(64);
            let n_phi = 64;
            let h = 2.0 * PI / n_phi as f64;
            let mut s = 0.0;
            for (c, w) in gl.mapped(-1.0, 1.0) {
                let st = (1.0 - c * c).sqrt();
                for k in 0..n_phi {
                    let ph = k as f64 * h;
                    s += w * h * hat([p - q * c, -q * st * ph.cos(), -q * st * ph.sin()]);
                }
            }
            s / (2.0 * PI).powf(1.5)
        }
    }
}

/// `(sin x/(2π³x)) ∬_{S²×S²} (sin(x ω₁|ω′₁|)/ω₁) e^{−i x ω̃·ω̃′} dω dω′`. Rotating
/// both spheres together about the first axis leaves the integrand fixed, so
/// one azimuth contributes a factor 2π and the relative azimuth is summed.
pub fn t4_sphere_product(x: f64) -> f64 {
    let gl = GaussLegendre::new(48);
    let half: Vec<(f64, f64)> = gl.mapped(0.0, 1.0).collect();
    let n_az = 96;
    let h = 2.0 * PI / n_az as f64;
    let mut total = 0.0;
    for &(c, wc) in &half {
        for sc in [-1.0, 1.0] {
            let c = sc * c;
            let s = (1.0 - c * c).sqrt();
            for &(cp, wp) in &half {
                for sp in [-1.0, 1.0] {
                    let cp = sp * cp;
                    let spp = (1.0 - cp * cp).sqrt();
                    let radial = (x * c * cp.abs()).sin() / c;
                    let az: f64 = (0..n_az).map(|k| (x * s * spp * (k as f64 * h).cos()).cos()).sum();
                    total += wc * wp * radial * az * h * 2.0 * PI;
                }
            }
        }
    }
    x.sin() / (2.0 * PI.powi(3) * x) * total
}
