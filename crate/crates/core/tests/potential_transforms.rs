mod common;

use std::f64::consts::PI;

use bcs_core::quad::GaussLegendre;
use bcs_core::{Dimension, RadialPotential};
use common::jacobi_eigen;

fn shipped() -> Vec<RadialPotential> {
    let mut out = Vec::new();
    for d in [Dimension::One, Dimension::Two, Dimension::Three] {
        out.push(RadialPotential::gaussian(1.0, 1.0, d).unwrap());
        out.push(RadialPotential::exponential(1.0, 0.5, d).unwrap());
        out.push(RadialPotential::step_well(1.0, 1.0, d).unwrap());
    }
    out
}

#[test]
fn gaussian_transform_against_cartesian_cube() {
    let v = common::gaussian3();
    let rule = GaussLegendre::new(48);
    let pts: Vec<(f64, f64)> = rule.mapped(-7.0, 7.0).collect();
    for k in [0.0, 1.0, 2.0] {
        let mut total = 0.0;
        for &(x, wx) in &pts {
            let fx = (-x * x).exp() * (k * x).cos() * wx;
            for &(y, wy) in &pts {
                let fy = (-y * y).exp() * wy;
                for &(z, wz) in &pts {
                    total += fx * fy * (-z * z).exp() * wz;
                }
            }
        }
        let oracle = total * (2.0 * PI).powf(-1.5);
        let closed = 2f64.powf(-1.5) * (-k * k / 4.0).exp();
        assert!((oracle - closed).abs() < 1e-12);
        assert!((v.fourier_hat(k).unwrap() - closed).abs() < 1e-12);
    }
}

#[test]
fn planar_step_well_against_polar_quadrature() {
    let v = RadialPotential::step_well(1.0, 1.2, Dimension::Two).unwrap();
    let gr = GaussLegendre::new(40);
    let n_theta = 128;
    let mut total = 0.0;
    for (r, w) in gr.mapped(0.0, 1.2) {
        for j in 0..n_theta {
            let th = 2.0 * PI * j as f64 / n_theta as f64;
            total += w * r * (r * th.cos()).cos() * 2.0 * PI / n_theta as f64;
        }
    }
    let oracle = total / (2.0 * PI);
    assert!((v.fourier_hat(1.0).unwrap() - oracle).abs() < 1e-12);
    assert!((v.hat(1.0).unwrap() - oracle).abs() < 1e-10);
    for k in [0.0, 0.37, 3.3, 17.9, 80.0] {
        assert!((v.hat(k).unwrap() - v.fourier_hat(k).unwrap()).abs() < 1e-10, "k={k}");
    }
}

#[test]
fn transforms_positive_at_origin_and_bounded() {
    for v in shipped() {
        let h0 = v.fourier_hat(0.0).unwrap();
        assert!(h0 > 0.0);
        let bound = v.dim().fourier_norm() * v.l1_norm().unwrap();
        for i in 0..200 {
            let k = 0.1 * i as f64;
            assert!(v.hat(k).unwrap().abs() <= bound * (1.0 + 1e-10));
        }
    }
}

#[test]
fn moments() {
    let v = common::gaussian3();
    let p32 = PI.powf(1.5);
    assert!((v.moment(0).unwrap() - p32).abs() < 1e-12);
    let m2 = v.moment(2).unwrap();
    assert!((m2 - 1.5 * p32).abs() < 1e-12);
    let s = RadialPotential::step_well(1.0, 1.3, Dimension::Three).unwrap();
    assert!((s.moment(0).unwrap() - 4.0 / 3.0 * PI * 1.3f64.powi(3)).abs() < 1e-12);
}

#[test]
fn e_mu_routes_agree() {
    let v = common::gaussian3();
    let direct = v.e_mu(1.0).unwrap();
    let sphere = v.e_mu_sphere(1.0).unwrap();
    assert!((direct - sphere).abs() < 1e-7);
    let closed = (1.0 - (-1.0f64).exp()) / (2.0 * PI.sqrt());
    assert!((direct - closed).abs() < 1e-12);
    for v in shipped() {
        for mu in [0.3, 1.0, 2.5] {
            let a = v.e_mu(mu).unwrap();
            let b = v.e_mu_sphere(mu).unwrap();
            assert!(a > 0.0);
            assert!((a - b).abs() < 1e-7 * a.abs().max(1.0), "{v:?} mu={mu}: {a} vs {b}");
        }
    }
}

#[test]
fn e_mu_in_one_dimension_is_top_eigenvalue_of_two_point_kernel() {
    for v in [
        RadialPotential::gaussian(1.0, 1.0, Dimension::One).unwrap(),
        RadialPotential::exponential(2.0, 0.7, Dimension::One).unwrap(),
    ] {
        let mu: f64 = 1.7;
        let norm = (2.0 * PI).powf(-0.5);
        let diag = norm * v.fourier_hat(0.0).unwrap();
        let off = norm * v.fourier_hat(2.0 * mu.sqrt()).unwrap();
        let kernel = vec![vec![diag, off], vec![off, diag]];
        let (vals, _) = jacobi_eigen(&kernel);
        assert!((v.e_mu(mu).unwrap() - vals[0]).abs() < 1e-10);
    }
}

#[test]
fn angular_spectrum_matches_dense_sphere_discretization() {
    let mu = 1.0;
    let v = common::gaussian3();
    let spec = v.vmu_spectrum(mu, 4).unwrap();
    assert!((spec[0] - v.e_mu(mu).unwrap()).abs() < 1e-7);
    for w in spec.windows(2) {
        assert!(w[0] > w[1]);
    }
    // 10 Gauss nodes in cos θ × 20 equispaced φ, weighted-symmetric kernel.
    let gl = GaussLegendre::new(10);
    let mut pts = Vec::new();
    for (c, w) in gl.mapped(-1.0, 1.0) {
        for j in 0..20 {
            let phi = 2.0 * PI * j as f64 / 20.0;
            let s = (1.0 - c * c).sqrt();
            pts.push(([s * phi.cos(), s * phi.sin(), c], w * 2.0 * PI / 20.0));
        }
    }
    let norm = (2.0 * PI).powf(-1.5);
    let n = pts.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let (p, wp) = pts[i];
            let (q, wq) = pts[j];
            let dist = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt();
            m[i][j] = (wp * wq).sqrt() * norm * v.hat(mu.sqrt() * dist).unwrap();
        }
    }
    let (vals, _) = jacobi_eigen(&m);
    assert!((vals[0] - spec[0]).abs() < 1e-5);
    for k in 1..4 {
        assert!((vals[k] - spec[1]).abs() < 1e-5, "l=1 multiplet entry {k}");
    }
    for k in 4..9 {
        assert!((vals[k] - spec[2]).abs() < 1e-5, "l=2 multiplet entry {k}");
    }
}

#[test]
fn planar_angular_spectrum_matches_dense_circle_discretization() {
    let mu = 1.3;
    let v = RadialPotential::exponential(1.0, 0.6, Dimension::Two).unwrap();
    let spec = v.vmu_spectrum(mu, 3).unwrap();
    let n = 200;
    let h = 2.0 * PI / n as f64;
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let dt = (i as f64 - j as f64) * h;
            let dist = 2.0 * (0.5 * dt).sin().abs();
            m[i][j] = h / (2.0 * PI) * v.hat(mu.sqrt() * dist).unwrap();
        }
    }
    let (vals, _) = jacobi_eigen(&m);
    assert!((vals[0] - spec[0]).abs() < 1e-5);
    assert!((vals[1] - spec[1]).abs() < 1e-5);
    assert!((vals[2] - spec[1]).abs() < 1e-5);
    assert!(v.vmu_spectrum(mu, 2).is_ok());
    assert!(RadialPotential::gaussian(1.0, 1.0, Dimension::One)
        .unwrap()
        .vmu_spectrum(1.0, 2)
        .is_err());
}
