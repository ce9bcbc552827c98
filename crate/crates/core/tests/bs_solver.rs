mod common;

use std::f64::consts::PI;

use bcs_core::bs_solver::{
    a_t0, angular_average_vhat, build_matrix, dense_top, ground_state, tc0, tc0_curve, top_eigenvalue,
    Factorization, SWaveDiscretization, SolverOptions,
};
use bcs_core::kernels::{m_mu, KernelParams};
use bcs_core::{Dimension, Error, RadialPotential};
use common::{gaussian3, jacobi_eigen, sphere_convolution};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn params(t: f64, mu: f64) -> KernelParams {
    KernelParams::new(t, mu).unwrap()
}

#[test]
fn angular_average_matches_full_dimensional_convolution() {
    let points = [(0.0, 0.0), (0.7, 1.3), (1.0, 1.0), (2.1, 0.4), (3.0, 2.5)];
    for d in [Dimension::One, Dimension::Two, Dimension::Three] {
        let v = RadialPotential::gaussian(1.0, 1.0, d).unwrap();
        for &(p, q) in &points {
            let w = angular_average_vhat(&v, p, q).unwrap();
            let oracle = sphere_convolution(&v, p, q);
            assert!((w - oracle).abs() <= 1e-6, "d={d:?} ({p},{q}): {w} vs {oracle}");
        }
    }
}

#[test]
fn factorized_kernel_matches_angular_average() {
    for d in [Dimension::One, Dimension::Two, Dimension::Three] {
        let v = RadialPotential::gaussian(1.0, 1.0, d).unwrap();
        let grid = SWaveDiscretization::build(&v, 1.0, 0.05, &Default::default());
        let fac = Factorization::new(&v, &grid, 12).unwrap();
        let n = grid.len();
        for (i, j) in [(0, 0), (n / 5, n / 3), (n / 2, n / 2 + 1), (n / 3, n - 10), (n - 1, 3)] {
            let direct = angular_average_vhat(&v, grid.nodes[i], grid.nodes[j]).unwrap();
            let k = fac.kernel_entry(i, j);
            assert!((k - direct).abs() <= 1e-9, "d={d:?} ({i},{j}): {k} vs {direct}");
        }
    }
}

#[test]
fn origin_value_is_twice_vhat_zero() {
    let v = gaussian3();
    let w = angular_average_vhat(&v, 0.0, 0.0).unwrap();
    assert!((w - 2.0 * v.hat(0.0).unwrap() / (2.0 * PI).sqrt()).abs() < 1e-14);
}

#[test]
fn random_symmetric_matrix_matches_jacobi() {
    let mut rng = StdRng::seed_from_u64(50);
    let n = 50;
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let x = rng.random_range(-1.0..1.0);
            a[i][j] = x;
            a[j][i] = x;
        }
    }
    let (values, vectors) = jacobi_eigen(&a);
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let top = dense_top(&m, 1e-13).unwrap();
    // The Lanczos routine finds the algebraically largest eigenvalue.
    assert!((top.value - values[0]).abs() <= 1e-10, "{} vs {}", top.value, values[0]);
    let overlap: f64 = top.vector.iter().zip(&vectors[0]).map(|(x, y)| x * y).sum();
    assert!((overlap.abs() - 1.0).abs() <= 1e-8);
}

#[test]
fn grid_doubling_changes_top_eigenvalue_little() {
    let v = gaussian3();
    let p = params(0.05, 1.0);
    let grid = SWaveDiscretization::build(&v, 1.0, 0.05, &Default::default());
    let s = build_matrix(&v, p, &grid).unwrap();
    let a = top_eigenvalue(&s, &grid, 1e-12).unwrap().top_eigenvalue;
    let fine = grid.doubled();
    let s2 = build_matrix(&v, p, &fine).unwrap();
    let b = top_eigenvalue(&s2, &fine, 1e-12).unwrap().top_eigenvalue;
    assert!(((a - b) / b).abs() <= 1e-5, "{a} vs {b}");
    let auto = a_t0(&v, p, 1e-5, &SolverOptions::default()).unwrap();
    assert!(((auto - b) / b).abs() <= 1e-5);
}

#[test]
fn top_eigenvector_is_positive() {
    let v = gaussian3();
    let opts = SolverOptions::default();
    for t in [0.1, 1e-3] {
        let grid = SWaveDiscretization::build(&v, 1.0, t, &opts.grid);
        let r = Factorization::new(&v, &grid, 12)
            .unwrap()
            .top(params(t, 1.0), None, &opts)
            .unwrap();
        let max = r.eigenvector.iter().cloned().fold(f64::MIN, f64::max);
        let min = r.eigenvector.iter().cloned().fold(f64::MAX, f64::min);
        assert!(min > -1e-10 * max, "T={t}: min {min}, max {max}");
        assert!(r.residual <= 1e-8 * r.top_eigenvalue);
    }
}

#[test]
fn top_eigenvalue_decreases_in_temperature_on_fixed_grid() {
    let v = gaussian3();
    let opts = SolverOptions::default();
    let grid = SWaveDiscretization::build(&v, 1.0, 1e-4, &opts.grid);
    let fac = Factorization::new(&v, &grid, 12).unwrap();
    let mut prev = f64::INFINITY;
    for k in 0..12 {
        let t = 1e-4 * 2f64.powi(k);
        let a = fac.top(params(t, 1.0), None, &opts).unwrap().top_eigenvalue;
        assert!(a < prev, "T={t}: {a} !< {prev}");
        prev = a;
    }
}

#[test]
fn ratio_to_logarithm_approaches_e_mu() {
    let v = gaussian3();
    let e = v.e_mu(1.0).unwrap();
    let opts = SolverOptions::default();
    let mut prev = f64::INFINITY;
    for t in [1e-2, 1e-3, 1e-4] {
        let p = params(t, 1.0);
        let a = a_t0(&v, p, 1e-5, &opts).unwrap();
        let m = m_mu(p, Dimension::Three).unwrap();
        let gap = (a / m - e).abs();
        assert!(gap < prev, "T={t}: {gap} !< {prev}");
        // a_T − e_μ m_μ(T) stays bounded.
        assert!((a - e * m).abs() < 1.0);
        prev = gap;
    }
}

#[test]
fn zero_potential_gives_zero() {
    let v = RadialPotential::gaussian(0.0, 1.0, Dimension::Three).unwrap();
    let grid = SWaveDiscretization::build(&v, 1.0, 0.1, &Default::default());
    let s = build_matrix(&v, params(0.1, 1.0), &grid).unwrap();
    assert!(s.iter().all(|&x| x == 0.0));
    assert_eq!(a_t0(&v, params(0.1, 1.0), 1e-6, &SolverOptions::default()).unwrap(), 0.0);
}

#[test]
fn doubling_the_potential_doubles_a_t() {
    let v = gaussian3();
    let v2 = RadialPotential::gaussian(2.0, 1.0, Dimension::Three).unwrap();
    let opts = SolverOptions::default();
    let a = a_t0(&v, params(0.05, 1.0), 1e-6, &opts).unwrap();
    let b = a_t0(&v2, params(0.05, 1.0), 1e-6, &opts).unwrap();
    assert!((b / a - 2.0).abs() < 1e-8);
}

#[test]
fn negative_potential_rejected_by_tc_solver() {
    let v = RadialPotential::gaussian(-1.0, 1.0, Dimension::Three).unwrap();
    let err = tc0(&v, 1.0, 0.5, &SolverOptions::default()).unwrap_err();
    assert!(matches!(err, Error::NegativePotential(_)));
    assert!(err.to_string().contains("V >= 0"));
}

#[test]
fn critical_temperature_solves_defining_equation() {
    let v = gaussian3();
    let opts = SolverOptions::default();
    let sol = tc0(&v, 1.0, 0.5, &opts).unwrap();
    assert!(sol.residual <= 1e-8);
    let a = a_t0(&v, params(sol.t_c, 1.0), 1e-6, &opts).unwrap();
    assert!((0.5 * a - 1.0).abs() <= 1e-5, "{}", 0.5 * a);
}

#[test]
fn weak_coupling_curve_is_affine_in_inverse_coupling() {
    let v = gaussian3();
    let e = v.e_mu(1.0).unwrap();
    let curve = tc0_curve(&v, 1.0, &[0.6, 0.5, 0.4, 0.3], &SolverOptions::default()).unwrap();
    let recs = &curve.records;
    assert!(recs.windows(2).all(|w| w[1].t_c > w[0].t_c));
    // Least-squares slope of ln T_c against 1/λ.
    let xs: Vec<f64> = recs.iter().map(|r| 1.0 / r.lambda).collect();
    let ys: Vec<f64> = recs.iter().map(|r| r.t_c.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    assert!((slope * e + 1.0).abs() <= 0.05, "slope {slope} vs {}", -1.0 / e);
    for r in recs {
        assert!(r.residual <= 1e-8);
    }
}

#[test]
fn ground_state_satisfies_eigenvalue_equation() {
    let v = gaussian3();
    let gs = ground_state(&v, 1.0, 0.5, &SolverOptions::default()).unwrap();
    let max = gs.phi_hat.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    assert!(gs.eval_eq_residual <= 1e-6 * max, "{} vs {max}", gs.eval_eq_residual);
    assert!(gs.relative_gap > 1e-8);
    assert!(gs.phi_hat.iter().all(|&x| x > -1e-10 * max));
}

#[test]
fn ground_state_distance_over_coupling_stays_bounded() {
    let v = gaussian3();
    let opts = SolverOptions::default();
    let scaled: Vec<f64> = [0.6, 0.3, 0.15]
        .iter()
        .map(|&l| ground_state(&v, 1.0, l, &opts).unwrap().distance_sq / l)
        .collect();
    assert!(scaled.iter().all(|x| x.is_finite() && *x > 0.0));
    assert!(scaled.windows(2).all(|w| w[1] <= w[0]), "{scaled:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn angular_average_is_symmetric(p in 0.0f64..5.0, q in 0.0f64..5.0, d in 1u8..=3) {
        let dim = match d { 1 => Dimension::One, 2 => Dimension::Two, _ => Dimension::Three };
        let v = RadialPotential::exponential(1.0, 0.8, dim).unwrap();
        let a = angular_average_vhat(&v, p, q).unwrap();
        let b = angular_average_vhat(&v, q, p).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
    }

    #[test]
    fn assembled_matrix_is_bit_symmetric(t in 1e-3f64..1.0, mu in 0.2f64..3.0) {
        let v = RadialPotential::gaussian(1.0, 1.2, Dimension::Three).unwrap();
        let grid = SWaveDiscretization::build(&v, mu, t, &Default::default());
        let s = build_matrix(&v, params(t, mu), &grid).unwrap();
        prop_assert!(s == s.transpose());
    }
}
