use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Top of the spectrum of a symmetric operator.
#[derive(Clone, Debug)]
pub struct TopPair {
    pub value: f64,
    /// Second largest Ritz value; `None` once the Krylov space is exhausted
    /// after a single direction.
    pub second: Option<f64>,
    /// Unit eigenvector, sign fixed so that its component sum is positive.
    pub vector: Vec<f64>,
    /// `‖S u − a u‖₂` for the unit vector `u`.
    pub residual: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lanczos with full reorthogonalization on the operator `apply` of size `n`.
///
/// Converges once the residual bounds of both leading Ritz pairs fall below
/// `tol` times the leading Ritz value, or when the Krylov space becomes
/// invariant.
pub fn lanczos_top(
    n: usize,
    mut apply: impl FnMut(&[f64], &mut [f64]),
    start: Option<&[f64]>,
    tol: f64,
    max_iter: usize,
) -> Result<TopPair> {
    if n == 0 {
        return Err(Error::Domain("empty operator".into()));
    }
    let mut q0: Vec<f64> = match start {
        Some(s) if s.len() == n && norm(s) > 0.0 => s.to_vec(),
        _ => (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_75).fract()).collect(),
    };
    // A small deterministic perturbation keeps a warm start from hiding
    // directions orthogonal to it.
    for (i, x) in q0.iter_mut().enumerate() {
        *x += 1e-3 * (((i * 7919) % 101) as f64 / 101.0 - 0.5);
    }
    let nrm = norm(&q0);
    q0.iter_mut().for_each(|x| *x /= nrm);

    let max_iter = max_iter.min(n);
    let mut basis: Vec<Vec<f64>> = vec![q0];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut best: Option<(f64, Vec<f64>, f64)> = None;

    for j in 0..max_iter {
        apply(&basis[j], &mut w);
        let a = dot(&basis[j], &w);
        alpha.push(a);
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = norm(&w);
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
        let top = order[0];
        let theta = eig.eigenvalues[top];
        let bound = |idx: usize| b * eig.eigenvectors[(k - 1, idx)].abs();
        let scale = theta.abs().max(f64::MIN_POSITIVE);
        let invariant = b <= 1e-14 * scale.max(a.abs());
        let converged = bound(top) <= tol * scale && (k < 2 || bound(order[1]) <= tol * scale);
        if converged || invariant || j + 1 == max_iter {
            let mut u = vec![0.0; n];
            for (i, q) in basis.iter().enumerate() {
                let c = eig.eigenvectors[(i, top)];
                u.iter_mut().zip(q).for_each(|(x, y)| *x += c * y);
            }
            let nu = norm(&u);
            u.iter_mut().for_each(|x| *x /= nu);
            if u.iter().sum::<f64>() < 0.0 {
                u.iter_mut().for_each(|x| *x = -*x);
            }
            let mut su = vec![0.0; n];
            apply(&u, &mut su);
            let residual = su.iter().zip(&u).map(|(s, x)| (s - theta * x).powi(2)).sum::<f64>().sqrt();
            let second = (k >= 2).then(|| eig.eigenvalues[order[1]]);
            if converged || invariant {
                return Ok(TopPair {
                    value: theta,
                    second,
                    vector: u,
                    residual,
                    iterations: k,
                });
            }
            best = Some((theta, u, residual));
            break;
        }
        let next: Vec<f64> = w.iter().map(|x| x / b).collect();
        beta.push(b);
        basis.push(next);
    }
    let (best, _, residual) = best.expect("loop ran at least once");
    Err(Error::EigenNotConverged { best, residual })
}

/// Top eigenpair of an explicit symmetric matrix.
pub fn dense_top(s: &DMatrix<f64>, tol: f64) -> Result<TopPair> {
    let n = s.nrows();
    if n != s.ncols() {
        return Err(Error::Domain(format!("matrix is {}x{}", n, s.ncols())));
    }
    lanczos_top(
        n,
        |x, y| {
            let v = s * DVector::from_column_slice(x);
            y.copy_from_slice(v.as_slice());
        },
        None,
        tol,
        n.min(500),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal() {
        let s = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let r = dense_top(&s, 1e-12).unwrap();
        assert!((r.value - 3.0).abs() < 1e-14);
        assert!((r.vector[0].abs() - 1.0).abs() < 1e-12);
        assert_eq!(r.second.map(|x| (x - 2.0).abs() < 1e-12), Some(true));
    }

    #[test]
    fn rank_one() {
        let v = DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0]);
        let s = &v * v.transpose();
        let r = dense_top(&s, 1e-12).unwrap();
        assert!((r.value - v.norm_squared()).abs() < 1e-12);
        let c: f64 = r.vector.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        assert!((c.abs() - v.norm()).abs() < 1e-12);
    }
}
