//! Radial (s-wave) Birman–Schwinger solver for the translation-invariant
//! problem: top eigenvalue `a_T` of `B_T^{1/2} V B_T^{1/2}`, the critical
//! temperature `T_c(λ)` solving `λ a_T = 1`, and the ground state at `T_c`.
//!
//! For `V ≥ 0` the angular-averaged kernel factors through position space,
//!
//! ```text
//! w_d(p, q) = ∫₀^∞ V(r) j_d(r; p²) j_d(r; q²) r^{d−1} dr,
//! ```
//!
//! so the Nyström matrix is `S = D G Gᵀ D` with `G` of size
//! `nodes × radial points`. Matrix-vector products never form `S`.

pub mod eigen;
mod grid;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

pub use eigen::{dense_top, lanczos_top, TopPair};
pub use grid::{GridOptions, SWaveDiscretization};

use crate::error::{Error, Result};
use crate::kernels::{m_mu, KernelParams};
use crate::potentials::RadialPotential;
use crate::quad::{integrate_finite, GaussLegendre, QuadSpec};
use crate::special::{j_d, Dimension};

/// Settings shared by all solver entry points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverOptions {
    pub grid: GridOptions,
    /// Relative residual bound for the leading Ritz pairs.
    pub eig_tol: f64,
    pub max_iter: usize,
    /// Lowest temperature tried when bracketing, relative to `μ`.
    pub t_floor_rel: f64,
    /// Highest temperature tried when bracketing, relative to `μ`.
    pub t_ceiling_rel: f64,
    /// Target for `|λ a_T − 1|`.
    pub bisect_tol: f64,
    /// Gauss points per radial panel of the factorization.
    pub radial_order: usize,
    /// Relative gap below which the ground state counts as degenerate.
    pub min_gap: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            grid: GridOptions::default(),
            eig_tol: 1e-10,
            max_iter: 400,
            t_floor_rel: 1e-40,
            t_ceiling_rel: 1e3,
            bisect_tol: 1e-8,
            radial_order: 12,
            min_gap: 1e-8,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralResult {
    pub top_eigenvalue: f64,
    pub second_eigenvalue: Option<f64>,
    /// Unit eigenvector on the nodes, sign fixed by `Σ w_i u_i > 0`.
    pub eigenvector: Vec<f64>,
    pub residual: f64,
    #[serde(skip)]
    pub grid: SWaveDiscretization,
}

fn require_nonnegative(v: &RadialPotential) -> Result<()> {
    if v.is_nonnegative() {
        Ok(())
    } else {
        Err(Error::NegativePotential(format!("{:?}", v.profile())))
    }
}

/// `w_d(p, q)`, the s-wave projection of convolution with `(2π)^{−d/2} V̂`.
pub fn angular_average_vhat(v: &RadialPotential, p: f64, q: f64) -> Result<f64> {
    if p < 0.0 || q < 0.0 {
        return Err(Error::Domain(format!("momenta must be non-negative ({p}, {q})")));
    }
    let spec = QuadSpec::with_tol(1e-13, 1e-11);
    match v.dim() {
        Dimension::One => Ok((v.hat((p - q).abs())? + v.hat(p + q)?) / (2.0 * PI).sqrt()),
        Dimension::Two => {
            let mut err = None;
            let r = integrate_finite(
                |th| {
                    let k = ((p - q).powi(2) + 2.0 * p * q * (1.0 - th.cos())).max(0.0).sqrt();
                    v.hat(k).unwrap_or_else(|e| {
                        err.get_or_insert(e);
                        0.0
                    })
                },
                0.0,
                PI,
                &spec,
            )?;
            match err {
                Some(e) => Err(e),
                None => Ok(r.value / PI),
            }
        }
        Dimension::Three => {
            let mut err = None;
            let r = integrate_finite(
                |s| {
                    let k = ((p - q).powi(2) + 2.0 * p * q * (1.0 - s)).max(0.0).sqrt();
                    v.hat(k).unwrap_or_else(|e| {
                        err.get_or_insert(e);
                        0.0
                    })
                },
                -1.0,
                1.0,
                &spec,
            )?;
            match err {
                Some(e) => Err(e),
                None => Ok(r.value / (2.0 * PI).sqrt()),
            }
        }
    }
}

/// Composite Gauss rule on the support of `V` resolving oscillations up to
/// frequency `2 p_max`, with weights `ρ_k V(r_k) r_k^{d−1}`.
#[derive(Clone, Debug)]
pub struct RadialRule {
    pub r: Vec<f64>,
    pub weight: Vec<f64>,
}

impl RadialRule {
    pub fn new(v: &RadialPotential, p_max: f64, order: usize) -> Self {
        let r_c = v.cutoff_radius();
        let width = (0.5 * v.length_scale()).min(PI / p_max);
        let mut cuts = vec![0.0];
        cuts.extend(v.breakpoints().into_iter().filter(|&b| b > 0.0 && b < r_c));
        cuts.push(r_c);
        let mut edges = vec![0.0];
        for w in cuts.windows(2) {
            let n = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
            let h = (w[1] - w[0]) / n as f64;
            for i in 1..n {
                edges.push(w[0] + h * i as f64);
            }
            edges.push(w[1]);
        }
        let rule = GaussLegendre::cached(order);
        let p = v.dim().get() as i32 - 1;
        let mut r = Vec::new();
        let mut weight = Vec::new();
        for w in edges.windows(2) {
            for (x, wt) in rule.mapped(w[0], w[1]) {
                let val = v.v_of_r(x) * x.powi(p) * wt;
                if val != 0.0 {
                    r.push(x);
                    weight.push(val);
                }
            }
        }
        Self { r, weight }
    }
}

/// The temperature-independent factor `G` of `S = D G Gᵀ D`.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub grid: SWaveDiscretization,
    pub radial: RadialRule,
    pub dim: Dimension,
    /// `G_ik = √w_i p_i^{(d−1)/2} j_d(r_k; p_i²) √(ρ_k V(r_k) r_k^{d−1})`.
    pub g: DMatrix<f64>,
}

impl Factorization {
    pub fn new(v: &RadialPotential, grid: &SWaveDiscretization, radial_order: usize) -> Result<Self> {
        require_nonnegative(v)?;
        let dim = v.dim();
        let radial = RadialRule::new(v, grid.p_max, radial_order);
        let sqrt_wt: Vec<f64> = radial.weight.iter().map(|w| w.sqrt()).collect();
        let half = (dim.get() as f64 - 1.0) / 2.0;
        let nr = radial.r.len();
        let rows: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .flat_map_iter(|i| {
                let p = grid.nodes[i];
                let pre = grid.weights[i].sqrt() * p.powf(half);
                let radial = &radial;
                let sqrt_wt = &sqrt_wt;
                (0..nr).map(move |k| pre * j_d(radial.r[k], p * p, dim) * sqrt_wt[k])
            })
            .collect();
        let g = DMatrix::from_row_slice(grid.len(), nr, &rows);
        Ok(Self {
            grid: grid.clone(),
            radial,
            dim,
            g,
        })
    }

    /// `w_d(p_i, p_j)` from the factorization.
    pub fn kernel_entry(&self, i: usize, j: usize) -> f64 {
        let half = (self.dim.get() as f64 - 1.0) / 2.0;
        let scale = |k: usize| self.grid.weights[k].sqrt() * self.grid.nodes[k].powf(half);
        self.g.row(i).dot(&self.g.row(j)) / (scale(i) * scale(j))
    }

    fn sqrt_b(&self, params: KernelParams) -> Vec<f64> {
        self.grid.bt_values(params).into_iter().map(f64::sqrt).collect()
    }

    /// `y = D G Gᵀ D x`.
    fn apply(&self, sqrt_b: &[f64], x: &[f64], y: &mut [f64]) {
        let dx = DVector::from_iterator(x.len(), x.iter().zip(sqrt_b).map(|(a, b)| a * b));
        let tmp = self.g.tr_mul(&dx);
        let out = &self.g * tmp;
        for ((yi, oi), bi) in y.iter_mut().zip(out.iter()).zip(sqrt_b) {
            *yi = oi * bi;
        }
    }

    /// Explicit, exactly symmetric `S`.
    pub fn matrix(&self, params: KernelParams) -> DMatrix<f64> {
        let sb = self.sqrt_b(params);
        let w = &self.g * self.g.transpose();
        let n = sb.len();
        let mut s = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..=j {
                let val = sb[i] * sb[j] * w[(i, j)];
                s[(i, j)] = val;
                s[(j, i)] = val;
            }
        }
        s
    }

    /// Top eigenpair of `S(T)`, optionally warm-started.
    pub fn top(&self, params: KernelParams, start: Option<&[f64]>, opts: &SolverOptions) -> Result<SpectralResult> {
        let sb = self.sqrt_b(params);
        let n = self.grid.len();
        let pair = lanczos_top(n, |x, y| self.apply(&sb, x, y), start, opts.eig_tol, opts.max_iter)?;
        Ok(self.spectral(pair))
    }

    fn spectral(&self, pair: TopPair) -> SpectralResult {
        let mut u = pair.vector;
        let s: f64 = u.iter().zip(&self.grid.weights).map(|(a, w)| a * w).sum();
        if s < 0.0 {
            u.iter_mut().for_each(|x| *x = -*x);
        }
        SpectralResult {
            top_eigenvalue: pair.value,
            second_eigenvalue: pair.second,
            eigenvector: u,
            residual: pair.residual,
            grid: self.grid.clone(),
        }
    }
}

/// `S_ij = √(w_i w_j)(p_i p_j)^{(d−1)/2}√(B_T(p_i,0) B_T(p_j,0)) w_d(p_i, p_j)`.
pub fn build_matrix(v: &RadialPotential, params: KernelParams, grid: &SWaveDiscretization) -> Result<DMatrix<f64>> {
    require_nonnegative(v)?;
    if v.is_zero() {
        return Ok(DMatrix::zeros(grid.len(), grid.len()));
    }
    Ok(Factorization::new(v, grid, SolverOptions::default().radial_order)?.matrix(params))
}

/// Largest eigenvalue of a symmetric matrix.
pub fn top_eigenvalue(s: &DMatrix<f64>, grid: &SWaveDiscretization, tol: f64) -> Result<SpectralResult> {
    let mut pair = dense_top(s, tol)?;
    let sgn: f64 = pair.vector.iter().zip(&grid.weights).map(|(a, w)| a * w).sum();
    if sgn < 0.0 {
        pair.vector.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(SpectralResult {
        top_eigenvalue: pair.value,
        second_eigenvalue: pair.second,
        eigenvector: pair.vector,
        residual: pair.residual,
        grid: grid.clone(),
    })
}

/// `a_T` with grid doubling until the relative change is below `accuracy`.
pub fn a_t0(v: &RadialPotential, params: KernelParams, accuracy: f64, opts: &SolverOptions) -> Result<f64> {
    require_nonnegative(v)?;
    if v.is_zero() {
        return Ok(0.0);
    }
    let mut grid = SWaveDiscretization::build(v, params.mu, params.t, &opts.grid);
    let mut prev = Factorization::new(v, &grid, opts.radial_order)?.top(params, None, opts)?;
    let mut change = f64::INFINITY;
    for _ in 0..3 {
        grid = grid.doubled();
        let next = Factorization::new(v, &grid, opts.radial_order)?.top(params, None, opts)?;
        change = ((next.top_eigenvalue - prev.top_eigenvalue) / next.top_eigenvalue).abs();
        if change <= accuracy {
            return Ok(next.top_eigenvalue);
        }
        prev = next;
    }
    Err(Error::GridNotConverged { change })
}

/// Outcome of the critical-temperature solve.
#[derive(Clone, Debug, Serialize)]
pub struct Tc0Solution {
    pub lambda: f64,
    pub t_c: f64,
    /// `|λ a_{T_c} − 1|`.
    pub residual: f64,
    pub spectral: SpectralResult,
}

fn ensure_weak_coupling(v: &RadialPotential, mu: f64, lambda: f64) -> Result<()> {
    require_nonnegative(v)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("coupling must be positive (lambda = {lambda})")));
    }
    let e = v.e_mu(mu)?;
    if e <= 0.0 {
        return Err(Error::Domain(format!("e_mu = {e} is not positive")));
    }
    Ok(())
}

/// `T_c(λ)`: the temperature with `λ a_T = 1`.
pub fn tc0(v: &RadialPotential, mu: f64, lambda: f64, opts: &SolverOptions) -> Result<Tc0Solution> {
    ensure_weak_coupling(v, mu, lambda)?;
    let eval = |t: f64, fac: &Factorization, start: Option<&[f64]>| -> Result<(f64, SpectralResult)> {
        let r = fac.top(KernelParams::new(t, mu)?, start, opts)?;
        Ok((lambda * r.top_eigenvalue - 1.0, r))
    };
    let at = |t: f64| -> Result<f64> {
        let grid = SWaveDiscretization::build(v, mu, t, &opts.grid);
        let fac = Factorization::new(v, &grid, opts.radial_order)?;
        Ok(eval(t, &fac, None)?.0)
    };

    let mut t = mu;
    let mut f = at(t)?;
    let (t_lo, t_hi) = if f > 0.0 {
        loop {
            let next = 2.0 * t;
            if next > opts.t_ceiling_rel * mu {
                return Err(Error::BracketExpansion {
                    t_ceiling: t,
                    value: f + 1.0,
                });
            }
            let fn_ = at(next)?;
            if fn_ <= 0.0 {
                break (t, next);
            }
            t = next;
            f = fn_;
        }
    } else {
        loop {
            let next = t / 10.0;
            if next < opts.t_floor_rel * mu {
                return Err(Error::TcBelowRange {
                    t_floor: t,
                    value: f + 1.0,
                });
            }
            let fn_ = at(next)?;
            if fn_ > 0.0 {
                break (next, t);
            }
            t = next;
            f = fn_;
        }
    };

    // One grid for the whole bisection, resolved for the lowest temperature.
    let grid = SWaveDiscretization::build(v, mu, t_lo, &opts.grid);
    let fac = Factorization::new(v, &grid, opts.radial_order)?;
    let (mut xa, mut xb) = (t_lo.ln(), t_hi.ln());
    let (mut fa, ra) = eval(t_lo, &fac, None)?;
    let (mut fb, rb) = eval(t_hi, &fac, Some(&ra.eigenvector))?;
    if fa.abs() <= opts.bisect_tol {
        return Ok(Tc0Solution { lambda, t_c: t_lo, residual: fa.abs(), spectral: ra });
    }
    if fb.abs() <= opts.bisect_tol {
        return Ok(Tc0Solution { lambda, t_c: t_hi, residual: fb.abs(), spectral: rb });
    }
    if !(fa > 0.0 && fb < 0.0) {
        return Err(Error::Domain(format!(
            "a_T not decreasing on the bracket [{t_lo:e}, {t_hi:e}]: {fa} vs {fb}"
        )));
    }
    let mut warm = rb.eigenvector;
    let mut side = 0i8;
    for _ in 0..200 {
        // Illinois variant of regula falsi in ln T.
        let x = (xa * fb - xb * fa) / (fb - fa);
        let x = if x > xa && x < xb { x } else { 0.5 * (xa + xb) };
        let (fx, r) = eval(x.exp(), &fac, Some(&warm))?;
        if fx.abs() <= opts.bisect_tol || (xb - xa) < 1e-15 * xa.abs().max(1.0) {
            return Ok(Tc0Solution { lambda, t_c: x.exp(), residual: fx.abs(), spectral: r });
        }
        warm = r.eigenvector;
        if fx > 0.0 {
            xa = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            xb = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
    }
    Err(Error::Domain("root search for T_c did not terminate".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tc0Record {
    pub lambda: f64,
    pub t_c: f64,
    pub residual: f64,
    /// `λ e_μ m_μ(T_c)`.
    pub e_mu_m_mu_lambda: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tc0Curve {
    pub records: Vec<Tc0Record>,
}

/// `T_c` over a set of couplings, sorted by increasing `λ`.
pub fn tc0_curve(v: &RadialPotential, mu: f64, lambdas: &[f64], opts: &SolverOptions) -> Result<Tc0Curve> {
    let e = v.e_mu(mu)?;
    let mut records = lambdas
        .par_iter()
        .map(|&lambda| {
            let sol = tc0(v, mu, lambda, opts)?;
            let m = m_mu(KernelParams::new(sol.t_c, mu)?, v.dim())?;
            Ok(Tc0Record {
                lambda,
                t_c: sol.t_c,
                residual: sol.residual,
                e_mu_m_mu_lambda: e * m * lambda,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    for w in records.windows(2) {
        if w[1].t_c <= w[0].t_c {
            return Err(Error::Domain(format!(
                "T_c not increasing in lambda: {:?} then {:?}",
                w[0], w[1]
            )));
        }
    }
    Ok(Tc0Curve { records })
}

/// Ground state at `T_c(λ)` in momentum space, normalized so that
/// `‖V^{1/2}Φ‖ = ‖V^{1/2}j_d‖`.
#[derive(Clone, Debug, Serialize)]
pub struct GroundState {
    pub lambda: f64,
    pub t_c: f64,
    pub nodes: Vec<f64>,
    /// `Φ̂(p_i)`.
    pub phi_hat: Vec<f64>,
    /// `max_i |Φ̂(p_i) − λ B(p_i) (VΦ)^(p_i)|`.
    pub eval_eq_residual: f64,
    /// `(a₁ − a₂)/a₁` on the grid.
    pub relative_gap: f64,
    /// `‖V^{1/2}(Φ − j_d)‖²`.
    pub distance_sq: f64,
    #[serde(skip)]
    coeffs: Vec<f64>,
    #[serde(skip)]
    mu: f64,
    #[serde(skip)]
    dim: Option<Dimension>,
}

impl GroundState {
    /// `Φ(r) = ∫₀^∞ Φ̂(p) j_d(r; p²) p^{d−1} dp`.
    pub fn position(&self, r: f64) -> f64 {
        let d = self.dim.expect("set on construction");
        self.nodes
            .iter()
            .zip(&self.coeffs)
            .map(|(&p, c)| c * j_d(r, p * p, d))
            .sum()
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

pub fn ground_state(v: &RadialPotential, mu: f64, lambda: f64, opts: &SolverOptions) -> Result<GroundState> {
    let sol = tc0(v, mu, lambda, opts)?;
    let grid = sol.spectral.grid.clone();
    let fac = Factorization::new(v, &grid, opts.radial_order)?;
    let params = KernelParams::new(sol.t_c, mu)?;
    let a = sol.spectral.top_eigenvalue;
    let gap = sol
        .spectral
        .second_eigenvalue
        .map(|s| (a - s) / a)
        .unwrap_or(1.0);
    if gap < opts.min_gap {
        return Err(Error::NearDegenerate { gap });
    }
    let d = v.dim();
    let half = (d.get() as f64 - 1.0) / 2.0;
    let b = grid.bt_values(params);
    let u = &sol.spectral.eigenvector;
    let n = grid.len();
    // φ_i = √B_i u_i / (√w_i p_i^{(d−1)/2}); Φ(r) = Σ w_i p_i^{d−1} φ_i j_d(r; p_i²).
    let mut phi: Vec<f64> = (0..n)
        .map(|i| b[i].sqrt() * u[i] / (grid.weights[i].sqrt() * grid.nodes[i].powf(half)))
        .collect();
    let mut coeffs: Vec<f64> = (0..n)
        .map(|i| grid.weights[i] * grid.nodes[i].powf(2.0 * half) * phi[i])
        .collect();

    let radial = &fac.radial;
    let profile = |coeffs: &[f64]| -> Vec<f64> {
        radial
            .r
            .par_iter()
            .map(|&r| {
                grid.nodes
                    .iter()
                    .zip(coeffs)
                    .map(|(&p, c)| c * j_d(r, p * p, d))
                    .sum()
            })
            .collect()
    };
    let area = d.sphere_area();
    let vals = profile(&coeffs);
    let norm_sq: f64 = area * vals.iter().zip(&radial.weight).map(|(f, w)| w * f * f).sum::<f64>();
    let target = area * v.e_mu(mu)?;
    let scale = (target / norm_sq).sqrt();
    phi.iter_mut().for_each(|x| *x *= scale);
    coeffs.iter_mut().for_each(|x| *x *= scale);
    let vals: Vec<f64> = vals.iter().map(|x| x * scale).collect();
    let distance_sq = area
        * vals
            .iter()
            .zip(&radial.r)
            .zip(&radial.weight)
            .map(|((f, &r), w)| w * (f - j_d(r, mu, d)).powi(2))
            .sum::<f64>();

    // (VΦ)^(p_i) = Σ_j w_j w_d(p_i, p_j) p_j^{d−1} φ_j through the factorization.
    let y = DVector::from_iterator(
        n,
        (0..n).map(|j| grid.weights[j].sqrt() * grid.nodes[j].powf(half) * phi[j]),
    );
    let gy = fac.g.tr_mul(&y);
    let vphi = &fac.g * gy;
    let mut residual = 0.0f64;
    for i in 0..n {
        let conv = vphi[i] / (grid.weights[i].sqrt() * grid.nodes[i].powf(half));
        residual = residual.max((phi[i] - lambda * b[i] * conv).abs());
    }

    Ok(GroundState {
        lambda,
        t_c: sol.t_c,
        nodes: grid.nodes.clone(),
        phi_hat: phi,
        eval_eq_residual: residual,
        relative_gap: gap,
        distance_sq,
        coeffs,
        mu,
        dim: Some(d),
    })
}
