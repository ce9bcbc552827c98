//! Weak-coupling diagnostics: growth of the quadratic form
//! `⟨Ψ, D_T Ψ⟩` with `Ψ = V^{1/2} j_d` in one and two dimensions, and the
//! three limiting terms whose sum is the boundary criterion in three.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary3d::{line_integral_j3_sq, BoundaryCondition};
use crate::error::{Error, Result};
use crate::kernels::{bt_p0, fermi_breaks, KernelParams};
use crate::potentials::RadialPotential;
use crate::quad::{composite_gauss, try_integrate_finite, ChebTable, GaussLegendre, QuadSpec};
use crate::special::{bessel_j0, j_d, Dimension};

fn require_dim(v: &RadialPotential, d: Dimension) -> Result<()> {
    if v.dim() == d {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(v.dim().get()))
    }
}

/// Largest momentum kept: beyond it `V̂` is below `1e-13 V̂(0)`.
fn momentum_cutoff(v: &RadialPotential, mu: f64) -> f64 {
    mu.sqrt() + v.hat_cutoff(1e-13).min(40.0 / v.length_scale())
}

/// `(V j₁)^(p) = (2/π) ∫₀^∞ V(r) cos(√μ r) cos(p r) dr`.
pub fn vj1_hat(v: &RadialPotential, mu: f64, p: f64) -> Result<f64> {
    let s = mu.sqrt();
    let spec = QuadSpec::with_tol(1e-14, 1e-12);
    let r = v.radial_integral(|r| Ok(v.v_of_r(r) * (s * r).cos() * (p * r).cos()), &spec)?;
    Ok(2.0 / PI * r.value)
}

/// `⟨Ψ, D_T Ψ⟩ = V̂(0) ∫_ℝ B_T(p,0)² |(V j₁)^(p)|² dp` in one dimension.
pub fn dt_form_d1(v: &RadialPotential, t: f64, mu: f64) -> Result<f64> {
    require_dim(v, Dimension::One)?;
    let params = KernelParams::new(t, mu)?;
    if v.is_zero() {
        return Ok(0.0);
    }
    let s = mu.sqrt();
    let top = momentum_cutoff(v, mu) - s;
    let spec = QuadSpec::with_tol(1e-14, 1e-10).singular_at(fermi_breaks(params, -s, top));
    let r = try_integrate_finite::<Error>(
        |delta| {
            let b = bt_p0(delta * (2.0 * s + delta), params);
            Ok((b * vj1_hat(v, mu, s + delta)?).powi(2))
        },
        -s,
        top,
        &spec,
    )?;
    Ok(v.hat(0.0)? * 2.0 * r.value)
}

/// Panel edges on `[lo, hi]`: geometric ladders of ratio 4 around each
/// centre starting at `h0`, plus uniform cuts of width `wide`.
fn ladder_edges(lo: f64, hi: f64, centres: &[f64], h0: f64, reach: f64, wide: f64) -> Vec<f64> {
    let mut e = vec![lo, hi];
    for &c in centres {
        if c > lo && c < hi {
            e.push(c);
        }
        let mut h = h0;
        while h < reach {
            for x in [c - h, c + h] {
                if x > lo && x < hi {
                    e.push(x);
                }
            }
            h *= 4.0;
        }
    }
    let n = ((hi - lo) / wide).ceil() as usize;
    for i in 1..n {
        e.push(lo + (hi - lo) * i as f64 / n as f64);
    }
    e.sort_by(f64::total_cmp);
    e.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * hi.abs().max(1.0));
    e
}

/// `h(k) = ∫₀^∞ V(r) J₀(√μ r) J₀(k r) r dr`, the radial profile of `(V j₂)^`.
pub fn vj2_hat(v: &RadialPotential, mu: f64, k: f64) -> Result<f64> {
    let s = mu.sqrt();
    let spec = QuadSpec::with_tol(1e-14, 1e-12);
    Ok(v
        .radial_integral(|r| Ok(v.v_of_r(r) * bessel_j0(s * r) * bessel_j0(k * r) * r), &spec)?
        .value)
}

/// Precomputed pieces of the two-dimensional form at one temperature.
struct PlanarForm<'a> {
    v: &'a RadialPotential,
    params: KernelParams,
    h: ChebTable,
    cutoff: f64,
}

impl<'a> PlanarForm<'a> {
    fn new(v: &'a RadialPotential, t: f64, mu: f64) -> Result<Self> {
        let params = KernelParams::new(t, mu)?;
        let cutoff = momentum_cutoff(v, mu) * 2f64.sqrt();
        let width = 0.25 / v.length_scale().max(1e-300);
        let h = ChebTable::build(0.0, cutoff, width, 16, |k| vj2_hat(v, mu, k))?;
        Ok(Self { v, params, h, cutoff })
    }

    fn p2_grid(&self, p1: f64) -> (Vec<f64>, Vec<f64>) {
        let mu = self.params.mu;
        let t = self.params.t;
        let gap = p1 * p1 - mu;
        let (centre, scale) = if gap < 0.0 {
            let c = (-gap).sqrt();
            (c, c.max(t.sqrt()))
        } else {
            (0.0, gap.sqrt().max(t.sqrt()))
        };
        let top = (self.cutoff * self.cutoff - p1 * p1).max(0.0).sqrt();
        let h0 = 0.25 * t / scale;
        let wide = (0.5 * mu.sqrt()).min(1.0 / self.v.length_scale());
        let edges = ladder_edges(0.0, top.max(1e-12), &[centre], h0, 0.5 * mu.sqrt(), wide);
        composite_gauss(&edges, 12)
    }

    /// `∫_ℝ∫_ℝ F(p₂) V̂(|p₂ − q₂|) F(q₂) dp₂ dq₂` with `F = (h B)(|(p₁, ·)|)`.
    fn slice(&self, p1: f64) -> Result<f64> {
        let (x, w) = self.p2_grid(p1);
        let f: Vec<f64> = x
            .iter()
            .zip(&w)
            .map(|(&p2, &wt)| {
                let k = p1.hypot(p2);
                wt * self.h.eval(k) * bt_p0(p1 * p1 + p2 * p2 - self.params.mu, self.params)
            })
            .collect();
        let fmax = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let keep: Vec<usize> = (0..f.len()).filter(|&i| f[i].abs() > 1e-16 * fmax).collect();
        let mut total = 0.0;
        for (a, &i) in keep.iter().enumerate() {
            let mut row = 0.0;
            for &j in &keep[..a] {
                row += f[j] * (self.v.hat(x[i] - x[j])? + self.v.hat(x[i] + x[j])?);
            }
            total += f[i] * (2.0 * row + f[i] * (self.v.hat(0.0)? + self.v.hat(2.0 * x[i])?));
        }
        Ok(2.0 * total)
    }

    fn value(&self) -> Result<f64> {
        let mu = self.params.mu;
        let s = mu.sqrt();
        let t = self.params.t;
        let wide = (0.5 * s).min(1.0 / self.v.length_scale());
        let edges = ladder_edges(0.0, self.cutoff, &[s], 0.25 * t / s, 0.5 * s, wide);
        let (x, w) = composite_gauss(&edges, 12);
        let parts: Vec<f64> = x
            .par_iter()
            .zip(&w)
            .map(|(&p1, &wt)| Ok(wt * self.slice(p1)?))
            .collect::<Result<_>>()?;
        Ok(2.0 * parts.iter().sum::<f64>())
    }
}

/// `⟨Ψ, D_T Ψ⟩ = ∫ (V j₂)^(p) B_T(p,0) V̂(0, p₂ − q₂) B_T((p₁,q₂),0) (V j₂)^(p₁,q₂) dp dq₂`
/// in two dimensions.
pub fn dt_form_d2(v: &RadialPotential, t: f64, mu: f64) -> Result<f64> {
    require_dim(v, Dimension::Two)?;
    KernelParams::new(t, mu)?;
    if v.is_zero() {
        return Ok(0.0);
    }
    PlanarForm::new(v, t, mu)?.value()
}

/// The inner double integral of [`dt_form_d2`] at fixed `p₁`.
pub fn dt_form_d2_slice(v: &RadialPotential, t: f64, mu: f64, p1: f64) -> Result<f64> {
    require_dim(v, Dimension::Two)?;
    PlanarForm::new(v, t, mu)?.slice(p1.abs())
}

/// Limits of the three contributions to the weak-coupling energy in three
/// dimensions, computed in cylindrical coordinates around the normal axis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakCouplingTerms {
    /// `∫_{ℝ⁴} V(r) j₃(z₁, r̃)² dr dz₁`.
    pub line: f64,
    /// `−∫ V(r) ∫_{|z₁|<|r₁|} |j₃(z₁, r̃) ∓ j₃(r)|² dz₁ dr`.
    pub inside: f64,
    /// `∓(π/√μ) ∫ V j₃²`.
    pub reflection: f64,
    pub sum: f64,
}

pub fn rhs_weak_coupling_d3(v: &RadialPotential, mu: f64, bc: BoundaryCondition) -> Result<WeakCouplingTerms> {
    require_dim(v, Dimension::Three)?;
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Domain(format!("mu must be positive, got {mu}")));
    }
    let sign = bc.sign();
    let s = mu.sqrt();
    let rc = v.cutoff_radius();
    let spec = QuadSpec::with_tol(1e-13, 1e-10);
    let j = |x: f64| j_d(x, mu, Dimension::Three);

    // Potential integrated along the normal direction at distance ρ from the axis.
    let column = |rho: f64| -> Result<f64> {
        if rho >= rc {
            return Ok(0.0);
        }
        let top = ((rc - rho) * (rc + rho)).sqrt();
        Ok(2.0 * try_integrate_finite::<Error>(|z| Ok(v.v_of_r(z.hypot(rho))), 0.0, top, &spec)?.value)
    };
    let line = 2.0 * PI
        * try_integrate_finite::<Error>(
            |rho| Ok(rho * line_integral_j3_sq(rho, mu) * column(rho)?),
            0.0,
            rc,
            &spec,
        )?
        .value;

    let rule = GaussLegendre::cached(24);
    let segment = |r1: f64, rho: f64| -> f64 {
        let jr = j(r1.hypot(rho));
        let n = 1 + (r1 * s / PI).ceil() as usize;
        let h = r1 / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let a = i as f64 * h;
            acc += rule.integrate(a, a + h, |z| (j(z.hypot(rho)) - sign * jr).powi(2));
        }
        2.0 * acc
    };
    let inside = -4.0 * PI
        * try_integrate_finite::<Error>(
            |rho| {
                if rho >= rc {
                    return Ok(0.0);
                }
                let top = ((rc - rho) * (rc + rho)).sqrt();
                let inner = try_integrate_finite::<Error>(
                    |r1| Ok(v.v_of_r(r1.hypot(rho)) * segment(r1, rho)),
                    0.0,
                    top,
                    &spec,
                )?;
                Ok(rho * inner.value)
            },
            0.0,
            rc,
            &spec,
        )?
        .value;

    let radial = v.radial_integral(|r| Ok(v.v_of_r(r) * j(r).powi(2) * r * r), &spec)?;
    let reflection = -sign * PI / s * 4.0 * PI * radial.value;
    Ok(WeakCouplingTerms {
        line,
        inside,
        reflection,
        sum: line + inside + reflection,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthModel {
    /// `value ≈ C / T`.
    InverseT,
    /// `value ≈ C ln³(μ/T)`.
    LogCubed,
}

impl GrowthModel {
    fn basis(self, t: f64, mu: f64) -> f64 {
        match self {
            Self::InverseT => 1.0 / t,
            Self::LogCubed => (mu / t).ln().powi(3),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    /// `(T, value)` sorted by decreasing `T`.
    pub samples: Vec<(f64, f64)>,
    pub model: GrowthModel,
    pub fitted_constant: f64,
    /// `max |value / (C φ(T)) − 1|`.
    pub max_relative_deviation: f64,
    /// `value/φ(T)` at each sample.
    pub normalized: Vec<f64>,
}

/// Least-squares constant of the declared growth model.
pub fn fit_growth(samples: &[(f64, f64)], model: GrowthModel, mu: f64) -> Result<GrowthFit> {
    if samples.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: samples.len(),
        });
    }
    let mut samples = samples.to_vec();
    samples.sort_by(|a, b| b.0.total_cmp(&a.0));
    let phi: Vec<f64> = samples.iter().map(|&(t, _)| model.basis(t, mu)).collect();
    let num: f64 = samples.iter().zip(&phi).map(|(s, p)| s.1 * p).sum();
    let den: f64 = phi.iter().map(|p| p * p).sum();
    let c = num / den;
    let normalized: Vec<f64> = samples.iter().zip(&phi).map(|(s, p)| s.1 / p).collect();
    let max_relative_deviation = normalized.iter().map(|n| (n / c - 1.0).abs()).fold(0.0, f64::max);
    Ok(GrowthFit {
        samples,
        model,
        fitted_constant: c,
        max_relative_deviation,
        normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_models_fit_without_deviation() {
        let mu = 1.0;
        let ts = [1e-2, 1e-3, 1e-4];
        let inv: Vec<(f64, f64)> = ts.iter().map(|&t| (t, 3.0 / t)).collect();
        let fit = fit_growth(&inv, GrowthModel::InverseT, mu).unwrap();
        assert!((fit.fitted_constant - 3.0).abs() < 1e-12);
        assert!(fit.max_relative_deviation < 1e-12);
        let log: Vec<(f64, f64)> = ts.iter().map(|&t| (t, 0.5 * (mu / t).ln().powi(3))).collect();
        let fit = fit_growth(&log, GrowthModel::LogCubed, mu).unwrap();
        assert!(fit.max_relative_deviation < 1e-12);
        assert!(fit_growth(&inv[..2], GrowthModel::InverseT, mu).is_err());
    }

    #[test]
    fn zero_potential_has_zero_forms() {
        let v1 = RadialPotential::gaussian(0.0, 1.0, Dimension::One).unwrap();
        assert_eq!(dt_form_d1(&v1, 1e-2, 1.0).unwrap(), 0.0);
        let v2 = RadialPotential::gaussian(0.0, 1.0, Dimension::Two).unwrap();
        assert_eq!(dt_form_d2(&v2, 1e-2, 1.0).unwrap(), 0.0);
        let v3 = RadialPotential::gaussian(0.0, 1.0, Dimension::Three).unwrap();
        let terms = rhs_weak_coupling_d3(&v3, 1.0, BoundaryCondition::Dirichlet).unwrap();
        assert_eq!(terms.sum, 0.0);
    }

    #[test]
    fn wrong_dimension_rejected() {
        let v = RadialPotential::gaussian(1.0, 1.0, Dimension::Three).unwrap();
        assert!(dt_form_d1(&v, 1e-2, 1.0).is_err());
        assert!(dt_form_d2(&v, 1e-2, 1.0).is_err());
    }
}
