//! Boundary criterion in three dimensions.
//!
//! `m̃₃(r; μ)` compares the Fermi-sphere profile `j₃` with its reflection in
//! the plane `r₁ = 0`; its spherical average `m₃(|r|; μ)` is a sum of four
//! explicit terms `t₁..t₄` and satisfies `m₃(r; μ) = μ^{−1/2} m₃(√μ r; 1)`.
//! The sign of `∫V m₃` decides whether the boundary raises the critical
//! temperature at weak coupling.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{PotentialSpec, RadialPotential};
use crate::quad::{try_integrate_finite, try_integrate_oscillatory_tail, GaussLegendre, QuadSpec, Trig};
use crate::special::{arcoth, artanh, bessel_j0, cin, j_d, si, sinc, Dimension};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    /// `+1` for Dirichlet, `−1` for Neumann.
    pub fn sign(self) -> f64 {
        match self {
            Self::Dirichlet => 1.0,
            Self::Neumann => -1.0,
        }
    }
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Dirichlet => "dirichlet",
            Self::Neumann => "neumann",
        })
    }
}

fn check_x(x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("argument must be finite and non-negative, got {x}")))
    }
}

/// `t₁(x) = (4/πx) ∫₁^∞ sin²(xk) arcoth(k)/k dk`.
pub fn t1(x: f64) -> Result<f64> {
    check_x(x)?;
    if x == 0.0 {
        return Ok(2.0);
    }
    if x < 1e-7 {
        return Ok(2.0 - 2.0 * x / PI - 4.0 * x * x / 9.0);
    }
    let k_end = (10.0 / x).max(4.0);
    let mut breaks = vec![1.0 + 1e-3, 1.1, 1.5];
    let mut b = 2.0;
    while b < k_end {
        breaks.push(b);
        b *= 2.0;
    }
    let spec = QuadSpec::with_tol(1e-14, 1e-12).singular_at(breaks);
    let head = try_integrate_finite::<Error>(
        |k| Ok((x * k).sin().powi(2) * arcoth(k)? / k),
        1.0,
        k_end,
        &spec,
    )?;
    // arcoth(k)/k = Σ k^{−2n−2}/(2n+1) for k > 1.
    let mut smooth = 0.0;
    let inv = 1.0 / k_end;
    let mut pow = inv;
    for n in 0..200 {
        let term = pow / ((2 * n + 1) as f64).powi(2);
        smooth += term;
        if term < 1e-18 * smooth {
            break;
        }
        pow *= inv * inv;
    }
    let osc = try_integrate_oscillatory_tail::<Error>(
        |k| Ok(arcoth(k)? / k),
        Trig::Cos,
        2.0 * x,
        k_end,
        &QuadSpec::with_tol(1e-14, 1e-12),
    )?;
    Ok(4.0 / (PI * x) * (head.value + 0.5 * smooth - 0.5 * osc.value))
}

/// `t₂(x) = −(2/π) sin²x / x`.
pub fn t2(x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(-2.0 / PI * x.sin() * sinc(x))
}

/// `t₃(x) = −2 sin²x / x²`.
pub fn t3(x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(-2.0 * sinc(x).powi(2))
}

/// `t₄(x) = (4 sin x/(πx²))(sin x Si(2x) − cos x Cin(2x))`.
pub fn t4(x: f64) -> Result<f64> {
    check_x(x)?;
    if x < 1e-3 {
        // (8/π)(sin x/x)∫₀¹ sin(xk) artanh(k) dk expanded in x.
        let x2 = x * x;
        let inner = x / 2.0 - x * x2 / 18.0 + x * x2 * x2 / 120.0 * (23.0 / 90.0);
        return Ok(8.0 / PI * sinc(x) * inner);
    }
    let (s, c) = x.sin_cos();
    Ok(4.0 * s / (PI * x * x) * (s * si(2.0 * x) - c * cin(2.0 * x)))
}

/// `t_j(x)` for `j ∈ {1, 2, 3, 4}`.
pub fn t_j(x: f64, j: usize) -> Result<f64> {
    match j {
        1 => t1(x),
        2 => t2(x),
        3 => t3(x),
        4 => t4(x),
        _ => Err(Error::Domain(format!("no term t_{j}"))),
    }
}

/// Signs of `t₁..t₄` in `m₃` for the given boundary condition.
pub fn term_signs(bc: BoundaryCondition) -> [f64; 4] {
    let s = bc.sign();
    [1.0, 1.0, s, s]
}

/// `m₃(x; 1)`.
pub fn m3(x: f64, bc: BoundaryCondition) -> Result<f64> {
    let signs = term_signs(bc);
    let mut total = 0.0;
    for (j, s) in signs.iter().enumerate() {
        total += s * t_j(x, j + 1)?;
    }
    Ok(total)
}

/// `m₃(r; μ) = μ^{−1/2} m₃(√μ r; 1)`.
pub fn m3_scaled(r: f64, mu: f64, bc: BoundaryCondition) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("mu must be positive, got {mu}")));
    }
    Ok(m3(mu.sqrt() * r, bc)? / mu.sqrt())
}

/// `m̃₃(r; μ)` straight from its definition as a `z₁` integral.
pub fn mtilde_direct(r: [f64; 3], mu: f64, bc: BoundaryCondition) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("mu must be positive, got {mu}")));
    }
    let s = mu.sqrt();
    let sign = bc.sign();
    let rho = r[1].hypot(r[2]);
    let big_r = r[0].hypot(rho);
    let j = |x: f64| j_d(x, mu, Dimension::Three);
    let jr = j(big_r);

    // ∫_ℝ j₃(z, ρ)² dz: a finite head and an analytic-plus-oscillatory tail.
    let z_end = 20.0 / s + rho;
    let spec = QuadSpec::with_tol(1e-13, 1e-12);
    let head = try_integrate_finite::<Error>(|z| Ok(j(z.hypot(rho)).powi(2)), 0.0, z_end, &spec)?;
    let s_end = z_end.hypot(rho);
    let smooth = if rho > 0.0 {
        (rho / s_end).asin() / rho
    } else {
        1.0 / s_end
    };
    let osc = try_integrate_oscillatory_tail::<Error>(
        |t| Ok(1.0 / (t * ((t - rho) * (t + rho)).sqrt())),
        Trig::Cos,
        2.0 * s,
        s_end,
        &spec,
    )?;
    let full = 2.0 * (head.value + (smooth - osc.value) / (PI * mu));

    let a1 = r[0].abs();
    let inside = if a1 > 0.0 {
        2.0 * try_integrate_finite::<Error>(|z| Ok((j(z.hypot(rho)) - sign * jr).powi(2)), 0.0, a1, &spec)?.value
    } else {
        0.0
    };
    Ok(full - inside - sign * PI / s * jr * jr)
}

/// `(1/4π)∫_{S²} m̃₃(Rω; μ) dω`.
pub fn mtilde_sphere_average(radius: f64, mu: f64, bc: BoundaryCondition) -> Result<f64> {
    check_x(radius)?;
    let spec = QuadSpec::with_tol(1e-10, 1e-9);
    Ok(try_integrate_finite::<Error>(
        |c| mtilde_direct([radius * c, radius * (1.0 - c * c).max(0.0).sqrt(), 0.0], mu, bc),
        0.0,
        1.0,
        &spec,
    )?
    .value)
}

/// `t₄` through `(8/π)(sin x/x)∫₀¹ sin(xk) artanh(k) dk`.
pub fn t4_artanh_form(x: f64) -> Result<f64> {
    check_x(x)?;
    let spec = QuadSpec::with_tol(1e-14, 1e-13).singular_at([0.5, 0.9, 0.99]);
    let r = try_integrate_finite::<Error>(|k| Ok((x * k).sin() * artanh(k)), 0.0, 1.0, &spec)?;
    Ok(8.0 / PI * sinc(x) * r.value)
}

/// Richardson-extrapolated one-sided derivative of order 1 or 2 at zero,
/// from forward differences at `h`, `h/2`, `h/4`.
pub fn derivative_at_zero(f: impl Fn(f64) -> Result<f64>, order: u8, h: f64) -> Result<f64> {
    let f0 = f(0.0)?;
    let diff = |h: f64| -> Result<f64> {
        match order {
            1 => Ok((f(h)? - f0) / h),
            2 => Ok((f(2.0 * h)? - 2.0 * f(h)? + f0) / (h * h)),
            _ => Err(Error::Domain(format!("derivative order {order} not supported"))),
        }
    };
    let (d0, d1, d2) = (diff(h)?, diff(h / 2.0)?, diff(h / 4.0)?);
    let (r0, r1) = (2.0 * d1 - d0, 2.0 * d2 - d1);
    Ok((4.0 * r1 - r0) / 3.0)
}

/// One cell of the table of values and derivatives at zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1Cell {
    pub function: String,
    /// Derivative order: 0, 1 or 2.
    pub order: u8,
    pub computed: f64,
    pub reference: f64,
    pub abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Step for the derivative stencils.
pub const TABLE1_STEP: f64 = 1e-2;

/// Values and first two derivatives at zero of `t₁..t₄` and `m₃`, computed
/// from the supplied term functions and compared with the exact values.
pub fn table1_with(term: impl Fn(usize, f64) -> Result<f64> + Sync) -> Result<Vec<Table1Cell>> {
    let two_pi = 2.0 / PI;
    let funcs: [(&str, [f64; 4]); 6] = [
        ("t1", [1.0, 0.0, 0.0, 0.0]),
        ("t2", [0.0, 1.0, 0.0, 0.0]),
        ("t3", [0.0, 0.0, 1.0, 0.0]),
        ("t4", [0.0, 0.0, 0.0, 1.0]),
        ("m3_dirichlet", term_signs(BoundaryCondition::Dirichlet)),
        ("m3_neumann", term_signs(BoundaryCondition::Neumann)),
    ];
    let refs: [(usize, u8, f64, f64); 16] = [
        (0, 0, 2.0, 1e-6),
        (1, 0, 0.0, 1e-6),
        (2, 0, -2.0, 1e-6),
        (3, 0, 0.0, 1e-6),
        (4, 0, 0.0, 1e-6),
        (5, 0, 4.0, 1e-6),
        (0, 1, -two_pi, 1e-5),
        (1, 1, -two_pi, 1e-5),
        (2, 1, 0.0, 1e-5),
        (3, 1, 2.0 * two_pi, 1e-5),
        (4, 1, 0.0, 1e-5),
        (0, 2, -8.0 / 9.0, 1e-4),
        (1, 2, 0.0, 1e-4),
        (2, 2, 4.0 / 3.0, 1e-4),
        (3, 2, 0.0, 1e-4),
        (4, 2, 4.0 / 9.0, 1e-4),
    ];
    refs.par_iter()
        .map(|&(fi, order, reference, tolerance)| {
            let (name, weights) = funcs[fi];
            let f = |x: f64| -> Result<f64> {
                let mut total = 0.0;
                for (j, w) in weights.iter().enumerate() {
                    if *w != 0.0 {
                        total += w * term(j + 1, x)?;
                    }
                }
                Ok(total)
            };
            let computed = match order {
                0 => f(0.0)?,
                _ => derivative_at_zero(f, order, TABLE1_STEP)?,
            };
            let abs_error = (computed - reference).abs();
            Ok(Table1Cell {
                function: name.to_string(),
                order,
                computed,
                reference,
                abs_error,
                tolerance,
                pass: abs_error <= tolerance,
            })
        })
        .collect()
}

pub fn table1() -> Result<Vec<Table1Cell>> {
    table1_with(|j, x| t_j(x, j))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
    Inconclusive,
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Positive => "positive",
            Self::Negative => "negative",
            Self::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionInputs {
    pub potential: PotentialSpec,
    pub mu: f64,
    pub bc: BoundaryCondition,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    /// `∫_{ℝ³} V(r) m₃(|r|; μ) dr`.
    pub value: f64,
    pub sign: Sign,
    /// Contributions of `t₁..t₄` with their boundary-condition signs.
    pub per_term: [f64; 4],
    pub error_estimate: f64,
    pub inputs: CriterionInputs,
}

/// `4π μ^{−1/2} ∫₀^∞ V(r) g(√μ r) r² dr`.
fn radial_moment_of(v: &RadialPotential, mu: f64, g: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let s = mu.sqrt();
    let spec = QuadSpec::with_tol(1e-13, 1e-10).singular_at(v.breakpoints());
    let r = try_integrate_finite::<Error>(
        |r| {
            let vr = v.v_of_r(r);
            if vr == 0.0 {
                return Ok(0.0);
            }
            Ok(vr * g(s * r)? * r * r)
        },
        0.0,
        v.cutoff_radius(),
        &spec,
    )?;
    let scale = 4.0 * PI / s;
    Ok((scale * r.value, scale * r.error_estimate))
}

/// `∫V m₃` with its split into the four terms.
pub fn criterion(v: &RadialPotential, mu: f64, bc: BoundaryCondition) -> Result<CriterionReport> {
    if v.dim() != Dimension::Three {
        return Err(Error::UnsupportedDimension(v.dim().get()));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Domain(format!("mu must be positive, got {mu}")));
    }
    let signs = term_signs(bc);
    let (value, err) = radial_moment_of(v, mu, |x| m3(x, bc))?;
    let terms: Vec<(f64, f64)> = (0..4)
        .into_par_iter()
        .map(|j| radial_moment_of(v, mu, |x| Ok(signs[j] * t_j(x, j + 1)?)))
        .collect::<Result<_>>()?;
    let per_term = [terms[0].0, terms[1].0, terms[2].0, terms[3].0];
    let sum: f64 = per_term.iter().sum();
    let error_estimate = err + terms.iter().map(|t| t.1).sum::<f64>() + (value - sum).abs();
    let sign = if value.abs() <= 3.0 * error_estimate {
        Sign::Inconclusive
    } else if value > 0.0 {
        Sign::Positive
    } else {
        Sign::Negative
    };
    Ok(CriterionReport {
        value,
        sign,
        per_term,
        error_estimate,
        inputs: CriterionInputs {
            potential: PotentialSpec::from(v.clone()),
            mu,
            bc,
        },
    })
}

/// `(x, m₃(x; 1))` on `0, step, 2·step, …` up to `x_max`.
pub fn m3_profile(x_max: f64, step: f64, bc: BoundaryCondition) -> Result<Vec<(f64, f64)>> {
    if !(step > 0.0 && step.is_finite()) || !(x_max >= 0.0 && x_max.is_finite()) {
        return Err(Error::Domain(format!("invalid profile range x_max = {x_max}, step = {step}")));
    }
    let n = (x_max / step + 1e-9).floor() as usize + 1;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let x = i as f64 * step;
            Ok((x, m3(x, bc)?))
        })
        .collect()
}

/// `∫_ℝ j₃(z, ρ; μ)² dz = μ^{−1/2} ∫₋₁¹ J₀(√μ ρ √(1−c²))² dc`.
pub fn line_integral_j3_sq(rho: f64, mu: f64) -> f64 {
    let s = mu.sqrt();
    let rule = GaussLegendre::cached(48);
    // Substituting c = sin θ removes the square-root endpoint behaviour.
    let n = 8 + (s * rho / 2.0).ceil() as usize;
    let h = PI / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let a = -PI / 2.0 + i as f64 * h;
        total += rule.integrate(a, a + h, |th| {
            bessel_j0(s * rho * th.cos()).powi(2) * th.cos()
        });
    }
    total / s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits_at_origin() {
        assert_eq!(t1(0.0).unwrap(), 2.0);
        assert_eq!(t2(0.0).unwrap(), 0.0);
        assert_eq!(t3(0.0).unwrap(), -2.0);
        assert_eq!(t4(0.0).unwrap(), 0.0);
        assert_eq!(m3(0.0, BoundaryCondition::Neumann).unwrap(), 4.0);
        assert!(t1(-1.0).is_err());
    }

    #[test]
    fn t4_branches_meet() {
        for x in [9e-4, 1e-3, 1.1e-3] {
            let a = t4(x).unwrap();
            let b = t4_artanh_form(x).unwrap();
            assert!((a - b).abs() < 1e-13, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn t1_continuous_across_series_switch() {
        let a = t1(1e-7 * (1.0 - 1e-9)).unwrap();
        let b = t1(1e-7).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn scaling_is_exact() {
        for r in [0.0, 0.3, 2.0] {
            for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
                assert_eq!(m3_scaled(r, 1.0, bc).unwrap(), m3(r, bc).unwrap());
                assert_eq!(m3_scaled(r, 4.0, bc).unwrap(), 0.5 * m3(2.0 * r, bc).unwrap());
            }
        }
    }

    #[test]
    fn boundary_conditions_differ_by_reflection_terms() {
        for i in 0..40 {
            let x = 0.37 * i as f64;
            let d = m3(x, BoundaryCondition::Dirichlet).unwrap();
            let n = m3(x, BoundaryCondition::Neumann).unwrap();
            let expect = 2.0 * (t3(x).unwrap() + t4(x).unwrap());
            assert!((d - n - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn line_integral_at_axis() {
        assert!((line_integral_j3_sq(0.0, 1.0) - 2.0).abs() < 1e-14);
        assert!((line_integral_j3_sq(0.0, 4.0) - 1.0).abs() < 1e-14);
    }
}
