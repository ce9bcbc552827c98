//! Finite-temperature BCS kernels in the shifted energies `a = p² − μ`,
//! `b = q² − μ`:
//!
//! ```text
//! K_T(a, b) = (a + b) / (tanh(a/2T) + tanh(b/2T))
//! B_T(p, q) = 1 / K_T((p+q)² − μ, (p−q)² − μ)
//! ```
//!
//! and the Fermi-surface integral `m_μ(T) = ∫₀^{√(2μ)} B_T(t, 0) t^{d−1} dt`.

use crate::error::{Error, Result};
use crate::quad::{integrate_finite, QuadSpec};
use crate::special::Dimension;

/// Temperature and chemical potential, both strictly positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams {
    pub t: f64,
    pub mu: f64,
}

impl KernelParams {
    pub fn new(t: f64, mu: f64) -> Result<Self> {
        if t > 0.0 && mu > 0.0 && t.is_finite() && mu.is_finite() {
            Ok(Self { t, mu })
        } else {
            Err(Error::Domain(format!(
                "temperature and chemical potential must be positive (T = {t}, mu = {mu})"
            )))
        }
    }
}

/// `s / sinh s`, even and analytic.
fn s_over_sinh(s: f64) -> f64 {
    if s.abs() < 1e-4 {
        let s2 = s * s;
        1.0 - s2 / 6.0 + 7.0 * s2 * s2 / 360.0 - 31.0 * s2 * s2 * s2 / 15120.0
    } else {
        s / s.sinh()
    }
}

/// `K_T(a, b)`; always at least `2T`.
///
/// Same-sign arguments use the defining quotient, which has no cancellation.
/// Opposite signs use `tanh x + tanh y = sinh(x+y)/(cosh x cosh y)` with
/// `x = a/2T`, `y = b/2T`, switching to a factored exponential form once the
/// hyperbolic functions would overflow.
pub fn kt(a: f64, b: f64, params: KernelParams) -> f64 {
    let two_t = 2.0 * params.t;
    let x = a / two_t;
    let y = b / two_t;
    if x * y >= 0.0 {
        if x == 0.0 && y == 0.0 {
            return two_t;
        }
        return (a + b) / (x.tanh() + y.tanh());
    }
    let s = x + y;
    let d = x.abs() + y.abs();
    if d < 600.0 {
        return two_t * s_over_sinh(s) * x.cosh() * y.cosh();
    }
    // cosh x cosh y = ¼e^{D}(1 + e^{−2D} + 2cosh(s)e^{−D}) with D = |x| + |y|.
    let abs_s = s.abs();
    if abs_s < 1e-4 {
        let bracket = 1.0 + (-2.0 * d).exp() + 2.0 * abs_s.cosh() * (-d).exp();
        return two_t * s_over_sinh(s) * 0.25 * bracket * d.exp();
    }
    // s/sinh s = 2|s|e^{−|s|}/(1 − e^{−2|s|}) and D − |s| = 2 min(|x|, |y|).
    let m = x.abs().min(y.abs());
    let bracket = 1.0 + (-2.0 * d).exp() + (-2.0 * m).exp() + (-abs_s - d).exp();
    params.t * abs_s * (2.0 * m).exp() * bracket / -(-2.0 * abs_s).exp_m1()
}

/// `B_T(p, 0) = tanh(a/2T)/a` as a function of `a = p² − μ`; its maximum is `1/2T` at `a = 0`.
pub fn bt_p0(a: f64, params: KernelParams) -> f64 {
    let x = a / (2.0 * params.t);
    if x.abs() < 1e-4 {
        let x2 = x * x;
        (1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0) / (2.0 * params.t)
    } else {
        x.tanh() / a
    }
}

/// `B_T(p, q)` from `|p|²`, `|q|²` and `p·q`.
pub fn bt(psq: f64, qsq: f64, pq_dot: f64, params: KernelParams) -> Result<f64> {
    if psq < 0.0 || qsq < 0.0 || !pq_dot.is_finite() {
        return Err(Error::Domain(format!(
            "invalid arguments |p|^2 = {psq}, |q|^2 = {qsq}, p.q = {pq_dot}"
        )));
    }
    if pq_dot * pq_dot > psq * qsq * (1.0 + 1e-12) + f64::MIN_POSITIVE {
        return Err(Error::Domain(format!(
            "p.q = {pq_dot} violates Cauchy-Schwarz for |p|^2 = {psq}, |q|^2 = {qsq}"
        )));
    }
    let base = psq + qsq - params.mu;
    Ok(1.0 / kt(base + 2.0 * pq_dot, base - 2.0 * pq_dot, params))
}

/// Break points of `δ ↦ B_T(√μ + δ, 0)` around the Fermi surface: zero and a
/// geometric ladder of offsets starting at `T/√μ`, restricted to `(lo, hi)`.
pub fn fermi_breaks(params: KernelParams, lo: f64, hi: f64) -> Vec<f64> {
    let h0 = params.t / params.mu.sqrt();
    let mut out = vec![0.0];
    let mut h = h0;
    while h < hi.max(-lo) {
        if h < hi {
            out.push(h);
        }
        if -h > lo {
            out.push(-h);
        }
        h *= 4.0;
    }
    out.retain(|&x| x > lo && x < hi);
    out.sort_by(f64::total_cmp);
    out
}

/// `m_μ(T) = ∫₀^{√(2μ)} B_T(t, 0) t^{d−1} dt`, integrated in the offset
/// `δ = t − √μ` so that `t² − μ = δ(2√μ + δ)` keeps full relative precision
/// at the Fermi surface.
pub fn m_mu(params: KernelParams, d: Dimension) -> Result<f64> {
    let s = params.mu.sqrt();
    let (lo, hi) = (-s, (2.0 * params.mu).sqrt() - s);
    let spec = QuadSpec::with_tol(1e-12, 1e-11).singular_at(fermi_breaks(params, lo, hi));
    let p = d.get() as i32 - 1;
    let r = integrate_finite(
        |delta| {
            let t = s + delta;
            bt_p0(delta * (2.0 * s + delta), params) * t.powi(p)
        },
        lo,
        hi,
        &spec,
    )?;
    Ok(r.value)
}

/// `x / tanh x` with its value 1 at the origin.
fn x_over_tanh(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 3.0 - x2 * x2 / 45.0
    } else {
        x / x.tanh()
    }
}

/// Whether `(x+y)/(tanh x + tanh y) ≥ ½(x/tanh x + y/tanh y)` holds up to a
/// relative slack of 1e-12.
pub fn check_tanh_inequality(x: f64, y: f64) -> bool {
    let lhs = kt(x, y, KernelParams { t: 0.5, mu: 1.0 });
    let rhs = 0.5 * (x_over_tanh(x) + x_over_tanh(y));
    lhs >= rhs - 1e-12 * rhs.abs().max(1.0)
}

/// Empirical constants `C₁ = min K/(T + p² + q²)` and `C₂ = max K/(p² + q² + 1)`
/// over the given `(T, p², q²)` samples.
pub fn kernel_sandwich_constants(mu: f64, samples: &[(f64, f64, f64)]) -> Result<(f64, f64)> {
    let mut c1 = f64::INFINITY;
    let mut c2 = 0.0f64;
    for &(t, psq, qsq) in samples {
        let k = kt(psq - mu, qsq - mu, KernelParams::new(t, mu)?);
        c1 = c1.min(k / (t + psq + qsq));
        c2 = c2.max(k / (psq + qsq + 1.0));
    }
    Ok((c1, c2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t: f64, mu: f64) -> KernelParams {
        KernelParams::new(t, mu).unwrap()
    }

    #[test]
    fn kernel_special_values() {
        let pr = p(0.3, 1.0);
        assert_eq!(kt(0.0, 0.0, pr), 0.6);
        let got = kt(0.6, 0.6, pr);
        assert!((got - 0.6 / 1f64.tanh()).abs() < 1e-15);
        for x in [0.1, 1.0, 5.0] {
            let line = kt(x, -x, pr);
            let expected = 0.6 * (x / 0.6).cosh().powi(2);
            assert!(((line - expected) / expected).abs() < 1e-14);
            let near = kt(x, -x + 1e-9, pr);
            assert!(((near - expected) / expected).abs() < 1e-6);
        }
    }

    #[test]
    fn kernel_survives_extreme_arguments() {
        let pr = p(1e-6, 1.0);
        let k = kt(1.0, 2.0, pr);
        assert!((k - 1.5).abs() < 1e-12, "{k}");
        let k = kt(1e-3, -1e-3, pr);
        assert!(k.is_infinite() || k > 1e100);
        assert_eq!(1.0 / kt(1.0, -1.0, pr), 0.0);
    }

    #[test]
    fn pair_kernel_reduces_to_single_particle_form() {
        let pr = p(0.1, 1.0);
        assert!((bt(1.0, 0.0, 0.0, pr).unwrap() - 5.0).abs() < 1e-14);
        let got = bt(2.0, 0.0, 0.0, pr).unwrap();
        assert!((got - 5f64.tanh()).abs() < 1e-14);
        assert!(bt(1.0, 1.0, 1.5, pr).is_err());
    }

    #[test]
    fn tanh_inequality_spot_checks() {
        assert!(check_tanh_inequality(1.0, 1.0));
        assert!(check_tanh_inequality(3.0, -1.0));
        assert!(check_tanh_inequality(0.0, 0.0));
    }

    #[test]
    fn m_mu_crude_bound_at_high_temperature() {
        for d in [Dimension::One, Dimension::Two, Dimension::Three] {
            let pr = p(1e3, 1.0);
            let bound = 2f64.sqrt().powi(d.get() as i32) / (d.get() as f64 * 2.0 * pr.t);
            assert!(m_mu(pr, d).unwrap() <= bound);
        }
    }
}
