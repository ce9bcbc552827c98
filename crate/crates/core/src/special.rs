//! Bessel J₀, the sine integral and its cosine companion `Cin`, `arcoth`,
//! and the Fermi-sphere profiles `j_d(r; μ)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

/// Spatial dimension, restricted to 1, 2 and 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Dimension {
    One,
    Two,
    Three,
}

impl Dimension {
    pub fn get(self) -> u8 {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }

    /// Surface area `|S^{d-1}|` of the unit sphere.
    pub fn sphere_area(self) -> f64 {
        match self {
            Dimension::One => 2.0,
            Dimension::Two => 2.0 * PI,
            Dimension::Three => 4.0 * PI,
        }
    }

    /// `(2π)^{-d/2}`, the Fourier normalisation.
    pub fn fourier_norm(self) -> f64 {
        (2.0 * PI).powf(-0.5 * self.get() as f64)
    }
}

impl TryFrom<u8> for Dimension {
    type Error = Error;

    fn try_from(d: u8) -> Result<Self> {
        match d {
            1 => Ok(Dimension::One),
            2 => Ok(Dimension::Two),
            3 => Ok(Dimension::Three),
            other => Err(Error::UnsupportedDimension(other)),
        }
    }
}

impl From<Dimension> for u8 {
    fn from(d: Dimension) -> u8 {
        d.get()
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.get())
    }
}

/// Bessel function of the first kind of order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 8.0 {
        j0_series(x)
    } else if x <= 25.0 {
        j0_trapezoid(x)
    } else {
        j0_hankel(x)
    }
}

fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80 {
        term *= q / (k * k) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-3) {
            break;
        }
    }
    sum
}

/// `(1/π)∫₀^π cos(x sin θ) dθ` by the trapezoidal rule; the integrand is
/// periodic and analytic so the rule converges geometrically once the node
/// count exceeds x.
fn j0_trapezoid(x: f64) -> f64 {
    const N: usize = 96;
    let h = PI / N as f64;
    let mut sum = 0.5 * (1.0 + 1.0);
    for i in 1..N {
        sum += (x * (i as f64 * h).sin()).cos();
    }
    sum / N as f64
}

fn j0_hankel(x: f64) -> f64 {
    // a_k = ((1)(9)...((2k-1)^2)) / (k! 8^k), alternating into P and Q.
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        a *= (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
        if a.abs() >= prev || a.abs() < 1e-17 {
            break;
        }
        prev = a.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q -= sign * a;
        }
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Sine integral `Si(x) = ∫₀^x sin t / t dt`.
pub fn si(x: f64) -> f64 {
    if x < 0.0 {
        return -si(-x);
    }
    if x <= 4.0 {
        si_series(x)
    } else {
        let (_, si) = ci_si_continued_fraction(x);
        si
    }
}

/// `Cin(x) = ∫₀^x (1 − cos t)/t dt`, an entire even function.
pub fn cin(x: f64) -> f64 {
    let x = x.abs();
    if x <= 4.0 {
        cin_series(x)
    } else {
        let (ci, _) = ci_si_continued_fraction(x);
        EULER_GAMMA + x.ln() - ci
    }
}

fn si_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut power = x;
    let mut sum = x;
    for k in 1..60 {
        let kf = k as f64;
        power *= -x2 / ((2.0 * kf) * (2.0 * kf + 1.0));
        let term = power / (2.0 * kf + 1.0);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn cin_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut power = 1.0;
    let mut sum = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        power *= -x2 / ((2.0 * kf - 1.0) * (2.0 * kf));
        let term = -power / (2.0 * kf);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    sum
}

/// `(Ci(x), Si(x))` from the continued fraction of `E₁(ix)`, valid for x ≳ 2.
fn ci_si_continued_fraction(x: f64) -> (f64, f64) {
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 2..500 {
        let a = -((i - 1) * (i - 1)) as f64;
        b += 2.0;
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
            break;
        }
    }
    h *= Complex64::new(x.cos(), -x.sin());
    (-h.re, FRAC_PI_2 + h.im)
}

/// `arcoth(k) = ½ ln((k+1)/(k−1))` for `k > 1`.
pub fn arcoth(k: f64) -> Result<f64> {
    if k > 1.0 {
        Ok(0.5 * (2.0 / (k - 1.0)).ln_1p())
    } else {
        Err(Error::Domain(format!("arcoth requires k > 1, got {k}")))
    }
}

/// `artanh(k)` on `|k| < 1`, written to stay accurate near both ends.
pub fn artanh(k: f64) -> f64 {
    0.5 * (2.0 * k / (1.0 - k)).ln_1p()
}

/// `sin(x)/x` with its Taylor expansion near the origin.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    } else {
        x.sin() / x
    }
}

/// Radial profile `j_d(r; μ)` of the Fourier transform of the uniform
/// measure on the Fermi sphere `|p| = √μ`.
pub fn j_d(r: f64, mu: f64, d: Dimension) -> f64 {
    let x = mu.sqrt() * r;
    match d {
        Dimension::One => (2.0 / PI).sqrt() * x.cos(),
        Dimension::Two => bessel_j0(x),
        Dimension::Three => 2.0 / (2.0 * PI).sqrt() * sinc(x),
    }
}
