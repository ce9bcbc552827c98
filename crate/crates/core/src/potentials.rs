//! Radial pair potentials in one, two and three dimensions.
//!
//! A [`RadialPotential`] couples a radial profile with a dimension and
//! provides its Fourier transform `V̂(k) = (2π)^{-d/2}∫ V(x) e^{-ik·x} dx`,
//! moments, the Fermi-sphere expectation `e_μ` and the angular-momentum
//! spectrum of the Fermi-sphere operator
//! `V_μ(p, q) = (2π)^{-d/2} V̂(√μ (p − q))`.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{try_integrate_finite, ChebTable, QuadResult, QuadSpec};
use crate::special::{bessel_j0, j_d, sinc, Dimension};

/// Radial profile `V(r)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    /// `a·exp(−r²/ℓ²)`
    Gaussian { a: f64, ell: f64 },
    /// `a·exp(−r/ℓ)`
    Exponential { a: f64, ell: f64 },
    /// `a` for `r < radius`, zero beyond.
    StepWell { a: f64, radius: f64 },
    /// Monotone cubic interpolation through `(r_i, v_i)`; zero past the last node.
    Tabulated(Tabulated),
}

/// Samples of a radial profile with monotone cubic (Fritsch-Carlson) slopes.
#[derive(Clone, Debug, PartialEq)]
pub struct Tabulated {
    r: Vec<f64>,
    v: Vec<f64>,
    slopes: Vec<f64>,
}

impl Tabulated {
    pub fn new(r: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidPotential(msg));
        if r.len() != v.len() {
            return bad(format!("{} radii but {} values", r.len(), v.len()));
        }
        if r.len() < 2 {
            return bad("tabulated potential needs at least two nodes".into());
        }
        if r[0] != 0.0 {
            return bad(format!("first node must be r = 0, got {}", r[0]));
        }
        if r.iter().chain(&v).any(|x| !x.is_finite()) {
            return bad("tabulated potential contains non-finite entries".into());
        }
        if r.windows(2).any(|w| w[1] <= w[0]) {
            return bad("radii must be strictly increasing".into());
        }
        let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let last = v[v.len() - 1].abs();
        if last >= 1e-12 * vmax && vmax > 0.0 {
            return bad(format!(
                "last value {last:e} has not decayed below 1e-12 of max |V| = {vmax:e}"
            ));
        }
        let slopes = pchip_slopes(&r, &v);
        Ok(Self { r, v, slopes })
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    fn eval(&self, x: f64) -> (f64, bool) {
        let n = self.r.len();
        if x > self.r[n - 1] {
            return (0.0, true);
        }
        let i = match self.r.partition_point(|&ri| ri <= x) {
            0 => 0,
            p => (p - 1).min(n - 2),
        };
        let h = self.r[i + 1] - self.r[i];
        let t = (x - self.r[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let value = h00 * self.v[i]
            + h10 * h * self.slopes[i]
            + h01 * self.v[i + 1]
            + h11 * h * self.slopes[i + 1];
        (value, false)
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut m = vec![0.0; n];
    if n == 2 {
        m[0] = delta[0];
        m[1] = delta[0];
        return m;
    }
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] > 0.0 {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s * d0 <= 0.0 {
            0.0
        } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    m[0] = end(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    m
}

/// Serialized form: `{"kind":"gaussian","a":1.0,"ell":1.0,"d":3}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Gaussian { a: f64, ell: f64, d: Dimension },
    Exponential { a: f64, ell: f64, d: Dimension },
    StepWell { a: f64, radius: f64, d: Dimension },
    Tabulated { r: Vec<f64>, v: Vec<f64>, d: Dimension },
}

/// A radial potential in a fixed dimension. Immutable after construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "PotentialSpec", into = "PotentialSpec")]
pub struct RadialPotential {
    profile: Profile,
    dim: Dimension,
    hat_table: Arc<OnceLock<std::result::Result<ChebTable, Error>>>,
}

impl PartialEq for RadialPotential {
    fn eq(&self, other: &Self) -> bool {
        self.profile == other.profile && self.dim == other.dim
    }
}

impl TryFrom<PotentialSpec> for RadialPotential {
    type Error = Error;

    fn try_from(spec: PotentialSpec) -> Result<Self> {
        let (profile, d) = match spec {
            PotentialSpec::Gaussian { a, ell, d } => (Profile::Gaussian { a, ell }, d),
            PotentialSpec::Exponential { a, ell, d } => (Profile::Exponential { a, ell }, d),
            PotentialSpec::StepWell { a, radius, d } => (Profile::StepWell { a, radius }, d),
            PotentialSpec::Tabulated { r, v, d } => (Profile::Tabulated(Tabulated::new(r, v)?), d),
        };
        RadialPotential::new(profile, d)
    }
}

impl From<RadialPotential> for PotentialSpec {
    fn from(p: RadialPotential) -> Self {
        let d = p.dim;
        match p.profile {
            Profile::Gaussian { a, ell } => PotentialSpec::Gaussian { a, ell, d },
            Profile::Exponential { a, ell } => PotentialSpec::Exponential { a, ell, d },
            Profile::StepWell { a, radius } => PotentialSpec::StepWell { a, radius, d },
            Profile::Tabulated(t) => PotentialSpec::Tabulated { r: t.r, v: t.v, d },
        }
    }
}

/// Relative size below which the profile is treated as zero.
const NEGLIGIBLE: f64 = 1e-20;

impl RadialPotential {
    pub fn new(profile: Profile, dim: Dimension) -> Result<Self> {
        let check = |name: &str, x: f64, positive: bool| -> Result<()> {
            if !x.is_finite() || (positive && x <= 0.0) {
                Err(Error::InvalidPotential(format!("{name} = {x} is not admissible")))
            } else {
                Ok(())
            }
        };
        match &profile {
            Profile::Gaussian { a, ell } | Profile::Exponential { a, ell } => {
                check("a", *a, false)?;
                check("ell", *ell, true)?;
            }
            Profile::StepWell { a, radius } => {
                check("a", *a, false)?;
                check("radius", *radius, true)?;
            }
            Profile::Tabulated(_) => {}
        }
        Ok(Self {
            profile,
            dim,
            hat_table: Arc::new(OnceLock::new()),
        })
    }

    pub fn gaussian(a: f64, ell: f64, dim: Dimension) -> Result<Self> {
        Self::new(Profile::Gaussian { a, ell }, dim)
    }

    pub fn exponential(a: f64, ell: f64, dim: Dimension) -> Result<Self> {
        Self::new(Profile::Exponential { a, ell }, dim)
    }

    pub fn step_well(a: f64, radius: f64, dim: Dimension) -> Result<Self> {
        Self::new(Profile::StepWell { a, radius }, dim)
    }

    pub fn tabulated(r: Vec<f64>, v: Vec<f64>, dim: Dimension) -> Result<Self> {
        Self::new(Profile::Tabulated(Tabulated::new(r, v)?), dim)
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// Same profile in another dimension.
    pub fn with_dim(&self, dim: Dimension) -> Self {
        Self {
            profile: self.profile.clone(),
            dim,
            hat_table: Arc::new(OnceLock::new()),
        }
    }

    /// `V(r)`; zero beyond the last node of a tabulated profile.
    pub fn v_of_r(&self, r: f64) -> f64 {
        self.v_of_r_flagged(r).0
    }

    /// `V(r)` together with a flag that is set when a tabulated profile was
    /// queried past its last node.
    pub fn v_of_r_flagged(&self, r: f64) -> (f64, bool) {
        match &self.profile {
            Profile::Gaussian { a, ell } => (a * (-(r / ell).powi(2)).exp(), false),
            Profile::Exponential { a, ell } => (a * (-r / ell).exp(), false),
            Profile::StepWell { a, radius } => (if r < *radius { *a } else { 0.0 }, false),
            Profile::Tabulated(t) => t.eval(r),
        }
    }

    /// Whether `V(r) ≥ 0` everywhere. Tabulated profiles are checked on a
    /// dense sample of each interval.
    pub fn is_nonnegative(&self) -> bool {
        match &self.profile {
            Profile::Gaussian { a, .. }
            | Profile::Exponential { a, .. }
            | Profile::StepWell { a, .. } => *a >= 0.0,
            Profile::Tabulated(t) => t.r.windows(2).all(|w| {
                (0..=32).all(|j| t.eval(w[0] + (w[1] - w[0]) * j as f64 / 32.0).0 >= 0.0)
            }),
        }
    }

    /// Whether the profile vanishes identically.
    pub fn is_zero(&self) -> bool {
        match &self.profile {
            Profile::Gaussian { a, .. }
            | Profile::Exponential { a, .. }
            | Profile::StepWell { a, .. } => *a == 0.0,
            Profile::Tabulated(t) => t.v.iter().all(|&x| x == 0.0),
        }
    }

    /// Typical length of the profile.
    pub fn length_scale(&self) -> f64 {
        match &self.profile {
            Profile::Gaussian { ell, .. } | Profile::Exponential { ell, .. } => *ell,
            Profile::StepWell { radius, .. } => *radius,
            Profile::Tabulated(t) => {
                // Radius containing most of |V| r^{d-1}.
                let total: f64 = t.r.windows(2).map(|w| w[1] - w[0]).sum();
                total.max(f64::MIN_POSITIVE) / 4.0
            }
        }
    }

    /// Radius beyond which `|V|` is negligible or exactly zero.
    pub fn cutoff_radius(&self) -> f64 {
        match &self.profile {
            Profile::Gaussian { ell, .. } => ell * (1.0 / NEGLIGIBLE).ln().sqrt() * 1.05,
            Profile::Exponential { ell, .. } => ell * ((1.0 / NEGLIGIBLE).ln() + 8.0),
            Profile::StepWell { radius, .. } => *radius,
            Profile::Tabulated(t) => t.r[t.r.len() - 1],
        }
    }

    /// Interior radii where the profile is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.profile {
            Profile::Tabulated(t) if t.r.len() <= 400 => t.r[1..t.r.len() - 1].to_vec(),
            _ => Vec::new(),
        }
    }

    /// `∫₀^∞ g(r) dr` over the support of `V`, with the profile's break points.
    pub fn radial_integral(
        &self,
        mut g: impl FnMut(f64) -> Result<f64>,
        spec: &QuadSpec,
    ) -> Result<QuadResult> {
        let spec = QuadSpec {
            singular_points: self.breakpoints(),
            ..spec.clone()
        };
        try_integrate_finite(&mut g, 0.0, self.cutoff_radius(), &spec)
    }

    /// `V̂(k)` by radial quadrature:
    /// d=1 `√(2/π)∫V cos(kr) dr`, d=2 `∫V J₀(kr) r dr`,
    /// d=3 `√(2/π)∫V r² sinc(kr) dr`.
    pub fn fourier_hat(&self, k: f64) -> Result<f64> {
        self.fourier_hat_with(k, &QuadSpec::with_tol(1e-14, 1e-12))
    }

    pub fn fourier_hat_with(&self, k: f64, spec: &QuadSpec) -> Result<f64> {
        if k < 0.0 || !k.is_finite() {
            return Err(Error::Domain(format!("Fourier transform needs k >= 0, got {k}")));
        }
        let c = (2.0 / PI).sqrt();
        let r = match self.dim {
            Dimension::One => self.radial_integral(|r| Ok(self.v_of_r(r) * (k * r).cos()), spec)?,
            Dimension::Two => {
                self.radial_integral(|r| Ok(self.v_of_r(r) * bessel_j0(k * r) * r), spec)?
            }
            Dimension::Three => {
                self.radial_integral(|r| Ok(self.v_of_r(r) * r * r * sinc(k * r)), spec)?
            }
        };
        Ok(match self.dim {
            Dimension::Two => r.value,
            _ => c * r.value,
        })
    }

    /// Closed-form `V̂(k)` where one exists.
    pub fn fourier_hat_closed(&self, k: f64) -> Option<f64> {
        let d = self.dim.get() as f64;
        let norm = self.dim.fourier_norm();
        match (&self.profile, self.dim) {
            (Profile::Gaussian { a, ell }, _) => {
                Some(a * (0.5 * ell * ell).powf(0.5 * d) * (-0.25 * (k * ell).powi(2)).exp())
            }
            (Profile::Exponential { a, ell }, Dimension::One) => {
                Some(a * norm * 2.0 * ell / (1.0 + (k * ell).powi(2)))
            }
            (Profile::Exponential { a, ell }, Dimension::Two) => {
                Some(a * ell * ell / (1.0 + (k * ell).powi(2)).powf(1.5))
            }
            (Profile::Exponential { a, ell }, Dimension::Three) => {
                Some(a * norm * 8.0 * PI * ell.powi(3) / (1.0 + (k * ell).powi(2)).powi(2))
            }
            (Profile::StepWell { a, radius }, Dimension::One) => {
                Some(a * norm * 2.0 * radius * sinc(k * radius))
            }
            (Profile::StepWell { a, radius }, Dimension::Three) => {
                let x = k * radius;
                let shape = if x < 1e-2 {
                    let x2 = x * x;
                    1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0 - x2 * x2 * x2 / 45360.0
                } else {
                    (x.sin() - x * x.cos()) / (x * x * x)
                };
                Some(a * norm * 4.0 * PI * radius.powi(3) * shape)
            }
            _ => None,
        }
    }

    /// Fast `V̂(k)` for repeated use: the closed form when available, otherwise
    /// a Chebyshev table built on first use, otherwise direct quadrature.
    pub fn hat(&self, k: f64) -> Result<f64> {
        if let Some(v) = self.fourier_hat_closed(k) {
            return Ok(v);
        }
        let table = self
            .hat_table
            .get_or_init(|| self.build_hat_table())
            .as_ref()
            .map_err(Clone::clone)?;
        if k <= table.end() {
            Ok(table.eval(k))
        } else {
            self.fourier_hat(k)
        }
    }

    fn build_hat_table(&self) -> Result<ChebTable> {
        let rc = self.cutoff_radius();
        let end = 200.0 / self.length_scale();
        ChebTable::build(0.0, end, 1.0 / rc, 24, |k| self.fourier_hat(k))
    }

    /// Momentum beyond which `|V̂|` stays below `rel · V̂(0)` (capped).
    pub fn hat_cutoff(&self, rel: f64) -> f64 {
        let ell = self.length_scale();
        match (&self.profile, self.dim) {
            (Profile::Gaussian { ell, .. }, _) => 2.0 * (1.0 / rel).ln().sqrt() / ell,
            (Profile::Exponential { ell, .. }, d) => {
                let power = (d.get() as f64 + 1.0) / 2.0;
                ((rel.powf(-1.0 / power) - 1.0).sqrt() / ell).min(200.0 / ell)
            }
            _ => 200.0 / ell,
        }
    }

    /// `∫_{ℝ^d} V(x)|x|^n dx`.
    pub fn moment(&self, n: u32) -> Result<f64> {
        let p = (n + self.dim.get() as u32 - 1) as i32;
        let r = self.radial_integral(|r| Ok(self.v_of_r(r) * r.powi(p)), &QuadSpec::with_tol(1e-14, 1e-12))?;
        Ok(self.dim.sphere_area() * r.value)
    }

    /// `∫_{ℝ^d} |V(x)| dx`.
    pub fn l1_norm(&self) -> Result<f64> {
        let p = self.dim.get() as i32 - 1;
        let r = self.radial_integral(
            |r| Ok(self.v_of_r(r).abs() * r.powi(p)),
            &QuadSpec::with_tol(1e-14, 1e-12),
        )?;
        Ok(self.dim.sphere_area() * r.value)
    }

    /// `e_μ = |S^{d−1}|^{-1} ∫ V j_d(·;μ)²`, the top eigenvalue of `V_μ`.
    pub fn e_mu(&self, mu: f64) -> Result<f64> {
        check_mu(mu)?;
        let p = self.dim.get() as i32 - 1;
        let d = self.dim;
        let r = self.radial_integral(
            |r| Ok(self.v_of_r(r) * j_d(r, mu, d).powi(2) * r.powi(p)),
            &QuadSpec::with_tol(1e-14, 1e-12),
        )?;
        Ok(r.value)
    }

    /// `e_μ` from the sphere average `(2π)^{-d/2}∫_{S^{d−1}} V̂(√μ|e₁ − p|) dp`.
    pub fn e_mu_sphere(&self, mu: f64) -> Result<f64> {
        check_mu(mu)?;
        match self.dim {
            Dimension::One => {
                Ok(self.dim.fourier_norm() * (self.hat(0.0)? + self.hat(2.0 * mu.sqrt())?))
            }
            _ => Ok(self.vmu_spectrum(mu, 0)?[0]),
        }
    }

    /// Eigenvalues `v_0..v_{ℓ_max}` of `V_μ` on spherical harmonics (d=3) or
    /// Fourier modes (d=2).
    pub fn vmu_spectrum(&self, mu: f64, l_max: usize) -> Result<Vec<f64>> {
        check_mu(mu)?;
        let spec = QuadSpec::with_tol(1e-13, 1e-11);
        let s = mu.sqrt();
        match self.dim {
            Dimension::One => Err(Error::UnsupportedDimension(1)),
            Dimension::Two => (0..=l_max)
                .map(|l| {
                    // Symmetric in θ ↦ 2π − θ.
                    let r = try_integrate_finite(
                        |t| Ok::<_, Error>(self.hat(2.0 * s * (0.5 * t).sin())? * (l as f64 * t).cos()),
                        0.0,
                        PI,
                        &spec,
                    )?;
                    Ok(r.value / PI)
                })
                .collect(),
            Dimension::Three => {
                let pref = 2.0 * PI * self.dim.fourier_norm();
                (0..=l_max)
                    .map(|l| {
                        let r = try_integrate_finite(
                            |x| {
                                Ok::<_, Error>(
                                    self.hat((2.0 * mu * (1.0 - x)).max(0.0).sqrt())?
                                        * legendre_p(l, x),
                                )
                            },
                            -1.0,
                            1.0,
                            &spec,
                        )?;
                        Ok(pref * r.value)
                    })
                    .collect()
            }
        }
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("chemical potential must be positive, got {mu}")))
    }
}

/// Legendre polynomial `P_l(x)` by the three-term recurrence.
pub fn legendre_p(l: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if l == 0 {
        return 1.0;
    }
    for k in 2..=l {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    p1
}
