//! One-dimensional adaptive quadrature.
//!
//! Three drivers share one globally adaptive 21-point Gauss-Kronrod engine:
//! finite intervals with optional interior break points, semi-infinite
//! intervals with a declared decay law, and oscillatory tails
//! `∫_K^∞ a(k)·trig(ωk) dk` summed over half periods with Wynn's epsilon
//! algorithm.
//!
//! Every driver has a fallible twin (`try_*`) that accepts an integrand
//! returning `Result`, so integrals can be nested without panicking.

mod cheb;
mod rules;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

pub use cheb::ChebTable;
pub use rules::GaussLegendre;

use rules::{gk21, PanelEstimate};

/// Value of a numerical integral with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Tolerances and limits for a single integration call.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
    /// Interior points where panels must be split.
    pub singular_points: Vec<f64>,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_evals: 2_000_000,
            singular_points: Vec::new(),
        }
    }
}

impl QuadSpec {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn singular_at(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.singular_points.extend(points);
        self
    }

    pub fn max_evals(mut self, n: usize) -> Self {
        self.max_evals = n;
        self
    }

    /// Same limits with both tolerances multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            max_evals: self.max_evals,
            singular_points: Vec::new(),
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    fn validate(&self) -> Result<(), QuadError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(QuadError::InvalidInput(format!(
                "tolerances must be positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_evals < 21 {
            return Err(QuadError::InvalidInput(format!(
                "max_evals {} is below one 21-point panel",
                self.max_evals
            )));
        }
        Ok(())
    }
}

/// Declared tail behaviour for [`integrate_semiinfinite`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decay {
    /// `|f(x)| = O(x^-power)` with `power > 1`.
    Algebraic(f64),
    /// `|f(x)| = O(e^{-rate x})`.
    Exponential(f64),
}

/// Which trigonometric factor multiplies the amplitude in an oscillatory tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trig {
    Sin,
    Cos,
}

impl Trig {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Trig::Sin => x.sin(),
            Trig::Cos => x.cos(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("accuracy not reached: best estimate {} with error {}", best.value, best.error_estimate)]
    AccuracyNotReached { best: QuadResult },
    #[error("integrand is not finite at x = {x} (value {value})")]
    NonFinite { x: f64, value: f64 },
    #[error("tail not resolved beyond x = {cutoff}: {reason}")]
    TailNotResolved { cutoff: f64, reason: String },
    #[error("amplitude not decaying near k = {at}")]
    AmplitudeNotDecaying { at: f64 },
    #[error("frequency too small: {omega}")]
    FrequencyTooSmall { omega: f64 },
    #[error("invalid quadrature input: {0}")]
    InvalidInput(String),
}

struct Panel {
    a: f64,
    b: f64,
    est: PanelEstimate,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate_finite(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> Result<QuadResult, QuadError> {
    try_integrate_finite(|x| Ok::<_, QuadError>(f(x)), a, b, spec)
}

/// [`integrate_finite`] for integrands that can fail.
pub fn try_integrate_finite<E: From<QuadError>>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> Result<QuadResult, E> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(QuadError::InvalidInput(format!("need finite a < b, got [{a}, {b}]")).into());
    }
    let evals = std::cell::Cell::new(0usize);
    let mut eval = |x: f64| -> Result<f64, E> {
        evals.set(evals.get() + 1);
        let v = f(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::NonFinite { x, value: v }.into())
        }
    };

    let mut breaks: Vec<f64> = spec
        .singular_points
        .iter()
        .copied()
        .filter(|&s| s > a && s < b)
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut edges = Vec::with_capacity(breaks.len() + 2);
    edges.push(a);
    edges.extend(breaks);
    edges.push(b);

    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        let est = gk21(&mut eval, w[0], w[1])?;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            est,
        });
    }
    // Panels too narrow to split further.
    let mut frozen: Vec<Panel> = Vec::new();

    loop {
        let (value, error) = heap
            .iter()
            .chain(frozen.iter())
            .fold((0.0, 0.0), |(v, e), p| (v + p.est.value, e + p.est.error));
        let result = QuadResult {
            value,
            error_estimate: error,
            evaluations: evals.get(),
        };
        if error <= spec.target(value) {
            return Ok(result);
        }
        if evals.get() + 42 > spec.max_evals || heap.is_empty() {
            return Err(QuadError::AccuracyNotReached { best: result }.into());
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-14 * mid.abs().max(1e-300)
        {
            frozen.push(worst);
            continue;
        }
        let left = gk21(&mut eval, worst.a, mid)?;
        let right = gk21(&mut eval, mid, worst.b)?;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            est: left,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            est: right,
        });
    }
}

/// Integral of `f` over `[a, ∞)` given its decay law.
pub fn integrate_semiinfinite(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    decay: Decay,
    spec: &QuadSpec,
) -> Result<QuadResult, QuadError> {
    try_integrate_semiinfinite(|x| Ok::<_, QuadError>(f(x)), a, decay, spec)
}

/// [`integrate_semiinfinite`] for integrands that can fail.
///
/// Algebraic tails are integrated on doubling segments `[a, a+L], [a+L, a+2L], ..`
/// and the remainder is removed by Richardson extrapolation in the cutoff;
/// the change between successive extrapolants is part of the error estimate.
/// Exponential tails are truncated where `e^{-rate x}` drops below the
/// absolute tolerance and the neglected part is bounded by `|f(X)|/rate`.
pub fn try_integrate_semiinfinite<E: From<QuadError>>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    a: f64,
    decay: Decay,
    spec: &QuadSpec,
) -> Result<QuadResult, E> {
    spec.validate()?;
    if !a.is_finite() {
        return Err(QuadError::InvalidInput(format!("lower limit {a} is not finite")).into());
    }
    let sub = QuadSpec {
        singular_points: spec.singular_points.clone(),
        ..spec.scaled(0.1)
    };
    match decay {
        Decay::Exponential(rate) => {
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(QuadError::InvalidInput(format!("decay rate {rate}")).into());
            }
            let mut cutoff = a + (1.0 / spec.abs_tol).ln() / rate;
            let mut body = try_integrate_finite(&mut f, a, cutoff, &sub)?;
            for _ in 0..20 {
                let fx = f(cutoff)?;
                let tail = fx.abs() / rate;
                if tail <= 0.1 * spec.target(body.value) {
                    body.error_estimate += tail;
                    body.evaluations += 1;
                    return Ok(body);
                }
                let next = cutoff + 10f64.ln() / rate;
                let ext = try_integrate_finite(&mut f, cutoff, next, &sub)?;
                body.value += ext.value;
                body.error_estimate += ext.error_estimate;
                body.evaluations += ext.evaluations + 1;
                cutoff = next;
            }
            Err(QuadError::TailNotResolved {
                cutoff,
                reason: "integrand does not decay at the declared exponential rate".into(),
            }
            .into())
        }
        Decay::Algebraic(power) => {
            if !(power > 1.0 && power.is_finite()) {
                return Err(QuadError::InvalidInput(format!(
                    "algebraic decay power {power} must exceed 1"
                ))
                .into());
            }
            let scale = a.abs().max(1.0);
            check_algebraic_envelope(&mut f, a, scale, power)?;
            let factor = 2f64.powf(power - 1.0) - 1.0;
            let mut len = scale;
            let first = try_integrate_finite(&mut f, a, a + len, &sub)?;
            let mut partial = first.value;
            let mut quad_err = first.error_estimate;
            let mut evals = first.evaluations;
            let mut prev_extrap: Option<f64> = None;
            let mut prev_diff = f64::INFINITY;
            for iter in 0..48 {
                let seg = try_integrate_finite(&mut f, a + len, a + 2.0 * len, &sub)?;
                len *= 2.0;
                quad_err += seg.error_estimate;
                evals += seg.evaluations;
                let next = partial + seg.value;
                let extrap = next + seg.value / factor;
                partial = next;
                if let Some(pe) = prev_extrap {
                    let diff = (extrap - pe).abs();
                    let err = diff.max(prev_diff.min(diff * 4.0)) + quad_err;
                    if iter >= 2 && err <= spec.target(extrap) {
                        return Ok(QuadResult {
                            value: extrap,
                            error_estimate: err,
                            evaluations: evals,
                        });
                    }
                    prev_diff = diff;
                }
                prev_extrap = Some(extrap);
                if evals > spec.max_evals {
                    break;
                }
            }
            Err(QuadError::TailNotResolved {
                cutoff: a + len,
                reason: format!("tail estimate did not settle under x^-{power} extrapolation"),
            }
            .into())
        }
    }
}

/// Rejects integrands whose sampled envelope `|f(x)|·x^p` keeps growing.
fn check_algebraic_envelope<E: From<QuadError>>(
    f: &mut impl FnMut(f64) -> Result<f64, E>,
    a: f64,
    scale: f64,
    power: f64,
) -> Result<(), E> {
    let mut env = Vec::with_capacity(32);
    for k in 0..32 {
        let x = a + scale * 2f64.powi(k);
        let v = f(x)?;
        if !v.is_finite() {
            return Err(QuadError::NonFinite { x, value: v }.into());
        }
        env.push(v.abs() * (x - a + scale).powf(power));
    }
    let early = env[..16].iter().cloned().fold(0.0, f64::max);
    let late = env[24..].iter().cloned().fold(0.0, f64::max);
    if late > 100.0 * early + f64::MIN_POSITIVE {
        return Err(QuadError::TailNotResolved {
            cutoff: a + scale * 2f64.powi(31),
            reason: format!("sampled |f|·x^{power} grows from {early:e} to {late:e}"),
        }
        .into());
    }
    Ok(())
}

/// `∫_from^∞ amplitude(k)·trig(ωk) dk` for a monotonically decaying amplitude.
pub fn integrate_oscillatory_tail(
    mut amplitude: impl FnMut(f64) -> f64,
    trig: Trig,
    omega: f64,
    from: f64,
    spec: &QuadSpec,
) -> Result<QuadResult, QuadError> {
    try_integrate_oscillatory_tail(|k| Ok::<_, QuadError>(amplitude(k)), trig, omega, from, spec)
}

const OSC_MAX_TERMS: usize = 2000;
const WYNN_WINDOW: usize = 21;

/// [`integrate_oscillatory_tail`] for amplitudes that can fail.
pub fn try_integrate_oscillatory_tail<E: From<QuadError>>(
    mut amplitude: impl FnMut(f64) -> Result<f64, E>,
    trig: Trig,
    omega: f64,
    from: f64,
    spec: &QuadSpec,
) -> Result<QuadResult, E> {
    spec.validate()?;
    if !(omega.is_finite() && omega > 1e-12) {
        return Err(QuadError::FrequencyTooSmall { omega }.into());
    }
    if !from.is_finite() {
        return Err(QuadError::InvalidInput(format!("lower limit {from} is not finite")).into());
    }
    let half = PI / omega;

    let mut last = f64::INFINITY;
    let mut first_amp = 0.0;
    let mut evals = 0usize;
    for (i, j) in [0u32, 1, 2, 4, 8, 16, 32, 64].into_iter().enumerate() {
        let k = from + j as f64 * half;
        let v = amplitude(k)?.abs();
        evals += 1;
        if !v.is_finite() {
            return Err(QuadError::NonFinite { x: k, value: v }.into());
        }
        if i == 0 {
            first_amp = v;
        } else if v > last * (1.0 + 1e-9) + f64::MIN_POSITIVE {
            return Err(QuadError::AmplitudeNotDecaying { at: k }.into());
        }
        last = v;
    }
    if first_amp == 0.0 && last == 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: evals,
        });
    }
    if last >= first_amp * (1.0 - 1e-6) {
        return Err(QuadError::AmplitudeNotDecaying {
            at: from + 64.0 * half,
        }
        .into());
    }

    let phase = match trig {
        Trig::Sin => 0.0,
        Trig::Cos => 0.5,
    };
    let n0 = (from / half - phase).floor() + 1.0;
    let first_zero = (n0 + phase) * half;
    let mut sub = spec.scaled(1e-2);
    // Half-period pieces cannot beat the rounding floor of their own estimates.
    sub.rel_tol = sub.rel_tol.max(1e-13);
    let mut integrand = |k: f64| -> Result<f64, E> { Ok(amplitude(k)? * trig.eval(omega * k)) };

    let head = if first_zero > from {
        try_integrate_finite(&mut integrand, from, first_zero, &sub)?
    } else {
        QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        }
    };
    evals += head.evaluations;
    let mut quad_err = head.error_estimate;
    let mut sums = vec![head.value];
    let mut estimates: Vec<f64> = Vec::new();
    let mut best = QuadResult {
        value: head.value,
        error_estimate: f64::INFINITY,
        evaluations: evals,
    };
    for n in 0..OSC_MAX_TERMS {
        let lo = first_zero + n as f64 * half;
        let term = try_integrate_finite(&mut integrand, lo, lo + half, &sub)?;
        evals += term.evaluations;
        quad_err += term.error_estimate;
        let s = sums.last().copied().unwrap_or(0.0) + term.value;
        sums.push(s);
        let window = &sums[sums.len().saturating_sub(WYNN_WINDOW)..];
        let est = wynn_epsilon(window);
        estimates.push(est);
        if estimates.len() >= 3 {
            let m = estimates.len();
            let diff = (est - estimates[m - 2])
                .abs()
                .max((est - estimates[m - 3]).abs());
            let err = diff.min(term.value.abs()) + quad_err;
            if err < best.error_estimate {
                best = QuadResult {
                    value: est,
                    error_estimate: err,
                    evaluations: evals,
                };
            }
            if n >= 6 && err <= spec.target(est) {
                return Ok(best);
            }
        }
        if evals > spec.max_evals {
            break;
        }
    }
    best.evaluations = evals;
    Err(QuadError::AccuracyNotReached { best }.into())
}

/// Wynn's epsilon extrapolation of a sequence of partial sums; returns the
/// entry of the highest even column built from the most recent sums.
pub(crate) fn wynn_epsilon(sums: &[f64]) -> f64 {
    let n = sums.len();
    let mut best = *sums.last().expect("non-empty sequence");
    let mut prev = vec![0.0; n + 1];
    let mut cur = sums.to_vec();
    let mut col = 0usize;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let diff = cur[j + 1] - cur[j];
            let scale = cur[j + 1].abs().max(cur[j].abs());
            if diff == 0.0 || diff.abs() <= 1e-15 * scale {
                return best;
            }
            next.push(prev[j + 1] + 1.0 / diff);
        }
        prev = cur;
        cur = next;
        col += 1;
        if col % 2 == 0 {
            let v = *cur.last().expect("non-empty column");
            if !v.is_finite() {
                return best;
            }
            best = v;
        }
    }
    best
}

/// Composite fixed-order Gauss-Legendre rule over consecutive panels given by
/// their edges. Returns `(nodes, weights)`.
pub fn composite_gauss(edges: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::cached(order);
    let mut nodes = Vec::with_capacity(order * edges.len());
    let mut weights = Vec::with_capacity(order * edges.len());
    for w in edges.windows(2) {
        for (x, wt) in rule.mapped(w[0], w[1]) {
            nodes.push(x);
            weights.push(wt);
        }
    }
    (nodes, weights)
}
