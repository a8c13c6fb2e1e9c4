//! The growth hypothesis on `f`, the smallness hypothesis on `φ`, and the
//! constants derived from them.
//!
//! ```text
//! (H1)  |f(t, x)| ≤ z^μ e^{−σρz} φ(t) |x|^m
//! (H2)  ‖φ‖_q^{m−1} ‖z^{−mβ(1−α)} φ‖_q < K,   q > 1/α,   μ > (m−1)(1−γ)
//! ```

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gamma;
use crate::grid::{inverse_scaled_time, scaled_time};
use crate::params::{CauchyProblem, FracParams};
use crate::quad::{integrate, integrate_power_weighted, QuadOptions};

pub type PhiFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Decay assumed for `φ` beyond the truncation point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Envelope {
    /// Nothing is known; the tail is unbounded.
    #[default]
    None,
    /// `φ = 0` beyond the truncation point.
    Vanishing,
    /// `φ(t) ≤ scale · e^{−rate t}`.
    Exponential { scale: f64, rate: f64 },
    /// `φ(t) ≤ scale · t^{−exponent}`.
    Power { scale: f64, exponent: f64 },
}

impl Envelope {
    fn at(&self, t: f64) -> f64 {
        match *self {
            Envelope::None => f64::INFINITY,
            Envelope::Vanishing => 0.0,
            Envelope::Exponential { scale, rate } => scale * (-rate * t).exp(),
            Envelope::Power { scale, exponent } => scale * t.powf(-exponent),
        }
    }

    /// Upper bound for `∫_T^∞ φ^q dt`.
    fn tail(&self, q: f64, t: f64) -> f64 {
        match *self {
            Envelope::None => f64::INFINITY,
            Envelope::Vanishing => 0.0,
            Envelope::Exponential { scale, rate } => {
                if rate > 0.0 {
                    scale.powf(q) * (-q * rate * t).exp() / (q * rate)
                } else {
                    f64::INFINITY
                }
            }
            Envelope::Power { scale, exponent } => {
                if q * exponent > 1.0 {
                    scale.powf(q) * t.powf(1.0 - q * exponent) / (q * exponent - 1.0)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    fn scaled(&self, s: f64) -> Self {
        match *self {
            Envelope::Exponential { scale, rate } => Envelope::Exponential { scale: s * scale, rate },
            Envelope::Power { scale, exponent } => Envelope::Power { scale: s * scale, exponent },
            other => other,
        }
    }
}

#[derive(Clone)]
pub struct Hypotheses {
    pub mu: f64,
    pub sigma: f64,
    pub m: u32,
    pub q: f64,
    phi: PhiFn,
    pub envelope: Envelope,
}

impl fmt::Debug for Hypotheses {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Hypotheses")
            .field("mu", &self.mu)
            .field("sigma", &self.sigma)
            .field("m", &self.m)
            .field("q", &self.q)
            .field("envelope", &self.envelope)
            .finish_non_exhaustive()
    }
}

impl Hypotheses {
    /// Checks the constraints that do not involve the fractional parameters.
    pub fn new<F>(mu: f64, sigma: f64, m: u32, q: f64, phi: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(mu >= 0.0) {
            return Err(Error::Constraint { name: "H1", detail: format!("mu >= 0, got {mu}") });
        }
        if !(sigma > 0.0) {
            return Err(Error::Constraint { name: "H1", detail: format!("sigma > 0, got {sigma}") });
        }
        if m < 2 {
            return Err(Error::Constraint { name: "H1", detail: format!("integer m >= 2, got {m}") });
        }
        if !(q > 1.0 && q.is_finite()) {
            return Err(Error::Constraint { name: "H2", detail: format!("finite q > 1, got {q}") });
        }
        Ok(Self { mu, sigma, m, q, phi: Arc::new(phi), envelope: Envelope::None })
    }

    pub fn with_envelope(mut self, envelope: Envelope) -> Self {
        self.envelope = envelope;
        self
    }

    /// The same hypotheses with `φ` multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let phi = Arc::clone(&self.phi);
        Self { phi: Arc::new(move |t| s * phi(t)), envelope: self.envelope.scaled(s), ..self.clone() }
    }

    pub fn phi(&self, t: f64) -> f64 {
        (self.phi)(t)
    }

    pub fn phi_fn(&self) -> &PhiFn {
        &self.phi
    }

    /// Right side of the growth bound at `(t, x)`.
    pub fn growth_bound(&self, params: &FracParams, a: f64, t: f64, x: f64) -> Result<f64> {
        let z = scaled_time(t, a, params.rho())?;
        let decay = (-self.sigma * params.rho() * z).exp();
        Ok(z.powf(self.mu) * decay * self.phi(t) * x.abs().powi(self.m as i32))
    }

    /// Constraints tying the hypotheses to `(α, β)`.
    pub fn validate(&self, params: &FracParams) -> Result<()> {
        let alpha = params.alpha();
        if !(self.q > 1.0 / alpha) {
            return Err(Error::Constraint {
                name: "H2",
                detail: format!("q > 1/alpha = {:?}, got {:?}", 1.0 / alpha, self.q),
            });
        }
        let floor = (self.m - 1) as f64 * params.one_minus_gamma();
        if !(self.mu > floor) {
            return Err(Error::Constraint {
                name: "H2",
                detail: format!("mu > (m-1)(1-gamma) = {floor:?}, got {:?}", self.mu),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    pub p: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub k: f64,
    pub c1: f64,
    pub c1_hat: f64,
    /// `(1 + λ1/λ2)^m`, the factor appearing in `K`.
    pub k_factor: f64,
    /// `1 + λ1(λ1+1)/λ2`, the factor appearing in `C1`.
    pub c1_factor: f64,
}

pub fn derive_constants(h: &Hypotheses, params: &FracParams, a: f64, b: f64) -> Result<DerivedConstants> {
    h.validate(params)?;
    if !(a > 0.0) {
        return Err(crate::error::domain(format!("need a > 0, got {a}")));
    }
    if b == 0.0 || !b.is_finite() {
        return Err(Error::Constraint { name: "initial condition", detail: format!("b != 0, got {b}") });
    }
    let (alpha, rho) = (params.alpha(), params.rho());
    let (m, q) = (h.m as f64, h.q);
    let p = q / (q - 1.0);
    let lambda1 = 1.0 + p * (h.mu - params.one_minus_gamma() * m);
    let lambda2 = 1.0 + p * (alpha - 1.0);
    if !(lambda1 > 0.0) {
        return Err(Error::Constraint {
            name: "H2",
            detail: format!("lambda1 = 1 + p(mu - (1-gamma)m) > 0, got {lambda1}"),
        });
    }
    if !(lambda2 > 0.0) {
        return Err(Error::Constraint {
            name: "H2",
            detail: format!("lambda2 = 1 + p(alpha - 1) > 0, got {lambda2}"),
        });
    }
    let psr = p * h.sigma * rho;
    let g_alpha = gamma(alpha);
    let g_lambda1 = gamma(lambda1);

    let k_factor = (1.0 + lambda1 / lambda2).powf(m);
    let first = g_alpha.powf(m * q) * a.powf(m)
        / (b.abs().powf(m * q * (m - 1.0)) * (m - 1.0) * 2f64.powf(q * (m + alpha - 1.0) - 1.0));
    let second = psr.powf(lambda1 * m) / (g_lambda1.powf(m) * k_factor);
    let k = first.powf(1.0 / q) * second.powf(1.0 / p);

    let c1_factor = 1.0 + lambda1 * (lambda1 + 1.0) / lambda2;
    let c1 = (2f64.powf((alpha - 1.0) * p) * g_lambda1 * c1_factor * psr.powf(-lambda1)).powf(1.0 / p);
    Ok(DerivedConstants { p, lambda1, lambda2, k, c1, c1_hat: c1 / g_alpha, k_factor, c1_factor })
}

#[derive(Debug, Clone, PartialEq)]
pub struct H1Sample {
    pub t: f64,
    pub x: f64,
    pub f: f64,
    pub bound: f64,
    /// `|f| / bound`, with `0/0 = 0`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct H1Report {
    pub samples: Vec<H1Sample>,
    pub max_ratio: f64,
}

/// Relative slack allowed for rounding in equality cases.
const H1_SLACK: f64 = 1e-12;

impl H1Report {
    pub fn violations(&self) -> impl Iterator<Item = &H1Sample> {
        self.samples.iter().filter(|s| s.ratio > 1.0 + H1_SLACK)
    }

    pub fn holds(&self) -> bool {
        self.violations().next().is_none()
    }
}

/// Compares `|f(t, x)|` against the growth bound at every sample `(t, x)`.
pub fn check_h1(problem: &CauchyProblem, h: &Hypotheses, samples: &[(f64, f64)]) -> Result<H1Report> {
    let (params, a) = (&problem.params, problem.a);
    let mut out = Vec::with_capacity(samples.len());
    for (node, &(t, x)) in samples.iter().enumerate() {
        if !(t > a) {
            return Err(crate::error::domain(format!("H1 samples need t > a, got t = {t}")));
        }
        let phi = h.phi(t);
        if !(phi >= 0.0) {
            return Err(Error::Constraint {
                name: "H1",
                detail: format!("phi(t) >= 0, got phi({t}) = {phi}"),
            });
        }
        let z = scaled_time(t, a, params.rho())?;
        let f = problem.eval_rhs(t, z, x).map_err(|message| Error::RhsEvaluation { node, t, message })?;
        let bound = h.growth_bound(params, a, t, x)?;
        let ratio = if f == 0.0 { 0.0 } else { f.abs() / bound };
        out.push(H1Sample { t, x, f, bound, ratio });
    }
    let max_ratio = out.iter().map(|s| s.ratio).fold(0.0, f64::max);
    Ok(H1Report { samples: out, max_ratio })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    fn against(lo: f64, hi: f64, threshold: f64) -> Self {
        if hi < threshold {
            Verdict::Pass
        } else if lo >= threshold {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// A value known to lie in `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
}

impl Enclosure {
    fn pow(self, e: f64) -> Self {
        Self { lo: self.lo.powf(e), hi: self.hi.powf(e) }
    }

    fn mul(self, o: Self) -> Self {
        // 0 · ∞ can only come from an empty lower part.
        let hi = if self.hi == 0.0 || o.hi == 0.0 { 0.0 } else { self.hi * o.hi };
        Self { lo: self.lo * o.lo, hi }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct H2Report {
    /// `mβ(1−α)`, the weight exponent as stated in the hypothesis.
    pub weight_exponent: f64,
    pub t_trunc: f64,
    pub phi_norm: Enclosure,
    pub weighted_norm: Enclosure,
    /// `‖φ‖_q^{m−1} ‖z^{−mβ(1−α)}φ‖_q`.
    pub product: Enclosure,
    pub k: f64,
    pub verdict: Verdict,
    /// Verdict against the stricter `K/2`.
    pub verdict_half: Verdict,
    pub notes: Vec<String>,
}

impl H2Report {
    /// Multiplying `φ` by `s` multiplies the product by `s^m`; this is the
    /// range of `s` where the verdict changes.
    pub fn scale_threshold(&self, m: u32) -> (f64, f64) {
        let m = m as f64;
        ((self.k / self.product.hi).powf(1.0 / m), (self.k / self.product.lo).powf(1.0 / m))
    }
}

fn quad_opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-300, rel_tol: 1e-10, max_intervals: 20_000 }
}

/// `∫_a^{T} z^{−e} φ(t)^q dt` computed in `z`, where `dt = t^{1−ρ} dz`.
fn truncated_integral(
    h: &Hypotheses,
    params: &FracParams,
    a: f64,
    t_trunc: f64,
    e: f64,
) -> Result<Enclosure> {
    let rho = params.rho();
    let z_end = scaled_time(t_trunc, a, rho)?;
    let q = h.q;
    let integrand = |z: f64| {
        let t = inverse_scaled_time(z, a, rho).unwrap_or(f64::NAN);
        h.phi(t).abs().powf(q) * t.powf(1.0 - rho)
    };
    let r = integrate_power_weighted(-e, z_end, integrand, quad_opts())?;
    Ok(Enclosure { lo: (r.value - r.error).max(0.0), hi: r.value + r.error })
}

/// Evaluates the smallness condition on `[a, T_trunc]` and bounds the rest
/// through the envelope. A loose tail gives [`Verdict::Inconclusive`], never a
/// pass.
pub fn check_h2(
    h: &Hypotheses,
    constants: &DerivedConstants,
    params: &FracParams,
    a: f64,
    t_trunc: f64,
) -> Result<H2Report> {
    if !(t_trunc > a) {
        return Err(crate::error::domain(format!("need t_trunc > a, got {t_trunc}")));
    }
    let (m, q) = (h.m as f64, h.q);
    let e = m * params.outer_order();
    let mut notes = Vec::new();

    for k in 0..=64 {
        let t = a + (t_trunc - a) * k as f64 / 64.0;
        let v = h.phi(t);
        if !(v >= 0.0) {
            return Err(Error::Constraint { name: "H1", detail: format!("phi(t) >= 0, got phi({t}) = {v}") });
        }
    }

    // Envelope sanity beyond the truncation point.
    let mut tail = h.envelope.tail(q, t_trunc);
    for factor in [1.0, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0] {
        let t = t_trunc * factor;
        if h.phi(t) > h.envelope.at(t) * (1.0 + 1e-12) {
            notes.push(format!("phi exceeds its envelope at t = {t}; tail treated as unbounded"));
            tail = f64::INFINITY;
            break;
        }
    }
    if tail.is_infinite() && h.envelope == Envelope::None {
        notes.push("no decay envelope for phi; tail treated as unbounded".into());
    }

    let plain = truncated_integral(h, params, a, t_trunc, 0.0)?;
    let plain = Enclosure { lo: plain.lo, hi: plain.hi + tail };

    let z_trunc = scaled_time(t_trunc, a, params.rho())?;
    let weighted = if e * q < 1.0 {
        let w = truncated_integral(h, params, a, t_trunc, e * q)?;
        // z^{−eq} is largest at the start of the tail.
        Enclosure { lo: w.lo, hi: w.hi + tail * z_trunc.powf(-e * q) }
    } else if h.phi(a) > 0.0 {
        notes.push(format!("z^(-{}) phi^q is not integrable at t = a since phi(a) > 0", e * q));
        Enclosure { lo: f64::INFINITY, hi: f64::INFINITY }
    } else {
        notes.push(format!(
            "weight exponent {} is not integrable unless phi vanishes fast enough at a; not decided",
            e * q
        ));
        Enclosure { lo: 0.0, hi: f64::INFINITY }
    };

    let phi_norm = plain.pow(1.0 / q);
    let weighted_norm = weighted.pow(1.0 / q);
    let product = phi_norm.pow(m - 1.0).mul(weighted_norm);
    let k = constants.k;
    Ok(H2Report {
        weight_exponent: e,
        t_trunc,
        phi_norm,
        weighted_norm,
        product,
        k,
        verdict: Verdict::against(product.lo, product.hi, k),
        verdict_half: Verdict::against(product.lo, product.hi, 0.5 * k),
        notes,
    })
}

/// `∫ z^e φ^q dt` over the cell `z_lo ≤ z ≤ z_hi`, integrated in `z`
/// (`dt = t^{1−ρ} dz`), where the nodes are exact and `t(z)` has no
/// cancellation.
pub(crate) fn phi_q_moment(
    h: &Hypotheses,
    params: &FracParams,
    a: f64,
    z_lo: f64,
    z_hi: f64,
    e: f64,
) -> Result<f64> {
    let rho = params.rho();
    let q = h.q;
    let f = |z: f64| {
        let t = inverse_scaled_time(z, a, rho).unwrap_or(f64::NAN);
        h.phi(t).abs().powf(q) * t.powf(1.0 - rho)
    };
    if z_lo > 0.0 {
        let g = |z: f64| if e == 0.0 { f(z) } else { z.powf(e) * f(z) };
        return Ok(integrate(g, z_lo, z_hi, quad_opts())?.value);
    }
    Ok(integrate_power_weighted(e, z_hi, f, quad_opts())?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked() -> (Hypotheses, FracParams) {
        let h = Hypotheses::new(0.5, 1.0, 2, 3.0, |_| 0.0).unwrap();
        (h, FracParams::new(0.5, 0.5, 1.0).unwrap())
    }

    #[test]
    fn worked_instance() {
        let (h, params) = worked();
        let c = derive_constants(&h, &params, 1.0, 1.0).unwrap();
        assert_eq!(c.p, 1.5);
        assert_eq!(c.lambda1, 1.0);
        assert_eq!(c.lambda2, 0.25);
        let oracle = (2f64.powf(-0.75) * 9.0 / 1.5).powf(2.0 / 3.0);
        assert!((c.c1 - oracle).abs() < 1e-12);
        assert!((c.c1 - 2.335).abs() < 1e-3);
        assert!((c.c1_hat - c.c1 / std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!((c.p * 3.0 - (c.p + 3.0)).abs() < 1e-15);
    }

    #[test]
    fn named_constraint_errors() {
        let params = FracParams::new(0.5, 0.5, 1.0).unwrap();
        let h = Hypotheses::new(0.5, 1.0, 2, 1.5, |_| 0.0).unwrap();
        let err = derive_constants(&h, &params, 1.0, 1.0).unwrap_err();
        assert_eq!(err.to_string(), "H2 requires q > 1/alpha = 2.0, got 1.5");
        let h = Hypotheses::new(0.2, 1.0, 2, 3.0, |_| 0.0).unwrap();
        let err = derive_constants(&h, &params, 1.0, 1.0).unwrap_err();
        assert!(err.to_string().starts_with("H2 requires mu > (m-1)(1-gamma)"));
        assert!(Hypotheses::new(0.5, 1.0, 1, 3.0, |_| 0.0).is_err());
    }

    #[test]
    fn lambda2_vanishes_near_threshold() {
        let params = FracParams::new(0.5, 0.5, 1.0).unwrap();
        let h = Hypotheses::new(0.5, 1.0, 2, 2.0 + 1e-9, |_| 0.0).unwrap();
        let c = derive_constants(&h, &params, 1.0, 1.0).unwrap();
        assert!(c.lambda2 < 1e-8);
        assert!(c.c1 > 1e4);
    }

    #[test]
    fn h1_checker() {
        let params = FracParams::new(0.5, 0.5, 1.0).unwrap();
        let h = Hypotheses::new(0.5, 1.0, 2, 3.0, |t: f64| (-t).exp()).unwrap();
        let samples: Vec<(f64, f64)> = (1..20).map(|k| (1.0 + 0.1 * k as f64, k as f64 - 10.0)).collect();
        let zero = CauchyProblem::new(params, 1.0, 1.0, |_, _, _| 0.0).unwrap();
        let r = check_h1(&zero, &h, &samples).unwrap();
        assert!(r.holds() && r.max_ratio == 0.0);

        let exact = CauchyProblem::new(params, 1.0, 1.0, |t: f64, z: f64, x: f64| {
            z.powf(0.5) * (-z).exp() * (-t).exp() * x * x
        })
        .unwrap();
        let r = check_h1(&exact, &h, &samples).unwrap();
        assert!(r.holds());
        assert!(r.samples.iter().filter(|s| s.x != 0.0).all(|s| (s.ratio - 1.0).abs() < 1e-13));

        let over = CauchyProblem::new(params, 1.0, 1.0, |t: f64, z: f64, x: f64| {
            let bump = if (t - 1.5).abs() < 1e-9 { 1.01 } else { 1.0 };
            bump * z.powf(0.5) * (-z).exp() * (-t).exp() * x * x
        })
        .unwrap();
        let r = check_h1(&over, &h, &samples).unwrap();
        let bad: Vec<_> = r.violations().collect();
        assert_eq!(bad.len(), 1);
        assert!((bad[0].t - 1.5).abs() < 1e-9);
    }

    #[test]
    fn h2_zero_and_divergent() {
        let (h, params) = worked();
        let c = derive_constants(&h, &params, 1.0, 1.0).unwrap();
        let r = check_h2(&h.clone().with_envelope(Envelope::Vanishing), &c, &params, 1.0, 5.0).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.product.hi, 0.0);

        // constant phi with beta > 0: m q beta (1 - alpha) = 1.5 >= 1
        let h = Hypotheses::new(0.5, 1.0, 2, 3.0, |_| 0.1).unwrap().with_envelope(Envelope::Vanishing);
        let r = check_h2(&h, &c, &params, 1.0, 5.0).unwrap();
        assert_ne!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn h2_tail_controls_verdict() {
        let params = FracParams::new(0.8, 0.2, 1.0).unwrap();
        let base = Hypotheses::new(0.5, 1.0, 2, 1.5, |t: f64| (-t).exp()).unwrap();
        let c = derive_constants(&base, &params, 1.0, 1.0).unwrap();
        let loose = check_h2(&base.scaled(1e-6), &c, &params, 1.0, 20.0).unwrap();
        assert_eq!(loose.verdict, Verdict::Inconclusive);
        let h = base.with_envelope(Envelope::Exponential { scale: 1.0, rate: 1.0 });
        let r = check_h2(&h, &c, &params, 1.0, 30.0).unwrap();
        let (pass_below, fail_above) = r.scale_threshold(2);
        assert!(pass_below <= fail_above && fail_above < pass_below * (1.0 + 1e-6));
        let small = check_h2(&h.scaled(0.5 * pass_below), &c, &params, 1.0, 30.0).unwrap();
        assert_eq!(small.verdict, Verdict::Pass);
        let big = check_h2(&h.scaled(2.0 * fail_above), &c, &params, 1.0, 30.0).unwrap();
        assert_eq!(big.verdict, Verdict::Fail);
    }
}
