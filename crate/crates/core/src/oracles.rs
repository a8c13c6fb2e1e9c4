//! Reference computations for differential testing.
//!
//! Nothing in here calls into the rest of the crate: the gamma function is a
//! separate Lanczos-type evaluation and the quadrature is a recursive
//! Gauss–Legendre scheme rather than the Gauss–Kronrod code the library uses.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("refinement depth exhausted: estimate {estimate}, error bound {error}")]
    DepthExhausted { estimate: f64, error: f64 },
    #[error("argument {0} is outside the series regime |x| <= 50")]
    Regime(f64),
    #[error("alternating series lost {digits:.1} digits to cancellation")]
    LossOfSignificance { digits: f64 },
    #[error("step halving disagrees at t = {t}: {coarse} vs {fine}")]
    StepDisagreement { t: f64, coarse: f64, fine: f64 },
}

pub type OracleResult<T> = std::result::Result<T, OracleError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub rel_tol: f64,
    pub max_depth: u32,
    pub series_eps: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, max_depth: 48, series_eps: 1e-17 }
    }
}

impl OracleConfig {
    pub fn new(rel_tol: f64, max_depth: u32, series_eps: f64) -> OracleResult<Self> {
        if !(rel_tol > 0.0) || !(series_eps > 0.0) {
            return Err(OracleError::Domain("tolerances must be positive".into()));
        }
        Ok(Self { rel_tol, max_depth, series_eps })
    }
}

// Lanczos-type series with g = 671/128 and 14 terms.
const LANCZOS_SHIFT: f64 = 5.242_187_5;
const LANCZOS_LEAD: f64 = 0.999_999_999_999_997_092;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    let tmp = x + LANCZOS_SHIFT;
    let tmp = (x + 0.5) * tmp.ln() - tmp;
    let series = LANCZOS.iter().enumerate().fold(LANCZOS_LEAD, |acc, (j, c)| acc + c / (x + j as f64 + 1.0));
    tmp + (2.506_628_274_631_000_5 * series / x).ln()
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

const GL_NODES: [f64; 4] =
    [0.183_434_642_495_649_8, 0.525_532_409_916_329_0, 0.796_666_477_413_626_7, 0.960_289_856_497_536_2];
const GL_WEIGHTS: [f64; 4] =
    [0.362_683_783_378_362_0, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

fn gauss_legendre8<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> f64 {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    GL_NODES.iter().zip(GL_WEIGHTS).map(|(&x, w)| w * (f(c - h * x) + f(c + h * x))).sum::<f64>() * h
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    err_acc: &mut f64,
    exhausted: &mut bool,
) -> f64 {
    let mid = 0.5 * (lo + hi);
    let left = gauss_legendre8(f, lo, mid);
    let right = gauss_legendre8(f, mid, hi);
    let diff = (left + right - whole).abs();
    if diff <= tol || depth == 0 || mid <= lo || mid >= hi {
        if diff > tol {
            *exhausted = true;
        }
        *err_acc += diff;
        return left + right;
    }
    recurse(f, lo, mid, left, 0.5 * tol, depth - 1, err_acc, exhausted)
        + recurse(f, mid, hi, right, 0.5 * tol, depth - 1, err_acc, exhausted)
}

/// Declared algebraic endpoint behaviour `(s − lo)^left` and `(hi − s)^right`.
/// Exponents `>= 0` (or `None`) need no special handling.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EndpointExponents {
    pub left: Option<f64>,
    pub right: Option<f64>,
}

/// Adaptive quadrature of `f` over `[lo, hi]`. Negative endpoint exponents
/// are removed by power substitutions on the two halves of the interval.
pub fn adaptive_quadrature<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    ends: EndpointExponents,
    cfg: &OracleConfig,
) -> OracleResult<f64> {
    if !(hi >= lo) {
        return Err(OracleError::Domain(format!("need lo <= hi, got [{lo}, {hi}]")));
    }
    for e in [ends.left, ends.right].into_iter().flatten() {
        if !(e > -1.0) {
            return Err(OracleError::Domain(format!("exponent {e} is not integrable")));
        }
    }
    if lo == hi {
        return Ok(0.0);
    }
    let mid = 0.5 * (lo + hi);
    let half = mid - lo;
    let f = &f;
    let mut pieces: Vec<Box<dyn Fn(f64) -> f64 + '_>> = Vec::with_capacity(2);
    match ends.left.filter(|&e| e < 0.0) {
        Some(e) => {
            let k = 1.0 / (1.0 + e);
            pieces.push(Box::new(move |u: f64| f(lo + half * u.powf(k)) * half * k * u.powf(k - 1.0)));
        }
        None => pieces.push(Box::new(|u: f64| f(lo + half * u) * half)),
    }
    match ends.right.filter(|&e| e < 0.0) {
        Some(e) => {
            let k = 1.0 / (1.0 + e);
            pieces.push(Box::new(move |u: f64| f(hi - half * u.powf(k)) * half * k * u.powf(k - 1.0)));
        }
        None => pieces.push(Box::new(|u: f64| f(hi - half * u) * half)),
    }
    let mut total = 0.0;
    let mut err = 0.0;
    let mut exhausted = false;
    for piece in &pieces {
        let whole = gauss_legendre8(piece, 0.0, 1.0);
        let scale = whole.abs().max(f64::MIN_POSITIVE);
        total +=
            recurse(piece, 0.0, 1.0, whole, cfg.rel_tol * scale, cfg.max_depth, &mut err, &mut exhausted);
    }
    if exhausted && err > cfg.rel_tol * total.abs() {
        return Err(OracleError::DepthExhausted { estimate: total, error: err });
    }
    Ok(total)
}

/// `Γ(σ+1)/Γ(σ+α+1)`, the coefficient in `I^α z^σ = coeff · z^{σ+α}`.
pub fn power_rule_coeff(sigma: f64, alpha: f64) -> OracleResult<f64> {
    if !(sigma > -1.0) {
        return Err(OracleError::Domain(format!("need sigma > -1, got {sigma}")));
    }
    if !(alpha > 0.0) {
        return Err(OracleError::Domain(format!("need alpha > 0, got {alpha}")));
    }
    if sigma + alpha + 1.0 < 30.0 {
        Ok(gamma(sigma + 1.0) / gamma(sigma + alpha + 1.0))
    } else {
        Ok((ln_gamma(sigma + 1.0) - ln_gamma(sigma + alpha + 1.0)).exp())
    }
}

/// Two-parameter Mittag-Leffler function `Σ_k x^k / Γ(αk + γ)` by its series.
pub fn mittag_leffler(alpha: f64, gamma_param: f64, x: f64, cfg: &OracleConfig) -> OracleResult<f64> {
    if !(alpha > 0.0) || !(gamma_param > 0.0) {
        return Err(OracleError::Domain(format!(
            "need alpha > 0 and gamma > 0, got ({alpha}, {gamma_param})"
        )));
    }
    if !(x.abs() <= 50.0) {
        return Err(OracleError::Regime(x));
    }
    if x == 0.0 {
        return Ok(1.0 / gamma(gamma_param));
    }
    let ln_x = x.abs().ln();
    let mut sum = 0.0;
    let mut largest: f64 = 0.0;
    let mut previous = f64::INFINITY;
    for k in 0..100_000u32 {
        let kf = k as f64;
        let magnitude = (kf * ln_x - ln_gamma(alpha * kf + gamma_param)).exp();
        let term = if x < 0.0 && k % 2 == 1 { -magnitude } else { magnitude };
        sum += term;
        largest = largest.max(magnitude);
        if magnitude <= cfg.series_eps * sum.abs() && magnitude < previous {
            break;
        }
        previous = magnitude;
    }
    if x < 0.0 {
        let lost = (largest / sum.abs()).log10();
        if lost > 8.0 {
            return Err(OracleError::LossOfSignificance { digits: lost });
        }
    }
    Ok(sum)
}

/// Dense RK4 trajectory with cubic Hermite interpolation between steps.
#[derive(Debug, Clone)]
pub struct Trajectory {
    t: Vec<f64>,
    u: Vec<f64>,
    du: Vec<f64>,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.t.len();
        if t <= self.t[0] {
            return self.u[0];
        }
        if t >= self.t[n - 1] {
            return self.u[n - 1];
        }
        let i = self.t.partition_point(|&s| s <= t) - 1;
        let h = self.t[i + 1] - self.t[i];
        let s = (t - self.t[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.u[i]
            + (s3 - 2.0 * s2 + s) * h * self.du[i]
            + (-2.0 * s3 + 3.0 * s2) * self.u[i + 1]
            + (s3 - s2) * h * self.du[i + 1]
    }
}

fn rk4<F: Fn(f64, f64) -> f64>(u0: f64, rhs: &F, t0: f64, t1: f64, steps: usize) -> Trajectory {
    let h = (t1 - t0) / steps as f64;
    let mut t = Vec::with_capacity(steps + 1);
    let mut u = Vec::with_capacity(steps + 1);
    let mut du = Vec::with_capacity(steps + 1);
    let mut y = u0;
    for i in 0..=steps {
        let ti = t0 + h * i as f64;
        t.push(ti);
        u.push(y);
        du.push(rhs(ti, y));
        if i == steps {
            break;
        }
        let k1 = rhs(ti, y);
        let k2 = rhs(ti + 0.5 * h, y + 0.5 * h * k1);
        let k3 = rhs(ti + 0.5 * h, y + 0.5 * h * k2);
        let k4 = rhs(ti + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Trajectory { t, u, du }
}

/// Classical fourth-order integration of `u' = rhs(t, u)` on `[t0, t1]`.
/// The run is repeated at half the step; the finer trajectory is returned
/// when the two agree to `1e-8` at every coarse node.
pub fn reference_ode<F: Fn(f64, f64) -> f64>(
    u0: f64,
    rhs: F,
    t0: f64,
    t1: f64,
    steps: usize,
) -> OracleResult<Trajectory> {
    if steps < 10 {
        return Err(OracleError::Domain(format!("need at least 10 steps, got {steps}")));
    }
    if !(t1 > t0) {
        return Err(OracleError::Domain(format!("need t0 < t1, got [{t0}, {t1}]")));
    }
    let coarse = rk4(u0, &rhs, t0, t1, steps);
    let fine = rk4(u0, &rhs, t0, t1, 2 * steps);
    for i in 0..=steps {
        let (c, f) = (coarse.u[i], fine.u[2 * i]);
        if !(c.is_finite() && f.is_finite()) || (c - f).abs() > 1e-8 * f.abs().max(1.0) {
            return Err(OracleError::StepDisagreement { t: coarse.t[i], coarse: c, fine: f });
        }
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    #[test]
    fn quadrature_examples() {
        let cfg = OracleConfig::default();
        let one = adaptive_quadrature(|_| 1.0, 0.0, 1.0, EndpointExponents::default(), &cfg).unwrap();
        assert!((one - 1.0).abs() < 1e-14);
        let ends = EndpointExponents { left: Some(-0.5), right: None };
        let v = adaptive_quadrature(|s: f64| s.powf(-0.5), 0.0, 1.0, ends, &cfg).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
        let ends = EndpointExponents { left: Some(-0.5), right: Some(-0.5) };
        let v = adaptive_quadrature(|s: f64| (s * (1.0 - s)).powf(-0.5), 0.0, 1.0, ends, &cfg).unwrap();
        assert!((v - PI).abs() < 1e-9, "{v}");
    }

    #[test]
    fn quadrature_rejects_bad_exponent() {
        let ends = EndpointExponents { left: Some(-1.0), right: None };
        assert!(adaptive_quadrature(|_| 1.0, 0.0, 1.0, ends, &OracleConfig::default()).is_err());
    }

    #[test]
    fn power_rule_examples() {
        assert!((power_rule_coeff(0.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((power_rule_coeff(1.0, 1.0).unwrap() - 0.5).abs() < 1e-14);
        assert!((power_rule_coeff(0.0, 0.5).unwrap() - 2.0 / PI.sqrt()).abs() < 1e-14);
        assert!(power_rule_coeff(-1.0, 0.5).is_err());
    }

    #[test]
    fn lanczos_matches_library_gamma() {
        let mut x = 0.01;
        while x < 30.0 {
            let lib = statrs::function::gamma::gamma(x);
            assert!((gamma(x) - lib).abs() <= 1e-12 * lib, "x = {x}");
            x += 0.0731;
        }
    }

    #[test]
    fn mittag_leffler_examples() {
        let cfg = OracleConfig::default();
        assert!((mittag_leffler(0.7, 0.75, 0.0, &cfg).unwrap() - 1.0 / gamma(0.75)).abs() < 1e-15);
        assert!((mittag_leffler(1.0, 1.0, 1.0, &cfg).unwrap() - E).abs() < 1e-13);
        // E_{1/2,1}(1) = e·erfc(-1)
        let exact = 5.008_980_080_762_283;
        assert!((mittag_leffler(0.5, 1.0, 1.0, &cfg).unwrap() - exact).abs() < 1e-13);
        assert!(matches!(mittag_leffler(0.5, 1.0, 51.0, &cfg), Err(OracleError::Regime(_))));
    }

    #[test]
    fn mittag_leffler_is_exponential_for_unit_parameters() {
        let cfg = OracleConfig::default();
        let mut x = -10.0;
        while x <= 10.0 {
            // cancellation for x < 0 costs up to e^{2|x|} in relative accuracy
            let v = mittag_leffler(1.0, 1.0, x, &cfg).unwrap();
            assert!((v - x.exp()).abs() <= 1e-14 * x.abs().exp(), "x = {x}");
            x += 0.25;
        }
    }

    #[test]
    fn ode_examples() {
        let flat = reference_ode(1.0, |_, _| 0.0, 0.0, 1.0, 10).unwrap();
        assert!(flat.values().iter().all(|&u| u == 1.0));
        let exp = reference_ode(1.0, |_, u| u, 0.0, 1.0, 200).unwrap();
        assert!((exp.eval(1.0) - E).abs() < 1e-9);
        let blow = reference_ode(1.0, |_, u| u * u, 0.0, 0.5, 400).unwrap();
        assert!((blow.eval(0.5) - 2.0).abs() < 1e-8);
        assert!((blow.eval(0.25) - 1.0 / 0.75).abs() < 1e-8);
        assert!(reference_ode(1.0, |_, u| u * u, 0.0, 0.999, 10).is_err());
    }
}
