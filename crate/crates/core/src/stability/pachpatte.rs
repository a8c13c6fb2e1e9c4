//! Pachpatte's nonlinear Grönwall inequality and the power-sum inequality.
//!
//! If `u(t) ≤ u0 + ∫_{t0}^t b(s) ds + ∫_{t0}^t a(s) w(u(s)) ds` with `w`
//! nondecreasing, then `u(t) ≤ G^{−1}[G(u0 + ∫b) + ∫a]` with
//! `G(r) = ∫_{r0}^r ds/w(s)`, wherever the right side is defined.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::quad::{integrate, QuadOptions};

/// The nonlinearity `w` of the inequality.
#[derive(Clone)]
pub enum Growth {
    /// `w(x) = x`.
    Linear,
    /// `w(x) = x^m` with `m > 1`.
    Power(f64),
    /// Any continuous nondecreasing `w` with `w(0) = 0` and `w > 0` on positives.
    General(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Growth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Growth::Linear => f.write_str("Linear"),
            Growth::Power(m) => write!(f, "Power({m})"),
            Growth::General(_) => f.write_str("General(..)"),
        }
    }
}

impl Growth {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Growth::Linear => x,
            Growth::Power(m) => x.powf(*m),
            Growth::General(w) => w(x),
        }
    }
}

fn opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-300, rel_tol: 1e-12, max_intervals: 10_000 }
}

/// `G(r) − G(r0)` computed in `log s`, which keeps wide ranges cheap.
fn g_between(w: &(dyn Fn(f64) -> f64 + Send + Sync), r0: f64, r: f64) -> Result<f64> {
    let f = |u: f64| {
        let s = u.exp();
        s / w(s)
    };
    Ok(integrate(f, r0.ln(), r.ln(), opts())?.value)
}

/// Solves `G(r) = target` for `r ≥ lo`, given `G(lo) = g_lo ≤ target`.
fn general_inverse(
    w: &(dyn Fn(f64) -> f64 + Send + Sync),
    mut lo: f64,
    mut g_lo: f64,
    target: f64,
) -> Result<f64> {
    if g_lo >= target {
        return Ok(lo);
    }
    let mut hi = 2.0 * lo;
    loop {
        let g_hi = g_lo + g_between(w, lo, hi)?;
        if g_hi >= target {
            break;
        }
        if hi > 1e150 {
            return Ok(f64::INFINITY);
        }
        lo = hi;
        g_lo = g_hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) <= 1e-15 * hi {
            break;
        }
        let g_mid = g_lo + g_between(w, lo, mid)?;
        if g_mid < target {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The Pachpatte bound at `t`. Returns `+∞` when the argument of `G^{−1}`
/// leaves the range of `G`.
pub fn pachpatte_bound<A, B>(u0: f64, a_fn: A, b_fn: B, w: &Growth, t0: f64, t: f64) -> Result<f64>
where
    A: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
{
    if !(u0 > 0.0) {
        return Err(domain(format!("need u0 > 0, got {u0}")));
    }
    if !(t >= t0) {
        return Err(domain(format!("need t >= t0, got t = {t}, t0 = {t0}")));
    }
    let big_a = integrate(&a_fn, t0, t, opts())?.value;
    let big_b = integrate(&b_fn, t0, t, opts())?.value;
    if big_a < 0.0 || big_b < 0.0 {
        return Err(domain("a and b must be nonnegative"));
    }
    let start = u0 + big_b;
    match w {
        Growth::Linear => Ok(start * big_a.exp()),
        Growth::Power(m) => {
            if !(*m > 1.0) {
                return Err(domain(format!("power growth needs m > 1, got {m}")));
            }
            let bracket = start.powf(1.0 - m) - (m - 1.0) * big_a;
            if bracket > 0.0 {
                Ok(bracket.powf(-1.0 / (m - 1.0)))
            } else {
                Ok(f64::INFINITY)
            }
        }
        Growth::General(w) => {
            let r0 = 0.5 * u0;
            let g_start = g_between(w.as_ref(), r0, start)?;
            general_inverse(w.as_ref(), start, g_start, g_start + big_a)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSumReport {
    /// `(Σ a_i)^p`.
    pub lhs: f64,
    /// `k^{p−1} Σ a_i^p`.
    pub rhs: f64,
}

impl PowerSumReport {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12)
    }
}

/// `(Σ a_i)^p ≤ k^{p−1} Σ a_i^p` for nonnegative `a_i` and `p ≥ 1`.
pub fn power_sum_check(values: &[f64], p: f64) -> Result<PowerSumReport> {
    if !(p >= 1.0) {
        return Err(domain(format!("need p >= 1, got {p}")));
    }
    if values.is_empty() {
        return Err(domain("need at least one value"));
    }
    if let Some(v) = values.iter().find(|v| !(**v >= 0.0)) {
        return Err(domain(format!("values must be nonnegative, got {v}")));
    }
    let k = values.len() as f64;
    let lhs = values.iter().sum::<f64>().powf(p);
    let rhs = k.powf(p - 1.0) * values.iter().map(|v| v.powf(p)).sum::<f64>();
    Ok(PowerSumReport { lhs, rhs })
}
