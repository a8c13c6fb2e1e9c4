//! The weighted beta-type integral
//!
//! ```text
//! I(t) = z^ζ ∫_0^1 (1−ξ)^{ϑ−1} ξ^{ζ−1} e^{−ϖξz} dξ  ≤  C ϖ^{−ζ},
//! C = max{1, 2^{1−ϑ}} Γ(ζ) (1 + ζ(ζ+1)/ϑ).
//! ```

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::gamma;
use crate::grid::scaled_time;
use crate::quad::{integrate_power_weighted, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma31Params {
    zeta: f64,
    vartheta: f64,
    varpi: f64,
}

impl Lemma31Params {
    pub fn new(zeta: f64, vartheta: f64, varpi: f64) -> Result<Self> {
        for (name, v) in [("zeta", zeta), ("vartheta", vartheta), ("varpi", varpi)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self { zeta, vartheta, varpi })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn vartheta(&self) -> f64 {
        self.vartheta
    }

    pub fn varpi(&self) -> f64 {
        self.varpi
    }
}

fn opts() -> QuadOptions {
    QuadOptions { abs_tol: 0.0, rel_tol: 1e-11, max_intervals: 20_000 }
}

/// `I` as a function of the scaled time `z > 0`.
pub fn evaluate_i_at(p: &Lemma31Params, z: f64) -> Result<f64> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(domain(format!("need z > 0, got {z}")));
    }
    let (zeta, theta, c) = (p.zeta, p.vartheta, p.varpi * z);
    // Split at 1/2 so each half carries one endpoint singularity; on the
    // right half reflect ξ = 1 − η.
    let left = integrate_power_weighted(
        zeta - 1.0,
        0.5,
        |xi| (1.0 - xi).powf(theta - 1.0) * (-c * xi).exp(),
        opts(),
    )?;
    let right = integrate_power_weighted(
        theta - 1.0,
        0.5,
        |eta| (1.0 - eta).powf(zeta - 1.0) * (-c * (1.0 - eta)).exp(),
        opts(),
    )?;
    Ok(z.powf(zeta) * (left.value + right.value))
}

/// `I(t)` with `z = (t^ρ − a^ρ)/ρ`.
pub fn evaluate_i(p: &Lemma31Params, rho: f64, a: f64, t: f64) -> Result<f64> {
    if !(t > a) {
        return Err(domain(format!("need t > a, got t = {t}, a = {a}")));
    }
    evaluate_i_at(p, scaled_time(t, a, rho)?)
}

pub fn lemma31_constant(zeta: f64, vartheta: f64) -> Result<f64> {
    if !(zeta > 0.0) || !(vartheta > 0.0) {
        return Err(domain(format!("zeta and vartheta must be positive, got ({zeta}, {vartheta})")));
    }
    let lead = 1f64.max(2f64.powf(1.0 - vartheta));
    Ok(lead * gamma(zeta) * (1.0 + zeta * (zeta + 1.0) / vartheta))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma31Sample {
    pub t: f64,
    pub z: f64,
    pub value: f64,
    /// `I ϖ^ζ / C`; at most one when the bound holds.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma31Report {
    pub constant: f64,
    pub bound: f64,
    pub samples: Vec<Lemma31Sample>,
    pub max_ratio: f64,
}

impl Lemma31Report {
    pub fn violations(&self) -> impl Iterator<Item = &Lemma31Sample> {
        self.samples.iter().filter(|s| s.ratio > 1.0)
    }

    pub fn holds(&self) -> bool {
        self.violations().next().is_none()
    }
}

/// Evaluates `I` at every sample in parallel; the report keeps input order.
pub fn check_lemma31(p: &Lemma31Params, rho: f64, a: f64, t_samples: &[f64]) -> Result<Lemma31Report> {
    let constant = lemma31_constant(p.zeta, p.vartheta)?;
    let bound = constant * p.varpi.powf(-p.zeta);
    let samples = t_samples
        .par_iter()
        .map(|&t| {
            let z = scaled_time(t, a, rho)?;
            let value = evaluate_i(p, rho, a, t)?;
            Ok(Lemma31Sample { t, z, value, ratio: value / bound })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_ratio = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
    Ok(Lemma31Report { constant, bound, samples, max_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let p = Lemma31Params::new(1.0, 1.0, 2.0).unwrap();
        let exact = (1.0 - (-2f64).exp()) / 2.0;
        assert!((evaluate_i_at(&p, 1.0).unwrap() - exact).abs() < 1e-12);
        let p = Lemma31Params::new(1.0, 2.0, 1e-8).unwrap();
        assert!((evaluate_i_at(&p, 1.0).unwrap() - 0.5).abs() < 1e-8);
        let p = Lemma31Params::new(2.0, 1.0, 1.0).unwrap();
        let exact = 1.0 - 4.0 * (-3f64).exp();
        assert!((evaluate_i_at(&p, 3.0).unwrap() - exact).abs() < 1e-12);
        // through t with rho = 2: z = (t^2 - 1)/2 = 3 at t = √7
        assert!((evaluate_i(&p, 2.0, 1.0, 7f64.sqrt()).unwrap() - exact).abs() < 1e-11);
    }

    #[test]
    fn constants() {
        assert!((lemma31_constant(1.0, 1.0).unwrap() - 3.0).abs() < 1e-14);
        assert!((lemma31_constant(2.0, 1.0).unwrap() - 7.0).abs() < 1e-14);
        assert!((lemma31_constant(1.0, 2.0).unwrap() - 2.0).abs() < 1e-14);
        assert!(lemma31_constant(0.0, 1.0).is_err());
        assert!(Lemma31Params::new(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn report_for_unit_parameters() {
        let p = Lemma31Params::new(1.0, 1.0, 2.0).unwrap();
        let ts: Vec<f64> = (1..40).map(|k| 1.0 + 0.25 * k as f64).collect();
        let r = check_lemma31(&p, 1.0, 1.0, &ts).unwrap();
        assert!(r.holds());
        assert!(r.max_ratio <= 1.0 / 3.0 + 1e-12);
        assert_eq!(r.samples[3].t, ts[3]);
    }

    #[test]
    fn heavy_damping() {
        let p = Lemma31Params::new(3.0, 0.2, 1e6).unwrap();
        let r = check_lemma31(&p, 1.0, 1.0, &[1.5, 2.0, 50.0]).unwrap();
        assert!(r.holds());
    }
}
