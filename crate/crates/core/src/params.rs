use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};

/// Order `alpha`, type `beta` and scale `rho` of the generalized derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracParams {
    alpha: f64,
    beta: f64,
    rho: f64,
}

impl FracParams {
    pub fn new(alpha: f64, beta: f64, rho: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(domain(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(domain(format!("beta must lie in [0, 1], got {beta}")));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(domain(format!("rho must be positive, got {rho}")));
        }
        Ok(Self { alpha, beta, rho })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `γ = α + β(1 − α)`, always in `[α, 1]`.
    pub fn gamma(&self) -> f64 {
        self.alpha + self.beta * (1.0 - self.alpha)
    }

    /// `1 − γ = (1 − β)(1 − α)`, the order of the inner integral of the
    /// generalized derivative and the weight exponent of the solution space.
    pub fn one_minus_gamma(&self) -> f64 {
        (1.0 - self.beta) * (1.0 - self.alpha)
    }

    /// `β(1 − α)`, the order of the outer integral of the generalized derivative.
    pub fn outer_order(&self) -> f64 {
        self.beta * (1.0 - self.alpha)
    }
}

/// Right-hand side `f(t, x)`. The scaled time `z` of `t` is passed alongside
/// so expressions can be written in either variable.
pub type RhsFn = Arc<dyn Fn(f64, f64, f64) -> std::result::Result<f64, String> + Send + Sync>;

/// `D^{α,β} x = f(t, x)` on `t > a` with `z^{1-γ} x(t) → b` style weighted data at `t = a`.
#[derive(Clone)]
pub struct CauchyProblem {
    pub params: FracParams,
    pub a: f64,
    pub b: f64,
    rhs: RhsFn,
}

impl CauchyProblem {
    /// Builds a problem from an infallible right-hand side `f(t, z, x)`.
    pub fn new<F>(params: FracParams, a: f64, b: f64, rhs: F) -> Result<Self>
    where
        F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self::with_fallible_rhs(params, a, b, Arc::new(move |t, z, x| Ok(rhs(t, z, x))))
    }

    pub fn with_fallible_rhs(params: FracParams, a: f64, b: f64, rhs: RhsFn) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(domain(format!("left endpoint a must be positive, got {a}")));
        }
        if b == 0.0 || !b.is_finite() {
            return Err(Error::Constraint {
                name: "initial condition",
                detail: format!("b to be finite and nonzero, got {b}"),
            });
        }
        Ok(Self { params, a, b, rhs })
    }

    /// Evaluates `f(t, x)`; `z` must be the scaled time of `t`.
    pub fn eval_rhs(&self, t: f64, z: f64, x: f64) -> std::result::Result<f64, String> {
        (self.rhs)(t, z, x)
    }

    pub fn rhs(&self) -> &RhsFn {
        &self.rhs
    }
}

impl fmt::Debug for CauchyProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CauchyProblem")
            .field("params", &self.params)
            .field("a", &self.a)
            .field("b", &self.b)
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_identities() {
        for &(alpha, beta) in &[(0.5, 0.5), (0.3, 0.0), (0.9, 1.0), (0.25, 0.75)] {
            let p = FracParams::new(alpha, beta, 1.0).unwrap();
            let g = p.gamma();
            assert!(g >= alpha && g <= 1.0);
            assert!((p.one_minus_gamma() - (1.0 - g)).abs() < 1e-15);
            assert!((p.outer_order() + p.one_minus_gamma() - (1.0 - alpha)).abs() < 1e-15);
        }
        assert_eq!(FracParams::new(0.5, 0.5, 1.0).unwrap().gamma(), 0.75);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(FracParams::new(0.0, 0.5, 1.0).is_err());
        assert!(FracParams::new(1.0, 0.5, 1.0).is_err());
        assert!(FracParams::new(0.5, -0.1, 1.0).is_err());
        assert!(FracParams::new(0.5, 1.1, 1.0).is_err());
        assert!(FracParams::new(0.5, 0.5, 0.0).is_err());
    }

    #[test]
    fn problem_requires_nonzero_b() {
        let p = FracParams::new(0.5, 0.5, 1.0).unwrap();
        assert!(matches!(CauchyProblem::new(p, 1.0, 0.0, |_, _, _| 0.0), Err(Error::Constraint { .. })));
        assert!(CauchyProblem::new(p, 0.0, 1.0, |_, _, _| 0.0).is_err());
        let prob = CauchyProblem::new(p, 1.0, -2.0, |t, _, x| t * x).unwrap();
        assert_eq!(prob.eval_rhs(2.0, 1.0, 3.0), Ok(6.0));
    }
}
