//! Generalized Katugampola fractional calculus on graded meshes.
//!
//! All computation happens in the scaled time variable `z = (t^ρ - a^ρ)/ρ`,
//! under which the Katugampola integral becomes a Riemann–Liouville integral
//! and `δ_ρ = t^{1-ρ} d/dt` becomes `d/dz`. On top of the operators the crate
//! provides:
//!
//! * [`solver`]: a Picard solver for the weighted Cauchy-type problem written as a
//!   weakly singular Volterra equation, storing the unknown as `z^{1-γ} x`.
//! * [`stability`]: every constant and time function of the Grönwall–Pachpatte
//!   stability argument, three-valued hypothesis checkers and a certificate
//!   that compares a computed solution against the bound.
//! * [`oracles`]: independent reference computations used by the test suites.
//! * [`cli`]: the batch front end behind the `katugampola` binary.

// `!(x > 0.0)` is used on purpose so that NaN is rejected with the rest.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod cli;
pub mod config;
pub mod error;
pub mod expr;
pub mod grid;
pub mod operators;
pub mod oracles;
pub mod params;
pub mod quad;
pub mod solver;
pub mod stability;

pub use error::{Error, Result};
pub use grid::{
    inverse_scaled_time, make_graded_grid, scaled_time, GridFunction, Limit, Representation, ScaledGrid,
};
pub use operators::{
    cdelta_norm, delta_rho, generalized_derivative, katugampola_derivative, katugampola_integral,
    weighted_sup_norm, xcp_norm, ProductWeights, QuadratureScheme,
};
pub use params::{CauchyProblem, FracParams};
pub use solver::{picard_solve, residual, Solution};

/// Gamma function used throughout the library.
pub(crate) fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}
