//! Picard iteration for the Volterra form of the Cauchy-type problem,
//!
//! ```text
//! x(t) = b/Γ(γ) z^{γ−1} + ^ρI^α f(·, x(·))(t),
//! ```
//!
//! carried out on the weighted unknown `v = z^{1−γ} x`, which stays bounded
//! at the left endpoint where `x` itself blows up.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gamma;
use crate::grid::{extrapolate_to_origin, GridFunction, Representation, ScaledGrid};
use crate::operators::{ProductWeights, QuadratureScheme};
use crate::params::CauchyProblem;

/// Consecutive growing updates after which the iteration is abandoned.
const DIVERGENCE_RUN: usize = 3;

#[derive(Debug, Clone)]
pub struct Solution {
    /// Weighted representation with exponent `1 − γ`.
    pub x: GridFunction,
    pub iterations: usize,
    pub final_update_norm: f64,
    pub converged: bool,
    /// Weighted sup norm of every update, in order.
    pub update_history: Vec<f64>,
}

impl Solution {
    /// `z^{1−γ} x` at the nodes; slot 0 is the weighted initial value.
    pub fn weighted(&self) -> &[f64] {
        self.x.values()
    }

    pub fn grid(&self) -> &Arc<ScaledGrid> {
        self.x.grid()
    }
}

/// The fixed-point map `v ↦ b/Γ(γ) + z^{1−γ} I^α f(·, z^{γ−1} v)` on one grid.
struct PicardMap<'p> {
    problem: &'p CauchyProblem,
    grid: Arc<ScaledGrid>,
    weights: ProductWeights,
    weight: f64,
    initial: f64,
}

impl<'p> PicardMap<'p> {
    fn new(problem: &'p CauchyProblem, grid: &Arc<ScaledGrid>) -> Result<Self> {
        if grid.a() != problem.a || grid.rho() != problem.params.rho() {
            return Err(Error::GridMismatch(format!(
                "grid built for a = {}, rho = {} but problem has a = {}, rho = {}",
                grid.a(),
                grid.rho(),
                problem.a,
                problem.params.rho()
            )));
        }
        let params = problem.params;
        Ok(Self {
            problem,
            grid: Arc::clone(grid),
            weights: ProductWeights::new(grid, params.alpha(), QuadratureScheme::ProductTrapezoid)?,
            weight: params.one_minus_gamma(),
            initial: problem.b / gamma(params.gamma()),
        })
    }

    /// `z^{1−γ} f(t, z^{γ−1} v)` at every node. With `γ < 1` the endpoint
    /// value is extrapolated since `x(a)` is infinite there. Non-finite values
    /// are passed on and show up as a non-finite update.
    fn weighted_rhs(&self, v: &[f64]) -> Result<Vec<f64>> {
        let t = self.grid.t();
        let z = self.grid.z();
        let mut out = vec![0.0; v.len()];
        for j in 0..v.len() {
            if z[j] == 0.0 && self.weight > 0.0 {
                continue;
            }
            let scale = if self.weight > 0.0 { z[j].powf(self.weight) } else { 1.0 };
            let x = v[j] / scale;
            let f = self.problem.eval_rhs(t[j], z[j], x).map_err(|message| Error::RhsEvaluation {
                node: j,
                t: t[j],
                message,
            })?;
            out[j] = scale * f;
        }
        if self.weight > 0.0 {
            out[0] = extrapolate_to_origin(z, &out)?;
        }
        Ok(out)
    }

    fn integral_term(&self, v: &[f64]) -> Result<Vec<f64>> {
        let rhs = self.weighted_rhs(v)?;
        // apply_weighted returns z^{w-α} I; the solver wants z^w I.
        let scaled = self.weights.apply_weighted(&rhs, self.weight)?;
        let alpha = self.weights.alpha();
        Ok(scaled.iter().zip(self.grid.z()).map(|(&s, &zj)| s * zj.powf(alpha)).collect())
    }

    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut next = self.integral_term(v)?;
        next.iter_mut().for_each(|x| *x += self.initial);
        next[0] = self.initial;
        Ok(next)
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m: f64, (x, y)| {
        let d = (x - y).abs();
        if d.is_nan() {
            f64::NAN
        } else {
            m.max(d)
        }
    })
}

/// Iterates the Picard map from `x_0 = b/Γ(γ) z^{γ−1}` until the weighted
/// sup norm of the update drops to `tol`, `max_iter` is reached, or the
/// update grows three times in a row. Non-convergence is reported through
/// [`Solution::converged`], not as an error.
pub fn picard_solve(
    problem: &CauchyProblem,
    grid: &Arc<ScaledGrid>,
    tol: f64,
    max_iter: usize,
) -> Result<Solution> {
    if !(tol > 0.0) {
        return Err(crate::error::domain(format!("tolerance must be positive, got {tol}")));
    }
    if max_iter == 0 {
        return Err(crate::error::domain("max_iter must be at least 1"));
    }
    let map = PicardMap::new(problem, grid)?;
    let mut v = vec![map.initial; grid.len()];
    let mut history = Vec::new();
    let mut growing = 0;
    let mut converged = false;
    for _ in 0..max_iter {
        let next = map.apply(&v)?;
        let update = sup_diff(&next, &v);
        v = next;
        if let Some(&prev) = history.last() {
            growing = if update > prev { growing + 1 } else { 0 };
        }
        history.push(update);
        if update <= tol {
            converged = true;
            break;
        }
        if !update.is_finite() || growing >= DIVERGENCE_RUN {
            break;
        }
    }
    let x = GridFunction::new(Arc::clone(grid), v, Representation::Weighted { exponent: map.weight })?;
    Ok(Solution {
        x,
        iterations: history.len(),
        final_update_norm: *history.last().expect("at least one iteration"),
        converged,
        update_history: history,
    })
}

/// `z^{1−γ}[x − b/Γ(γ) z^{γ−1} − I^α f(·, x)]` at every node.
pub fn residual(problem: &CauchyProblem, sol: &Solution) -> Result<GridFunction> {
    let expected = problem.params.one_minus_gamma();
    match sol.x.representation() {
        Representation::Weighted { exponent } if exponent == expected => {}
        other => {
            return Err(Error::GridMismatch(format!(
                "solution stored as {other:?}, problem needs weight exponent {expected}"
            )))
        }
    }
    let map = PicardMap::new(problem, sol.grid())?;
    let v = sol.x.values();
    let integral = map.integral_term(v)?;
    let mut r: Vec<f64> = v.iter().zip(&integral).map(|(&vj, &ij)| vj - map.initial - ij).collect();
    r[0] = v[0] - map.initial;
    GridFunction::new(Arc::clone(sol.grid()), r, Representation::Weighted { exponent: expected })
}
