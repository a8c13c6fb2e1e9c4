//! Comparison of a computed solution against the bound `|x| ≤ C z^{γ−1}`.

use std::fmt;
use std::sync::Arc;

use super::chain::{gronwall_chain, BoundReport};
use super::hypotheses::{check_h1, check_h2, derive_constants, H1Report, H2Report, Hypotheses, Verdict};
use crate::error::{Error, Result};
use crate::grid::ScaledGrid;
use crate::params::CauchyProblem;
use crate::solver::{picard_solve, Solution};

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Certified,
    /// Listed nodes violate the bound.
    Failed(Vec<usize>),
    /// A precondition does not hold; nothing was asserted.
    Refused(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub outcome: Outcome,
    pub t0: f64,
    pub final_c: f64,
    /// `final_C − z^{1−γ}|x|` for nodes with `t ≥ t0`, NaN before.
    pub margins: Vec<f64>,
    pub note: String,
}

impl Certificate {
    pub fn certified(&self) -> bool {
        self.outcome == Outcome::Certified
    }

    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().filter(|m| !m.is_nan()).fold(f64::INFINITY, f64::min)
    }

    fn refused(reason: String, report: &BoundReport) -> Self {
        Self {
            outcome: Outcome::Refused(reason),
            t0: report.t0,
            final_c: report.final_c,
            margins: Vec::new(),
            note: String::new(),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Certified => f.write_str("certified"),
            Outcome::Failed(nodes) => write!(f, "failed at {} node(s)", nodes.len()),
            Outcome::Refused(why) => write!(f, "refused: {why}"),
        }
    }
}

/// Growth-bound samples: every solution node plus a fixed spread of states.
pub fn h1_samples(sol: &Solution) -> Vec<(f64, f64)> {
    let grid = sol.grid();
    let x = sol.x.plain_values();
    let mut out = Vec::new();
    let stride = (grid.len() / 64).max(1);
    for j in 1..grid.len() {
        let t = grid.t()[j];
        out.push((t, x[j]));
        if j % stride == 0 || j == grid.len() - 1 {
            for s in [-4.0, -1.0, -0.25, 0.25, 1.0, 4.0] {
                out.push((t, s));
            }
        }
    }
    out
}

/// Checks `z^{1−γ}|x(t)| ≤ final_C` for `t ≥ t0`.
///
/// Refuses, without asserting anything, unless the solver converged, both
/// hypotheses hold, and the validity region of `report` covers `[t0, T]`.
pub fn certify_stability(
    problem: &CauchyProblem,
    h: &Hypotheses,
    sol: &Solution,
    report: &BoundReport,
    h2: &H2Report,
) -> Result<Certificate> {
    if !Arc::ptr_eq(sol.grid(), &report.grid) && **sol.grid() != *report.grid {
        return Err(Error::GridMismatch("solution and bound report use different grids".into()));
    }
    if !sol.converged {
        return Ok(Certificate::refused("solver did not converge".into(), report));
    }
    if h2.verdict != Verdict::Pass {
        return Ok(Certificate::refused(format!("smallness hypothesis verdict is {}", h2.verdict), report));
    }
    let h1 = check_h1(problem, h, &h1_samples(sol))?;
    if !h1.holds() {
        return Ok(Certificate::refused(
            format!("growth hypothesis fails (max ratio {:.6e})", h1.max_ratio),
            report,
        ));
    }
    if !report.covers_horizon() {
        return Ok(Certificate::refused(
            format!(
                "bound only valid up to t = {}, short of T = {}",
                report.validity_horizon,
                report.grid.t_end()
            ),
            report,
        ));
    }
    let v = sol.weighted();
    let margins: Vec<f64> = v
        .iter()
        .enumerate()
        .map(|(j, vj)| if j < report.t0_index { f64::NAN } else { report.final_c - vj.abs() })
        .collect();
    let bad: Vec<usize> = margins.iter().enumerate().filter(|(_, m)| **m < 0.0).map(|(j, _)| j).collect();
    let note = format!(
        "bound asserted for t >= t0 = {}; the interval (a, t0) = ({}, {}) is not covered",
        report.t0, problem.a, report.t0
    );
    Ok(Certificate {
        outcome: if bad.is_empty() { Outcome::Certified } else { Outcome::Failed(bad) },
        t0: report.t0,
        final_c: report.final_c,
        margins,
        note,
    })
}

/// Everything produced by [`run_pipeline`].
#[derive(Debug, Clone)]
pub struct StabilityRun {
    pub solution: Solution,
    pub h1: H1Report,
    pub h2: H2Report,
    pub report: BoundReport,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub t_trunc: f64,
    pub t0: Option<f64>,
}

/// Solve, check both hypotheses, tabulate the chain and certify.
pub fn run_pipeline(
    problem: &CauchyProblem,
    h: &Hypotheses,
    grid: &Arc<ScaledGrid>,
    opts: PipelineOptions,
) -> Result<StabilityRun> {
    let params = problem.params;
    let constants = derive_constants(h, &params, problem.a, problem.b)?;
    let solution = picard_solve(problem, grid, opts.tol, opts.max_iter)?;
    let h1 = check_h1(problem, h, &h1_samples(&solution))?;
    let h2 = check_h2(h, &constants, &params, problem.a, opts.t_trunc)?;
    let report = gronwall_chain(h, &constants, &params, problem.b, grid, opts.t0)?;
    let certificate = certify_stability(problem, h, &solution, &report, &h2)?;
    Ok(StabilityRun { solution, h1, h2, report, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_graded_grid;
    use crate::params::FracParams;
    use crate::stability::hypotheses::Envelope;

    #[test]
    fn unforced_problem_is_certified() {
        let params = FracParams::new(0.5, 0.5, 1.0).unwrap();
        let problem = CauchyProblem::new(params, 1.0, 1.0, |_, _, _| 0.0).unwrap();
        let h = Hypotheses::new(0.5, 1.0, 2, 3.0, |_| 0.0).unwrap().with_envelope(Envelope::Vanishing);
        let grid = make_graded_grid(1.0, 2.0, 129, 3.0, 1.0).unwrap().into_shared();
        let opts = PipelineOptions { tol: 1e-12, max_iter: 20, t_trunc: 2.0, t0: None };
        let run = run_pipeline(&problem, &h, &grid, opts).unwrap();
        assert!(run.certificate.certified(), "{:?}", run.certificate.outcome);
        assert_eq!(run.certificate.final_c, 1.0);
        let expected = 1.0 - 1.0 / crate::gamma(0.75);
        assert!((run.certificate.min_margin() - expected).abs() < 1e-12);
        assert!(run.certificate.note.contains("not covered"));
    }

    #[test]
    fn refuses_without_smallness() {
        let params = FracParams::new(0.8, 0.2, 1.0).unwrap();
        let problem = CauchyProblem::new(params, 1.0, 1.0, |t: f64, z: f64, x: f64| {
            z.sqrt() * (-z).exp() * (-t).exp() * x * x
        })
        .unwrap();
        // no envelope, so the tail is unbounded and the verdict cannot pass
        let h = Hypotheses::new(0.5, 1.0, 2, 1.5, |t: f64| (-t).exp()).unwrap();
        let grid = make_graded_grid(1.0, 1.5, 65, 2.5, 1.0).unwrap().into_shared();
        let opts = PipelineOptions { tol: 1e-12, max_iter: 50, t_trunc: 5.0, t0: None };
        let run = run_pipeline(&problem, &h, &grid, opts).unwrap();
        assert!(matches!(run.certificate.outcome, Outcome::Refused(_)));
        assert!(run.certificate.margins.is_empty());
    }
}
