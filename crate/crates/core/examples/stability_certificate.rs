//! Full stability pipeline: solve, check the growth and smallness
//! hypotheses, build the bound and certify the computed solution.

use katugampola::grid::default_grading;
use katugampola::stability::{
    check_h2, derive_constants, run_pipeline, Envelope, Hypotheses, PipelineOptions,
};
use katugampola::{make_graded_grid, CauchyProblem, FracParams};

fn main() -> katugampola::Result<()> {
    let (alpha, beta, rho, a, b) = (0.8, 0.2, 1.0, 1.0, 1.0);
    let (mu, sigma, m, q) = (0.5, 1.0, 2, 2.0);
    let t_trunc = a + 40.0;
    let params = FracParams::new(alpha, beta, rho)?;
    let unit = Hypotheses::new(mu, sigma, m, q, |t: f64| (-t).exp())?
        .with_envelope(Envelope::Exponential { scale: 1.0, rate: 1.0 });
    let constants = derive_constants(&unit, &params, a, b)?;
    let (threshold, _) = check_h2(&unit, &constants, &params, a, t_trunc)?.scale_threshold(m);
    println!(
        "K = {:.4}, C1 = {:.4}, largest admissible scale of phi: {threshold:.4}",
        constants.k, constants.c1
    );

    let grid = make_graded_grid(a, 1.8, 513, default_grading(params.gamma()), rho)?.into_shared();
    let opts = PipelineOptions { tol: 1e-10, max_iter: 100, t_trunc, t0: None };
    for eps in [0.5 * threshold, 2.0 * threshold] {
        let problem = CauchyProblem::new(params, a, b, move |t: f64, z: f64, x: f64| {
            eps * z.sqrt() * (-sigma * rho * z).exp() * (-t).exp() * x * x
        })?;
        let run = run_pipeline(&problem, &unit.scaled(eps), &grid, opts)?;
        println!("\nscale {eps:.4}");
        println!("  H1 holds: {}, H2: {:?}", run.h1.holds(), run.h2.verdict);
        println!("  Picard: {} iterations, converged {}", run.solution.iterations, run.solution.converged);
        println!("  bound valid up to t = {:.4}", run.report.validity_horizon);
        println!("  final C = {:.6}, outcome: {}", run.certificate.final_c, run.certificate.outcome);
        if run.certificate.certified() {
            println!("  smallest margin {:.6}", run.certificate.min_margin());
        }
    }
    Ok(())
}
