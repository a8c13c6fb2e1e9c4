//! Linear Cauchy problem `D x = λ x`, whose weighted solution is
//! `b E_{α,γ}(λ z^α)`. Compares the Picard solver against the series.

use katugampola::grid::default_grading;
use katugampola::oracles::{mittag_leffler, OracleConfig};
use katugampola::{inverse_scaled_time, make_graded_grid, picard_solve, CauchyProblem, FracParams};

fn main() -> katugampola::Result<()> {
    let (alpha, beta, rho, a, b, lambda) = (0.6, 0.4, 1.5, 1.0, 1.0, 0.5);
    let params = FracParams::new(alpha, beta, rho)?;
    let gamma = params.gamma();
    let problem = CauchyProblem::new(params, a, b, move |_, _, x| lambda * x)?;
    let t_end = inverse_scaled_time(1.0, a, rho)?;
    let cfg = OracleConfig::default();

    println!("alpha = {alpha}, beta = {beta}, gamma = {gamma:.3}, lambda = {lambda}");
    println!("{:>6} {:>6} {:>12}", "N", "iters", "max error");
    for n in [64, 128, 256, 512, 1024] {
        let grid = make_graded_grid(a, t_end, n + 1, default_grading(gamma), rho)?.into_shared();
        let sol = picard_solve(&problem, &grid, 1e-12, 100)?;
        let err = grid
            .z()
            .iter()
            .zip(sol.weighted())
            .map(|(&z, &w)| {
                (w - b * mittag_leffler(alpha, gamma, lambda * z.powf(alpha), &cfg).unwrap()).abs()
            })
            .fold(0.0, f64::max);
        println!("{n:>6} {:>6} {err:>12.3e}", sol.iterations);
    }
    Ok(())
}
