//! Katugampola integral and derivatives of simple functions on a graded grid.
//!
//! Run with `cargo run --example operators`.

use katugampola::grid::default_grading;
use katugampola::oracles::power_rule_coeff;
use katugampola::{
    generalized_derivative, inverse_scaled_time, katugampola_derivative, katugampola_integral,
    make_graded_grid, FracParams, GridFunction, Limit, QuadratureScheme,
};

fn main() -> katugampola::Result<()> {
    let (a, rho) = (1.0, 2.0);
    let t_end = inverse_scaled_time(1.0, a, rho)?;
    let grid = make_graded_grid(a, t_end, 1025, default_grading(0.5), rho)?.into_shared();
    let scheme = QuadratureScheme::ProductTrapezoid;

    println!("power rule at z = 1 (rho = {rho})");
    for (sigma, alpha) in [(0.0, 0.5), (1.0, 0.5), (0.5, 0.3), (2.0, 0.8)] {
        let f = GridFunction::from_fn(&grid, |_, z| z.powf(sigma));
        let got = *katugampola_integral(&f, alpha, scheme)?.values().last().unwrap();
        let exact = power_rule_coeff(sigma, alpha).unwrap();
        println!("  I^{alpha} z^{sigma}: {got:.10} vs {exact:.10}  (rel {:.1e})", (got / exact - 1.0).abs());
    }

    // semigroup: I^a I^b = I^(a+b)
    let g = GridFunction::from_fn(&grid, |t, _| t.sin());
    let twice = katugampola_integral(&katugampola_integral(&g, 0.3, scheme)?, 0.4, scheme)?;
    let once = katugampola_integral(&g, 0.7, scheme)?;
    let gap = twice.values().iter().zip(once.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    println!("semigroup I^0.4 I^0.3 vs I^0.7 for sin t: max gap {gap:.2e}");

    // the derivative undoes the integral
    let g = GridFunction::from_fn(&grid, |_, z| (-z).exp() + z * z);
    let ig = katugampola_integral(&g, 0.5, scheme)?;
    let back = katugampola_derivative(&ig, 0.5)?;
    let mid = grid.len() / 2;
    println!(
        "D^0.5 I^0.5 g at z = {:.4}: {:.8} vs g = {:.8}",
        grid.z()[mid],
        back.plain_value(mid),
        g.plain_value(mid)
    );

    // the generalized derivative needs to know that I^alpha g vanishes like z^alpha
    for beta in [0.0, 0.5, 1.0] {
        let params = FracParams::new(0.5, beta, rho)?;
        let declared = ig.to_weighted(-0.5, Limit::Extrapolate)?;
        let d = generalized_derivative(&declared, &params)?;
        println!("D^(0.5, {beta}) I^0.5 g at the same node: {:.8}", d.plain_value(mid));
    }
    Ok(())
}
