//! The beta-type integral `I(z) = ∫_0^z s^(ζ-1) (z-s)^(ϑ-1) e^(-ϖ s) ds`
//! never exceeds `C(ζ,ϑ) ϖ^(-ζ)`. Prints the worst ratio over a sweep.

use katugampola::stability::{evaluate_i_at, lemma31_constant, Lemma31Params};

fn main() -> katugampola::Result<()> {
    println!("{:>6} {:>6} {:>10} {:>10}", "zeta", "theta", "C", "max ratio");
    for zeta in [0.25, 0.5, 1.0, 2.0, 4.0] {
        for vartheta in [0.25, 1.0, 3.0] {
            let c = lemma31_constant(zeta, vartheta)?;
            let mut worst = 0.0f64;
            for varpi in [0.01, 0.1, 1.0, 10.0, 100.0] {
                let p = Lemma31Params::new(zeta, vartheta, varpi)?;
                for k in 0..40 {
                    let z = 1e-3 * 10f64.powf(k as f64 / 8.0);
                    worst = worst.max(evaluate_i_at(&p, z)? / (c * varpi.powf(-zeta)));
                }
            }
            println!("{zeta:>6} {vartheta:>6} {c:>10.4} {worst:>10.4}");
        }
    }
    Ok(())
}
