//! Pachpatte-type bound for `u(t) <= u0 + ∫ b + ∫ a w(u)`, checked against
//! the exact solution of the corresponding integral equation.

use katugampola::stability::{pachpatte_bound, Growth};

fn main() -> katugampola::Result<()> {
    let (u0, a, b) = (0.5, 0.3, 0.2);
    // u' = a u^2 + b with u(0) = u0 solved by RK4 on a fine step
    let exact = |t1: f64| {
        let f = |u: f64| a * u * u + b;
        let steps = 20_000;
        let h = t1 / steps as f64;
        let mut u = u0;
        for _ in 0..steps {
            let k1 = f(u);
            let k2 = f(u + 0.5 * h * k1);
            let k3 = f(u + 0.5 * h * k2);
            let k4 = f(u + h * k3);
            u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        u
    };
    println!("{:>5} {:>12} {:>12}", "t", "solution", "bound");
    for k in 0..=10 {
        let t = 0.2 * k as f64;
        let bound = pachpatte_bound(u0, |_| a, |_| b, &Growth::Power(2.0), 0.0, t)?;
        println!("{t:>5.1} {:>12.6} {bound:>12.6}", exact(t));
    }
    let linear = pachpatte_bound(u0, |_| a, |_| b, &Growth::Linear, 0.0, 2.0)?;
    println!("linear growth at t = 2: {linear:.6} (closed form {:.6})", (u0 + b * 2.0) * (a * 2.0).exp());
    Ok(())
}
