//! Drives the library from configuration text, the same way the
//! `katugampola` binary does.

use katugampola::cli::{run_command, Command};
use katugampola::config::{parse_config, serialize_config};

const CONFIG: &str = "
# logistic-type right-hand side
problem.alpha = 0.7
problem.beta = 0.3
problem.rho = 1.5
problem.a = 1
problem.b = 0.5
problem.rhs = 0.4*x - 0.1*x^2*exp(-z)
grid.nodes = 129
grid.t_end = 2
tolerances.picard_tol = 1e-11
";

fn main() {
    let cfg = match parse_config(CONFIG) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    println!("normalized configuration:\n{}", serialize_config(&cfg));
    let art = run_command(Command::Solve, &cfg, 0).expect("solve");
    println!("{}", art.report);
    let csv = art.csv.unwrap();
    for line in csv.lines().step_by(32) {
        println!("{line}");
    }

    let broken = CONFIG.replace("problem.alpha = 0.7", "problem.alpha = 1.7");
    println!("\nwith alpha out of range: {}", parse_config(&broken).unwrap_err());
}
