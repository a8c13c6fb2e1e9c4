use std::path::PathBuf;
use std::process::{Command, Output};

use katugampola::cli::{run_command, Command as Cmd, Status, CSV_HEADER};
use katugampola::config::parse_config;
use statrs::function::gamma::gamma;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_katugampola")).args(args).output().unwrap()
}

fn load(name: &str) -> katugampola::config::RunConfig {
    parse_config(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap_or(f64::NAN)).collect()
}

#[test]
fn zero_rhs_solution_is_the_initial_term() {
    let cfg = load("solve_zero.cfg");
    let art = run_command(Cmd::Solve, &cfg, 0).unwrap();
    assert_eq!(art.status, Status::Success);
    let csv = art.csv.unwrap();
    assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
    // gamma = beta + alpha - alpha*beta = 0.75
    let c = 1.0 / gamma(0.75);
    for w in column(&csv, "weighted_x") {
        assert!((w - c).abs() < 1e-10, "{w}");
    }
    let z = column(&csv, "z");
    let x = column(&csv, "x");
    for (z, x) in z.iter().zip(&x).skip(1) {
        assert!((x - c * z.powf(-0.25)).abs() <= 1e-9 * x.abs());
    }
}

#[test]
fn lemma31_unit_parameters() {
    let out = run(&["lemma31", "--config", data("lemma31_unit.cfg").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.contains("max ratio <= 0.334"), "{report}");
}

#[test]
fn seeded_sweep_is_deterministic() {
    let mut cfg = load("lemma31_unit.cfg");
    cfg.lemma31.as_mut().unwrap().zeta = None;
    let a = run_command(Cmd::Lemma31, &cfg, 7).unwrap();
    let b = run_command(Cmd::Lemma31, &cfg, 7).unwrap();
    let c = run_command(Cmd::Lemma31, &cfg, 8).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.csv, c.csv);
    assert_eq!(a.status, Status::Success);
}

#[test]
fn overrides_change_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = run(&[
        "solve",
        "--quiet",
        "--nodes",
        "33",
        "--tol",
        "1e-8",
        "--config",
        data("solve_zero.cfg").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 34);
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["solve"]).status.code(), Some(1));
    assert_eq!(run(&["solve", "--config", "/nonexistent/run.cfg"]).status.code(), Some(1));
    let o = run(&["solve", "--nodes", "2", "--config", data("solve_zero.cfg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_errors_carry_line_numbers() {
    let text = "problem.alpha = 0.5\nproblem.beta = 0.5\nproblem.rho = 1\nproblem.a = 1\n\
                problem.b = 1\nproblem.rhs = x +\n";
    let err = parse_config(text).unwrap_err();
    assert_eq!(err.line, Some(6));
    let err = parse_config(&text.replace("x +", "x").replace("alpha = 0.5", "alpha = 1.5")).unwrap_err();
    assert_eq!(err.line, Some(1), "{err}");
    let err = parse_config("problem.alpha = 0.5\nproblem.colour = red\n").unwrap_err();
    assert_eq!(err.line, Some(2));
    assert!(err.to_string().starts_with("line 2:"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "grid.nodes = many\n").unwrap();
    let o = run(&["solve", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn h2_violation_is_reported_on_its_line() {
    let text = std::fs::read_to_string(data("stability_certified.cfg"))
        .unwrap()
        .replace("hypotheses.q = 2", "hypotheses.q = 1.1");
    let line = text.lines().position(|l| l.starts_with("hypotheses.q")).unwrap() + 1;
    let err = parse_config(&text).unwrap_err();
    assert_eq!(err.line, Some(line), "{err}");
    assert!(err.message.contains("H2"), "{err}");
}

#[test]
fn operator_commands_run() {
    let cfg = load("operator.cfg");
    for cmd in [Cmd::Integrate, Cmd::Derive, Cmd::Norms] {
        let art = run_command(cmd, &cfg, 0).unwrap();
        assert_eq!(art.status, Status::Success, "{cmd:?}");
        assert!(!art.report.is_empty());
    }
    let integral = run_command(Cmd::Integrate, &cfg, 0).unwrap().csv.unwrap();
    let values = column(&integral, "value");
    assert_eq!(values[0], 0.0);
    assert!(values.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn pachpatte_bound_is_tabulated() {
    let cfg = load("pachpatte.cfg");
    let art = run_command(Cmd::Pachpatte, &cfg, 0).unwrap();
    assert_eq!(art.status, Status::Success);
    let bound = column(art.csv.as_deref().unwrap(), "bound");
    assert_eq!(bound.len(), 21);
    assert_eq!(bound[0], 0.5);
    assert!(bound.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn certified_bound_dominates_the_solution() {
    let cfg = load("stability_certified.cfg");
    let art = run_command(Cmd::Stability, &cfg, 0).unwrap();
    assert_eq!(art.status, Status::Success, "{}", art.report);
    let csv = art.csv.unwrap();
    let w = column(&csv, "weighted_x");
    let bound = column(&csv, "bound");
    let covered: Vec<_> = w.iter().zip(&bound).filter(|(_, b)| b.is_finite()).collect();
    assert!(!covered.is_empty());
    for (w, b) in covered {
        assert!(w.abs() <= *b, "{w} > {b}");
    }
}
