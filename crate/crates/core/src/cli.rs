//! Batch front end. Every command reads a [`RunConfig`], writes an optional
//! CSV and a plain-text report, and maps its outcome to an exit status:
//!
//! | status | meaning |
//! |---|---|
//! | 0 | success, or certified |
//! | 1 | usage, configuration or I/O error |
//! | 2 | a checked bound fails, or the solver does not converge |
//! | 3 | inconclusive: the smallness hypothesis is not established, or the chain does not reach `T` |

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{parse_config, GrowthSpec, RunConfig};
use crate::expr::{Expr, Point};
use crate::grid::{default_grading, make_graded_grid, GridFunction, Representation, ScaledGrid};
use crate::operators::{
    cdelta_norm, generalized_derivative, katugampola_derivative, katugampola_integral, weighted_sup_norm,
    xcp_norm,
};
use crate::params::CauchyProblem;
use crate::solver::{picard_solve, Solution};
use crate::stability::{
    check_lemma31, evaluate_i_at, lemma31_constant, pachpatte_bound, run_pipeline, Growth, Lemma31Params,
    Outcome, PipelineOptions, StabilityRun, Verdict,
};

pub const CSV_HEADER: &str = "t,z,x,weighted_x,rhs,bound";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Usage = 1,
    Failed = 2,
    Inconclusive = 3,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] crate::config::ConfigError),
    #[error("{0}")]
    Library(#[from] crate::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Debug, Parser)]
#[command(
    name = "katugampola",
    version,
    about = "Katugampola fractional calculus and stability certificates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Configuration file (`section.key = value` lines).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// CSV output path; overrides `output.csv`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report path; overrides `output.report`. Without one the report goes to stdout.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Overrides `grid.nodes`.
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    /// Overrides `grid.grading`.
    #[arg(long, global = true)]
    pub grading: Option<f64>,
    /// Overrides `tolerances.picard_tol`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Do not print the report to stdout.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Katugampola integral of `operator.g`.
    Integrate,
    /// Fractional derivative of `operator.g`.
    Derive,
    /// Picard solution of the weighted Cauchy problem.
    Solve,
    /// Sweep of the beta-type integral bound.
    Lemma31,
    /// Solve, check both hypotheses, and certify the stability bound.
    Stability,
    /// Tabulate the Pachpatte bound.
    Pachpatte,
    /// Weighted norms of `operator.g`.
    Norms,
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub status: Status,
    pub csv: Option<String>,
    pub report: String,
}

fn cell(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else {
        String::new()
    }
}

fn num(v: f64) -> String {
    format!("{v:.8e}")
}

fn build_grid(cfg: &RunConfig) -> Result<Arc<ScaledGrid>, CliError> {
    let Some(p) = &cfg.problem else { return usage("this command needs a problem section") };
    let Some(g) = &cfg.grid else { return usage("this command needs a grid section") };
    let r = g.grading.unwrap_or_else(|| default_grading(p.params().gamma()));
    Ok(make_graded_grid(p.a, g.t_end, g.nodes, r, p.rho)?.into_shared())
}

fn build_problem(cfg: &RunConfig) -> Result<CauchyProblem, CliError> {
    let Some(p) = &cfg.problem else { return usage("this command needs a problem section") };
    Ok(CauchyProblem::with_fallible_rhs(p.params(), p.a, p.b, p.rhs.to_rhs())?)
}

fn sample_g(expr: &Expr, grid: &Arc<ScaledGrid>) -> Result<GridFunction, CliError> {
    let mut values = Vec::with_capacity(grid.len());
    for (j, (&t, &z)) in grid.t().iter().zip(grid.z()).enumerate() {
        let v = expr
            .eval(Point { t, z, x: 0.0 })
            .map_err(|e| CliError::Usage(format!("operator.g at node {j} (t = {t}): {e}")))?;
        values.push(v);
    }
    Ok(GridFunction::new(Arc::clone(grid), values, Representation::Plain)?)
}

fn operator_csv(g: &GridFunction, out: &GridFunction) -> String {
    let mut csv = String::from("t,z,g,value\n");
    let grid = g.grid();
    for j in 0..grid.len() {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            cell(grid.t()[j]),
            cell(grid.z()[j]),
            cell(g.plain_value(j)),
            cell(out.plain_value(j))
        );
    }
    csv
}

fn operator_section(cfg: &RunConfig) -> Result<&crate::config::OperatorSection, CliError> {
    cfg.operator.as_ref().ok_or_else(|| CliError::Usage("this command needs an operator section".into()))
}

fn cmd_integrate(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let op = operator_section(cfg)?;
    let grid = build_grid(cfg)?;
    let order = op.order.unwrap_or_else(|| cfg.problem.as_ref().map_or(0.5, |p| p.alpha));
    let g = sample_g(&op.g, &grid)?;
    let out = katugampola_integral(&g, order, op.scheme)?;
    let mut report = String::new();
    let _ = writeln!(report, "Katugampola integral of order {} of g = {}", num(order), op.g);
    let _ = writeln!(report, "nodes: {}, scheme: {:?}", grid.len(), op.scheme);
    let _ = writeln!(report, "value at T: {}", num(out.plain_value(grid.len() - 1)));
    Ok(Artifacts { status: Status::Success, csv: Some(operator_csv(&g, &out)), report })
}

fn cmd_derive(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let op = operator_section(cfg)?;
    let grid = build_grid(cfg)?;
    let g = sample_g(&op.g, &grid)?;
    let mut report = String::new();
    let out = match op.order {
        Some(order) => {
            let _ = writeln!(report, "Katugampola derivative of order {} of g = {}", num(order), op.g);
            katugampola_derivative(&g, order)?
        }
        None => {
            let p = cfg.problem.as_ref().expect("build_grid checked the problem section").params();
            let _ = writeln!(
                report,
                "generalized derivative (alpha = {}, beta = {}, rho = {}) of g = {}",
                num(p.alpha()),
                num(p.beta()),
                num(p.rho()),
                op.g
            );
            generalized_derivative(&g, &p)?
        }
    };
    let _ = writeln!(report, "nodes: {}", grid.len());
    let _ = writeln!(report, "value at T: {}", num(out.plain_value(grid.len() - 1)));
    Ok(Artifacts { status: Status::Success, csv: Some(operator_csv(&g, &out)), report })
}

fn cmd_norms(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let op = operator_section(cfg)?;
    let grid = build_grid(cfg)?;
    let g = sample_g(&op.g, &grid)?;
    let mut report = String::new();
    let _ = writeln!(report, "norms of g = {} on {} nodes", op.g, grid.len());
    let _ = writeln!(
        report,
        "weighted sup, gamma = {}: {}",
        op.norm_gamma,
        num(weighted_sup_norm(&g, op.norm_gamma)?)
    );
    let _ = writeln!(
        report,
        "X_c^p, c = {}, p = {}: {}",
        op.norm_c,
        op.norm_p,
        num(xcp_norm(&g, op.norm_c, op.norm_p)?)
    );
    let _ =
        writeln!(report, "C^1_delta, gamma = {}: {}", op.norm_gamma, num(cdelta_norm(&g, 1, op.norm_gamma)?));
    Ok(Artifacts { status: Status::Success, csv: None, report })
}

/// One row per node; the bound column is filled for `t >= t0` when `bound`
/// is `Some((t0_index, final_C))`.
pub fn solution_csv(problem: &CauchyProblem, sol: &Solution, bound: Option<(usize, f64)>) -> String {
    let grid = sol.grid();
    let mut csv = String::with_capacity(grid.len() * 100);
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    let v = sol.weighted();
    for j in 0..grid.len() {
        let (t, z) = (grid.t()[j], grid.z()[j]);
        let x = sol.x.plain_value(j);
        let rhs = if x.is_finite() { problem.eval_rhs(t, z, x).unwrap_or(f64::NAN) } else { f64::NAN };
        let b = match bound {
            Some((start, c)) if j >= start => cell(c),
            _ => String::new(),
        };
        let _ = writeln!(csv, "{},{},{},{},{},{}", cell(t), cell(z), cell(x), cell(v[j]), cell(rhs), b);
    }
    csv
}

fn cmd_solve(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let problem = build_problem(cfg)?;
    let grid = build_grid(cfg)?;
    let sol = picard_solve(&problem, &grid, cfg.tolerances.picard_tol, cfg.tolerances.max_iter)?;
    let gamma = problem.params.gamma();
    let mut report = String::new();
    let _ = writeln!(report, "gamma: {}", num(gamma));
    let _ = writeln!(report, "weighted initial value b/Gamma(gamma): {}", num(sol.weighted()[0]));
    let _ = writeln!(report, "nodes: {}, grading: {}", grid.len(), grid.grading());
    let _ = writeln!(
        report,
        "picard: {} after {} iterations, last update {}",
        if sol.converged { "converged" } else { "did not converge" },
        sol.iterations,
        num(sol.final_update_norm)
    );
    let status = if sol.converged { Status::Success } else { Status::Failed };
    Ok(Artifacts { status, csv: Some(solution_csv(&problem, &sol, None)), report })
}

fn cmd_lemma31(cfg: &RunConfig, seed: u64) -> Result<Artifacts, CliError> {
    let Some(l) = &cfg.lemma31 else { return usage("lemma31 needs a lemma31 section") };
    if l.samples == 0 || !(l.z_max > 0.0) {
        return usage("lemma31 needs samples >= 1 and z_max > 0");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log_uniform = |lo: f64, hi: f64| (rng.random_range(lo.ln()..hi.ln())).exp();
    let z_lo = 1e-4 * l.z_max;
    let fixed = match (l.zeta, l.vartheta, l.varpi) {
        (Some(z), Some(t), Some(w)) => Some(Lemma31Params::new(z, t, w)?),
        _ => None,
    };
    let mut report = String::new();
    let (rows, max_ratio, violations) = if let Some(p) = fixed {
        // A deterministic log-spaced sweep in z; a = 1, rho = 1 makes t = 1 + z.
        let n = l.samples;
        let ts: Vec<f64> = (0..n)
            .map(|k| {
                let s = if n == 1 { 1.0 } else { k as f64 / (n - 1) as f64 };
                1.0 + z_lo * (l.z_max / z_lo).powf(s)
            })
            .collect();
        let r = check_lemma31(&p, 1.0, 1.0, &ts)?;
        let _ = writeln!(
            report,
            "zeta = {}, vartheta = {}, varpi = {}",
            num(p.zeta()),
            num(p.vartheta()),
            num(p.varpi())
        );
        let _ = writeln!(report, "constant C: {}", num(r.constant));
        let _ = writeln!(report, "bound C varpi^-zeta: {}", num(r.bound));
        let rows: Vec<_> = r.samples.iter().map(|s| (p, s.z, s.value, s.ratio)).collect();
        (rows, r.max_ratio, r.violations().count())
    } else {
        let draws: Vec<(Lemma31Params, f64)> = (0..l.samples)
            .map(|_| {
                let zeta = l.zeta.unwrap_or_else(|| log_uniform(0.05, 5.0));
                let vartheta = l.vartheta.unwrap_or_else(|| log_uniform(0.05, 5.0));
                let varpi = l.varpi.unwrap_or_else(|| log_uniform(1e-2, 1e2));
                let z = log_uniform(z_lo, l.z_max);
                (Lemma31Params::new(zeta, vartheta, varpi), z)
            })
            .map(|(p, z)| p.map(|p| (p, z)))
            .collect::<crate::Result<_>>()?;
        let rows = draws
            .par_iter()
            .map(|&(p, z)| {
                let value = evaluate_i_at(&p, z)?;
                let bound = lemma31_constant(p.zeta(), p.vartheta())? * p.varpi().powf(-p.zeta());
                Ok((p, z, value, value / bound))
            })
            .collect::<crate::Result<Vec<_>>>()?;
        let max_ratio = rows.iter().map(|r| r.3).fold(0.0, f64::max);
        let violations = rows.iter().filter(|r| r.3 > 1.0).count();
        let _ = writeln!(report, "random parameters, seed {seed}");
        (rows, max_ratio, violations)
    };
    let _ = writeln!(report, "samples: {}", rows.len());
    let _ = writeln!(report, "max ratio: {}", num(max_ratio));
    let _ = writeln!(report, "max ratio <= {:.3}", (max_ratio * 1000.0).ceil() / 1000.0);
    let _ = writeln!(report, "violations: {violations}");
    let mut csv = String::from("zeta,vartheta,varpi,z,value,ratio\n");
    for (p, z, value, ratio) in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            cell(p.zeta()),
            cell(p.vartheta()),
            cell(p.varpi()),
            cell(*z),
            cell(*value),
            cell(*ratio)
        );
    }
    let status = if violations == 0 { Status::Success } else { Status::Failed };
    Ok(Artifacts { status, csv: Some(csv), report })
}

fn cmd_pachpatte(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let Some(p) = &cfg.pachpatte else { return usage("pachpatte needs a pachpatte section") };
    let eval_t = |e: &Expr| {
        let e = e.clone();
        move |t: f64| e.eval(Point { t, z: 0.0, x: 0.0 }).unwrap_or(f64::NAN)
    };
    let growth = match &p.growth {
        GrowthSpec::Linear => Growth::Linear,
        GrowthSpec::Power(m) => Growth::Power(*m),
        GrowthSpec::Expr(e) => {
            let e = e.clone();
            Growth::General(Arc::new(move |x| e.eval(Point { t: 0.0, z: 0.0, x }).unwrap_or(f64::NAN)))
        }
    };
    let (a_fn, b_fn) = (eval_t(&p.a_fn), eval_t(&p.b_fn));
    let n = p.points;
    let mut csv = String::from("t,bound\n");
    let mut last = f64::NAN;
    let mut blowup = None;
    for k in 0..n {
        let t = p.t0 + (p.t1 - p.t0) * k as f64 / (n - 1) as f64;
        let u = pachpatte_bound(p.u0, &a_fn, &b_fn, &growth, p.t0, t)?;
        if !u.is_finite() && blowup.is_none() {
            blowup = Some(t);
        }
        last = u;
        let _ = writeln!(csv, "{},{}", cell(t), cell(u));
    }
    let mut report = String::new();
    let _ = writeln!(report, "u0 = {}, a(t) = {}, b(t) = {}, growth {:?}", num(p.u0), p.a_fn, p.b_fn, growth);
    let _ = writeln!(report, "bound at t1 = {}: {}", p.t1, num(last));
    match blowup {
        Some(t) => {
            let _ = writeln!(report, "bound is infinite from t = {t}");
        }
        None => {
            let _ = writeln!(report, "bound finite on [t0, t1]");
        }
    }
    Ok(Artifacts { status: Status::Success, csv: Some(csv), report })
}

fn stability_report(run: &StabilityRun, m: u32, params: &crate::FracParams) -> String {
    let c = &run.report.constants;
    let h2 = &run.h2;
    let mut r = String::new();
    let _ = writeln!(r, "gamma: {}", num(params.gamma()));
    let _ = writeln!(r, "p: {}", num(c.p));
    let _ = writeln!(r, "lambda1: {}", num(c.lambda1));
    let _ = writeln!(r, "lambda2: {}", num(c.lambda2));
    let _ = writeln!(r, "K: {}", num(c.k));
    let _ = writeln!(r, "C1: {}", num(c.c1));
    let _ = writeln!(r, "C1_hat: {}", num(c.c1_hat));
    let _ = writeln!(r, "final_C: {}", num(run.report.final_c));
    let _ = writeln!(r, "factor in K, (1 + lambda1/lambda2)^m: {}", num(c.k_factor));
    let _ = writeln!(r, "factor in C1, 1 + lambda1(lambda1 + 1)/lambda2: {}", num(c.c1_factor));
    let beta_term = params.beta() * (1.0 - params.alpha());
    let _ = writeln!(
        r,
        "weight exponent in the smallness hypothesis, -m beta(1-alpha): {}",
        num(-(m as f64) * beta_term)
    );
    let _ = writeln!(
        r,
        "weight exponent in the chain integrals, -m q beta(alpha-1): {}",
        num(-(m as f64) * run.report.q * params.beta() * (params.alpha() - 1.0))
    );
    let _ = writeln!(
        r,
        "smallness product: [{}, {}] (truncated at t = {})",
        num(h2.product.lo),
        num(h2.product.hi),
        h2.t_trunc
    );
    let _ = writeln!(r, "against K: {}", h2.verdict);
    let _ = writeln!(r, "against K/2: {}", h2.verdict_half);
    let (lo, hi) = h2.scale_threshold(m);
    let _ = writeln!(r, "phi may be scaled by up to: [{}, {}]", num(lo), num(hi));
    for note in &h2.notes {
        let _ = writeln!(r, "note: {note}");
    }
    let _ = writeln!(r, "growth hypothesis max ratio: {}", num(run.h1.max_ratio));
    let _ = writeln!(
        r,
        "picard: {} after {} iterations",
        if run.solution.converged { "converged" } else { "did not converge" },
        run.solution.iterations
    );
    let _ = writeln!(
        r,
        "chain valid up to t = {} (T = {})",
        run.report.validity_horizon,
        run.report.grid.t_end()
    );
    let _ = writeln!(r, "certificate: {}", run.certificate.outcome);
    if !run.certificate.note.is_empty() {
        let _ = writeln!(r, "{}", run.certificate.note);
        let _ = writeln!(r, "min margin: {}", num(run.certificate.min_margin()));
    }
    r
}

/// Maps a pipeline run to its exit status.
pub fn stability_status(run: &StabilityRun) -> Status {
    if run.h2.verdict != Verdict::Pass {
        return Status::Inconclusive;
    }
    if !run.h1.holds() {
        return Status::Failed;
    }
    if !run.report.covers_horizon() {
        return Status::Inconclusive;
    }
    if !run.solution.converged {
        return Status::Failed;
    }
    match run.certificate.outcome {
        Outcome::Certified => Status::Success,
        Outcome::Failed(_) => Status::Failed,
        // every refusal reason is covered above
        Outcome::Refused(_) => Status::Inconclusive,
    }
}

fn cmd_stability(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let Some(hs) = &cfg.hypotheses else { return usage("stability needs a hypotheses section") };
    let problem = build_problem(cfg)?;
    let grid = build_grid(cfg)?;
    let h = hs.hypotheses();
    let opts = PipelineOptions {
        tol: cfg.tolerances.picard_tol,
        max_iter: cfg.tolerances.max_iter,
        t_trunc: hs.t_trunc,
        t0: hs.t0,
    };
    let run = run_pipeline(&problem, &h, &grid, opts)?;
    let bound = match run.certificate.outcome {
        Outcome::Refused(_) => None,
        _ => Some((run.report.t0_index, run.report.final_c)),
    };
    Ok(Artifacts {
        status: stability_status(&run),
        csv: Some(solution_csv(&problem, &run.solution, bound)),
        report: stability_report(&run, h.m, &problem.params),
    })
}

/// Runs one command on an already parsed configuration.
pub fn run_command(command: Command, cfg: &RunConfig, seed: u64) -> Result<Artifacts, CliError> {
    match command {
        Command::Integrate => cmd_integrate(cfg),
        Command::Derive => cmd_derive(cfg),
        Command::Solve => cmd_solve(cfg),
        Command::Lemma31 => cmd_lemma31(cfg, seed),
        Command::Stability => cmd_stability(cfg),
        Command::Pachpatte => cmd_pachpatte(cfg),
        Command::Norms => cmd_norms(cfg),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let Some(path) = &cli.config else { return usage("--config <path> is required") };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    let mut cfg = parse_config(&text)?;
    if let Some(g) = cfg.grid.as_mut() {
        if let Some(n) = cli.nodes {
            if n < 3 {
                return usage(format!("--nodes must be at least 3, got {n}"));
            }
            g.nodes = n;
        }
        if let Some(r) = cli.grading {
            if !(r >= 1.0) {
                return usage(format!("--grading must be >= 1, got {r}"));
            }
            g.grading = Some(r);
        }
    }
    if let Some(tol) = cli.tol {
        if !(tol > 0.0) {
            return usage(format!("--tol must be positive, got {tol}"));
        }
        cfg.tolerances.picard_tol = tol;
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<Status, CliError> {
    let cfg = load(cli)?;
    let artifacts = run_command(cli.command, &cfg, cli.seed)?;
    let csv_path = cli.out.clone().or_else(|| cfg.output.csv.as_ref().map(PathBuf::from));
    if let (Some(path), Some(csv)) = (&csv_path, &artifacts.csv) {
        write_file(path, csv)?;
    }
    let report_path = cli.report.clone().or_else(|| cfg.output.report.as_ref().map(PathBuf::from));
    match report_path {
        Some(path) => write_file(&path, &artifacts.report)?,
        None if !cli.quiet => print!("{}", artifacts.report),
        None => {}
    }
    Ok(artifacts.status)
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Status::Usage.code() } else { Status::Success.code() };
        }
    };
    match execute(&cli) {
        Ok(status) => status.code(),
        Err(e) => {
            eprintln!("error: {e}");
            Status::Usage.code()
        }
    }
}
