//! Line-oriented run configuration.
//!
//! ```text
//! # comment
//! problem.alpha = 0.5
//! problem.rhs   = 0.1*z^0.5*exp(-z)*x^2
//! grid.nodes    = 256
//! ```
//!
//! Every line is `section.key = value`. Unknown sections and keys are
//! rejected, as are duplicates. Expressions take the rest of the line and
//! may be wrapped in double quotes.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::expr::{parse_expression, Expr};
use crate::operators::QuadratureScheme;
use crate::params::FracParams;
use crate::stability::{Envelope, Hypotheses};

#[derive(Debug, Clone, PartialEq, Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

fn err<T>(line: Option<usize>, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { line, message: message.into() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSection {
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    pub a: f64,
    pub b: f64,
    pub rhs: Expr,
}

impl ProblemSection {
    pub fn params(&self) -> FracParams {
        FracParams::new(self.alpha, self.beta, self.rho).expect("validated at parse time")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSection {
    pub nodes: usize,
    pub t_end: f64,
    /// Defaults to `clamp(2/γ, 1, 6)` when absent.
    pub grading: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesesSection {
    pub mu: f64,
    pub sigma: f64,
    pub m: u32,
    pub q: f64,
    pub phi: Expr,
    pub t_trunc: f64,
    pub envelope: Envelope,
    pub t0: Option<f64>,
}

impl HypothesesSection {
    pub fn hypotheses(&self) -> Hypotheses {
        let phi = self.phi.clone();
        Hypotheses::new(self.mu, self.sigma, self.m, self.q, move |t| {
            phi.eval(crate::expr::Point { t, z: 0.0, x: 0.0 }).unwrap_or(f64::NAN)
        })
        .expect("validated at parse time")
        .with_envelope(self.envelope)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub picard_tol: f64,
    pub max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { picard_tol: 1e-10, max_iter: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSection {
    pub csv: Option<String>,
    pub report: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSection {
    /// Function of `t` and `z`.
    pub g: Expr,
    /// Integration order; defaults to `problem.alpha`.
    pub order: Option<f64>,
    pub scheme: QuadratureScheme,
    pub norm_c: f64,
    pub norm_p: f64,
    pub norm_gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma31Section {
    /// Fixed parameters; when absent every sample draws its own.
    pub zeta: Option<f64>,
    pub vartheta: Option<f64>,
    pub varpi: Option<f64>,
    pub samples: usize,
    pub z_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GrowthSpec {
    Linear,
    Power(f64),
    /// Expression in `x`.
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PachpatteSection {
    pub u0: f64,
    /// Functions of `t`.
    pub a_fn: Expr,
    pub b_fn: Expr,
    pub growth: GrowthSpec,
    pub t0: f64,
    pub t1: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub problem: Option<ProblemSection>,
    pub grid: Option<GridSection>,
    pub hypotheses: Option<HypothesesSection>,
    pub tolerances: Tolerances,
    pub output: OutputSection,
    pub operator: Option<OperatorSection>,
    pub lemma31: Option<Lemma31Section>,
    pub pachpatte: Option<PachpatteSection>,
}

const KEYS: &[(&str, &[&str])] = &[
    ("problem", &["alpha", "beta", "rho", "a", "b", "rhs"]),
    ("grid", &["nodes", "t_end", "grading"]),
    ("hypotheses", &["mu", "sigma", "m", "q", "phi", "t_trunc", "envelope", "t0"]),
    ("tolerances", &["picard_tol", "max_iter"]),
    ("output", &["csv", "report"]),
    ("operator", &["g", "order", "scheme", "norm_c", "norm_p", "norm_gamma"]),
    ("lemma31", &["zeta", "vartheta", "varpi", "samples", "z_max"]),
    ("pachpatte", &["u0", "a", "b", "growth", "t0", "t1", "points"]),
];

/// Right-hand sides available by name.
const CATALOG: &[(&str, &str)] = &[("zero", "0"), ("linear", "x"), ("quadratic", "x^2")];

struct Section<'a> {
    name: &'static str,
    entries: &'a BTreeMap<(String, String), (String, usize)>,
}

impl Section<'_> {
    fn present(&self) -> bool {
        self.entries.keys().any(|(s, _)| s == self.name)
    }

    fn raw(&self, key: &str) -> Option<(&str, usize)> {
        self.entries.get(&(self.name.to_string(), key.to_string())).map(|(v, l)| (v.as_str(), *l))
    }

    fn required(&self, key: &str) -> Result<(&str, usize), ConfigError> {
        self.raw(key)
            .ok_or_else(|| ConfigError { line: None, message: format!("missing {}.{key}", self.name) })
    }

    fn num_at(&self, key: &str, (v, line): (&str, usize)) -> Result<f64, ConfigError> {
        v.parse::<f64>().ok().filter(|x| !x.is_nan()).ok_or_else(|| ConfigError {
            line: Some(line),
            message: format!("{}.{key}: expected a number, got `{v}`", self.name),
        })
    }

    fn num(&self, key: &str) -> Result<f64, ConfigError> {
        self.num_at(key, self.required(key)?)
    }

    fn opt_num(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.raw(key).map(|r| self.num_at(key, r)).transpose()
    }

    fn int_at(&self, key: &str, (v, line): (&str, usize)) -> Result<usize, ConfigError> {
        v.parse::<usize>().map_err(|_| ConfigError {
            line: Some(line),
            message: format!("{}.{key}: expected a nonnegative integer, got `{v}`", self.name),
        })
    }

    fn int(&self, key: &str) -> Result<usize, ConfigError> {
        self.int_at(key, self.required(key)?)
    }

    fn opt_int(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.raw(key).map(|r| self.int_at(key, r)).transpose()
    }

    fn expr_at(&self, key: &str, (v, line): (&str, usize)) -> Result<Expr, ConfigError> {
        parse_expression(v)
            .map_err(|e| ConfigError { line: Some(line), message: format!("{}.{key}: {e}", self.name) })
    }

    fn expr(&self, key: &str) -> Result<Expr, ConfigError> {
        self.expr_at(key, self.required(key)?)
    }
}

fn strip_quotes(v: &str) -> &str {
    v.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(v)
}

/// Splits `name(a, b)` into the name and numeric arguments.
fn call_args(v: &str) -> Option<(&str, Vec<f64>)> {
    let open = v.find('(')?;
    let inner = v[open + 1..].strip_suffix(')')?;
    let args = inner.split(',').map(|s| s.trim().parse::<f64>().ok()).collect::<Option<Vec<_>>>()?;
    Some((v[..open].trim(), args))
}

fn parse_envelope(v: &str, line: usize) -> Result<Envelope, ConfigError> {
    match v {
        "none" => return Ok(Envelope::None),
        "vanishing" => return Ok(Envelope::Vanishing),
        _ => {}
    }
    match call_args(v) {
        Some(("exp", a)) if a.len() == 2 => Ok(Envelope::Exponential { scale: a[0], rate: a[1] }),
        Some(("power", a)) if a.len() == 2 => Ok(Envelope::Power { scale: a[0], exponent: a[1] }),
        _ => err(
            Some(line),
            format!("hypotheses.envelope: expected none, vanishing, exp(scale, rate) or power(scale, exponent), got `{v}`"),
        ),
    }
}

fn envelope_text(e: &Envelope) -> String {
    match e {
        Envelope::None => "none".into(),
        Envelope::Vanishing => "vanishing".into(),
        Envelope::Exponential { scale, rate } => format!("exp({scale:?}, {rate:?})"),
        Envelope::Power { scale, exponent } => format!("power({scale:?}, {exponent:?})"),
    }
}

fn constraint(line: Option<usize>, e: crate::Error) -> ConfigError {
    ConfigError { line, message: e.to_string() }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return err(Some(line), format!("expected `section.key = value`, got `{content}`"));
        };
        let key = key.trim();
        let value = strip_quotes(value.trim()).to_string();
        let Some((section, name)) = key.split_once('.') else {
            return err(Some(line), format!("key `{key}` has no section"));
        };
        let Some((_, known)) = KEYS.iter().find(|(s, _)| *s == section) else {
            return err(Some(line), format!("unknown section `{section}`"));
        };
        if !known.contains(&name) {
            return err(Some(line), format!("unknown key `{key}`"));
        }
        let slot = (section.to_string(), name.to_string());
        if let Some((_, first)) = entries.get(&slot) {
            return err(Some(line), format!("duplicate key `{key}` (first set on line {first})"));
        }
        entries.insert(slot, (value, line));
    }
    let section = |name: &'static str| Section { name, entries: &entries };
    let mut cfg = RunConfig::default();

    let s = section("problem");
    if s.present() {
        let (alpha, beta, rho) = (s.num("alpha")?, s.num("beta")?, s.num("rho")?);
        FracParams::new(alpha, beta, rho).map_err(|e| constraint(s.raw("alpha").map(|r| r.1), e))?;
        let a = s.num("a")?;
        if !(a > 0.0) {
            return err(s.raw("a").map(|r| r.1), format!("problem.a must be positive, got {a}"));
        }
        let b = s.num("b")?;
        if b == 0.0 || !b.is_finite() {
            return err(s.raw("b").map(|r| r.1), "problem.b must be a nonzero finite number");
        }
        let (rhs_src, rhs_line) = s.required("rhs")?;
        let rhs = match CATALOG.iter().find(|(n, _)| *n == rhs_src) {
            Some((_, src)) => parse_expression(src).expect("catalog entries parse"),
            None => s.expr_at("rhs", (rhs_src, rhs_line))?,
        };
        cfg.problem = Some(ProblemSection { alpha, beta, rho, a, b, rhs });
    }

    let s = section("grid");
    if s.present() {
        let nodes = s.int("nodes")?;
        if nodes < 3 {
            return err(s.raw("nodes").map(|r| r.1), format!("grid.nodes must be at least 3, got {nodes}"));
        }
        let t_end = s.num("t_end")?;
        let grading = s.opt_num("grading")?;
        if let Some(r) = grading {
            if !(r >= 1.0) {
                return err(s.raw("grading").map(|r| r.1), format!("grid.grading must be >= 1, got {r}"));
            }
        }
        if let Some(p) = &cfg.problem {
            if !(t_end > p.a) {
                return err(
                    s.raw("t_end").map(|r| r.1),
                    format!("grid.t_end must exceed problem.a = {}", p.a),
                );
            }
        }
        cfg.grid = Some(GridSection { nodes, t_end, grading });
    }

    let s = section("hypotheses");
    if s.present() {
        let m_raw = s.int("m")?;
        let h = HypothesesSection {
            mu: s.num("mu")?,
            sigma: s.num("sigma")?,
            m: u32::try_from(m_raw).unwrap_or(u32::MAX),
            q: s.num("q")?,
            phi: s.expr("phi")?,
            t_trunc: s.num("t_trunc")?,
            envelope: match s.raw("envelope") {
                Some((v, line)) => parse_envelope(v, line)?,
                None => Envelope::None,
            },
            t0: s.opt_num("t0")?,
        };
        if h.phi.variables().iter().any(|v| *v != crate::expr::Var::T) {
            return err(s.raw("phi").map(|r| r.1), "hypotheses.phi may only depend on t");
        }
        let hyp = Hypotheses::new(h.mu, h.sigma, h.m, h.q, |_| 0.0)
            .map_err(|e| constraint(s.raw("q").map(|r| r.1), e))?;
        let Some(p) = &cfg.problem else {
            return err(None, "the hypotheses section needs a problem section");
        };
        hyp.validate(&p.params()).map_err(|e| constraint(s.raw("q").map(|r| r.1), e))?;
        if !(h.t_trunc > p.a) {
            return err(s.raw("t_trunc").map(|r| r.1), "hypotheses.t_trunc must exceed problem.a");
        }
        cfg.hypotheses = Some(h);
    }

    let s = section("tolerances");
    if let Some(tol) = s.opt_num("picard_tol")? {
        if !(tol > 0.0) {
            return err(s.raw("picard_tol").map(|r| r.1), "tolerances.picard_tol must be positive");
        }
        cfg.tolerances.picard_tol = tol;
    }
    if let Some(n) = s.opt_int("max_iter")? {
        if n == 0 {
            return err(s.raw("max_iter").map(|r| r.1), "tolerances.max_iter must be at least 1");
        }
        cfg.tolerances.max_iter = n;
    }

    let s = section("output");
    cfg.output.csv = s.raw("csv").map(|r| r.0.to_string());
    cfg.output.report = s.raw("report").map(|r| r.0.to_string());

    let s = section("operator");
    if s.present() {
        let scheme = match s.raw("scheme") {
            None | Some(("trapezoid", _)) => QuadratureScheme::ProductTrapezoid,
            Some(("rectangle", _)) => QuadratureScheme::ProductRectangle,
            Some((v, line)) => {
                return err(
                    Some(line),
                    format!("operator.scheme: expected trapezoid or rectangle, got `{v}`"),
                );
            }
        };
        let g = s.expr("g")?;
        if g.variables().contains(&crate::expr::Var::X) {
            return err(s.raw("g").map(|r| r.1), "operator.g may only depend on t and z");
        }
        cfg.operator = Some(OperatorSection {
            g,
            order: s.opt_num("order")?,
            scheme,
            norm_c: s.opt_num("norm_c")?.unwrap_or(1.0),
            norm_p: s.opt_num("norm_p")?.unwrap_or(2.0),
            norm_gamma: s.opt_num("norm_gamma")?.unwrap_or(0.0),
        });
    }

    let s = section("lemma31");
    if s.present() {
        let l = Lemma31Section {
            zeta: s.opt_num("zeta")?,
            vartheta: s.opt_num("vartheta")?,
            varpi: s.opt_num("varpi")?,
            samples: s.opt_int("samples")?.unwrap_or(1000),
            z_max: s.opt_num("z_max")?.unwrap_or(50.0),
        };
        for (k, v) in [("zeta", l.zeta), ("vartheta", l.vartheta), ("varpi", l.varpi)] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return err(s.raw(k).map(|r| r.1), format!("lemma31.{k} must be positive, got {v}"));
                }
            }
        }
        cfg.lemma31 = Some(l);
    }

    let s = section("pachpatte");
    if s.present() {
        let growth = match s.required("growth")? {
            ("linear", _) => GrowthSpec::Linear,
            (v, line) => match call_args(v) {
                Some(("power", a)) if a.len() == 1 => {
                    if !(a[0] > 1.0) {
                        return err(Some(line), "pachpatte.growth: power(m) needs m > 1");
                    }
                    GrowthSpec::Power(a[0])
                }
                _ => GrowthSpec::Expr(s.expr_at("growth", (v, line))?),
            },
        };
        let p = PachpatteSection {
            u0: s.num("u0")?,
            a_fn: s.expr("a")?,
            b_fn: s.expr("b")?,
            growth,
            t0: s.num("t0")?,
            t1: s.num("t1")?,
            points: s.opt_int("points")?.unwrap_or(101),
        };
        if !(p.u0 > 0.0) {
            return err(s.raw("u0").map(|r| r.1), "pachpatte.u0 must be positive");
        }
        if !(p.t1 > p.t0) || p.points < 2 {
            return err(s.raw("t1").map(|r| r.1), "pachpatte needs t1 > t0 and at least 2 points");
        }
        cfg.pachpatte = Some(p);
    }
    Ok(cfg)
}

/// Text that [`parse_config`] reads back into an equal configuration.
pub fn serialize_config(cfg: &RunConfig) -> String {
    let mut out = String::new();
    let mut put = |key: &str, value: String| {
        let _ = writeln!(out, "{key} = {value}");
    };
    if let Some(p) = &cfg.problem {
        put("problem.alpha", format!("{:?}", p.alpha));
        put("problem.beta", format!("{:?}", p.beta));
        put("problem.rho", format!("{:?}", p.rho));
        put("problem.a", format!("{:?}", p.a));
        put("problem.b", format!("{:?}", p.b));
        put("problem.rhs", p.rhs.to_string());
    }
    if let Some(g) = &cfg.grid {
        put("grid.nodes", g.nodes.to_string());
        put("grid.t_end", format!("{:?}", g.t_end));
        if let Some(r) = g.grading {
            put("grid.grading", format!("{r:?}"));
        }
    }
    if let Some(h) = &cfg.hypotheses {
        put("hypotheses.mu", format!("{:?}", h.mu));
        put("hypotheses.sigma", format!("{:?}", h.sigma));
        put("hypotheses.m", h.m.to_string());
        put("hypotheses.q", format!("{:?}", h.q));
        put("hypotheses.phi", h.phi.to_string());
        put("hypotheses.t_trunc", format!("{:?}", h.t_trunc));
        put("hypotheses.envelope", envelope_text(&h.envelope));
        if let Some(t0) = h.t0 {
            put("hypotheses.t0", format!("{t0:?}"));
        }
    }
    put("tolerances.picard_tol", format!("{:?}", cfg.tolerances.picard_tol));
    put("tolerances.max_iter", cfg.tolerances.max_iter.to_string());
    if let Some(c) = &cfg.output.csv {
        put("output.csv", c.clone());
    }
    if let Some(r) = &cfg.output.report {
        put("output.report", r.clone());
    }
    if let Some(o) = &cfg.operator {
        put("operator.g", o.g.to_string());
        if let Some(order) = o.order {
            put("operator.order", format!("{order:?}"));
        }
        let scheme = match o.scheme {
            QuadratureScheme::ProductTrapezoid => "trapezoid",
            QuadratureScheme::ProductRectangle => "rectangle",
        };
        put("operator.scheme", scheme.into());
        put("operator.norm_c", format!("{:?}", o.norm_c));
        put("operator.norm_p", format!("{:?}", o.norm_p));
        put("operator.norm_gamma", format!("{:?}", o.norm_gamma));
    }
    if let Some(l) = &cfg.lemma31 {
        for (k, v) in [("zeta", l.zeta), ("vartheta", l.vartheta), ("varpi", l.varpi)] {
            if let Some(v) = v {
                put(&format!("lemma31.{k}"), format!("{v:?}"));
            }
        }
        put("lemma31.samples", l.samples.to_string());
        put("lemma31.z_max", format!("{:?}", l.z_max));
    }
    if let Some(p) = &cfg.pachpatte {
        put("pachpatte.u0", format!("{:?}", p.u0));
        put("pachpatte.a", p.a_fn.to_string());
        put("pachpatte.b", p.b_fn.to_string());
        let growth = match &p.growth {
            GrowthSpec::Linear => "linear".to_string(),
            GrowthSpec::Power(m) => format!("power({m:?})"),
            GrowthSpec::Expr(e) => e.to_string(),
        };
        put("pachpatte.growth", growth);
        put("pachpatte.t0", format!("{:?}", p.t0));
        put("pachpatte.t1", format!("{:?}", p.t1));
        put("pachpatte.points", p.points.to_string());
    }
    out
}
