//! A small expression language for right-hand sides and weight functions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 't' | 'x' | 'z' | 'pi' | 'e' | func '(' args ')' | '(' expr ')'
//! func   := exp | log | abs | pow
//! ```
//!
//! `^` binds tighter than unary minus and associates to the right, so
//! `-2^2 = -4` and `2^3^2 = 512`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    T,
    Z,
    X,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Abs,
    Pow,
}

impl Func {
    fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Pow => "pow",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Nonnegative literal; signs are [`Expr::Neg`] nodes.
    Num(f64),
    Var(Var),
    Const(Constant),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("column {column}: {message}")]
pub struct ParseError {
    /// 1-based.
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("evaluating `{at}`: {message}")]
pub struct EvalError {
    pub at: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub t: f64,
    pub z: f64,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // An exponent needs digits after it, otherwise `e` is the constant.
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v: f64 = text
                .parse()
                .map_err(|_| ParseError { column: col, message: format!("malformed number `{text}`") })?;
            out.push((Tok::Num(v), col));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                _ => {
                    return Err(ParseError { column: col, message: format!("unexpected character `{c}`") });
                }
            };
            out.push((tok, col));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { column: self.col(), message: message.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Op('-')) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Op('^')) {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let func = match name.as_str() {
                    "t" => return Ok(Expr::Var(Var::T)),
                    "z" => return Ok(Expr::Var(Var::Z)),
                    "x" => return Ok(Expr::Var(Var::X)),
                    "pi" => return Ok(Expr::Const(Constant::Pi)),
                    "e" => return Ok(Expr::Const(Constant::E)),
                    "exp" => Func::Exp,
                    "log" => Func::Log,
                    "abs" => Func::Abs,
                    "pow" => Func::Pow,
                    _ => {
                        return Err(ParseError {
                            column: col,
                            message: format!("unknown identifier `{name}`"),
                        });
                    }
                };
                self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
                let mut args = vec![self.expr()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    args.push(self.expr()?);
                }
                self.expect(Tok::RParen, "`)`")?;
                if args.len() != func.arity() {
                    return Err(ParseError {
                        column: col,
                        message: format!("`{name}` takes {} argument(s), got {}", func.arity(), args.len()),
                    });
                }
                Ok(Expr::Call(func, args))
            }
            Some(_) => self.err("expected a number, variable, function or `(`"),
            None => self.err("unexpected end of expression"),
        }
    }
}

pub fn parse_expression(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end_col: src.chars().count() + 1 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

impl fmt::Display for Expr {
    /// Fully parenthesised, so printing and reparsing gives the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(Var::T) => f.write_str("t"),
            Expr::Var(Var::Z) => f.write_str("z"),
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Const(Constant::Pi) => f.write_str("pi"),
            Expr::Const(Constant::E) => f.write_str("e"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, l, r) => {
                let c = match op {
                    BinOp::Add => '+',
                    BinOp::Sub => '-',
                    BinOp::Mul => '*',
                    BinOp::Div => '/',
                    BinOp::Pow => '^',
                };
                write!(f, "({l} {c} {r})")
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl Expr {
    pub fn eval(&self, p: Point) -> Result<f64, EvalError> {
        let fail = |message: String| Err(EvalError { at: self.to_string(), message });
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::T) => p.t,
            Expr::Var(Var::Z) => p.z,
            Expr::Var(Var::X) => p.x,
            Expr::Const(Constant::Pi) => std::f64::consts::PI,
            Expr::Const(Constant::E) => std::f64::consts::E,
            Expr::Neg(e) => -e.eval(p)?,
            Expr::Bin(op, l, r) => {
                let (a, b) = (l.eval(p)?, r.eval(p)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return fail("division by zero".into());
                        }
                        a / b
                    }
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(func, args) => {
                let a = args[0].eval(p)?;
                match func {
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if !(a > 0.0) {
                            return fail(format!("log of non-positive value {a}"));
                        }
                        a.ln()
                    }
                    Func::Abs => a.abs(),
                    Func::Pow => a.powf(args[1].eval(p)?),
                }
            }
        };
        if v.is_nan() {
            return fail("result is not a number".into());
        }
        Ok(v)
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Var(v) => {
                out.insert(*v);
            }
            Expr::Neg(e) => e.collect_vars(out),
            Expr::Bin(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Expr::Num(_) | Expr::Const(_) => {}
        }
    }

    /// Right-hand side `(t, z, x) ↦ value` for the solver.
    pub fn to_rhs(&self) -> crate::params::RhsFn {
        let e = Arc::new(self.clone());
        Arc::new(move |t, z, x| e.eval(Point { t, z, x }).map_err(|err| err.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, t: f64, z: f64, x: f64) -> f64 {
        parse_expression(src).unwrap().eval(Point { t, z, x }).unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(eval("2^3^2", 0.0, 0.0, 0.0), 512.0);
        assert_eq!(eval("-2^2", 0.0, 0.0, 0.0), -4.0);
        assert_eq!(eval("2^-1", 0.0, 0.0, 0.0), 0.5);
        assert_eq!(eval("1 - 2 - 3", 0.0, 0.0, 0.0), -4.0);
        assert_eq!(eval("8 / 4 / 2", 0.0, 0.0, 0.0), 1.0);
        assert_eq!(eval("1 + 2 * 3", 0.0, 0.0, 0.0), 7.0);
        assert_eq!(eval("exp(-z)*x^2", 0.0, 0.0, 3.0), 9.0);
        assert_eq!(eval("pow(2, 10) + abs(-1)", 0.0, 0.0, 0.0), 1025.0);
        assert_eq!(eval("2e-1 * e", 0.0, 0.0, 0.0), 0.2 * std::f64::consts::E);
        assert_eq!(eval("2*e", 0.0, 0.0, 0.0), 2.0 * std::f64::consts::E);
    }

    #[test]
    fn variables_and_nodes() {
        assert_eq!(parse_expression("t").unwrap(), Expr::Var(Var::T));
        let e = parse_expression("0.1*z^0.5*exp(-z)*x^2").unwrap();
        assert_eq!(e.variables(), [Var::Z, Var::X].into_iter().collect());
    }

    #[test]
    fn errors_carry_columns() {
        let err = parse_expression("1 + foo(2)").unwrap_err();
        assert_eq!(err.column, 5);
        assert!(err.message.contains("unknown identifier `foo`"));
        assert_eq!(parse_expression("(1 + 2").unwrap_err().column, 7);
        assert_eq!(parse_expression("1 $ 2").unwrap_err().column, 3);
        assert!(parse_expression("pow(1)").is_err());
        assert!(parse_expression("").is_err());
        let e = parse_expression("log(x - 1)").unwrap();
        let err = e.eval(Point { t: 0.0, z: 0.0, x: 1.0 }).unwrap_err();
        assert_eq!(err.at, "log((x - 1.0))");
    }

    #[test]
    fn print_round_trip() {
        for src in ["-2^-x", "1e-300 + t*z", "pow(x, -0.5) / (1 - e)", "exp(log(abs(t)))"] {
            let e = parse_expression(src).unwrap();
            assert_eq!(parse_expression(&e.to_string()).unwrap(), e, "{src}");
        }
    }
}
