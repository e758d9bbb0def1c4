//! Growth functions `f: ℕ → ℝ` written as small expressions in `n`.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := power (('*' | '/') power)*
//! power := unary ('^' power)?
//! unary := '-' unary | atom
//! atom  := number | 'n' | '(' expr ')' | name '(' expr (',' expr)* ')'
//! name  := max | min | log | sqrt
//! ```
//!
//! `log` is the natural logarithm.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Expr {
    Num(f64),
    N,
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Max,
    Min,
    Log,
    Sqrt,
}

impl Expr {
    fn eval(&self, n: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::N => n,
            Expr::Neg(e) => -e.eval(n),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(n), b.eval(n));
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    '/' => a / b,
                    _ => a.powf(b),
                }
            }
            Expr::Call(f, args) => {
                let v: Vec<f64> = args.iter().map(|a| a.eval(n)).collect();
                match f {
                    Func::Max => v.into_iter().fold(f64::NEG_INFINITY, f64::max),
                    Func::Min => v.into_iter().fold(f64::INFINITY, f64::min),
                    Func::Log => v[0].ln(),
                    Func::Sqrt => v[0].sqrt(),
                }
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("growth function at offset {}: {msg}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) {
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_digit() || *c == b'.')
        {
            self.pos += 1;
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            lhs = Expr::Bin(c as char, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.power()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            lhs = Expr::Bin(c as char, Box::new(lhs), Box::new(self.power()?));
        }
        Ok(lhs)
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if self.eat(b'^') {
            return Ok(Expr::Bin('^', Box::new(base), Box::new(self.power()?)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                self.digits();
                if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
                    let mut q = self.pos + 1;
                    if matches!(self.src.get(q), Some(b'-' | b'+')) {
                        q += 1;
                    }
                    if self.src.get(q).is_some_and(u8::is_ascii_digit) {
                        self.pos = q;
                        self.digits();
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                text.parse()
                    .map(Expr::Num)
                    .map_err(|_| self.err(&format!("bad number {text:?}")))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                if name == "n" {
                    return Ok(Expr::N);
                }
                let func = match name {
                    "max" => Func::Max,
                    "min" => Func::Min,
                    "log" | "ln" => Func::Log,
                    "sqrt" => Func::Sqrt,
                    _ => return Err(self.err(&format!("unknown name {name:?}"))),
                };
                if !self.eat(b'(') {
                    return Err(self.err("expected '(' after function name"));
                }
                let mut args = vec![self.expr()?];
                while self.eat(b',') {
                    args.push(self.expr()?);
                }
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                let arity_ok = match func {
                    Func::Max | Func::Min => !args.is_empty(),
                    Func::Log | Func::Sqrt => args.len() == 1,
                };
                if !arity_ok {
                    return Err(self.err(&format!("wrong number of arguments to {name}")));
                }
                Ok(Expr::Call(func, args))
            }
            _ => Err(self.err("expected a number, 'n', '(' or a function")),
        }
    }
}

/// A parsed growth function. Serializes as its source text.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthFunction {
    source: String,
    expr: Expr,
}

impl GrowthFunction {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
        };
        let expr = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(GrowthFunction {
            source: src.trim().to_string(),
            expr,
        })
    }

    pub fn constant(c: f64) -> Self {
        GrowthFunction {
            source: format!("{c}"),
            expr: Expr::Num(c),
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, n: u64) -> f64 {
        self.expr.eval(n as f64)
    }

    /// `f(1), …, f(horizon)`.
    pub fn values(&self, horizon: u64) -> Vec<f64> {
        (1..=horizon).map(|n| self.eval(n)).collect()
    }

    /// A warning when `f` shows no sign of tending to infinity within the
    /// horizon: its running maximum stops growing over the second half.
    pub fn divergence_warning(&self, horizon: u64) -> Option<String> {
        let v = self.values(horizon);
        if v.iter().any(|x| !x.is_finite()) {
            return Some(format!("f = {} is not finite on [1, {horizon}]", self.source));
        }
        let half = v.len() / 2;
        let first = v[..half.max(1)].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let last = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (last <= first).then(|| {
            format!(
                "f = {} does not grow over the second half of the horizon {horizon}; lim f = ∞ is not supported",
                self.source
            )
        })
    }
}

impl fmt::Display for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl FromStr for GrowthFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GrowthFunction::parse(s)
    }
}

impl Serialize for GrowthFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for GrowthFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        GrowthFunction::parse(&s).map_err(serde::de::Error::custom)
    }
}
