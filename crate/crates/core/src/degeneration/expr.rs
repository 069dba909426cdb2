//! Arithmetic expressions in one real parameter.
//!
//! Grammar:
//!
//! ```text
//! expr  = term (("+" | "-") term)*
//! term  = unary (("*" | "/") unary)*
//! unary = ("-" | "+") unary | power
//! power = atom ("^" unary)?
//! atom  = number ["i"] | "i" | var | func "(" expr ")" | "(" expr ")"
//! func  = "sqrt" | "exp" | "log"
//! ```

use std::fmt;

use num_complex::Complex64;

use crate::polycore::ParseError;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Complex64),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Log,
}

impl Expr {
    /// Parses `s`, accepting only the listed variable names.
    pub fn parse(s: &str, vars: &[&str]) -> Result<Expr, ParseError> {
        let mut p = Parser {
            s: s.as_bytes(),
            pos: 0,
            vars,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.s.len() {
            return Err(ParseError::new(
                p.pos,
                format!("unexpected {:?}", p.s[p.pos] as char),
            ));
        }
        Ok(e)
    }

    /// Evaluates with variables bound by `lookup`.
    pub fn eval(&self, lookup: &dyn Fn(&str) -> Complex64) -> Complex64 {
        match self {
            Expr::Num(c) => *c,
            Expr::Var(v) => lookup(v),
            Expr::Neg(a) => -a.eval(lookup),
            Expr::Add(a, b) => a.eval(lookup) + b.eval(lookup),
            Expr::Sub(a, b) => a.eval(lookup) - b.eval(lookup),
            Expr::Mul(a, b) => a.eval(lookup) * b.eval(lookup),
            Expr::Div(a, b) => a.eval(lookup) / b.eval(lookup),
            Expr::Pow(a, b) => pow(a.eval(lookup), b.eval(lookup)),
            Expr::Call(f, a) => {
                let x = a.eval(lookup);
                match f {
                    Func::Sqrt => x.sqrt(),
                    Func::Exp => x.exp(),
                    Func::Log => x.ln(),
                }
            }
        }
    }

    /// Evaluates with the single variable `name` set to `value`.
    pub fn eval_at(&self, name: &str, value: f64) -> Complex64 {
        let v = Complex64::new(value, 0.0);
        self.eval(&|n: &str| {
            if n == name {
                v
            } else {
                Complex64::new(f64::NAN, 0.0)
            }
        })
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Var(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }
}

/// Integer powers are computed by repeated multiplication, so `t^2` is exact
/// for negative `t`.
fn pow(a: Complex64, b: Complex64) -> Complex64 {
    if b.im == 0.0 && b.re.fract() == 0.0 && b.re.abs() <= 1024.0 {
        a.powi(b.re as i32)
    } else {
        a.powc(b)
    }
}

fn fmt_num(c: Complex64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.im == 0.0 {
        write!(f, "{:?}", c.re)
    } else if c.re == 0.0 {
        write!(f, "{:?}i", c.im)
    } else {
        write!(f, "({:?}{:+?}i)", c.re, c.im)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => fmt_num(*c, f),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a}+{b})"),
            Expr::Sub(a, b) => write!(f, "({a}-{b})"),
            Expr::Mul(a, b) => write!(f, "({a}*{b})"),
            Expr::Div(a, b) => write!(f, "({a}/{b})"),
            Expr::Pow(a, b) => write!(f, "({a}^{b})"),
            Expr::Call(func, a) => {
                let name = match func {
                    Func::Sqrt => "sqrt",
                    Func::Exp => "exp",
                    Func::Log => "log",
                };
                write!(f, "{name}({a})")
            }
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == b'+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if c == b'*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let start = match self.peek() {
            None => return Err(ParseError::new(self.pos, "unexpected end of expression")),
            Some(_) => self.pos,
        };
        let c = self.s[start];
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            if self.peek() != Some(b')') {
                return Err(ParseError::new(self.pos, "expected ')'"));
            }
            self.pos += 1;
            return Ok(e);
        }
        if c.is_ascii_digit() || c == b'.' {
            let x = self.number()?;
            if self.s.get(self.pos) == Some(&b'i') && !self.ident_continues(self.pos + 1) {
                self.pos += 1;
                return Ok(Expr::Num(Complex64::new(0.0, x)));
            }
            return Ok(Expr::Num(Complex64::new(x, 0.0)));
        }
        if c.is_ascii_alphabetic() {
            let mut end = start;
            while end < self.s.len() && (self.s[end].is_ascii_alphanumeric() || self.s[end] == b'_') {
                end += 1;
            }
            let name = std::str::from_utf8(&self.s[start..end]).expect("ascii");
            self.pos = end;
            let func = match name {
                "sqrt" => Some(Func::Sqrt),
                "exp" => Some(Func::Exp),
                "log" => Some(Func::Log),
                _ => None,
            };
            if let Some(func) = func {
                if self.peek() != Some(b'(') {
                    return Err(ParseError::new(self.pos, format!("expected '(' after {name}")));
                }
                self.pos += 1;
                let arg = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(ParseError::new(self.pos, "expected ')'"));
                }
                self.pos += 1;
                return Ok(Expr::Call(func, Box::new(arg)));
            }
            if name == "i" {
                return Ok(Expr::Num(Complex64::new(0.0, 1.0)));
            }
            if self.vars.contains(&name) {
                return Ok(Expr::Var(name.to_string()));
            }
            return Err(ParseError::new(start, format!("unknown name {name:?}")));
        }
        Err(ParseError::new(start, format!("unexpected {:?}", c as char)))
    }

    fn ident_continues(&self, at: usize) -> bool {
        self.s
            .get(at)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let start = self.pos;
        let s = self.s;
        let mut i = start;
        while i < s.len() && (s[i].is_ascii_digit() || s[i] == b'.') {
            i += 1;
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut k = i + 1;
            if k < s.len() && (s[k] == b'+' || s[k] == b'-') {
                k += 1;
            }
            if k < s.len() && s[k].is_ascii_digit() {
                while k < s.len() && s[k].is_ascii_digit() {
                    k += 1;
                }
                i = k;
            }
        }
        let text = std::str::from_utf8(&s[start..i]).expect("ascii");
        self.pos = i;
        text.parse::<f64>()
            .map_err(|_| ParseError::new(start, format!("malformed number {text:?}")))
    }
}
