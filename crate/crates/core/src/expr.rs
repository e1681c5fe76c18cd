//! Stem expressions such as `(sinh(x)*cos(y) + iota*sinh(x)*sin(y), iota*y)`.
//!
//! Grammar (lowest to highest precedence): `+ -`, `* /`, unary `-`, `^`
//! (right associative). A top-level parenthesized, comma-separated list is a
//! tuple of components. Identifiers are `x`, `y`, `iota`, `pi`, `z` (short
//! for `x + iota*y`) and the functions `sin cos sinh cosh exp log sqrt conj`.
//! Evaluation carries the partial derivatives in `x` and `y` along, so stems
//! built from expressions have exact partials.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::stem::{StemFunction, StemPartials, SymmetricDomain};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    Iota,
    Pi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Log,
    Sqrt,
    Conj,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "conj" => Func::Conj,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Conj => "conj",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// A parsed stem: one expression per component.
#[derive(Debug, Clone, PartialEq)]
pub struct StemExpr {
    pub components: Vec<Expr>,
}

pub fn parse_stem_expr(text: &str) -> Result<StemExpr> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0 };
    p.stem()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = (line, column);
        let push = |out: &mut Vec<Token>, tok| {
            out.push(Token {
                tok,
                line: start.0,
                column: start.1,
            })
        };
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
        } else if c.is_whitespace() {
            column += 1;
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                j += 1;
            }
            if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                let mut k = j + 1;
                if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                    k += 1;
                }
                if k < chars.len() && chars[k].is_ascii_digit() {
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                    j = k;
                }
            }
            let lit: String = chars[i..j].iter().collect();
            let value: f64 = lit.parse().map_err(|_| Error::Parse {
                line,
                column,
                message: format!("malformed number `{lit}`"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line,
                    column,
                    message: format!("number `{lit}` is out of range"),
                });
            }
            push(&mut out, Tok::Num(value));
            column += j - i;
            i = j;
        } else if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            push(&mut out, Tok::Ident(chars[i..j].iter().collect()));
            column += j - i;
            i = j;
        } else if "+-*/^(),".contains(c) {
            push(&mut out, Tok::Op(c));
            column += 1;
            i += 1;
        } else {
            return Err(Error::Parse {
                line,
                column,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = &self.tokens[self.pos];
        Err(Error::Parse {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn unexpected<T>(&self) -> Result<T> {
        match self.peek() {
            Tok::Eof => self.error("unexpected end of input"),
            Tok::Num(v) => self.error(format!("unexpected number `{v}`")),
            Tok::Ident(s) => self.error(format!("unexpected identifier `{s}`")),
            Tok::Op(c) => self.error(format!("unexpected `{c}`")),
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Op(c) {
            self.advance();
            Ok(())
        } else {
            match self.peek() {
                Tok::Eof => self.error(format!("expected `{c}` before end of input")),
                _ => self.error(format!("expected `{c}`")),
            }
        }
    }

    fn expect_end(&self) -> Result<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            Tok::Op(')') => self.error("unbalanced `)`"),
            _ => self.unexpected(),
        }
    }

    fn stem(&mut self) -> Result<StemExpr> {
        if *self.peek() == Tok::Op('(') {
            let start = self.pos;
            self.advance();
            let first = self.expr()?;
            if *self.peek() == Tok::Op(',') {
                let mut components = vec![first];
                while *self.peek() == Tok::Op(',') {
                    self.advance();
                    components.push(self.expr()?);
                }
                self.expect(')')?;
                self.expect_end()?;
                return Ok(StemExpr { components });
            }
            self.pos = start;
        }
        let e = self.expr()?;
        self.expect_end()?;
        Ok(StemExpr { components: vec![e] })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Op('-') => {
                self.advance();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Op('+') => {
                self.advance();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if *self.peek() == Tok::Op('^') {
            self.advance();
            let exponent = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.advance();
                Ok(Expr::Num(v))
            }
            Tok::Op('(') => {
                self.advance();
                let e = self.expr()?;
                if *self.peek() == Tok::Op(',') {
                    return self.error("tuples are only allowed at the top level");
                }
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let here = self.pos;
                self.advance();
                match name.as_str() {
                    "x" => Ok(Expr::Var(Var::X)),
                    "y" => Ok(Expr::Var(Var::Y)),
                    "iota" => Ok(Expr::Var(Var::Iota)),
                    "pi" => Ok(Expr::Var(Var::Pi)),
                    "z" => Ok(z_expr()),
                    _ => match Func::from_name(&name) {
                        Some(f) => self.call(f, &name),
                        None => {
                            self.pos = here;
                            self.error(format!("unknown identifier `{name}`"))
                        }
                    },
                }
            }
            _ => self.unexpected(),
        }
    }

    fn call(&mut self, f: Func, name: &str) -> Result<Expr> {
        self.expect('(')?;
        let mut args = vec![self.expr()?];
        while *self.peek() == Tok::Op(',') {
            self.advance();
            args.push(self.expr()?);
        }
        if args.len() != 1 {
            return self.error(format!("`{name}` takes 1 argument, got {}", args.len()));
        }
        self.expect(')')?;
        Ok(Expr::Call(f, Box::new(args.pop().expect("one argument"))))
    }
}

fn z_expr() -> Expr {
    Expr::Bin(
        BinOp::Add,
        Box::new(Expr::Var(Var::X)),
        Box::new(Expr::Bin(
            BinOp::Mul,
            Box::new(Expr::Var(Var::Iota)),
            Box::new(Expr::Var(Var::Y)),
        )),
    )
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Bin(BinOp::Pow, ..) => 4,
        _ => 5,
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    let wrap = precedence(e) < min_prec;
    if wrap {
        write!(f, "(")?;
    }
    match e {
        Expr::Num(v) => write!(f, "{v}")?,
        Expr::Var(v) => write!(
            f,
            "{}",
            match v {
                Var::X => "x",
                Var::Y => "y",
                Var::Iota => "iota",
                Var::Pi => "pi",
            }
        )?,
        Expr::Neg(inner) => {
            write!(f, "-")?;
            write_expr(f, inner, 3)?;
        }
        Expr::Bin(op, l, r) => {
            let (sym, lp, rp) = match op {
                BinOp::Add => (" + ", 1, 2),
                BinOp::Sub => (" - ", 1, 2),
                BinOp::Mul => ("*", 2, 3),
                BinOp::Div => ("/", 2, 3),
                BinOp::Pow => ("^", 5, 3),
            };
            write_expr(f, l, lp)?;
            write!(f, "{sym}")?;
            write_expr(f, r, rp)?;
        }
        Expr::Call(func, arg) => {
            write!(f, "{}(", func.name())?;
            write_expr(f, arg, 0)?;
            write!(f, ")")?;
        }
    }
    if wrap {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, 0)
    }
}

impl fmt::Display for StemExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.len() == 1 {
            return write!(f, "{}", self.components[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A value with its partial derivatives in `x` and `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: Complex64,
    pub dx: Complex64,
    pub dy: Complex64,
}

impl Dual {
    fn constant(v: Complex64) -> Self {
        Dual {
            v,
            dx: Complex64::new(0.0, 0.0),
            dy: Complex64::new(0.0, 0.0),
        }
    }

    /// Applies a holomorphic `f` with derivative `df`.
    fn chain(self, f: Complex64, df: Complex64) -> Self {
        Dual {
            v: f,
            dx: df * self.dx,
            dy: df * self.dy,
        }
    }

    fn powi(self, n: i32) -> Self {
        let d = if n == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.v.powi(n - 1) * n as f64
        };
        self.chain(self.v.powi(n), d)
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual {
            v: self.v + o.v,
            dx: self.dx + o.dx,
            dy: self.dy + o.dy,
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        self + (-o)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            v: -self.v,
            dx: -self.dx,
            dy: -self.dy,
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual {
            v: self.v * o.v,
            dx: self.dx * o.v + self.v * o.dx,
            dy: self.dy * o.v + self.v * o.dy,
        }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let inv = o.v.inv();
        let inv2 = inv * inv;
        Dual {
            v: self.v * inv,
            dx: self.dx * inv - self.v * o.dx * inv2,
            dy: self.dy * inv - self.v * o.dy * inv2,
        }
    }
}

impl Expr {
    pub fn eval(&self, x: f64, y: f64) -> Dual {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match self {
            Expr::Num(v) => Dual::constant(Complex64::new(*v, 0.0)),
            Expr::Var(Var::X) => Dual {
                v: Complex64::new(x, 0.0),
                dx: one,
                dy: zero,
            },
            Expr::Var(Var::Y) => Dual {
                v: Complex64::new(y, 0.0),
                dx: zero,
                dy: one,
            },
            Expr::Var(Var::Iota) => Dual::constant(Complex64::i()),
            Expr::Var(Var::Pi) => Dual::constant(Complex64::new(std::f64::consts::PI, 0.0)),
            Expr::Neg(e) => -e.eval(x, y),
            Expr::Bin(op, l, r) => {
                let a = l.eval(x, y);
                let b = r.eval(x, y);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => pow(a, b),
                }
            }
            Expr::Call(f, e) => {
                let a = e.eval(x, y);
                let v = a.v;
                match f {
                    Func::Sin => a.chain(v.sin(), v.cos()),
                    Func::Cos => a.chain(v.cos(), -v.sin()),
                    Func::Sinh => a.chain(v.sinh(), v.cosh()),
                    Func::Cosh => a.chain(v.cosh(), v.sinh()),
                    Func::Exp => {
                        let e = v.exp();
                        a.chain(e, e)
                    }
                    Func::Log => a.chain(v.ln(), v.inv()),
                    Func::Sqrt => {
                        let s = v.sqrt();
                        a.chain(s, (s * 2.0).inv())
                    }
                    Func::Conj => Dual {
                        v: v.conj(),
                        dx: a.dx.conj(),
                        dy: a.dy.conj(),
                    },
                }
            }
        }
    }
}

fn pow(a: Dual, b: Dual) -> Dual {
    let constant = b.dx == Complex64::new(0.0, 0.0) && b.dy == Complex64::new(0.0, 0.0);
    if constant && b.v.im == 0.0 && b.v.re.fract() == 0.0 && b.v.re.abs() <= i32::MAX as f64 {
        return a.powi(b.v.re as i32);
    }
    let l = a.v.ln();
    let v = (b.v * l).exp();
    let dl = a.v.inv();
    Dual {
        v,
        dx: v * (b.dx * l + b.v * dl * a.dx),
        dy: v * (b.dy * l + b.v * dl * a.dy),
    }
}

impl StemExpr {
    pub fn arity(&self) -> usize {
        self.components.len()
    }

    /// Component values `F₁ + ιF₂` at `(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> Vec<Complex64> {
        self.components.iter().map(|c| c.eval(x, y).v).collect()
    }

    pub fn eval_dual(&self, x: f64, y: f64) -> Vec<Dual> {
        self.components.iter().map(|c| c.eval(x, y)).collect()
    }

    /// A real-target stem on the whole plane with exact partials.
    pub fn to_stem(&self, name: &str) -> StemFunction {
        let values = self.clone();
        let partials = self.clone();
        StemFunction::real(name.trim(), self.arity(), SymmetricDomain::plane(), move |x, y| {
            let v = values.eval(x, y);
            (v.iter().map(|c| c.re).collect(), v.iter().map(|c| c.im).collect())
        })
        .with_partials(move |x, y| {
            let d = partials.eval_dual(x, y);
            let part = |f: fn(&Dual) -> f64| d.iter().map(f).collect::<Vec<f64>>();
            StemPartials::real(
                &part(|d| d.dx.re),
                &part(|d| d.dy.re),
                &part(|d| d.dx.im),
                &part(|d| d.dy.im),
            )
        })
    }
}
