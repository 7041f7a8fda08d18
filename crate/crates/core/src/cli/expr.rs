//! Expression DSL.
//!
//! ```text
//! expr   := tterm (('+' | '-') tterm)*
//! tterm  := term ['(*)' term]
//! term   := unary ('*' unary | '/' int)*
//! unary  := '-' unary | atom
//! atom   := int ['/' int] | ident tick* | ident '^(' int ')' | 'L' ['^' ['-'] int] | '(' expr ')'
//! ```
//!
//! `L` stands for λ and cannot name a generator. A name that is neither a generator nor a
//! `let` binding and equals `c` is the central pencil parameter.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linear::{DiffRing, Module, Q};
use crate::ncpoly::NcPoly;
use crate::tensoralg::Tensor2;

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(Q),
    Name { name: String, der: u16 },
    Lam(i32),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Tensor(Box<Ast>, Box<Ast>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Tick,
    Caret,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Otimes,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(text[start..i].parse().unwrap())));
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            b'(' if text[i..].starts_with("(*)") => {
                i += 2;
                Tok::Otimes
            }
            b'\'' => Tok::Tick,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            _ => {
                let ch = text[i..].chars().next().unwrap();
                return Err(Error::Parse { pos: i, msg: format!("unexpected character `{ch}`") });
            }
        };
        i += 1;
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = n.clone();
                self.at += 1;
                Ok(n)
            }
            _ => self.err("expected an integer"),
        }
    }

    fn small(&mut self) -> Result<i64> {
        let pos = self.pos();
        let n = self.int()?;
        i64::try_from(n).ok().filter(|v| *v <= i32::MAX as i64).ok_or(Error::Parse { pos, msg: "exponent too large".into() })
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.tterm()?;
        loop {
            if self.eat(&Tok::Plus) {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.tterm()?));
            } else if self.eat(&Tok::Minus) {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.tterm()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn tterm(&mut self) -> Result<Ast> {
        let lhs = self.term()?;
        if self.eat(&Tok::Otimes) {
            return Ok(Ast::Tensor(Box::new(lhs), Box::new(self.term()?)));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(&Tok::Slash) {
                // `a/n` is sugar for `a*1/n`.
                let pos = self.pos();
                let d = self.int()?;
                if d.is_zero() {
                    return Err(Error::Parse { pos, msg: "division by zero".into() });
                }
                lhs = Ast::Mul(Box::new(lhs), Box::new(Ast::Num(Q::new(BigInt::from(1), d))));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.eat(&Tok::Minus) {
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Ast> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                if self.eat(&Tok::Slash) {
                    let pos = self.pos();
                    let d = self.int()?;
                    if d.is_zero() {
                        return Err(Error::Parse { pos, msg: "zero denominator".into() });
                    }
                    return Ok(Ast::Num(Q::new(n, d)));
                }
                Ok(Ast::Num(Q::from_integer(n)))
            }
            Some(Tok::Ident(name)) if name == "L" => {
                self.at += 1;
                if !self.eat(&Tok::Caret) {
                    return Ok(Ast::Lam(1));
                }
                let neg = self.eat(&Tok::Minus);
                let n = self.small()? as i32;
                Ok(Ast::Lam(if neg { -n } else { n }))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                let mut der: u16 = 0;
                if self.eat(&Tok::Caret) {
                    if !self.eat(&Tok::LParen) {
                        return self.err("expected `(` after `^` in a derivative");
                    }
                    let n = self.small()?;
                    der = u16::try_from(n).or_else(|_| self.err("derivative order too large"))?;
                    if !self.eat(&Tok::RParen) {
                        return self.err("expected `)`");
                    }
                } else {
                    while self.eat(&Tok::Tick) {
                        der += 1;
                    }
                }
                Ok(Ast::Name { name, der })
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let e = self.expr()?;
                if !self.eat(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(_) => self.err("unexpected token"),
            None => self.err("unexpected end of input"),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Ast> {
    let mut p = Parser { toks: lex(text)?, at: 0, end: text.len() };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

fn prec(a: &Ast) -> u8 {
    match a {
        Ast::Add(..) | Ast::Sub(..) => 1,
        Ast::Tensor(..) => 2,
        Ast::Mul(..) => 3,
        Ast::Neg(..) => 4,
        _ => 5,
    }
}

/// Decimal or `p/q`.
pub fn fmt_rational(c: &Q) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// `u`, `u'`, `u''`, `u'''`, then `u^(n)`.
pub fn fmt_name(name: &str, der: u16) -> String {
    if der <= 3 {
        format!("{name}{}", "'".repeat(der as usize))
    } else {
        format!("{name}^({der})")
    }
}

impl std::fmt::Display for Ast {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let wrap = |a: &Ast, min: u8| if prec(a) < min { format!("({a})") } else { a.to_string() };
        match self {
            Ast::Num(c) if c < &Q::zero() => write!(f, "({})", fmt_rational(c)),
            Ast::Num(c) => write!(f, "{}", fmt_rational(c)),
            Ast::Name { name, der } => write!(f, "{}", fmt_name(name, *der)),
            Ast::Lam(1) => write!(f, "L"),
            Ast::Lam(n) => write!(f, "L^{n}"),
            Ast::Neg(a) => write!(f, "-{}", wrap(a, 4)),
            Ast::Add(a, b) => write!(f, "{} + {}", wrap(a, 1), wrap(b, 2)),
            Ast::Sub(a, b) => write!(f, "{} - {}", wrap(a, 1), wrap(b, 2)),
            Ast::Tensor(a, b) => write!(f, "{} (*) {}", wrap(a, 3), wrap(b, 3)),
            Ast::Mul(a, b) => write!(f, "{}*{}", wrap(a, 3), wrap(b, 4)),
        }
    }
}

/// Coefficients graded by `(power of c, power of λ)`.
pub type Graded<T> = BTreeMap<(u32, i32), T>;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Poly(Graded<NcPoly>),
    Tensor(Graded<Tensor2>),
}

fn clean<T: Module>(mut g: Graded<T>) -> Graded<T> {
    g.retain(|_, v| !v.is_zero());
    g
}

fn add_graded<T: Module>(a: &Graded<T>, b: &Graded<T>, c: &Q) -> Graded<T> {
    let mut out = a.clone();
    for (k, v) in b {
        out.entry(*k).or_insert_with(T::zero).add_scaled(v, c);
    }
    clean(out)
}

fn scalar_only(p: &Graded<NcPoly>) -> Option<Graded<Q>> {
    p.iter().map(|(k, v)| v.as_scalar().map(|c| (*k, c))).collect()
}

impl Value {
    pub fn poly(p: NcPoly) -> Value {
        Value::Poly(clean(BTreeMap::from([((0, 0), p)])))
    }

    pub fn tensor(t: Tensor2) -> Value {
        Value::Tensor(clean(BTreeMap::from([((0, 0), t)])))
    }

    fn derive(&self, n: u16) -> Value {
        match self {
            Value::Poly(g) => Value::Poly(clean(g.iter().map(|(k, v)| (*k, v.d_n(n as usize))).collect())),
            Value::Tensor(g) => Value::Tensor(clean(g.iter().map(|(k, v)| (*k, v.d_n(n as usize))).collect())),
        }
    }

    fn combine(&self, other: &Value, c: &Q) -> Result<Value> {
        match (self, other) {
            (Value::Poly(a), Value::Poly(b)) => Ok(Value::Poly(add_graded(a, b, c))),
            (Value::Tensor(a), Value::Tensor(b)) => Ok(Value::Tensor(add_graded(a, b, c))),
            // A zero polynomial is also the zero tensor.
            (Value::Poly(a), Value::Tensor(_)) if a.is_empty() => Ok(other.scale(c)),
            (Value::Tensor(_), Value::Poly(b)) if b.is_empty() => Ok(self.clone()),
            _ => Err(Error::Unsupported("sum of a polynomial and a tensor".into())),
        }
    }

    fn scale(&self, c: &Q) -> Value {
        match self {
            Value::Poly(g) => Value::Poly(clean(g.iter().map(|(k, v)| (*k, v.scale(c))).collect())),
            Value::Tensor(g) => Value::Tensor(clean(g.iter().map(|(k, v)| (*k, v.scale(c))).collect())),
        }
    }

    fn mul(&self, other: &Value) -> Result<Value> {
        fn shift(a: (u32, i32), b: (u32, i32)) -> (u32, i32) {
            (a.0 + b.0, a.1 + b.1)
        }
        match (self, other) {
            (Value::Poly(a), Value::Poly(b)) => {
                let mut out: Graded<NcPoly> = BTreeMap::new();
                for (ka, va) in a {
                    for (kb, vb) in b {
                        out.entry(shift(*ka, *kb)).or_insert_with(NcPoly::zero).add_scaled(&va.mul(vb), &Q::one());
                    }
                }
                Ok(Value::Poly(clean(out)))
            }
            (Value::Poly(s), Value::Tensor(t)) | (Value::Tensor(t), Value::Poly(s)) => {
                let s = scalar_only(s).ok_or_else(|| Error::Unsupported("a tensor can only be multiplied by scalars, c and L".into()))?;
                let mut out: Graded<Tensor2> = BTreeMap::new();
                for (ks, c) in &s {
                    for (kt, vt) in t {
                        out.entry(shift(*ks, *kt)).or_insert_with(Tensor2::zero).add_scaled(vt, c);
                    }
                }
                Ok(Value::Tensor(clean(out)))
            }
            _ => Err(Error::Unsupported("product of two tensors".into())),
        }
    }

    fn otimes(&self, other: &Value) -> Result<Value> {
        match (self, other) {
            (Value::Poly(a), Value::Poly(b)) => {
                let mut out: Graded<Tensor2> = BTreeMap::new();
                for (ka, va) in a {
                    for (kb, vb) in b {
                        out.entry((ka.0 + kb.0, ka.1 + kb.1)).or_insert_with(Tensor2::zero).add_scaled(&Tensor2::pure(va, vb), &Q::one());
                    }
                }
                Ok(Value::Tensor(clean(out)))
            }
            _ => Err(Error::Unsupported("tensor factors must be polynomials".into())),
        }
    }

    /// The plain polynomial, rejecting `c` and `L`.
    pub fn to_poly(&self) -> Result<NcPoly> {
        match self {
            Value::Poly(g) if g.keys().all(|k| *k == (0, 0)) => Ok(g.get(&(0, 0)).cloned().unwrap_or_else(NcPoly::zero)),
            _ => Err(Error::Unsupported("expected a polynomial without c or L".into())),
        }
    }

    /// Tensor coefficients per power of `c`, as local λ-series.
    pub fn to_lambda_pencil(&self) -> Result<Vec<crate::dpva::LambdaTensor2>> {
        let g = match self {
            Value::Tensor(g) => g.clone(),
            Value::Poly(g) if g.is_empty() => BTreeMap::new(),
            Value::Poly(_) => return Err(Error::Unsupported("expected a tensor expression such as `1 (*) u`".into())),
        };
        if g.keys().any(|k| k.1 < 0) {
            return Err(Error::Unsupported("negative powers of L in a bracket definition".into()));
        }
        let top = g.keys().map(|k| k.0).max().unwrap_or(0);
        let mut out = vec![crate::dpva::LambdaTensor2::zero(); top as usize + 1];
        for ((cp, lp), t) in g {
            out[cp as usize].add_at(lp, &t, &Q::one());
        }
        Ok(out)
    }
}

/// Generator names plus `let` bindings.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    pub gens: Vec<String>,
    pub lets: HashMap<String, Value>,
}

impl Scope {
    pub fn new<S: AsRef<str>>(gens: &[S]) -> Self {
        Scope { gens: gens.iter().map(|s| s.as_ref().to_string()).collect(), lets: HashMap::new() }
    }

    pub fn eval(&self, a: &Ast) -> Result<Value> {
        match a {
            Ast::Num(c) => Ok(Value::poly(NcPoly::scalar(c.clone()))),
            Ast::Lam(n) => Ok(Value::Poly(BTreeMap::from([((0, *n), NcPoly::one())]))),
            Ast::Name { name, der } => {
                if let Some(i) = self.gens.iter().position(|g| g == name) {
                    return Ok(Value::poly(NcPoly::sym(i as u16, *der)));
                }
                if let Some(v) = self.lets.get(name) {
                    return Ok(v.derive(*der));
                }
                if name == "c" {
                    let v = Value::Poly(BTreeMap::from([((1, 0), NcPoly::one())]));
                    return Ok(v.derive(*der));
                }
                Err(Error::UnknownName(name.clone()))
            }
            Ast::Neg(x) => Ok(self.eval(x)?.scale(&-Q::one())),
            Ast::Add(x, y) => self.eval(x)?.combine(&self.eval(y)?, &Q::one()),
            Ast::Sub(x, y) => self.eval(x)?.combine(&self.eval(y)?, &-Q::one()),
            Ast::Mul(x, y) => self.eval(x)?.mul(&self.eval(y)?),
            Ast::Tensor(x, y) => self.eval(x)?.otimes(&self.eval(y)?),
        }
    }

    pub fn eval_str(&self, text: &str) -> Result<Value> {
        self.eval(&parse_expr(text)?)
    }

    /// A polynomial without `c` or `L`.
    pub fn poly(&self, text: &str) -> Result<NcPoly> {
        self.eval_str(text)?.to_poly()
    }
}
