//! Integer polynomials in single-letter variables.
//!
//! Accepted syntax: integers, variables, `+ - * ^`, parentheses and implicit
//! multiplication by juxtaposition, so `4c(c-1)` and `2a(n-3a-2b)` parse as
//! written in the transition tables.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("unexpected `{found}` at offset {offset}")]
    Unexpected { found: char, offset: usize },
    #[error("unexpected end of input")]
    Eof,
    #[error("unknown variable `{0}`")]
    UnknownVariable(char),
    #[error("integer overflow")]
    Overflow,
}

/// Polynomial with `i64` coefficients over the variables of a [`Vars`] list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Vec<u8>, i64>,
    arity: usize,
}

/// Ordered variable names; position `i` is exponent slot `i`.
pub type Vars = [char];

impl Poly {
    pub fn zero(arity: usize) -> Self {
        Self {
            terms: BTreeMap::new(),
            arity,
        }
    }

    pub fn constant(c: i64, arity: usize) -> Self {
        let mut p = Self::zero(arity);
        if c != 0 {
            p.terms.insert(alloc::vec![0; arity], c);
        }
        p
    }

    pub fn var(index: usize, arity: usize) -> Self {
        let mut e = alloc::vec![0; arity];
        e[index] = 1;
        let mut p = Self::zero(arity);
        p.terms.insert(e, 1);
        p
    }

    pub fn parse(src: &str, vars: &Vars) -> Result<Self, PolyError> {
        let mut parser = Parser {
            src: src.as_bytes(),
            pos: 0,
            vars,
        };
        let p = parser.expr()?;
        parser.skip_ws();
        match parser.peek() {
            None => Ok(p),
            Some(c) => Err(PolyError::Unexpected {
                found: c as char,
                offset: parser.pos,
            }),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], i64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    /// Highest exponent of variable `index` over all terms.
    pub fn degree_in(&self, index: usize) -> u8 {
        self.terms.keys().map(|e| e[index]).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c)?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, &c)| (e.clone(), -c)).collect(),
            arity: self.arity,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        let mut out = Self::zero(self.arity);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca.checked_mul(cb).ok_or(PolyError::Overflow)?)?;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self, PolyError> {
        let mut out = Self::constant(1, self.arity);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    fn add_term(&mut self, e: Vec<u8>, c: i64) -> Result<(), PolyError> {
        let slot = self.terms.entry(e).or_insert(0);
        *slot = slot.checked_add(c).ok_or(PolyError::Overflow)?;
        if *slot == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
        Ok(())
    }

    /// Value at an integer point; `values[i]` is the value of variable `i`.
    pub fn eval(&self, values: &[i64]) -> i128 {
        self.terms
            .iter()
            .map(|(e, &c)| {
                e.iter()
                    .zip(values)
                    .fold(c as i128, |acc, (&k, &v)| acc * (v as i128).pow(k as u32))
            })
            .sum()
    }

    /// Renders with the given variable names.
    pub fn display<'a>(&'a self, vars: &'a Vars) -> impl fmt::Display + 'a {
        Display { poly: self, vars }
    }
}

struct Display<'a> {
    poly: &'a Poly,
    vars: &'a Vars,
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.terms.is_empty() {
            return f.write_str("0");
        }
        // highest total degree first
        let mut terms: Vec<_> = self.poly.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().map(|&x| x as u32).sum();
            let db: u32 = b.0.iter().map(|&x| x as u32).sum();
            db.cmp(&da).then(b.0.cmp(a.0))
        });
        for (i, (e, &c)) in terms.into_iter().enumerate() {
            let monomial: String = e
                .iter()
                .zip(self.vars)
                .filter(|(&k, _)| k > 0)
                .map(|(&k, &v)| {
                    if k == 1 {
                        alloc::format!("{v}")
                    } else {
                        alloc::format!("{v}^{k}")
                    }
                })
                .collect();
            let sign = if c < 0 {
                "-"
            } else if i > 0 {
                "+"
            } else {
                ""
            };
            let mag = c.unsigned_abs();
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(sign)?;
            if i > 0 {
                f.write_str(" ")?;
            }
            if monomial.is_empty() || mag != 1 {
                write!(f, "{mag}")?;
            }
            f.write_str(&monomial)?;
        }
        Ok(())
    }
}

/// Flattened polynomial for fast evaluation in the sampling loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledPoly {
    terms: Vec<(i64, [u8; MAX_VARS])>,
}

pub const MAX_VARS: usize = 6;

impl CompiledPoly {
    pub fn new(p: &Poly) -> Self {
        assert!(p.arity <= MAX_VARS, "too many variables");
        let terms = p
            .terms
            .iter()
            .map(|(e, &c)| {
                let mut ex = [0u8; MAX_VARS];
                ex[..e.len()].copy_from_slice(e);
                (c, ex)
            })
            .collect();
        Self { terms }
    }

    #[inline]
    pub fn eval(&self, values: &[i64]) -> i64 {
        let mut sum = 0i64;
        for (c, ex) in &self.terms {
            let mut t = *c;
            for (&k, &v) in ex.iter().zip(values) {
                for _ in 0..k {
                    t *= v;
                }
            }
            sum += t;
        }
        sum
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a Vars,
}

impl Parser<'_> {
    fn arity(&self) -> usize {
        self.vars.len()
    }

    fn skip_ws(&mut self) {
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, PolyError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?)?;
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() => {
                    acc = acc.mul(&self.power()?)?
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Poly, PolyError> {
        let base = self.unary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let k = self.integer()?;
            return base.pow(u32::try_from(k).map_err(|_| PolyError::Overflow)?);
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Poly, PolyError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn integer(&mut self) -> Result<i64, PolyError> {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.src.get(self.pos) {
                Some(&c) => Err(PolyError::Unexpected {
                    found: c as char,
                    offset: self.pos,
                }),
                None => Err(PolyError::Eof),
            };
        }
        let digits = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        digits.parse().map_err(|_| PolyError::Overflow)
    }

    fn atom(&mut self) -> Result<Poly, PolyError> {
        match self.peek() {
            None => Err(PolyError::Eof),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(b')') => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    Some(c) => Err(PolyError::Unexpected {
                        found: c as char,
                        offset: self.pos,
                    }),
                    None => Err(PolyError::Eof),
                }
            }
            Some(c) if c.is_ascii_digit() => Ok(Poly::constant(self.integer()?, self.arity())),
            Some(c) if c.is_ascii_alphabetic() => {
                self.pos += 1;
                let name = c as char;
                let idx = self
                    .vars
                    .iter()
                    .position(|&v| v == name)
                    .ok_or(PolyError::UnknownVariable(name))?;
                Ok(Poly::var(idx, self.arity()))
            }
            Some(c) => Err(PolyError::Unexpected {
                found: c as char,
                offset: self.pos,
            }),
        }
    }
}
