//! Sparse multivariate polynomials over ℚ.
//!
//! Terms are stored in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic with the first variable largest. The leading term of
//! a polynomial is therefore the last entry of the map.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{ExactError, Rational};

/// An exponent vector. Ordered by total degree, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, index: usize, exp: u32) -> Self {
        let mut e = vec![0; nvars];
        e[index] = exp;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller guarantees divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// The variable index if this is a pure power `x_i^e` with `e ≥ 1`.
    pub fn pure_power(&self) -> Option<(usize, u32)> {
        let mut found = None;
        for (i, &e) in self.0.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some((i, e));
            }
        }
        found
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in a fixed, named list of commuting variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Arc<[String]>,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(vars: &Arc<[String]>) -> Self {
        MultiPoly {
            vars: Arc::clone(vars),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Arc<[String]>, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), c);
        }
        p
    }

    pub fn one(vars: &Arc<[String]>) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn var(vars: &Arc<[String]>, index: usize) -> Self {
        Self::monomial(vars, Monomial::var(vars.len(), index, 1), Rational::one())
    }

    pub fn monomial(vars: &Arc<[String]>, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.0.len(), vars.len(), "exponent vector length mismatch");
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Univariate polynomial `Σ coeffs[i] · x_index^i`.
    pub fn from_univariate(vars: &Arc<[String]>, index: usize, coeffs: &[Rational]) -> Self {
        let mut p = Self::zero(vars);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                p.terms
                    .insert(Monomial::var(vars.len(), index, i as u32), c.clone());
            }
        }
        p
    }

    pub fn from_terms(
        vars: &Arc<[String]>,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one(self.nvars()))
    }

    /// `Some(c)` when the polynomial is a constant (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Indices of variables that actually occur.
    pub fn support(&self) -> Vec<usize> {
        let mut used = vec![false; self.nvars()];
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    used[i] = true;
                }
            }
        }
        (0..self.nvars()).filter(|&i| used[i]).collect()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        debug_assert_eq!(m.0.len(), self.nvars());
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub(crate) fn pop_leading(&mut self) -> Option<(Monomial, Rational)> {
        self.terms.pop_last()
    }

    pub fn add_scaled(&mut self, other: &MultiPoly, c: &Rational) {
        self.check_same_ring(other);
        if c.is_zero() {
            return;
        }
        for (m, d) in &other.terms {
            self.add_term(m.clone(), d * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        MultiPoly {
            vars: Arc::clone(&self.vars),
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    /// Multiplies by `c · m`.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        MultiPoly {
            vars: Arc::clone(&self.vars),
            terms: self
                .terms
                .iter()
                .map(|(n, d)| (n.mul(m), d * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = Self::one(&self.vars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Monic rescaling; zero stays zero.
    pub fn monic(&self) -> MultiPoly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Substitutes `images[i]` for variable `i`. All images must share one ring.
    pub fn compose(&self, images: &[MultiPoly]) -> MultiPoly {
        assert_eq!(images.len(), self.nvars());
        let target = images
            .first()
            .map(|p| Arc::clone(&p.vars))
            .unwrap_or_else(|| Arc::clone(&self.vars));
        let mut out = MultiPoly::zero(&target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(&target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &images[i].pow(e);
                }
            }
            out.add_scaled(&t, &Rational::one());
        }
        out
    }

    /// Re-expresses this polynomial over another variable list containing
    /// every variable that occurs here.
    pub fn rebase(&self, vars: &Arc<[String]>) -> Result<MultiPoly, ExactError> {
        let map: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v))
            .collect();
        let mut out = MultiPoly::zero(vars);
        for (m, c) in &self.terms {
            let mut e = vec![0; vars.len()];
            for (i, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    let j = map[i].ok_or_else(|| ExactError::UnknownVariable(self.vars[i].clone()))?;
                    e[j] += k;
                }
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    fn check_same_ring(&self, other: &MultiPoly) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials over different variable lists: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    /// Parses expressions such as `x_C2 - x_C4^2 + 3/2*y`. Products here are
    /// commutative; graded-commutative parsing lives in the CDGA module.
    pub fn parse(vars: &Arc<[String]>, input: &str) -> Result<MultiPoly, ExactError> {
        let vars2 = Arc::clone(vars);
        parse_with(input, &|name| {
            vars2
                .iter()
                .position(|v| v == name)
                .map(|i| MultiPoly::var(&vars2, i))
        }, &|a, b| a * b, vars)
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            variables: self.vars.to_vec(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson {
                    exps: m.0.clone(),
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &PolyJson) -> Result<MultiPoly, ExactError> {
        let vars: Arc<[String]> = json.variables.clone().into();
        let mut p = MultiPoly::zero(&vars);
        for t in &json.terms {
            if t.exps.len() != vars.len() {
                return Err(ExactError::Malformed(format!(
                    "term has {} exponents for {} variables",
                    t.exps.len(),
                    vars.len()
                )));
            }
            let num: BigInt = t
                .num
                .parse()
                .map_err(|_| ExactError::Malformed(format!("bad numerator {:?}", t.num)))?;
            let den: BigInt = t
                .den
                .parse()
                .map_err(|_| ExactError::Malformed(format!("bad denominator {:?}", t.den)))?;
            if den.is_zero() {
                return Err(ExactError::Malformed("zero denominator".into()));
            }
            p.add_term(Monomial(t.exps.clone()), Rational::new(num, den));
        }
        Ok(p)
    }
}

/// Recursive-descent parser shared by commutative and graded-commutative
/// callers. Grammar: sums of products of powers of atoms; atoms are
/// rationals, variable names, or parenthesised expressions.
pub(crate) fn parse_with(
    input: &str,
    lookup: &dyn Fn(&str) -> Option<MultiPoly>,
    mul: &dyn Fn(&MultiPoly, &MultiPoly) -> MultiPoly,
    vars: &Arc<[String]>,
) -> Result<MultiPoly, ExactError> {
    let tokens = tokenize(input)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        lookup,
        mul,
        vars,
    };
    let out = p.sum()?;
    if p.pos != p.tokens.len() {
        return Err(ExactError::Parse(format!(
            "unexpected trailing input in {input:?}"
        )));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>, ExactError> {
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token::Num(text.parse().unwrap()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.' || chars[i] == '\'')
            {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(ExactError::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    lookup: &'a dyn Fn(&str) -> Option<MultiPoly>,
    mul: &'a dyn Fn(&MultiPoly, &MultiPoly) -> MultiPoly,
    vars: &'a Arc<[String]>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<MultiPoly, ExactError> {
        let mut neg = false;
        if self.eat('-') {
            neg = true;
        } else {
            self.eat('+');
        }
        let mut acc = self.product()?;
        if neg {
            acc = -&acc;
        }
        loop {
            if self.eat('+') {
                let t = self.product()?;
                acc = &acc + &t;
            } else if self.eat('-') {
                let t = self.product()?;
                acc = &acc - &t;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<MultiPoly, ExactError> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                let t = self.power()?;
                acc = (self.mul)(&acc, &t);
            } else if self.eat('/') {
                let t = self.power()?;
                let c = t
                    .as_constant()
                    .filter(|c| !c.is_zero())
                    .ok_or_else(|| ExactError::Parse("division by a non-constant".into()))?;
                acc = acc.scale(&c.recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<MultiPoly, ExactError> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.tokens.get(self.pos).cloned() {
                Some(Token::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| ExactError::Parse("exponent too large".into()))?;
                    let mut acc = MultiPoly::one(self.vars);
                    for _ in 0..e {
                        acc = (self.mul)(&acc, &base);
                    }
                    Ok(acc)
                }
                _ => Err(ExactError::Parse("expected integer exponent".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly, ExactError> {
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(n)) => {
                self.pos += 1;
                Ok(MultiPoly::constant(self.vars, Rational::from_integer(n)))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                (self.lookup)(&name).ok_or(ExactError::UnknownVariable(name))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(')') {
                    return Err(ExactError::Parse("missing ')'".into()));
                }
                Ok(inner)
            }
            other => Err(ExactError::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

impl std::ops::Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl std::ops::Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

impl std::ops::Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_same_ring(rhs);
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            for (n, d) in &rhs.terms {
                out.add_term(m.mul(n), c * d);
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{}", self.vars[i], e)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", abs, mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// JSON form: coefficients as decimal strings so nothing is lost.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub variables: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub num: String,
    pub den: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn ring(names: &[&str]) -> Arc<[String]> {
        names.iter().map(|s| s.to_string()).collect::<Vec<_>>().into()
    }

    #[test]
    fn grlex_order() {
        // x > y; x*y^2 (deg 3) beats x^2 (deg 2); x^2 beats x*y.
        let a = Monomial(vec![1, 2]);
        let b = Monomial(vec![2, 0]);
        let c = Monomial(vec![1, 1]);
        assert!(a > b);
        assert!(b > c);
        assert!(Monomial(vec![1, 0]) > Monomial(vec![0, 1]));
    }

    #[test]
    fn parse_and_display() {
        let r = ring(&["x", "y"]);
        let p = MultiPoly::parse(&r, "x^2 - 3/2*x*y + 1").unwrap();
        assert_eq!(p.num_terms(), 3);
        assert_eq!(p.to_string(), "x^2 - 3/2*x*y + 1");
        assert_eq!(p.leading().unwrap().1, &q(1));
        assert!(MultiPoly::parse(&r, "z").is_err());
        assert!(MultiPoly::parse(&r, "x +").is_err());
    }

    #[test]
    fn compose_substitutes() {
        let r = ring(&["x"]);
        let p = MultiPoly::parse(&r, "x^2 + x + 1").unwrap();
        let x3 = MultiPoly::parse(&r, "x^3").unwrap();
        let got = p.compose(&[x3]);
        assert_eq!(got, MultiPoly::parse(&r, "x^6 + x^3 + 1").unwrap());
    }

    #[test]
    fn json_round_trip() {
        let r = ring(&["a", "b"]);
        let p = MultiPoly::parse(&r, "-7/3*a*b^2 + 5").unwrap();
        let back = MultiPoly::from_json(&p.to_json()).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn rebase_moves_variables() {
        let r = ring(&["x"]);
        let s = ring(&["y", "x"]);
        let p = MultiPoly::parse(&r, "x^2 + 1").unwrap();
        let moved = p.rebase(&s).unwrap();
        assert_eq!(moved, MultiPoly::parse(&s, "x^2 + 1").unwrap());
        let back = MultiPoly::parse(&s, "y").unwrap().rebase(&r);
        assert!(back.is_err());
    }
}
