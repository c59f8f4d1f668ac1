//! Normal forms modulo polynomial ideals (graded lexicographic order).
//!
//! Completion uses Buchberger's algorithm with the product criterion. When
//! the generators' leading monomials are already pairwise coprime, which is
//! the case for every tower ideal the constructions produce, the generators
//! are a Gröbner basis as given and only interreduction is performed.

use std::collections::VecDeque;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use serde::Serialize;

use super::{Monomial, MultiPoly, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QuotientDim {
    Finite(usize),
    Infinite,
}

impl QuotientDim {
    pub fn finite(self) -> Option<usize> {
        match self {
            QuotientDim::Finite(d) => Some(d),
            QuotientDim::Infinite => None,
        }
    }
}

impl std::fmt::Display for QuotientDim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QuotientDim::Finite(d) => write!(f, "{d}"),
            QuotientDim::Infinite => write!(f, "infinite"),
        }
    }
}

#[derive(Debug)]
pub struct IdealNF {
    vars: Arc<[String]>,
    generators: Vec<MultiPoly>,
    basis: Vec<MultiPoly>,
    fast_path: bool,
    standard: OnceLock<Option<Vec<Monomial>>>,
}

impl Clone for IdealNF {
    fn clone(&self) -> Self {
        IdealNF {
            vars: Arc::clone(&self.vars),
            generators: self.generators.clone(),
            basis: self.basis.clone(),
            fast_path: self.fast_path,
            standard: OnceLock::new(),
        }
    }
}

/// Fully reduces `f` by `basis` (remainder of multivariate division).
fn reduce(f: &MultiPoly, basis: &[MultiPoly]) -> MultiPoly {
    let mut p = f.clone();
    let mut rem = MultiPoly::zero(f.vars());
    while let Some((m, c)) = p.pop_leading() {
        let divisor = basis
            .iter()
            .find(|g| g.leading().is_some_and(|(lm, _)| lm.divides(&m)));
        match divisor {
            Some(g) => {
                let (lm, lc) = g.leading().unwrap();
                let factor = lm.quotient_of(&m);
                let coeff = &c / lc;
                // The leading term cancels exactly; subtract the tail only.
                let mut tail = g.clone();
                tail.pop_leading();
                p.add_scaled(&tail.mul_term(&factor, &Rational::one()), &-coeff);
            }
            None => rem.add_term(m, c),
        }
    }
    rem
}

fn s_poly(f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    let (lf, cf) = f.leading().unwrap();
    let (lg, cg) = g.leading().unwrap();
    let l = lf.lcm(lg);
    let a = f.mul_term(&lf.quotient_of(&l), &cf.recip());
    let b = g.mul_term(&lg.quotient_of(&l), &cg.recip());
    &a - &b
}

fn leading_monomial(p: &MultiPoly) -> &Monomial {
    p.leading().expect("nonzero polynomial").0
}

/// Minimal, interreduced, monic basis sorted by leading monomial.
fn interreduce(mut g: Vec<MultiPoly>) -> Vec<MultiPoly> {
    g.retain(|p| !p.is_zero());
    g = g.into_iter().map(|p| p.monic()).collect();
    g.sort_by(|a, b| leading_monomial(a).cmp(leading_monomial(b)));
    let mut minimal: Vec<MultiPoly> = Vec::new();
    for p in g {
        let lm = leading_monomial(&p);
        if !minimal.iter().any(|q| leading_monomial(q).divides(lm)) {
            minimal.push(p);
        }
    }
    let snapshot = minimal.clone();
    let mut out = Vec::with_capacity(minimal.len());
    for (i, p) in snapshot.iter().enumerate() {
        let others: Vec<MultiPoly> = snapshot
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, q)| q.clone())
            .collect();
        let mut tail = p.clone();
        let (lm, lc) = tail.pop_leading().unwrap();
        let mut reduced = reduce(&tail, &others);
        reduced.add_term(lm, lc);
        out.push(reduced);
    }
    out
}

fn buchberger(gens: &[MultiPoly]) -> Vec<MultiPoly> {
    let mut g: Vec<MultiPoly> = gens.iter().filter(|p| !p.is_zero()).map(MultiPoly::monic).collect();
    let mut pairs: VecDeque<(usize, usize)> = VecDeque::new();
    for j in 0..g.len() {
        for i in 0..j {
            pairs.push_back((i, j));
        }
    }
    while let Some((i, j)) = pairs.pop_front() {
        if leading_monomial(&g[i]).coprime(leading_monomial(&g[j])) {
            continue;
        }
        let r = reduce(&s_poly(&g[i], &g[j]), &g);
        if r.is_zero() {
            continue;
        }
        if r.as_constant().is_some() {
            return vec![MultiPoly::one(r.vars())];
        }
        let k = g.len();
        g.push(r.monic());
        for i in 0..k {
            pairs.push_back((i, k));
        }
    }
    g
}

impl IdealNF {
    /// Completes the generators to a reduced Gröbner basis.
    pub fn new(vars: &Arc<[String]>, generators: Vec<MultiPoly>) -> Self {
        Self::build(vars, generators, false)
    }

    /// Always runs the generic Buchberger completion.
    pub fn new_generic(vars: &Arc<[String]>, generators: Vec<MultiPoly>) -> Self {
        Self::build(vars, generators, true)
    }

    fn build(vars: &Arc<[String]>, generators: Vec<MultiPoly>, force_generic: bool) -> Self {
        for g in &generators {
            assert_eq!(g.vars(), vars, "ideal generator over a different ring");
        }
        let nonzero: Vec<MultiPoly> = generators.iter().filter(|p| !p.is_zero()).cloned().collect();
        let lms: Vec<&Monomial> = nonzero.iter().map(leading_monomial).collect();
        let coprime = lms
            .iter()
            .enumerate()
            .all(|(i, a)| lms[i + 1..].iter().all(|b| a.coprime(b)));
        let unit = nonzero.iter().any(|p| p.as_constant().is_some());
        let fast_path = !force_generic && coprime && !unit;
        let basis = if unit {
            vec![MultiPoly::one(vars)]
        } else if fast_path {
            interreduce(nonzero)
        } else {
            interreduce(buchberger(&nonzero))
        };
        IdealNF {
            vars: Arc::clone(vars),
            generators,
            basis,
            fast_path,
            standard: OnceLock::new(),
        }
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn generators(&self) -> &[MultiPoly] {
        &self.generators
    }

    pub fn basis(&self) -> &[MultiPoly] {
        &self.basis
    }

    pub fn used_fast_path(&self) -> bool {
        self.fast_path
    }

    pub fn normal_form(&self, f: &MultiPoly) -> MultiPoly {
        reduce(f, &self.basis)
    }

    pub fn contains(&self, f: &MultiPoly) -> bool {
        self.normal_form(f).is_zero()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.basis.iter().any(|p| p.as_constant().is_some())
    }

    fn power_bounds(&self) -> Option<Vec<u32>> {
        let n = self.vars.len();
        let mut bound = vec![None; n];
        for g in &self.basis {
            if let Some((i, e)) = leading_monomial(g).pure_power() {
                bound[i] = Some(bound[i].map_or(e, |b: u32| b.min(e)));
            }
        }
        bound.into_iter().collect()
    }

    /// Monomials not divisible by any leading monomial, in increasing order;
    /// `None` when there are infinitely many.
    pub fn standard_monomials(&self) -> Option<&[Monomial]> {
        self.standard
            .get_or_init(|| {
                if self.is_unit_ideal() {
                    return Some(Vec::new());
                }
                let bounds = self.power_bounds()?;
                let lms: Vec<Monomial> = self.basis.iter().map(|g| leading_monomial(g).clone()).collect();
                let mut out = Vec::new();
                let mut cur = vec![0u32; bounds.len()];
                collect_standard(0, &bounds, &lms, &mut cur, &mut out);
                out.sort();
                Some(out)
            })
            .as_deref()
    }

    pub fn quotient_dimension(&self) -> QuotientDim {
        match self.standard_monomials() {
            Some(s) => QuotientDim::Finite(s.len()),
            None => QuotientDim::Infinite,
        }
    }

    /// Coordinates of the normal form of `f` in the standard-monomial basis.
    /// Panics if the quotient is infinite-dimensional.
    pub fn coordinates(&self, f: &MultiPoly) -> Vec<Rational> {
        let std = self
            .standard_monomials()
            .expect("coordinates need a finite-dimensional quotient");
        let nf = self.normal_form(f);
        let mut v = vec![Rational::zero(); std.len()];
        for (m, c) in nf.terms() {
            let i = std.binary_search(m).expect("normal form outside standard monomials");
            v[i] = c.clone();
        }
        v
    }
}

fn collect_standard(
    i: usize,
    bounds: &[u32],
    lms: &[Monomial],
    cur: &mut Vec<u32>,
    out: &mut Vec<Monomial>,
) {
    if i == bounds.len() {
        out.push(Monomial(cur.clone()));
        return;
    }
    for e in 0..bounds[i] {
        cur[i] = e;
        let partial = Monomial(cur.clone());
        if lms.iter().any(|l| l.divides(&partial)) {
            break;
        }
        collect_standard(i + 1, bounds, lms, cur, out);
    }
    cur[i] = 0;
}
