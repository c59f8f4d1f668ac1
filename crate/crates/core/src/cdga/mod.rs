//! Finitely presented graded-commutative differential graded algebras over ℚ.
//!
//! Elements are [`MultiPoly`] values over the generator names. Odd-degree
//! generators are exterior: they appear with exponent at most one, and a
//! monomial is read as the product of its generators in generator order.
//! Multiplication and the differential apply the Koszul sign rule. The
//! differential is homological, lowering degree by one.
//!
//! A presentation may also carry *relations*: polynomials in even
//! generators that are set to zero. They are used for formal targets such as
//! ℚ(ζ_n) = ℚ[z]/(Φ_n(z)) with zero differential.

mod homology;
mod map;
mod oracle;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::poly::parse_with;
use crate::exact::{ExactError, IdealNF, Monomial, MultiPoly, PolyJson, Rational};

pub use homology::{
    acyclic_by_unit_boundary, complete_intersection_certificate, formal_model, formal_projection,
    homology_of, primitive_root_witness, quotient_to_h0_map, GradedRingValue, HomologyInfo,
    KoszulCertificate, RootWitness, BETA, BETA_INV, FIELD_GEN,
};
pub use map::{CdgaMap, CdgaMapJson, MapViolation};
pub use oracle::{truncated_homology_oracle, weight_function, OracleReport, MAX_ORACLE_BASIS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CdgaError {
    #[error("duplicate generator {0:?}")]
    DuplicateGenerator(String),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("homology undetermined: {0}")]
    Undetermined(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("oracle unavailable: {0}")]
    OracleUnavailable(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("unsupported Weyl action {0:?}; only \"trivial\" is supported")]
    UnsupportedAction(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: i32,
}

impl Generator {
    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }
}

#[derive(Clone, Debug)]
pub struct PresentedCdga {
    generators: Vec<Generator>,
    vars: Arc<[String]>,
    odd: Vec<bool>,
    differential: Vec<MultiPoly>,
    relations: Vec<MultiPoly>,
    ideal: Option<IdealNF>,
}

impl PartialEq for PresentedCdga {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators
            && self.differential == other.differential
            && self.relations == other.relations
    }
}

impl Eq for PresentedCdga {}

impl PresentedCdga {
    /// Free algebra on the given generators with zero differential.
    pub fn new<S: Into<String>>(gens: impl IntoIterator<Item = (S, i32)>) -> Result<Self, CdgaError> {
        let generators: Vec<Generator> = gens
            .into_iter()
            .map(|(n, d)| Generator {
                name: n.into(),
                degree: d,
            })
            .collect();
        for (i, g) in generators.iter().enumerate() {
            if generators[..i].iter().any(|h| h.name == g.name) {
                return Err(CdgaError::DuplicateGenerator(g.name.clone()));
            }
        }
        let vars: Arc<[String]> = generators.iter().map(|g| g.name.clone()).collect::<Vec<_>>().into();
        let odd = generators.iter().map(Generator::is_odd).collect();
        let differential = vec![MultiPoly::zero(&vars); generators.len()];
        Ok(PresentedCdga {
            generators,
            vars,
            odd,
            differential,
            relations: Vec::new(),
            ideal: None,
        })
    }

    /// The unit CDGA ℚ.
    pub fn unit() -> Self {
        Self::new(Vec::<(String, i32)>::new()).unwrap()
    }

    /// Sets `d(name)` from an expression in the generators.
    pub fn with_d(mut self, name: &str, expr: &str) -> Result<Self, CdgaError> {
        let value = self.parse(expr)?;
        self.set_d(name, value)?;
        Ok(self)
    }

    pub fn set_d(&mut self, name: &str, value: MultiPoly) -> Result<(), CdgaError> {
        let i = self.index_of(name)?;
        self.differential[i] = value.rebase(&self.vars)?;
        Ok(())
    }

    pub fn with_relation(mut self, expr: &str) -> Result<Self, CdgaError> {
        let r = self.parse(expr)?;
        self.add_relation(r)?;
        Ok(self)
    }

    pub fn add_relation(&mut self, r: MultiPoly) -> Result<(), CdgaError> {
        let r = r.rebase(&self.vars)?;
        if !r.is_zero() {
            self.relations.push(r);
        }
        self.ideal = Some(IdealNF::new(&self.vars, self.relations.clone()));
        Ok(())
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn relations(&self) -> &[MultiPoly] {
        &self.relations
    }

    pub fn has_generator(&self, name: &str) -> bool {
        self.generators.iter().any(|g| g.name == name)
    }

    pub fn index_of(&self, name: &str) -> Result<usize, CdgaError> {
        self.generators
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| CdgaError::UnknownGenerator(name.to_string()))
    }

    pub fn degree_of(&self, i: usize) -> i32 {
        self.generators[i].degree
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.odd[i]
    }

    /// `d` of the `i`-th generator.
    pub fn d_gen(&self, i: usize) -> &MultiPoly {
        &self.differential[i]
    }

    pub fn d_of(&self, name: &str) -> Result<&MultiPoly, CdgaError> {
        Ok(&self.differential[self.index_of(name)?])
    }

    pub fn zero(&self) -> MultiPoly {
        MultiPoly::zero(&self.vars)
    }

    pub fn one(&self) -> MultiPoly {
        MultiPoly::one(&self.vars)
    }

    pub fn constant(&self, c: Rational) -> MultiPoly {
        MultiPoly::constant(&self.vars, c)
    }

    pub fn gen(&self, name: &str) -> Result<MultiPoly, CdgaError> {
        Ok(MultiPoly::var(&self.vars, self.index_of(name)?))
    }

    /// Parses an expression using the graded-commutative product.
    pub fn parse(&self, expr: &str) -> Result<MultiPoly, CdgaError> {
        let lookup = |name: &str| {
            self.generators
                .iter()
                .position(|g| g.name == name)
                .map(|i| MultiPoly::var(&self.vars, i))
        };
        Ok(parse_with(expr, &lookup, &|a, b| self.mul(a, b), &self.vars)?)
    }

    pub fn monomial_degree(&self, m: &Monomial) -> i64 {
        m.0.iter()
            .zip(&self.generators)
            .map(|(&e, g)| e as i64 * g.degree as i64)
            .sum()
    }

    /// The common degree of all terms: `Ok(None)` for zero, `Err(degrees)`
    /// when inhomogeneous.
    pub fn homogeneous_degree(&self, x: &MultiPoly) -> Result<Option<i64>, Vec<i64>> {
        let mut degs: Vec<i64> = x.terms().map(|(m, _)| self.monomial_degree(m)).collect();
        degs.sort_unstable();
        degs.dedup();
        match degs.len() {
            0 => Ok(None),
            1 => Ok(Some(degs[0])),
            _ => Err(degs),
        }
    }

    fn is_well_formed_monomial(&self, m: &Monomial) -> bool {
        m.0.iter().zip(&self.odd).all(|(&e, &odd)| !odd || e <= 1)
    }

    /// Product of basis monomials with its Koszul sign, or `None` if an odd
    /// generator repeats.
    fn mono_mul(&self, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
        let mut swaps = 0usize;
        for j in 0..self.odd.len() {
            if !self.odd[j] || b.0[j] == 0 {
                continue;
            }
            if a.0[j] > 0 {
                return None;
            }
            swaps += (j + 1..self.odd.len())
                .filter(|&i| self.odd[i] && a.0[i] > 0)
                .count();
        }
        Some((a.mul(b), swaps % 2 == 1))
    }

    /// Graded-commutative product.
    pub fn mul(&self, a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        let mut out = self.zero();
        for (m, c) in a.terms() {
            for (n, e) in b.terms() {
                if let Some((p, neg)) = self.mono_mul(m, n) {
                    let coeff = c * e;
                    out.add_term(p, if neg { -coeff } else { coeff });
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &MultiPoly, e: u32) -> MultiPoly {
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    /// Differential of a basis monomial by the Leibniz rule.
    fn d_monomial(&self, m: &Monomial) -> MultiPoly {
        let n = self.len();
        let mut out = self.zero();
        let mut prefix = Monomial::one(n);
        let mut prefix_degree: i64 = 0;
        for i in 0..n {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let dg = &self.differential[i];
            if !dg.is_zero() {
                // prefix · g^{e-1}, then d(g), then the suffix.
                let mut left = prefix.clone();
                left.0[i] += e - 1;
                let mut suffix = Monomial::one(n);
                suffix.0[i + 1..].copy_from_slice(&m.0[i + 1..]);
                let sign = if prefix_degree.rem_euclid(2) == 1 { -1 } else { 1 };
                let coeff = Rational::from_integer((sign * e as i64).into());
                let left_p = MultiPoly::monomial(&self.vars, left, coeff);
                let suffix_p = MultiPoly::monomial(&self.vars, suffix, Rational::one());
                let term = self.mul(&self.mul(&left_p, dg), &suffix_p);
                out.add_scaled(&term, &Rational::one());
            }
            prefix.0[i] = e;
            prefix_degree += e as i64 * self.generators[i].degree as i64;
        }
        out
    }

    pub fn d(&self, x: &MultiPoly) -> MultiPoly {
        let mut out = self.zero();
        for (m, c) in x.terms() {
            out.add_scaled(&self.d_monomial(m), c);
        }
        out
    }

    /// Normal form modulo the relations (identity when there are none).
    pub fn reduce(&self, x: &MultiPoly) -> MultiPoly {
        match &self.ideal {
            Some(i) => i.normal_form(x),
            None => x.clone(),
        }
    }

    pub fn is_zero_element(&self, x: &MultiPoly) -> bool {
        self.reduce(x).is_zero()
    }

    /// Indices of degree-0 even generators with zero differential.
    pub(crate) fn degree_zero_cycles(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.generators[i].degree == 0 && self.differential[i].is_zero())
            .collect()
    }

    /// Whether every variable occurring in `x` lies in `allowed`.
    pub(crate) fn supported_in(x: &MultiPoly, allowed: &[usize]) -> bool {
        x.support().iter().all(|i| allowed.contains(i))
    }

    /// Checks homogeneity of the differential, d² = 0 on generators, the
    /// exterior rule, and that relations are even, homogeneous and d-stable.
    pub fn validate(&self) -> CdgaReport {
        let mut violations = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            let dg = &self.differential[i];
            if dg.terms().any(|(m, _)| !self.is_well_formed_monomial(m)) {
                violations.push(CdgaViolation::OddSquare {
                    generator: g.name.clone(),
                });
            }
            match self.homogeneous_degree(dg) {
                Ok(None) => {}
                Ok(Some(d)) if d == g.degree as i64 - 1 => {}
                Ok(Some(d)) => violations.push(CdgaViolation::Degree {
                    generator: g.name.clone(),
                    expected: g.degree as i64 - 1,
                    found: vec![d],
                }),
                Err(ds) => violations.push(CdgaViolation::Degree {
                    generator: g.name.clone(),
                    expected: g.degree as i64 - 1,
                    found: ds,
                }),
            }
            let dd = self.reduce(&self.d(dg));
            if !dd.is_zero() {
                violations.push(CdgaViolation::DSquared {
                    generator: g.name.clone(),
                    value: dd.to_string(),
                });
            }
        }
        for r in &self.relations {
            if r.support().iter().any(|&i| self.odd[i]) {
                violations.push(CdgaViolation::Relation {
                    relation: r.to_string(),
                    reason: "involves an odd generator".into(),
                });
            } else if self.homogeneous_degree(r).is_err() {
                violations.push(CdgaViolation::Relation {
                    relation: r.to_string(),
                    reason: "not homogeneous".into(),
                });
            } else if !self.reduce(&self.d(r)).is_zero() {
                violations.push(CdgaViolation::Relation {
                    relation: r.to_string(),
                    reason: "ideal not closed under d".into(),
                });
            }
        }
        CdgaReport { violations }
    }

    /// Tensor product; colliding generator names on the right receive a
    /// numeric suffix (`_2`, `_3`, ...).
    pub fn tensor(&self, other: &PresentedCdga) -> PresentedCdga {
        let mut names: Vec<String> = self.generators.iter().map(|g| g.name.clone()).collect();
        let mut renamed = Vec::new();
        for g in &other.generators {
            let mut name = g.name.clone();
            let mut k = 2;
            while names.contains(&name) {
                name = format!("{}_{k}", g.name);
                k += 1;
            }
            names.push(name.clone());
            renamed.push((name, g.degree));
        }
        let gens: Vec<(String, i32)> = self
            .generators
            .iter()
            .map(|g| (g.name.clone(), g.degree))
            .chain(renamed)
            .collect();
        let mut out = PresentedCdga::new(gens).expect("names are unique after renaming");
        let offset = self.len();
        let shift = |p: &MultiPoly, off: usize| {
            MultiPoly::from_terms(
                &out.vars,
                p.terms().map(|(m, c)| {
                    let mut e = vec![0; out.len()];
                    e[off..off + m.0.len()].copy_from_slice(&m.0);
                    (Monomial(e), c.clone())
                }),
            )
        };
        let diffs: Vec<MultiPoly> = self
            .differential
            .iter()
            .map(|p| shift(p, 0))
            .chain(other.differential.iter().map(|p| shift(p, offset)))
            .collect();
        let rels: Vec<MultiPoly> = self
            .relations
            .iter()
            .map(|p| shift(p, 0))
            .chain(other.relations.iter().map(|p| shift(p, offset)))
            .collect();
        out.differential = diffs;
        for r in rels {
            out.add_relation(r).expect("relation already over the tensor ring");
        }
        out
    }

    pub fn to_json(&self) -> CdgaJson {
        CdgaJson {
            generators: self.generators.clone(),
            differential: self
                .generators
                .iter()
                .zip(&self.differential)
                .filter(|(_, d)| !d.is_zero())
                .map(|(g, d)| (g.name.clone(), d.to_json()))
                .collect(),
            relations: self.relations.iter().map(MultiPoly::to_json).collect(),
            action: None,
        }
    }

    pub fn from_json(json: &CdgaJson) -> Result<Self, CdgaError> {
        if let Some(a) = &json.action {
            if a != "trivial" {
                return Err(CdgaError::UnsupportedAction(a.clone()));
            }
        }
        let mut out = PresentedCdga::new(json.generators.iter().map(|g| (g.name.clone(), g.degree)))?;
        for (name, p) in &json.differential {
            let poly = MultiPoly::from_json(p)?;
            out.set_d(name, poly)?;
        }
        for r in &json.relations {
            out.add_relation(MultiPoly::from_json(r)?)?;
        }
        Ok(out)
    }
}

impl fmt::Display for PresentedCdga {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.generators.is_empty() && self.relations.is_empty() {
            return write!(f, "Q");
        }
        let gens: Vec<String> = self
            .generators
            .iter()
            .map(|g| format!("{}({})", g.name, g.degree))
            .collect();
        write!(f, "<{}>", gens.join(", "))?;
        let ds: Vec<String> = self
            .generators
            .iter()
            .zip(&self.differential)
            .filter(|(_, d)| !d.is_zero())
            .map(|(g, d)| format!("d({}) = {}", g.name, d))
            .collect();
        if !ds.is_empty() {
            write!(f, " with {}", ds.join(", "))?;
        }
        if !self.relations.is_empty() {
            let rs: Vec<String> = self.relations.iter().map(|r| format!("{r} = 0")).collect();
            write!(f, " modulo {}", rs.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CdgaViolation {
    Degree {
        generator: String,
        expected: i64,
        found: Vec<i64>,
    },
    DSquared {
        generator: String,
        value: String,
    },
    OddSquare {
        generator: String,
    },
    Relation {
        relation: String,
        reason: String,
    },
}

impl fmt::Display for CdgaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CdgaViolation::Degree {
                generator,
                expected,
                found,
            } => write!(f, "d({generator}) has degree {found:?}, expected {expected}"),
            CdgaViolation::DSquared { generator, value } => {
                write!(f, "d(d({generator})) = {value} is not zero")
            }
            CdgaViolation::OddSquare { generator } => {
                write!(f, "d({generator}) contains the square of an odd generator")
            }
            CdgaViolation::Relation { relation, reason } => write!(f, "relation {relation}: {reason}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CdgaReport {
    pub violations: Vec<CdgaViolation>,
}

impl CdgaReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_cdga(a: &PresentedCdga) -> CdgaReport {
    a.validate()
}

pub fn tensor(a: &PresentedCdga, b: &PresentedCdga) -> PresentedCdga {
    a.tensor(b)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdgaJson {
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub differential: BTreeMap<String, PolyJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<PolyJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn koszul_c2() -> PresentedCdga {
        PresentedCdga::new([("x", 0), ("t", 1)])
            .unwrap()
            .with_d("t", "x + 1")
            .unwrap()
    }

    #[test]
    fn exterior_products_anticommute() {
        let a = PresentedCdga::new([("s", 1), ("t", 1), ("x", 0)]).unwrap();
        let s = a.gen("s").unwrap();
        let t = a.gen("t").unwrap();
        let st = a.mul(&s, &t);
        let ts = a.mul(&t, &s);
        assert_eq!(st, -&ts);
        assert!(a.mul(&s, &s).is_zero());
        assert_eq!(a.parse("t*s").unwrap(), ts);
    }

    #[test]
    fn leibniz_rule() {
        let a = PresentedCdga::new([("x", 0), ("s", 1), ("t", 1)])
            .unwrap()
            .with_d("s", "x")
            .unwrap()
            .with_d("t", "x^2 - 1")
            .unwrap();
        // d(s t) = d(s) t − s d(t).
        let st = a.parse("s*t").unwrap();
        assert_eq!(a.d(&st), a.parse("x*t - (x^2 - 1)*s").unwrap());
        // d(x^3 t) = x^3 (x^2 - 1).
        assert_eq!(a.d(&a.parse("x^3*t").unwrap()), a.parse("x^5 - x^3").unwrap());
        assert!(a.d(&a.d(&st)).is_zero());
    }

    #[test]
    fn even_power_rule() {
        let a = PresentedCdga::new([("g", 2), ("h", -2), ("y", 1), ("w", 5)])
            .unwrap()
            .with_d("y", "g*h - 1")
            .unwrap()
            .with_d("w", "g*g")
            .unwrap();
        assert!(a.validate().is_valid());
        // d(y w) = (g h − 1) w − y g².
        let yw = a.parse("y*w").unwrap();
        assert_eq!(a.d(&yw), a.parse("(g*h - 1)*w - y*g^2").unwrap());
    }

    #[test]
    fn validation_examples() {
        assert!(koszul_c2().validate().is_valid());
        let m = PresentedCdga::new([("a", 1)]).unwrap().with_d("a", "1").unwrap();
        assert!(m.validate().is_valid());
        let bad = PresentedCdga::new([("x", 0), ("t", 1), ("s", 2)])
            .unwrap()
            .with_d("s", "x")
            .unwrap();
        let report = bad.validate();
        assert!(matches!(report.violations[0], CdgaViolation::Degree { .. }));
        // d(u) = t with d(t) = x + 1: d² ≠ 0.
        let bad = PresentedCdga::new([("x", 0), ("t", 1), ("u", 2)])
            .unwrap()
            .with_d("t", "x + 1")
            .unwrap()
            .with_d("u", "t")
            .unwrap();
        assert!(matches!(bad.validate().violations[0], CdgaViolation::DSquared { .. }));
    }

    #[test]
    fn tensor_renames_collisions() {
        let t = koszul_c2().tensor(&koszul_c2());
        let names: Vec<&str> = t.generators().iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, vec!["x", "t", "x_2", "t_2"]);
        assert_eq!(t.d_of("t_2").unwrap(), &t.parse("x_2 + 1").unwrap());
        assert!(t.validate().is_valid());
        let u = PresentedCdga::unit().tensor(&koszul_c2());
        assert_eq!(u, koszul_c2());
        let ea = PresentedCdga::new([("a", 1)]).unwrap().with_d("a", "1").unwrap();
        let g = PresentedCdga::new([("gamma", 2)]).unwrap();
        let e = ea.tensor(&g);
        assert_eq!(e.len(), 2);
        assert_eq!(e.d_of("a").unwrap(), &e.one());
        assert!(e.d_of("gamma").unwrap().is_zero());
    }

    #[test]
    fn relations_reduce() {
        let f = PresentedCdga::new([("z", 0), ("beta", 2), ("betainv", -2)])
            .unwrap()
            .with_relation("z^2 + z + 1")
            .unwrap()
            .with_relation("beta*betainv - 1")
            .unwrap();
        assert!(f.validate().is_valid());
        assert_eq!(f.reduce(&f.parse("z^3").unwrap()), f.one());
        assert_eq!(f.reduce(&f.parse("beta^2*betainv").unwrap()), f.gen("beta").unwrap());
        assert!(f.is_zero_element(&f.parse("z^2 + z + 1").unwrap()));
    }

    #[test]
    fn json_round_trip() {
        let a = koszul_c2().with_relation("x^2 - 1").unwrap();
        let json = serde_json::to_string(&a.to_json()).unwrap();
        let back = PresentedCdga::from_json(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(a, back);
        let mut bad = a.to_json();
        bad.action = Some("sign".into());
        assert!(matches!(
            PresentedCdga::from_json(&bad),
            Err(CdgaError::UnsupportedAction(_))
        ));
    }
}
