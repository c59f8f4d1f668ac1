//! Cyclotomic polynomials and arithmetic in ℚ(ζ_n) = ℚ[x]/(Φ_n).

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{divisors, euler_phi, gcd, is_prime, mobius, q, ExactError, MultiPoly, Rational};

/// Largest `n` accepted by field arithmetic here.
pub const MAX_CYCLOTOMIC_ORDER: u64 = 4096;

fn int_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division by a monic divisor; panics on a non-zero remainder.
fn int_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    assert!(den[dd].is_one());
    let mut quo = vec![BigInt::zero(); rem.len().saturating_sub(dd)];
    for k in (0..quo.len()).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, d) in den.iter().enumerate() {
            rem[k + j] -= &c * d;
        }
        quo[k] = c;
    }
    assert!(rem.iter().all(Zero::is_zero), "inexact cyclotomic division");
    quo
}

fn x_pow_minus_one(d: u64) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); d as usize + 1];
    v[0] = -BigInt::one();
    v[d as usize] = BigInt::one();
    v
}

/// Coefficients of Φ_n, lowest degree first, via Φ_n = ∏_{d|n} (x^d − 1)^{μ(n/d)}.
pub fn cyclotomic_coeffs(n: u64) -> Vec<BigInt> {
    assert!(n >= 1, "cyclotomic index must be positive");
    let mut num = vec![BigInt::one()];
    let mut den = vec![BigInt::one()];
    for d in divisors(n) {
        match mobius(n / d) {
            1 => num = int_mul(&num, &x_pow_minus_one(d)),
            -1 => den = int_mul(&den, &x_pow_minus_one(d)),
            _ => {}
        }
    }
    // Normalise sign so the result is monic.
    let lead = den.last().unwrap().clone();
    if lead.is_negative() {
        den.iter_mut().for_each(|c| *c = -c.clone());
        num.iter_mut().for_each(|c| *c = -c.clone());
    }
    int_div_exact(&num, &den)
}

fn coeffs_q(n: u64) -> Vec<Rational> {
    cyclotomic_coeffs(n)
        .into_iter()
        .map(Rational::from_integer)
        .collect()
}

/// Φ_n as a univariate polynomial in `x`.
pub fn cyclotomic(n: u64) -> MultiPoly {
    let vars: Arc<[String]> = vec!["x".to_string()].into();
    MultiPoly::from_univariate(&vars, 0, &coeffs_q(n))
}

/// Checks Φ_p(x^{p^{k−1}}) = Φ_{p^k}(x) by exact polynomial comparison.
pub fn verify_cyclotomic_identity(p: u64, k: u32) -> Result<bool, ExactError> {
    if !is_prime(p) {
        return Err(ExactError::NotPrime(p));
    }
    if k == 0 {
        return Err(ExactError::InvalidArgument("k must be at least 1".into()));
    }
    let phi_p = cyclotomic(p);
    let x = MultiPoly::var(phi_p.vars(), 0);
    let lhs = phi_p.compose(&[x.pow(p.pow(k - 1) as u32)]);
    Ok(lhs == cyclotomic(p.pow(k)))
}

/// An element of ℚ(ζ_n), stored as the reduced residue mod Φ_n in the power
/// basis 1, ζ, …, ζ^{φ(n)−1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclotomicElt {
    n: u64,
    coeffs: Vec<Rational>,
}

impl CyclotomicElt {
    /// Reduces an arbitrary coefficient vector modulo Φ_n.
    pub fn from_coeffs(n: u64, mut v: Vec<Rational>) -> Self {
        let phi = coeffs_q(n);
        let d = phi.len() - 1;
        while v.len() > d {
            let top = v.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = v.len() - d;
            for (j, c) in phi[..d].iter().enumerate() {
                v[shift + j] -= &top * c;
            }
        }
        v.resize(d, Rational::zero());
        CyclotomicElt { n, coeffs: v }
    }

    pub fn zero(n: u64) -> Self {
        Self::from_coeffs(n, Vec::new())
    }

    pub fn one(n: u64) -> Self {
        Self::from_coeffs(n, vec![Rational::one()])
    }

    pub fn from_rational(n: u64, c: Rational) -> Self {
        Self::from_coeffs(n, vec![c])
    }

    /// ζ_n^k.
    pub fn zeta_pow(n: u64, k: u64) -> Self {
        let k = (k % n) as usize;
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = Rational::one();
        Self::from_coeffs(n, v)
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.n)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        CyclotomicElt { n: self.n, coeffs }
    }

    pub fn neg(&self) -> Self {
        CyclotomicElt {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        CyclotomicElt {
            n: self.n,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let len = (self.coeffs.len() + other.coeffs.len()).saturating_sub(1);
        let mut v = vec![Rational::zero(); len.max(1)];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::from_coeffs(self.n, v)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Evaluates the univariate polynomial with the given coefficients
    /// (lowest degree first) at this element.
    pub fn eval(&self, coeffs: &[Rational]) -> Self {
        let mut acc = Self::zero(self.n);
        for c in coeffs.iter().rev() {
            acc = acc.mul(self).add(&Self::from_rational(self.n, c.clone()));
        }
        acc
    }

    /// Multiplicative order, if this is a root of unity. Roots of unity in
    /// ℚ(ζ_n) have order dividing lcm(2, n).
    pub fn order(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let bound = if self.n % 2 == 0 { self.n } else { 2 * self.n };
        let mut acc = self.clone();
        for k in 1..=bound {
            if acc.is_one() {
                return Some(k);
            }
            acc = acc.mul(self);
        }
        None
    }

    /// Univariate polynomial representative in the named variable.
    pub fn to_poly(&self, vars: &Arc<[String]>, index: usize) -> MultiPoly {
        MultiPoly::from_univariate(vars, index, &self.coeffs)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(ToString::to_string).collect()
    }
}

impl fmt::Display for CyclotomicElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = format!("zeta{}", self.n);
        let vars: Arc<[String]> = vec![name].into();
        write!(f, "{}", self.to_poly(&vars, 0))
    }
}

/// The field inclusion ℚ(ζ_m) → ℚ(ζ_n), ζ_m ↦ ζ_n^{n/m}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloEmbedding {
    pub m: u64,
    pub n: u64,
    pub image: CyclotomicElt,
}

impl CycloEmbedding {
    pub fn apply(&self, x: &CyclotomicElt) -> CyclotomicElt {
        assert_eq!(x.modulus(), self.m);
        x.coeffs()
            .iter()
            .enumerate()
            .fold(CyclotomicElt::zero(self.n), |acc, (i, c)| {
                acc.add(&self.image.pow(i as u64).scale(c))
            })
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &CycloEmbedding) -> CycloEmbedding {
        assert_eq!(self.n, other.m);
        CycloEmbedding {
            m: self.m,
            n: other.n,
            image: other.apply(&self.image),
        }
    }
}

pub fn cyclo_embed(m: u64, n: u64) -> Result<CycloEmbedding, ExactError> {
    if m == 0 || n == 0 || n % m != 0 {
        return Err(ExactError::NotDivisor { m, n });
    }
    check_order(n)?;
    let image = CyclotomicElt::zeta_pow(n, n / m);
    if !image.eval(&coeffs_q(m)).is_zero() {
        return Err(ExactError::VerificationFailed(format!(
            "Φ_{m}(ζ_{n}^{}) is not zero",
            n / m
        )));
    }
    Ok(CycloEmbedding { m, n, image })
}

fn check_order(n: u64) -> Result<(), ExactError> {
    if n == 0 || n > MAX_CYCLOTOMIC_ORDER {
        return Err(ExactError::InvalidArgument(format!(
            "cyclotomic order {n} outside 1..={MAX_CYCLOTOMIC_ORDER}"
        )));
    }
    Ok(())
}

/// A root of Φ_m found in ℚ(ζ_n), written as `sign · ζ_n^exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitRoot {
    pub sign: i8,
    pub exponent: u64,
    #[serde(serialize_with = "ser_elt")]
    pub value: CyclotomicElt,
}

fn ser_elt<S: serde::Serializer>(x: &CyclotomicElt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(x.to_strings())
}

/// All roots of Φ_m in ℚ(ζ_n) of the form ±ζ_n^k. Every root of unity of
/// ℚ(ζ_n) has this form, so for roots of unity the search is complete.
pub fn unit_root_solutions(m: u64, n: u64) -> Result<Vec<UnitRoot>, ExactError> {
    if m == 0 {
        return Err(ExactError::InvalidArgument("m must be at least 1".into()));
    }
    check_order(n)?;
    let phi_m = coeffs_q(m);
    let mut out: Vec<UnitRoot> = Vec::new();
    for sign in [1i8, -1] {
        for k in 0..n {
            let mut v = CyclotomicElt::zeta_pow(n, k);
            if sign < 0 {
                v = v.neg();
            }
            if out.iter().any(|r| r.value == v) {
                continue;
            }
            if v.eval(&phi_m).is_zero() {
                out.push(UnitRoot {
                    sign,
                    exponent: k,
                    value: v,
                });
            }
        }
    }
    Ok(out)
}

/// One lifted root: `(ζ^root_exponent)^p = ζ^target_exponent` in ℚ(ζ_{p^r}).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootLiftWitness {
    pub target_exponent: u64,
    pub root_exponent: u64,
}

/// For every primitive p^{r−1}-th root of unity u = ζ^j in ℚ(ζ_{p^r}), finds a
/// primitive p^r-th root α = ζ^i with α^p = u, verifying each identity by
/// reduction modulo Φ_{p^r}.
pub fn verify_pth_root_lifting(p: u64, r: u32) -> Result<Vec<RootLiftWitness>, ExactError> {
    if !is_prime(p) {
        return Err(ExactError::NotPrime(p));
    }
    if r < 2 {
        return Err(ExactError::InvalidArgument("r must be at least 2".into()));
    }
    let big = p
        .checked_pow(r)
        .filter(|&n| n <= MAX_CYCLOTOMIC_ORDER)
        .ok_or_else(|| ExactError::InvalidArgument(format!("{p}^{r} exceeds the arithmetic bound")))?;
    let sub = big / p;
    let mut out = Vec::new();
    for j in 0..big {
        if gcd(j, big) != p {
            continue;
        }
        let u = CyclotomicElt::zeta_pow(big, j);
        if u.order() != Some(sub) {
            return Err(ExactError::VerificationFailed(format!(
                "ζ^{j} is not a primitive {sub}-th root of unity"
            )));
        }
        let found = (0..big).filter(|i| i % p != 0).find_map(|i| {
            let alpha = CyclotomicElt::zeta_pow(big, i);
            (alpha.pow(p) == u && alpha.order() == Some(big)).then_some(i)
        });
        match found {
            Some(i) => out.push(RootLiftWitness {
                target_exponent: j,
                root_exponent: i,
            }),
            None => {
                return Err(ExactError::VerificationFailed(format!(
                    "no primitive {big}-th root of unity has p-th power ζ^{j}"
                )))
            }
        }
    }
    Ok(out)
}

/// Φ_m evaluated at an integer.
pub fn cyclotomic_at(m: u64, x: i64) -> BigInt {
    cyclotomic_coeffs(m)
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, c| acc * BigInt::from(x) + c)
}

/// Euler's totient of `n` as the degree of Φ_n.
pub fn cyclotomic_degree(n: u64) -> usize {
    euler_phi(n) as usize
}

/// Rational roots of Φ_m: by the rational-root theorem only ±1 can occur.
pub fn rational_roots_of_cyclotomic(m: u64) -> Vec<Rational> {
    [1i64, -1]
        .into_iter()
        .filter(|&x| cyclotomic_at(m, x).is_zero())
        .map(q)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::poly::Monomial;
    use proptest::prelude::*;

    fn xpoly(s: &str) -> MultiPoly {
        let vars: Arc<[String]> = vec!["x".to_string()].into();
        MultiPoly::parse(&vars, s).unwrap()
    }

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic(1), xpoly("x - 1"));
        assert_eq!(cyclotomic(2), xpoly("x + 1"));
        assert_eq!(cyclotomic(12), xpoly("x^4 - x^2 + 1"));
        assert_eq!(cyclotomic(9), xpoly("x^6 + x^3 + 1"));
        assert_eq!(cyclotomic(8), xpoly("x^4 + 1"));
    }

    /// Independent route: Φ_n = (x^n − 1) / ∏_{d|n, d<n} Φ_d by long division.
    fn phi_by_division(n: u64) -> Vec<BigInt> {
        let mut num = x_pow_minus_one(n);
        for d in divisors(n).into_iter().filter(|&d| d < n) {
            num = int_div_exact(&num, &phi_by_division(d));
        }
        num
    }

    #[test]
    fn mobius_route_matches_division_route() {
        for n in 1..=40 {
            assert_eq!(cyclotomic_coeffs(n), phi_by_division(n), "n = {n}");
        }
    }

    #[test]
    fn product_over_divisors_is_x_n_minus_one() {
        for n in 1..=60u64 {
            let prod = divisors(n)
                .into_iter()
                .fold(xpoly("1"), |acc, d| &acc * &cyclotomic(d));
            let expect = &xpoly("x").pow(n as u32) - &xpoly("1");
            assert_eq!(prod, expect, "n = {n}");
            assert_eq!(cyclotomic(n).total_degree(), Some(euler_phi(n) as u32));
        }
    }

    #[test]
    fn identity_holds_for_prime_powers() {
        assert!(verify_cyclotomic_identity(2, 1).unwrap());
        assert!(verify_cyclotomic_identity(2, 3).unwrap());
        assert!(verify_cyclotomic_identity(3, 2).unwrap());
        assert_eq!(
            verify_cyclotomic_identity(4, 2),
            Err(ExactError::NotPrime(4))
        );
        // Explicit value for Φ₂(x⁴).
        let x4 = xpoly("x^4");
        assert_eq!(cyclotomic(2).compose(&[x4]), xpoly("x^4 + 1"));
    }

    #[test]
    fn field_arithmetic() {
        // ζ₄² = −1.
        let z = CyclotomicElt::zeta_pow(4, 2);
        assert_eq!(z, CyclotomicElt::from_rational(4, q(-1)));
        assert_eq!(CyclotomicElt::zeta_pow(12, 1).order(), Some(12));
        assert_eq!(CyclotomicElt::zeta_pow(3, 1).neg().order(), Some(6));
        assert_eq!(CyclotomicElt::zeta_pow(7, 3).pow(7), CyclotomicElt::one(7));
        assert_eq!(CyclotomicElt::zero(5).order(), None);
        assert_eq!(CyclotomicElt::from_rational(5, q(2)).order(), None);
    }

    #[test]
    fn embeddings() {
        let e = cyclo_embed(2, 4).unwrap();
        assert_eq!(e.image, CyclotomicElt::from_rational(4, q(-1)));
        let id = cyclo_embed(5, 5).unwrap();
        assert_eq!(id.image, CyclotomicElt::zeta_pow(5, 1));
        let x = CyclotomicElt::from_coeffs(5, vec![q(1), q(2), q(3)]);
        assert_eq!(id.apply(&x), x);
        let e = cyclo_embed(3, 12).unwrap();
        assert!(e.image.eval(&coeffs_q(3)).is_zero());
        assert_eq!(cyclo_embed(3, 4), Err(ExactError::NotDivisor { m: 3, n: 4 }));
    }

    #[test]
    fn embedding_composition_over_divisors_of_60() {
        let ds = divisors(60);
        for &m in &ds {
            for &n in ds.iter().filter(|&&n| n % m == 0) {
                for &big in ds.iter().filter(|&&b| b % n == 0) {
                    let lhs = cyclo_embed(m, n).unwrap().then(&cyclo_embed(n, big).unwrap());
                    assert_eq!(lhs, cyclo_embed(m, big).unwrap(), "{m} | {n} | {big}");
                }
            }
        }
    }

    #[test]
    fn unit_roots() {
        let r = unit_root_solutions(4, 4).unwrap();
        let exps: Vec<u64> = r.iter().map(|u| u.exponent).collect();
        assert_eq!(exps, vec![1, 3]);
        assert!(unit_root_solutions(3, 4).unwrap().is_empty());
        let r = unit_root_solutions(2, 1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].value, CyclotomicElt::from_rational(1, q(-1)));
        // Odd n: the order-2n roots are the negatives.
        let r = unit_root_solutions(6, 3).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|u| u.sign == -1));
        let r = unit_root_solutions(3, 9).unwrap();
        assert!(r.iter().any(|u| u.exponent == 3 && u.sign == 1));
    }

    #[test]
    fn root_lifting() {
        let w = verify_pth_root_lifting(2, 2).unwrap();
        assert_eq!(
            w,
            vec![RootLiftWitness {
                target_exponent: 2,
                root_exponent: 1
            }]
        );
        let w = verify_pth_root_lifting(3, 2).unwrap();
        assert!(w.contains(&RootLiftWitness {
            target_exponent: 3,
            root_exponent: 1
        }));
        assert_eq!(w.len(), 2);
        let w = verify_pth_root_lifting(2, 3).unwrap();
        assert!(w.contains(&RootLiftWitness {
            target_exponent: 2,
            root_exponent: 1
        }));
        assert!(verify_pth_root_lifting(6, 2).is_err());
        assert!(verify_pth_root_lifting(3, 1).is_err());
    }

    #[test]
    fn rational_roots() {
        assert_eq!(rational_roots_of_cyclotomic(1), vec![q(1)]);
        assert_eq!(rational_roots_of_cyclotomic(2), vec![q(-1)]);
        assert!(rational_roots_of_cyclotomic(3).is_empty());
        assert_eq!(cyclotomic_at(7, 1), BigInt::from(7));
    }

    proptest! {
        #[test]
        fn field_multiplication_is_commutative(a in proptest::collection::vec(-5i64..5, 0..8),
                                              b in proptest::collection::vec(-5i64..5, 0..8),
                                              n in 1u64..30) {
            let x = CyclotomicElt::from_coeffs(n, a.into_iter().map(q).collect());
            let y = CyclotomicElt::from_coeffs(n, b.into_iter().map(q).collect());
            prop_assert_eq!(x.mul(&y), y.mul(&x));
            prop_assert_eq!(x.coeffs().len(), euler_phi(n) as usize);
        }
    }

    #[test]
    fn to_poly_uses_power_basis() {
        let vars: Arc<[String]> = vec!["z".to_string()].into();
        let p = CyclotomicElt::zeta_pow(4, 3).to_poly(&vars, 0);
        assert_eq!(p.coeff(&Monomial(vec![1])), q(-1));
    }
}
