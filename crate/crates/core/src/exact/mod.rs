//! Exact arithmetic: rationals, sparse polynomials, cyclotomic fields,
//! ideal normal forms and dense linear algebra over ℚ.

pub mod cyclotomic;
pub mod ideal;
pub mod linalg;
pub mod poly;

use thiserror::Error;

pub use cyclotomic::{
    cyclo_embed, cyclotomic, cyclotomic_coeffs, unit_root_solutions, verify_cyclotomic_identity,
    verify_pth_root_lifting, CycloEmbedding, CyclotomicElt, RootLiftWitness,
};
pub use ideal::{IdealNF, QuotientDim};
pub use poly::{Monomial, MultiPoly, PolyJson, TermJson};

/// Arbitrary-precision rational, always normalised (lowest terms, positive
/// denominator).
pub type Rational = num_rational::BigRational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{m} does not divide {n}")]
    NotDivisor { m: u64, n: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed polynomial: {0}")]
    Malformed(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorisation as `(p, k)` pairs in increasing `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut k = 0;
        while n % p == 0 {
            n /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .map(|(p, k)| (p - 1) * p.pow(k - 1))
        .product()
}

/// Möbius function.
pub fn mobius(n: u64) -> i32 {
    let f = factorize(n);
    if f.iter().any(|&(_, k)| k > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Inverse of `a` modulo `m` (`m ≥ 1`), if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    (1..m).find(|x| (a % m) * x % m == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    #[test]
    fn number_theory_helpers() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(49), 42);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        assert!(is_prime(7) && !is_prime(1) && !is_prime(9));
        assert_eq!(mod_inverse(3, 4), Some(3));
        assert_eq!(mod_inverse(2, 4), None);
    }

    #[test]
    fn rationals_stay_reduced() {
        let r = Rational::new(6.into(), (-4).into());
        assert_eq!(r.numer(), &(-3).into());
        assert_eq!(r.denom(), &2.into());
    }

    proptest! {
        #[test]
        fn rational_inverse_is_exact(a in -10_000i64..10_000, b in -10_000i64..10_000) {
            prop_assume!(a != 0 && b != 0);
            let x = Rational::new(a.into(), b.into());
            let y = Rational::new(b.into(), a.into());
            prop_assert!((x.clone() * y).is_one());
            prop_assert!((x.clone() - x).is_zero());
        }
    }
}
