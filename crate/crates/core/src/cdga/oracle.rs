//! Homology of weight-truncated subcomplexes by exact linear algebra.
//!
//! Each generator gets a positive weight with `weight(d(g))` bounded by
//! `weight(g)` term by term, so monomials of weight at most W span a
//! subcomplex. Its homology is a heuristic cross-check of the structural
//! results and is reported at two bounds together with a stabilization flag.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde::Serialize;

use super::{CdgaError, PresentedCdga};
use crate::exact::linalg::rank;
use crate::exact::{Monomial, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub window: (i64, i64),
    pub weight_bound: u32,
    pub extended_bound: u32,
    pub weights: BTreeMap<String, u32>,
    /// Homology dimensions for degrees `window.0..=window.1` at `weight_bound`.
    pub dims: Vec<usize>,
    pub extended_dims: Vec<usize>,
    pub stabilized: bool,
}

impl OracleReport {
    pub fn dim_in_degree(&self, k: i64) -> Option<usize> {
        if k < self.window.0 || k > self.window.1 {
            return None;
        }
        Some(self.dims[(k - self.window.0) as usize])
    }
}

fn monomial_weight(w: &[u32], m: &Monomial) -> u32 {
    m.0.iter().zip(w).map(|(&e, &wi)| e * wi).sum()
}

/// Weights 1 on cycles and, otherwise, the largest term weight of the
/// differential (at least 1), iterated to a fixed point.
pub fn weight_function(a: &PresentedCdga) -> Result<Vec<u32>, CdgaError> {
    if !a.relations().is_empty() {
        return Err(CdgaError::OracleUnavailable(
            "presentations with relations have no monomial basis".into(),
        ));
    }
    let n = a.len();
    let mut w = vec![1u32; n];
    for _ in 0..=n {
        let mut changed = false;
        for i in 0..n {
            let need = a
                .d_gen(i)
                .terms()
                .map(|(m, _)| monomial_weight(&w, m))
                .max()
                .unwrap_or(1)
                .max(1);
            if need > w[i] {
                w[i] = need;
                changed = true;
            }
        }
        if !changed {
            return Ok(w);
        }
    }
    Err(CdgaError::OracleUnavailable(
        "differential weights do not settle; no valid weight function".into(),
    ))
}

/// Monomials of weight ≤ `bound` grouped by degree, restricted to `degrees`.
fn enumerate(
    a: &PresentedCdga,
    w: &[u32],
    bound: u32,
    degrees: (i64, i64),
) -> BTreeMap<i64, Vec<Monomial>> {
    fn go(
        a: &PresentedCdga,
        w: &[u32],
        i: usize,
        left: u32,
        cur: &mut Vec<u32>,
        degrees: (i64, i64),
        out: &mut BTreeMap<i64, Vec<Monomial>>,
    ) {
        if i == cur.len() {
            let m = Monomial(cur.clone());
            let d = a.monomial_degree(&m);
            if d >= degrees.0 && d <= degrees.1 {
                out.entry(d).or_default().push(m);
            }
            return;
        }
        let max = if a.is_odd(i) { 1 } else { left / w[i] };
        for e in 0..=max.min(left / w[i]) {
            cur[i] = e;
            go(a, w, i + 1, left - e * w[i], cur, degrees, out);
        }
        cur[i] = 0;
    }
    let mut out = BTreeMap::new();
    go(a, w, 0, bound, &mut vec![0; a.len()], degrees, &mut out);
    out
}

/// Rank of d: C_k → C_{k-1} on the truncated basis.
fn boundary_rank(
    a: &PresentedCdga,
    basis: &BTreeMap<i64, Vec<Monomial>>,
    k: i64,
) -> Result<usize, CdgaError> {
    let (Some(src), Some(dst)) = (basis.get(&k), basis.get(&(k - 1))) else {
        return Ok(0);
    };
    let index: HashMap<&Monomial, usize> = dst.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut rows = Vec::with_capacity(src.len());
    for m in src {
        let mut row = vec![Rational::zero(); dst.len()];
        let dm = a.d(&crate::exact::MultiPoly::monomial(a.vars(), m.clone(), num_traits::One::one()));
        for (t, c) in dm.terms() {
            let j = index.get(t).ok_or_else(|| {
                CdgaError::OracleUnavailable(format!("truncation is not closed under d at {t:?}"))
            })?;
            row[*j] = c.clone();
        }
        rows.push(row);
    }
    Ok(rank(rows))
}

/// Largest truncated chain group the oracle will row-reduce.
pub const MAX_ORACLE_BASIS: usize = 1500;

fn truncated_dims(
    a: &PresentedCdga,
    w: &[u32],
    window: (i64, i64),
    bound: u32,
) -> Result<Vec<usize>, CdgaError> {
    let basis = enumerate(a, w, bound, (window.0 - 1, window.1 + 1));
    if let Some((k, ms)) = basis.iter().find(|(_, ms)| ms.len() > MAX_ORACLE_BASIS) {
        return Err(CdgaError::OracleUnavailable(format!(
            "{} monomials in degree {k} at weight {bound} exceed the limit of {MAX_ORACLE_BASIS}",
            ms.len()
        )));
    }
    let mut out = Vec::new();
    for k in window.0..=window.1 {
        let dim = basis.get(&k).map_or(0, Vec::len);
        let out_rank = boundary_rank(a, &basis, k)?;
        let in_rank = boundary_rank(a, &basis, k + 1)?;
        out.push(dim - out_rank - in_rank);
    }
    Ok(out)
}

/// Homology dimensions of the weight-≤W subcomplex in the given degree
/// window, at W and at W + `delta`.
pub fn truncated_homology_oracle(
    a: &PresentedCdga,
    window: (i64, i64),
    weight_bound: u32,
    delta: u32,
) -> Result<OracleReport, CdgaError> {
    if window.0 > window.1 {
        return Err(CdgaError::Malformed(format!("empty degree window {window:?}")));
    }
    let w = weight_function(a)?;
    let dims = truncated_dims(a, &w, window, weight_bound)?;
    let extended_bound = weight_bound + delta.max(1);
    let extended_dims = truncated_dims(a, &w, window, extended_bound)?;
    Ok(OracleReport {
        window,
        weight_bound,
        extended_bound,
        weights: a
            .generators()
            .iter()
            .zip(&w)
            .map(|(g, &wi)| (g.name.clone(), wi))
            .collect(),
        stabilized: dims == extended_dims,
        dims,
        extended_dims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koszul_c2() {
        let a = PresentedCdga::new([("x", 0), ("t", 1)])
            .unwrap()
            .with_d("t", "x + 1")
            .unwrap();
        let r = truncated_homology_oracle(&a, (0, 2), 8, 2).unwrap();
        assert_eq!(r.dims, vec![1, 0, 0]);
        assert!(r.stabilized);
    }

    #[test]
    fn unit_boundary_is_acyclic() {
        let a = PresentedCdga::new([("a", 1)]).unwrap().with_d("a", "1").unwrap();
        for w in 1..5 {
            assert_eq!(truncated_homology_oracle(&a, (0, 1), w, 1).unwrap().dims, vec![0, 0]);
        }
    }

    #[test]
    fn laurent_block() {
        let a = PresentedCdga::new([("gamma", 2), ("gammabar", -2), ("y", 1)])
            .unwrap()
            .with_d("y", "gamma*gammabar - 1")
            .unwrap();
        let r = truncated_homology_oracle(&a, (-2, 2), 6, 2).unwrap();
        assert_eq!(r.weights["y"], 2);
        assert_eq!(r.dims, vec![1, 0, 1, 0, 1]);
        assert!(r.stabilized);
    }

    #[test]
    fn relations_are_refused() {
        let a = PresentedCdga::new([("z", 0)]).unwrap().with_relation("z + 1").unwrap();
        assert!(matches!(
            truncated_homology_oracle(&a, (0, 0), 3, 1),
            Err(CdgaError::OracleUnavailable(_))
        ));
    }
}
