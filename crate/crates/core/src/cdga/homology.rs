//! Structural homology of recognized presentations.
//!
//! A recognized presentation is a Koszul block (degree-0 cycles `x` and
//! degree-1 generators `t` with `d(t)` a polynomial in the `x`), possibly
//! tensored with ℚ[γ] or with ℚ[γ, γ̄]⊗E(y), d(y) = γγ̄ − 1. Homology of the
//! Koszul block is read off a complete-intersection certificate; the H₀
//! field is identified by the minimal polynomial of a chosen generator.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{CdgaError, CdgaMap, PresentedCdga};
use crate::exact::linalg::{first_dependency, rank, solve_combination};
use crate::exact::cyclotomic::MAX_CYCLOTOMIC_ORDER;
use crate::exact::{
    cyclotomic_coeffs, euler_phi, mod_inverse, CyclotomicElt, IdealNF, Monomial, MultiPoly,
    Rational,
};

/// Generator names of the formal targets.
pub const FIELD_GEN: &str = "z";
pub const BETA: &str = "beta";
pub const BETA_INV: &str = "betainv";

/// The four shapes homology can take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum GradedRingValue {
    Zero,
    /// ℚ(ζ_n) in degree 0.
    Field { n: u64 },
    /// ℚ(ζ_n)[β], |β| = 2.
    Polynomial { n: u64 },
    /// ℚ(ζ_n)[β, β⁻¹].
    Laurent { n: u64 },
}

impl GradedRingValue {
    pub fn order(&self) -> Option<u64> {
        match *self {
            GradedRingValue::Zero => None,
            GradedRingValue::Field { n }
            | GradedRingValue::Polynomial { n }
            | GradedRingValue::Laurent { n } => Some(n),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, GradedRingValue::Zero)
    }

    pub fn has_beta(&self) -> bool {
        matches!(
            self,
            GradedRingValue::Polynomial { .. } | GradedRingValue::Laurent { .. }
        )
    }

    pub fn h0_dim(&self) -> usize {
        self.dim_in_degree(0)
    }

    pub fn dim_in_degree(&self, k: i64) -> usize {
        let phi = |n: u64| euler_phi(n) as usize;
        match *self {
            GradedRingValue::Zero => 0,
            GradedRingValue::Field { n } => if k == 0 { phi(n) } else { 0 },
            GradedRingValue::Polynomial { n } => {
                if k >= 0 && k % 2 == 0 { phi(n) } else { 0 }
            }
            GradedRingValue::Laurent { n } => if k.rem_euclid(2) == 0 { phi(n) } else { 0 },
        }
    }

    pub fn dims(&self, lo: i64, hi: i64) -> Vec<usize> {
        (lo..=hi).map(|k| self.dim_in_degree(k)).collect()
    }

    /// The same ring with β adjoined (or made invertible).
    pub fn with_beta(self, invertible: bool) -> Self {
        match (self.order(), invertible) {
            (None, _) => GradedRingValue::Zero,
            (Some(n), false) => GradedRingValue::Polynomial { n },
            (Some(n), true) => GradedRingValue::Laurent { n },
        }
    }
}

impl fmt::Display for GradedRingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let field = |n: u64| if n == 1 { "Q".to_string() } else { format!("Q(zeta_{n})") };
        match *self {
            GradedRingValue::Zero => write!(f, "0"),
            GradedRingValue::Field { n } => write!(f, "{}", field(n)),
            GradedRingValue::Polynomial { n } => write!(f, "{}[beta]", field(n)),
            GradedRingValue::Laurent { n } => write!(f, "{}[beta, beta^-1]", field(n)),
        }
    }
}

/// Generators sorted into the recognized blocks.
struct Shape {
    xs: Vec<usize>,
    ts: Vec<usize>,
    bott: Vec<usize>,
    bott_inv: Vec<usize>,
    links: Vec<usize>,
    x_relations: Vec<MultiPoly>,
    link_relations: usize,
}

fn is_link(a: &PresentedCdga, p: &MultiPoly, bott: &[usize], bott_inv: &[usize]) -> bool {
    bott.iter().any(|&g| {
        bott_inv.iter().any(|&h| {
            let gh = &MultiPoly::var(a.vars(), g) * &MultiPoly::var(a.vars(), h);
            *p == &gh - &a.one()
        })
    })
}

fn classify(a: &PresentedCdga) -> Result<Shape, CdgaError> {
    let xs = a.degree_zero_cycles();
    let mut ts = Vec::new();
    let mut bott = Vec::new();
    let mut bott_inv = Vec::new();
    let mut odd_rest = Vec::new();
    for (i, g) in a.generators().iter().enumerate() {
        if xs.contains(&i) {
            continue;
        }
        let d = a.d_gen(i);
        match g.degree {
            1 if PresentedCdga::supported_in(d, &xs) => ts.push(i),
            1 => odd_rest.push(i),
            2 if d.is_zero() => bott.push(i),
            -2 if d.is_zero() => bott_inv.push(i),
            _ => {
                return Err(CdgaError::Undetermined(format!(
                    "generator {} of degree {} is outside the recognized blocks",
                    g.name, g.degree
                )))
            }
        }
    }
    let mut links = Vec::new();
    for i in odd_rest {
        if is_link(a, a.d_gen(i), &bott, &bott_inv) {
            links.push(i);
        } else {
            return Err(CdgaError::Undetermined(format!(
                "d({}) = {} is not recognized",
                a.generators()[i].name,
                a.d_gen(i)
            )));
        }
    }
    let mut x_relations = Vec::new();
    let mut link_relations = 0;
    for r in a.relations() {
        if PresentedCdga::supported_in(r, &xs) {
            x_relations.push(r.clone());
        } else if is_link(a, r, &bott, &bott_inv) {
            link_relations += 1;
        } else {
            return Err(CdgaError::Undetermined(format!("relation {r} is not recognized")));
        }
    }
    Ok(Shape {
        xs,
        ts,
        bott,
        bott_inv,
        links,
        x_relations,
        link_relations,
    })
}

fn x_ring(a: &PresentedCdga, xs: &[usize]) -> Arc<[String]> {
    xs.iter()
        .map(|&i| a.generators()[i].name.clone())
        .collect::<Vec<_>>()
        .into()
}

/// Evidence that a Koszul-shaped presentation has homology concentrated in
/// degree 0, equal to ℚ[x]/(equations).
#[derive(Clone, Debug)]
pub struct KoszulCertificate {
    pub variables: Vec<String>,
    pub equations: Vec<MultiPoly>,
    pub ideal: IdealNF,
    pub h0_dim: usize,
}

fn koszul_ideal(a: &PresentedCdga, shape: &Shape) -> Result<(Arc<[String]>, Vec<MultiPoly>, IdealNF), CdgaError> {
    let ring = x_ring(a, &shape.xs);
    let eqs = shape
        .ts
        .iter()
        .map(|&t| a.d_gen(t))
        .chain(&shape.x_relations)
        .map(|p| p.rebase(&ring))
        .collect::<Result<Vec<_>, _>>()?;
    let ideal = IdealNF::new(&ring, eqs.clone());
    Ok((ring, eqs, ideal))
}

/// Certificate for presentations made only of degree-0 cycles and degree-1
/// generators bounding into them, with as many equations as variables and
/// a finite-dimensional quotient.
pub fn complete_intersection_certificate(a: &PresentedCdga) -> Option<KoszulCertificate> {
    let shape = classify(a).ok()?;
    if !(shape.bott.is_empty() && shape.bott_inv.is_empty() && shape.links.is_empty()) {
        return None;
    }
    if shape.link_relations > 0 || shape.ts.len() + shape.x_relations.len() != shape.xs.len() {
        return None;
    }
    let (ring, equations, ideal) = koszul_ideal(a, &shape).ok()?;
    let h0_dim = ideal.quotient_dimension().finite()?;
    Some(KoszulCertificate {
        variables: ring.to_vec(),
        equations,
        ideal,
        h0_dim,
    })
}

/// True iff 1 lies in the ideal of degree-0 cycles generated by the
/// boundaries of degree-1 generators (and the degree-0 relations).
pub fn acyclic_by_unit_boundary(a: &PresentedCdga) -> bool {
    let xs = a.degree_zero_cycles();
    let ring = x_ring(a, &xs);
    let gens: Vec<MultiPoly> = (0..a.len())
        .filter(|&i| a.degree_of(i) == 1)
        .map(|i| a.d_gen(i))
        .chain(a.relations())
        .filter(|p| PresentedCdga::supported_in(p, &xs))
        .filter_map(|p| p.rebase(&ring).ok())
        .collect();
    IdealNF::new(&ring, gens).is_unit_ideal()
}

/// Structural homology together with the data identifying H₀.
#[derive(Clone, Debug)]
pub struct HomologyInfo {
    pub value: GradedRingValue,
    /// Names of the degree-0 cycle generators, the ring H₀ is a quotient of.
    pub cycle_vars: Vec<String>,
    /// The designated generator of H₀, a primitive n-th root of unity,
    /// written in the cycle variables.
    pub generator: MultiPoly,
    /// Minimal polynomial of the generator, lowest coefficient first.
    pub min_poly: Vec<Rational>,
    pub bott: Option<String>,
    pub bott_inverse: Option<String>,
    ring: Arc<[String]>,
    ideal: IdealNF,
    power_coords: Vec<Vec<Rational>>,
}

impl HomologyInfo {
    pub fn h0_dim(&self) -> usize {
        self.value.h0_dim()
    }

    pub fn quotient(&self) -> &IdealNF {
        &self.ideal
    }

    /// Coefficients of a degree-0 cycle as a polynomial in the designated
    /// generator, of length φ(n).
    pub fn express(&self, x: &MultiPoly) -> Result<Vec<Rational>, CdgaError> {
        if self.value.is_zero() {
            return Ok(Vec::new());
        }
        let p = x.rebase(&self.ring).map_err(|_| {
            CdgaError::NotApplicable(format!("{x} is not a polynomial in the degree-0 cycles"))
        })?;
        let v = self.ideal.coordinates(&p);
        solve_combination(&self.power_coords, &v).ok_or_else(|| {
            CdgaError::VerificationFailed(format!("{x} is not in the span of the generator's powers"))
        })
    }

    /// A degree-0 cycle as an element of ℚ(ζ_n), with ζ_n the designated
    /// generator.
    pub fn express_cyclotomic(&self, x: &MultiPoly) -> Result<CyclotomicElt, CdgaError> {
        let n = self
            .value
            .order()
            .ok_or_else(|| CdgaError::NotApplicable("homology is zero".into()))?;
        Ok(CyclotomicElt::from_coeffs(n, self.express(x)?))
    }

    /// Coefficient `c` in `x = c·β` for a degree-2 element built from the
    /// cycles and the Bott generator, read in homology.
    pub fn bott_coefficient(&self, a: &PresentedCdga, x: &MultiPoly) -> Result<CyclotomicElt, CdgaError> {
        let n = self
            .value
            .order()
            .ok_or_else(|| CdgaError::NotApplicable("homology is zero".into()))?;
        let Some(b) = &self.bott else {
            return Err(CdgaError::NotApplicable("no Bott generator".into()));
        };
        let bi = a.index_of(b)?;
        let binv = match &self.bott_inverse {
            Some(name) => Some(a.index_of(name)?),
            None => None,
        };
        let xs: Vec<usize> = self
            .cycle_vars
            .iter()
            .map(|v| a.index_of(v))
            .collect::<Result<_, _>>()?;
        let mut coeff = a.zero();
        for (m, c) in x.terms() {
            let mut rest = m.clone();
            let up = rest.0[bi];
            rest.0[bi] = 0;
            let down = binv.map_or(0, |j| std::mem::take(&mut rest.0[j]));
            // γ^{k+1} γ̄^k is a cycle homologous to γ in the invertible case.
            let ok = up == down + 1 && (down == 0 || binv.is_some());
            if !ok || rest.0.iter().enumerate().any(|(i, &e)| e > 0 && !xs.contains(&i)) {
                return Err(CdgaError::Undetermined(format!(
                    "{x} is not a multiple of the Bott generator"
                )));
            }
            coeff.add_term(rest, c.clone());
        }
        Ok(CyclotomicElt::from_coeffs(n, self.express(&coeff)?))
    }
}

fn multiplicative_order(ideal: &IdealNF, g: &MultiPoly, limit: u64) -> Option<u64> {
    let one = MultiPoly::one(ideal.vars());
    let base = ideal.normal_form(g);
    let mut p = base.clone();
    for k in 1..=limit {
        if p == one {
            return Some(k);
        }
        p = ideal.normal_form(&(&p * &base));
    }
    None
}

/// Minimal polynomial by the first linear dependency among powers.
fn minimal_polynomial(ideal: &IdealNF, g: &MultiPoly, dim: usize) -> (Vec<Rational>, Vec<Vec<Rational>>) {
    let mut powers = Vec::with_capacity(dim + 1);
    let mut p = MultiPoly::one(ideal.vars());
    for _ in 0..=dim {
        powers.push(ideal.coordinates(&p));
        p = ideal.normal_form(&(&p * g));
    }
    let (k, c) = first_dependency(&powers).expect("dim + 1 vectors in a space of dimension dim");
    let mut min_poly: Vec<Rational> = c.into_iter().map(|v| -v).collect();
    min_poly.push(Rational::one());
    powers.truncate(k);
    (min_poly, powers)
}

fn is_cyclotomic(n: u64, coeffs: &[Rational]) -> bool {
    let phi: Vec<Rational> = cyclotomic_coeffs(n)
        .into_iter()
        .map(|c: BigInt| Rational::from_integer(c))
        .collect();
    phi == coeffs
}

/// Degree-0 cycles that are the top of a root tower: those not appearing
/// as the linear side of an equation `x_a − x_b^k`.
fn tower_tops(ring: &Arc<[String]>, equations: &[MultiPoly]) -> Vec<usize> {
    let mut below = vec![false; ring.len()];
    for e in equations {
        if e.num_terms() != 2 {
            continue;
        }
        let terms: Vec<(&Monomial, &Rational)> = e.terms().collect();
        for (lin, pow) in [(0, 1), (1, 0)] {
            if let (Some((a, 1)), Some((b, k))) = (terms[lin].0.pure_power(), terms[pow].0.pure_power()) {
                if a != b && k >= 1 && *terms[lin].1 == -terms[pow].1.clone() {
                    below[a] = true;
                }
            }
        }
    }
    (0..ring.len()).filter(|&i| !below[i]).collect()
}

fn order_limit(dim: usize) -> u64 {
    (2 * (dim as u64).pow(2) + 2).min(MAX_CYCLOTOMIC_ORDER)
}

pub fn homology_of(a: &PresentedCdga) -> Result<HomologyInfo, CdgaError> {
    let shape = classify(a)?;
    let (ring, equations, ideal) = koszul_ideal(a, &shape)?;
    let cycle_vars = ring.to_vec();
    let name = |i: usize| a.generators()[i].name.clone();
    if ideal.is_unit_ideal() {
        return Ok(HomologyInfo {
            value: GradedRingValue::Zero,
            cycle_vars,
            generator: MultiPoly::zero(&ring),
            min_poly: Vec::new(),
            bott: None,
            bott_inverse: None,
            ring,
            ideal,
            power_coords: Vec::new(),
        });
    }
    if equations.len() != ring.len() {
        return Err(CdgaError::Undetermined(format!(
            "{} equations in {} variables is not a complete intersection",
            equations.len(),
            ring.len()
        )));
    }
    let dim = ideal.quotient_dimension().finite().ok_or_else(|| {
        CdgaError::Undetermined("degree-0 quotient is infinite-dimensional".into())
    })?;
    let invertible = match (
        shape.bott.len(),
        shape.bott_inv.len(),
        shape.links.len() + shape.link_relations,
    ) {
        (0, 0, 0) => None,
        (1, 0, 0) => Some(false),
        (1, 1, 1) => Some(true),
        _ => return Err(CdgaError::Undetermined("unrecognized Bott block".into())),
    };

    let tops = tower_tops(&ring, &equations);
    let limit = order_limit(dim);
    let mut orders = Vec::new();
    for &i in &tops {
        let g = MultiPoly::var(&ring, i);
        let o = multiplicative_order(&ideal, &g, limit).ok_or_else(|| {
            CdgaError::Undetermined(format!("{} is not a root of unity in H0", ring[i]))
        })?;
        orders.push(o);
    }
    let coprime = (0..orders.len())
        .all(|i| (i + 1..orders.len()).all(|j| crate::exact::gcd(orders[i], orders[j]) == 1));
    let mut generator = MultiPoly::one(&ring);
    if coprime {
        // ζ with ζ^{n/o} equal to each top of order o.
        let n: u64 = orders.iter().product();
        for (&i, &o) in tops.iter().zip(&orders) {
            if o == 1 {
                continue;
            }
            let e = mod_inverse((n / o) % o, o).expect("coprime orders");
            generator = &generator * &MultiPoly::var(&ring, i).pow(e as u32);
        }
    } else {
        for &i in &tops {
            generator = &generator * &MultiPoly::var(&ring, i);
        }
    }
    let generator = ideal.normal_form(&generator);
    let n = multiplicative_order(&ideal, &generator, limit)
        .ok_or_else(|| CdgaError::Undetermined("designated generator has no finite order".into()))?;
    let (min_poly, power_coords) = minimal_polynomial(&ideal, &generator, dim);
    if euler_phi(n) as usize != dim || !is_cyclotomic(n, &min_poly) {
        return Err(CdgaError::Undetermined(format!(
            "H0 of dimension {dim} is not the cyclotomic field of order {n}"
        )));
    }
    let field = GradedRingValue::Field { n };
    Ok(HomologyInfo {
        value: match invertible {
            None => field,
            Some(inv) => field.with_beta(inv),
        },
        cycle_vars,
        generator,
        min_poly,
        bott: shape.bott.first().map(|&i| name(i)),
        bott_inverse: shape.bott_inv.first().map(|&i| name(i)),
        ring,
        ideal,
        power_coords,
    })
}

/// An element of H₀ with verified order and minimal polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootWitness {
    pub element: MultiPoly,
    pub order: u64,
    pub min_poly: Vec<Rational>,
}

/// The product of the tower tops, checked to be a primitive root of unity
/// generating H₀.
pub fn primitive_root_witness(a: &PresentedCdga) -> Result<RootWitness, CdgaError> {
    let cert = complete_intersection_certificate(a)
        .ok_or_else(|| CdgaError::NotApplicable("no complete-intersection certificate".into()))?;
    let ring = cert.ideal.vars().clone();
    let tops = tower_tops(&ring, &cert.equations);
    let product = tops
        .iter()
        .fold(MultiPoly::one(&ring), |acc, &i| &acc * &MultiPoly::var(&ring, i));
    let element = cert.ideal.normal_form(&product);
    let order = multiplicative_order(&cert.ideal, &element, order_limit(cert.h0_dim))
        .ok_or_else(|| CdgaError::VerificationFailed(format!("{element} has no finite order")))?;
    let (min_poly, _) = minimal_polynomial(&cert.ideal, &element, cert.h0_dim);
    if !is_cyclotomic(order, &min_poly) {
        return Err(CdgaError::VerificationFailed(format!(
            "minimal polynomial of {element} is not the cyclotomic polynomial of order {order}"
        )));
    }
    if euler_phi(order) as usize != cert.h0_dim {
        return Err(CdgaError::VerificationFailed(format!(
            "{element} generates a field of degree {} inside H0 of dimension {}",
            euler_phi(order),
            cert.h0_dim
        )));
    }
    Ok(RootWitness {
        element: element.rebase(a.vars())?,
        order,
        min_poly,
    })
}

/// The homology ring as a presentation with zero differential.
pub fn formal_model(value: GradedRingValue) -> PresentedCdga {
    let mut gens: Vec<(&str, i32)> = Vec::new();
    if matches!(value.order(), Some(n) if n > 1) {
        gens.push((FIELD_GEN, 0));
    }
    if value.has_beta() {
        gens.push((BETA, 2));
    }
    if matches!(value, GradedRingValue::Laurent { .. }) {
        gens.push((BETA_INV, -2));
    }
    let mut out = PresentedCdga::new(gens).expect("distinct names");
    match value {
        GradedRingValue::Zero => out.add_relation(out.one()).expect("constant"),
        _ => {
            let n = value.order().unwrap();
            if n > 1 {
                let phi: Vec<Rational> = cyclotomic_coeffs(n).into_iter().map(Rational::from_integer).collect();
                let r = MultiPoly::from_univariate(out.vars(), 0, &phi);
                out.add_relation(r).expect("same ring");
            }
            if let GradedRingValue::Laurent { .. } = value {
                let r = out.parse(&format!("{BETA}*{BETA_INV} - 1")).expect("valid");
                out.add_relation(r).expect("same ring");
            }
        }
    }
    out
}

/// The map from a recognized presentation onto its homology: cycles go to
/// their classes, γ and γ̄ to β and β⁻¹, everything else to zero.
pub fn formal_projection(a: &PresentedCdga) -> Result<CdgaMap, CdgaError> {
    let info = homology_of(a)?;
    let target = formal_model(info.value);
    let mut assignment: BTreeMap<String, MultiPoly> = a
        .generators()
        .iter()
        .map(|g| (g.name.clone(), target.zero()))
        .collect();
    if !info.value.is_zero() {
        for v in &info.cycle_vars {
            let coeffs = info.express(&a.gen(v)?)?;
            let img = if target.has_generator(FIELD_GEN) {
                MultiPoly::from_univariate(target.vars(), target.index_of(FIELD_GEN)?, &coeffs)
            } else {
                target.constant(coeffs.first().cloned().unwrap_or_else(Rational::zero))
            };
            assignment.insert(v.clone(), img);
        }
        if let Some(b) = &info.bott {
            assignment.insert(b.clone(), target.gen(BETA)?);
        }
        if let Some(b) = &info.bott_inverse {
            assignment.insert(b.clone(), target.gen(BETA_INV)?);
        }
    }
    let map = CdgaMap::new(a.clone(), target, &assignment)?;
    if let Some(v) = map.check().first() {
        return Err(CdgaError::VerificationFailed(v.to_string()));
    }
    Ok(map)
}

/// For nonnegatively graded presentations with homology in degree 0: the
/// projection onto H₀, verified to be a chain map, a ring map, and an
/// isomorphism on H₀.
pub fn quotient_to_h0_map(a: &PresentedCdga) -> Result<CdgaMap, CdgaError> {
    if let Some(g) = a.generators().iter().find(|g| g.degree < 0) {
        return Err(CdgaError::NotApplicable(format!(
            "generator {} has negative degree",
            g.name
        )));
    }
    let info = homology_of(a).map_err(|e| CdgaError::NotApplicable(e.to_string()))?;
    if info.value.has_beta() {
        return Err(CdgaError::NotApplicable(format!(
            "homology {} is not concentrated in degree 0",
            info.value
        )));
    }
    let map = formal_projection(a)?;
    if let Some(n) = info.value.order() {
        let dim = info.h0_dim();
        let std = info
            .quotient()
            .standard_monomials()
            .expect("finite quotient")
            .to_vec();
        let images: Vec<Vec<Rational>> = std
            .iter()
            .map(|m| {
                let p = MultiPoly::monomial(&info.ring, m.clone(), Rational::one());
                let src = p.rebase(a.vars()).expect("cycle variables belong to the source");
                coords_in_field(&map.apply(&src), map.target(), n, dim)
            })
            .collect();
        if std.len() != dim || rank(images) != dim {
            return Err(CdgaError::VerificationFailed("projection is not bijective on H0".into()));
        }
    }
    Ok(map)
}

fn coords_in_field(x: &MultiPoly, target: &PresentedCdga, n: u64, dim: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); dim];
    if n == 1 {
        v[0] = x.constant_term();
        return v;
    }
    let zi = target.index_of(FIELD_GEN).expect("field generator");
    for (m, c) in x.terms() {
        v[m.0[zi] as usize] = c.clone();
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn koszul(eqs: &[(&str, &str)], xs: &[&str]) -> PresentedCdga {
        let gens: Vec<(String, i32)> = xs
            .iter()
            .map(|x| (x.to_string(), 0))
            .chain(eqs.iter().map(|(t, _)| (t.to_string(), 1)))
            .collect();
        let mut a = PresentedCdga::new(gens).unwrap();
        for (t, e) in eqs {
            a = a.with_d(t, e).unwrap();
        }
        a
    }

    fn b_c6() -> PresentedCdga {
        koszul(&[("t2", "x2 + 1"), ("t3", "x3^2 + x3 + 1")], &["x2", "x3"])
    }

    fn b_c4() -> PresentedCdga {
        koszul(&[("t2", "x2 + 1"), ("t4", "x2 - x4^2")], &["x2", "x4"])
    }

    fn laurent_block() -> PresentedCdga {
        PresentedCdga::new([("gamma", 2), ("gammabar", -2), ("y", 1)])
            .unwrap()
            .with_d("y", "gamma*gammabar - 1")
            .unwrap()
    }

    #[test]
    fn certificates() {
        let c = complete_intersection_certificate(&koszul(&[("t", "x^4 + x^3 + x^2 + x + 1")], &["x"])).unwrap();
        assert_eq!(c.h0_dim, 4);
        assert_eq!(complete_intersection_certificate(&b_c4()).unwrap().h0_dim, 2);
        let over = koszul(&[("t", "x"), ("s", "x")], &["x"]);
        assert!(complete_intersection_certificate(&over).is_none());
        assert!(complete_intersection_certificate(&laurent_block()).is_none());
    }

    #[test]
    fn unit_boundary() {
        let ea = PresentedCdga::new([("a", 1)]).unwrap().with_d("a", "1").unwrap();
        assert!(acyclic_by_unit_boundary(&ea));
        assert!(!acyclic_by_unit_boundary(&koszul(&[("t", "x + 1")], &["x"])));
        assert!(!acyclic_by_unit_boundary(&PresentedCdga::unit()));
        // Two coprime equations in one variable also bound 1.
        assert!(acyclic_by_unit_boundary(&koszul(&[("t", "x + 1"), ("s", "x - 1")], &["x"])));
    }

    #[test]
    fn homology_shapes() {
        assert_eq!(homology_of(&b_c6()).unwrap().value, GradedRingValue::Field { n: 6 });
        assert_eq!(homology_of(&b_c4()).unwrap().value, GradedRingValue::Field { n: 4 });
        assert_eq!(homology_of(&PresentedCdga::unit()).unwrap().value, GradedRingValue::Field { n: 1 });
        assert_eq!(homology_of(&laurent_block()).unwrap().value, GradedRingValue::Laurent { n: 1 });
        let with_gamma = b_c6().tensor(&PresentedCdga::new([("gamma", 2)]).unwrap());
        assert_eq!(homology_of(&with_gamma).unwrap().value, GradedRingValue::Polynomial { n: 6 });
        let ea = PresentedCdga::new([("a", 1)]).unwrap().with_d("a", "1").unwrap();
        assert_eq!(homology_of(&b_c6().tensor(&ea)).unwrap().value, GradedRingValue::Zero);
        let odd = PresentedCdga::new([("w", 3)]).unwrap();
        assert!(matches!(homology_of(&odd), Err(CdgaError::Undetermined(_))));
    }

    #[test]
    fn compatible_generator_hits_tower_tops() {
        let info = homology_of(&b_c6()).unwrap();
        // x3 = ζ^2 and x2 = ζ^3 for the designated ζ.
        let z = |k| CyclotomicElt::zeta_pow(6, k);
        let a = b_c6();
        assert_eq!(info.express_cyclotomic(&a.gen("x3").unwrap()).unwrap(), z(2));
        assert_eq!(info.express_cyclotomic(&a.gen("x2").unwrap()).unwrap(), z(3));
        assert_eq!(info.min_poly, vec![q(1), q(-1), q(1)]);
    }

    #[test]
    fn witnesses() {
        let w = primitive_root_witness(&koszul(&[("t", "x^2 + x + 1")], &["x"])).unwrap();
        assert_eq!(w.order, 3);
        let w = primitive_root_witness(&b_c6()).unwrap();
        assert_eq!(w.order, 6);
        assert_eq!(w.min_poly, vec![q(1), q(-1), q(1)]);
        let a = b_c6();
        assert_eq!(w.element, a.parse("-x3").unwrap());
        assert_eq!(primitive_root_witness(&b_c4()).unwrap().order, 4);
        assert!(primitive_root_witness(&laurent_block()).is_err());
    }

    #[test]
    fn projections() {
        let b3 = koszul(&[("t", "x^2 + x + 1")], &["x"]);
        let f = quotient_to_h0_map(&b3).unwrap();
        assert_eq!(f.image_of("x").unwrap(), &f.target().parse("z").unwrap());
        assert!(f.image_of("t").unwrap().is_zero());
        let id = quotient_to_h0_map(&PresentedCdga::unit()).unwrap();
        assert!(id.is_cdga_map() && id.target().is_empty());
        let ea = PresentedCdga::new([("a", 1)]).unwrap().with_d("a", "1").unwrap();
        let z = quotient_to_h0_map(&ea).unwrap();
        assert!(z.target().is_zero_element(&z.target().one()));
        assert!(matches!(quotient_to_h0_map(&laurent_block()), Err(CdgaError::NotApplicable(_))));
        let f = formal_projection(&b_c4().tensor(&laurent_block())).unwrap();
        assert!(f.is_cdga_map());
        assert_eq!(f.image_of("gamma").unwrap(), &f.target().gen(BETA).unwrap());
    }

    #[test]
    fn bott_coefficients() {
        let a = b_c4().tensor(&laurent_block());
        let info = homology_of(&a).unwrap();
        let c = info.bott_coefficient(&a, &a.parse("x4*gamma^2*gammabar").unwrap()).unwrap();
        assert_eq!(c, CyclotomicElt::zeta_pow(4, 1));
        assert!(info.bott_coefficient(&a, &a.parse("y*gamma").unwrap()).is_err());
    }

    #[test]
    fn values_display_and_dims() {
        assert_eq!(GradedRingValue::Field { n: 1 }.to_string(), "Q");
        assert_eq!(GradedRingValue::Laurent { n: 6 }.to_string(), "Q(zeta_6)[beta, beta^-1]");
        assert_eq!(GradedRingValue::Polynomial { n: 5 }.dims(-2, 4), vec![0, 0, 4, 0, 4, 0, 4]);
        assert_eq!(GradedRingValue::Laurent { n: 1 }.dims(-2, 2), vec![1, 0, 1, 0, 1]);
        let m = formal_model(GradedRingValue::Laurent { n: 3 });
        assert!(m.validate().is_valid());
        assert_eq!(homology_of(&m).unwrap().value, GradedRingValue::Laurent { n: 3 });
    }
}
