//! The explicit diagrams: the cyclotomic diagram B and its Bott extensions,
//! the β-killing variant, the C_{p²} counterexample, the two-node example
//! over C₂, and the maps onto homology exhibiting formality.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::abelian::{AbelianGroup, GroupError, SubgroupLattice};
use crate::cdga::{
    complete_intersection_certificate, formal_model, formal_projection, homology_of, CdgaMap,
    GradedRingValue, PresentedCdga,
};
use crate::exact::{cyclotomic_coeffs, euler_phi, is_prime, MultiPoly, Rational};
use crate::orbit::{homology_diagram, BetaImage, DiagramMap, OrbitDiagram, OrbitError};
use crate::structures::{decide_norm_shadow, ObstructionResult};

/// Largest group order accepted by the diagram builders.
pub const PIPELINE_BOUND: u64 = 36;

/// Names of the extra generators.
pub const GAMMA: &str = "gamma";
pub const GAMMA_BAR: &str = "gammabar";
pub const LINK: &str = "y";
pub const BETA_GEN: &str = "beta";
pub const UNIT_KILLER: &str = "a";

pub fn x_name(id: &str) -> String {
    format!("x_{id}")
}

pub fn t_name(id: &str) -> String {
    format!("t_{id}")
}

fn lattice_for(g: &AbelianGroup) -> Result<Arc<SubgroupLattice>, OrbitError> {
    if g.order() > PIPELINE_BOUND {
        return Err(GroupError::TooLarge {
            order: g.order(),
            bound: PIPELINE_BOUND,
        }
        .into());
    }
    Ok(Arc::new(SubgroupLattice::build(g, PIPELINE_BOUND)?))
}

fn node_error(lat: &SubgroupLattice, i: usize) -> impl Fn(crate::cdga::CdgaError) -> OrbitError + '_ {
    move |e| OrbitError::Node {
        node: lat.id(i).to_string(),
        source: e,
    }
}

fn cyclotomic_in(a: &PresentedCdga, var: &str, n: u64) -> Result<MultiPoly, crate::cdga::CdgaError> {
    let coeffs: Vec<Rational> = cyclotomic_coeffs(n).into_iter().map(Rational::from_integer).collect();
    Ok(MultiPoly::from_univariate(a.vars(), a.index_of(var)?, &coeffs))
}

/// The Koszul part of B at subgroup `k`, with `extra` generators appended.
fn b_node(lat: &SubgroupLattice, k: usize, extra: &[(&str, i32)]) -> Result<PresentedCdga, OrbitError> {
    let err = node_error(lat, k);
    let cps = lat.cyclic_p_subgroups(k);
    let mut gens: Vec<(String, i32)> = Vec::new();
    for c in &cps {
        gens.push((x_name(lat.id(c.node)), 0));
        gens.push((t_name(lat.id(c.node)), 1));
    }
    if !lat.node(k).is_cyclic() {
        gens.push((UNIT_KILLER.into(), 1));
    }
    gens.extend(extra.iter().map(|&(n, d)| (n.to_string(), d)));
    let mut a = PresentedCdga::new(gens).map_err(&err)?;
    for c in &cps {
        let x = x_name(lat.id(c.node));
        let d = match c.parent {
            None => cyclotomic_in(&a, &x, c.prime).map_err(&err)?,
            Some(parent) => a
                .parse(&format!("{} - {x}^{}", x_name(lat.id(parent)), c.prime))
                .map_err(&err)?,
        };
        a.set_d(&t_name(lat.id(c.node)), d).map_err(&err)?;
    }
    if !lat.node(k).is_cyclic() {
        a.set_d(UNIT_KILLER, a.one()).map_err(&err)?;
    }
    Ok(a)
}

/// Shadows send each generator to the generator of the same name, except
/// those listed in `kill`, which go to zero.
fn build_family(
    g: &AbelianGroup,
    extra: &[(&str, i32)],
    extra_d: &[(&str, &str)],
    mut kill: impl FnMut(usize, usize) -> Vec<&'static str>,
) -> Result<OrbitDiagram, OrbitError> {
    let lat = lattice_for(g)?;
    let l2 = Arc::clone(&lat);
    OrbitDiagram::from_fns(
        Arc::clone(&lat),
        |k| {
            let mut a = b_node(&l2, k, extra)?;
            for (name, expr) in extra_d {
                a = a.with_d(name, expr).map_err(node_error(&l2, k))?;
            }
            Ok(a)
        },
        |l, k, s, t| {
            let mut map = CdgaMap::by_name(s.clone(), t.clone());
            let killed = kill(l, k);
            if !killed.is_empty() {
                let mut assignment = map.assignment();
                for name in killed {
                    assignment.insert(name.to_string(), t.zero());
                }
                map = CdgaMap::new(s.clone(), t.clone(), &assignment).map_err(node_error(&lat, l))?;
            }
            Ok(map)
        },
    )
}

/// B: at K, a pair (x_L, t_L) for each nontrivial cyclic p-subgroup L ≤ K
/// and E(a), d(a) = 1, when K is not cyclic.
#[allow(non_snake_case)]
pub fn build_B(g: &AbelianGroup) -> Result<OrbitDiagram, OrbitError> {
    build_family(g, &[], &[], |_, _| Vec::new())
}

/// B ⊗ ℚ[γ, γ̄] ⊗ E(y) with d(y) = γγ̄ − 1.
#[allow(non_snake_case)]
pub fn build_D_KU(g: &AbelianGroup) -> Result<OrbitDiagram, OrbitError> {
    let expr = format!("{GAMMA}*{GAMMA_BAR} - 1");
    build_family(
        g,
        &[(GAMMA, 2), (GAMMA_BAR, -2), (LINK, 1)],
        &[(LINK, expr.as_str())],
        |_, _| Vec::new(),
    )
}

/// B ⊗ ℚ[γ].
#[allow(non_snake_case)]
pub fn build_Dprime_ku(g: &AbelianGroup) -> Result<OrbitDiagram, OrbitError> {
    build_family(g, &[(GAMMA, 2)], &[], |_, _| Vec::new())
}

/// B ⊗ ℚ[β] with every shadow sending β to zero.
#[allow(non_snake_case)]
pub fn build_A_kill_beta(g: &AbelianGroup) -> Result<OrbitDiagram, OrbitError> {
    build_family(g, &[(BETA_GEN, 2)], &[], |_, _| vec![BETA_GEN])
}

/// B ⊗ ℚ[β] with β kept or killed per covering edge; edges not listed keep
/// β. No consistency is imposed, so the result may fail validation.
pub fn build_beta_pattern_diagram(
    g: &AbelianGroup,
    pattern: &BTreeMap<(usize, usize), BetaImage>,
) -> Result<OrbitDiagram, OrbitError> {
    build_family(g, &[(BETA_GEN, 2)], &[], |l, k| {
        if pattern.get(&(l, k)) == Some(&BetaImage::Kill) {
            vec![BETA_GEN]
        } else {
            Vec::new()
        }
    })
}

/// A map from each node onto its homology: x_L ↦ ζ^{|K|/|L|} at cyclic K,
/// t, a and y ↦ 0, γ ↦ β, γ̄ ↦ β⁻¹; non-cyclic nodes map to the zero ring.
/// Fails if a naturality square or a node check fails.
pub fn build_formality_map(d: &OrbitDiagram) -> Result<DiagramMap, OrbitError> {
    let lat = d.lattice();
    let h = homology_diagram(d)?;
    let target = h.to_formal_diagram()?;
    let components = (0..d.nodes().len())
        .map(|i| formal_projection(d.node(i)).map_err(node_error(lat, i)))
        .collect::<Result<Vec<_>, _>>()?;
    let map = DiagramMap::new(d.clone(), target, components)?;
    if let Some(v) = map.validate().first() {
        return Err(OrbitError::Malformed(format!("formality map fails: {v}")));
    }
    if !map.is_quasi_iso()? {
        return Err(OrbitError::Malformed(
            "formality map is not a homology isomorphism".into(),
        ));
    }
    Ok(map)
}

/// The three-node chain e < C_p < C_{p²} with ℚ, ℚ(ζ_p) and
/// ℚ[x]⊗E(y), d(y) = Φ_{p²}(x); the shadow C_p → C_{p²} is left open.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub p: u64,
    pub diagram: OrbitDiagram,
    pub top_h0_dim: usize,
    /// Set for p = 2, where a shadow does exist.
    pub flagged: bool,
    pub query: ObstructionResult,
}

impl Counterexample {
    pub fn middle(&self) -> usize {
        1
    }

    pub fn top(&self) -> usize {
        2
    }

    /// The diagram with the witness shadow filled in, when one exists.
    pub fn completed(&self) -> Option<OrbitDiagram> {
        let w = self.query.witness.as_ref()?;
        let mut shadows = self.diagram.shadows().clone();
        shadows.insert((self.middle(), self.top()), w.clone());
        OrbitDiagram::new(
            Arc::clone(self.diagram.lattice()),
            self.diagram.nodes().to_vec(),
            shadows,
        )
        .ok()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p,
            "group": self.diagram.group().to_string(),
            "diagram": self.diagram.to_json(),
            "top_h0_dim": self.top_h0_dim,
            "flagged": self.flagged,
            "query": self.query.to_json(),
        })
    }
}

pub fn build_counterexample(p: u64) -> Result<Counterexample, OrbitError> {
    if !is_prime(p) {
        return Err(OrbitError::Malformed(format!("{p} is not prime")));
    }
    let g = AbelianGroup::cyclic(p * p);
    let lat = Arc::new(SubgroupLattice::build(&g, p * p)?);
    let top_id = lat.id(2).to_string();
    let (x, y) = (x_name(&top_id), format!("y_{top_id}"));
    let err = node_error(&lat, 2);
    let mut top = PresentedCdga::new([(x.clone(), 0), (y.clone(), 1)]).map_err(&err)?;
    let phi = cyclotomic_in(&top, &x, p * p).map_err(&err)?;
    top.set_d(&y, phi).map_err(&err)?;
    let cert = complete_intersection_certificate(&top).ok_or_else(|| OrbitError::Node {
        node: top_id.clone(),
        source: crate::cdga::CdgaError::VerificationFailed("no certificate for the top node".into()),
    })?;
    let info = homology_of(&top).map_err(&err)?;
    if info.value != (GradedRingValue::Field { n: p * p }) || cert.h0_dim != euler_phi(p * p) as usize {
        return Err(OrbitError::Node {
            node: top_id,
            source: crate::cdga::CdgaError::VerificationFailed(format!(
                "top node homology is {}",
                info.value
            )),
        });
    }
    let bottom = formal_model(GradedRingValue::Field { n: 1 });
    let middle = formal_model(GradedRingValue::Field { n: p });
    let unit = CdgaMap::from_exprs(bottom.clone(), middle.clone(), &[]).map_err(node_error(&lat, 1))?;
    let mut shadows = BTreeMap::new();
    shadows.insert((0, 1), unit);
    let diagram = OrbitDiagram::new(Arc::clone(&lat), vec![bottom, middle, top.clone()], shadows)?;
    let query = decide_norm_shadow(GradedRingValue::Field { n: p }, &top).map_err(&err)?;
    Ok(Counterexample {
        p,
        diagram,
        top_h0_dim: cert.h0_dim,
        flagged: p == 2,
        query,
    })
}

/// ℚ[x] at both nodes over C₂, with shadow x ↦ x or x ↦ 0.
#[allow(non_snake_case)]
pub fn build_example_C2_pair() -> Result<(OrbitDiagram, OrbitDiagram), OrbitError> {
    let g = AbelianGroup::cyclic(2);
    let lat = Arc::new(SubgroupLattice::build(&g, 2)?);
    let make = |image: &str| {
        OrbitDiagram::from_fns(
            Arc::clone(&lat),
            |_| Ok(PresentedCdga::new([("x", 0)]).expect("one generator")),
            |_, _, s, t| {
                CdgaMap::from_exprs(s.clone(), t.clone(), &[("x", image)])
                    .map_err(|e| OrbitError::Malformed(e.to_string()))
            },
        )
    };
    Ok((make("x")?, make("0")?))
}

/// For each shadow, whether it sends the named generator to zero.
pub fn kill_pattern(d: &OrbitDiagram, generator: &str) -> BTreeMap<(usize, usize), bool> {
    d.shadows()
        .iter()
        .filter_map(|(&e, m)| m.image_of(generator).ok().map(|p| (e, p.is_zero())))
        .collect()
}
