//! Diagrams of CDGAs indexed by the subgroup lattice, with shadow maps on
//! covering edges, and the homology diagrams they induce.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::abelian::{AbelianGroup, GroupError, SubgroupLattice, DEFAULT_GROUP_BOUND};
use crate::cdga::{
    formal_model, homology_of, CdgaError, CdgaJson, CdgaMap, CdgaMapJson, GradedRingValue,
    HomologyInfo, PresentedCdga, BETA, BETA_INV, FIELD_GEN,
};
use crate::exact::linalg::rank;
use crate::exact::{euler_phi, CyclotomicElt, MultiPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbitError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("at subgroup {node}: {source}")]
    Node { node: String, source: CdgaError },
    #[error("on edge {from} -> {to}: {reason}")]
    Edge {
        from: String,
        to: String,
        reason: String,
    },
    #[error("malformed diagram: {0}")]
    Malformed(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
}

/// A functor from the subgroup lattice to presented CDGAs, stored on
/// covering edges.
#[derive(Clone, Debug)]
pub struct OrbitDiagram {
    lattice: Arc<SubgroupLattice>,
    nodes: Vec<PresentedCdga>,
    shadows: BTreeMap<(usize, usize), CdgaMap>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiagramViolation {
    Node { node: String, message: String },
    MissingShadow { from: String, to: String },
    Shadow { from: String, to: String, message: String },
    PathDependence { from: String, to: String, composites: usize },
}

impl fmt::Display for DiagramViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramViolation::Node { node, message } => write!(f, "node {node}: {message}"),
            DiagramViolation::MissingShadow { from, to } => write!(f, "no shadow {from} -> {to}"),
            DiagramViolation::Shadow { from, to, message } => {
                write!(f, "shadow {from} -> {to}: {message}")
            }
            DiagramViolation::PathDependence {
                from,
                to,
                composites,
            } => write!(f, "{composites} different composites from {from} to {to}"),
        }
    }
}

impl OrbitDiagram {
    pub fn new(
        lattice: Arc<SubgroupLattice>,
        nodes: Vec<PresentedCdga>,
        shadows: BTreeMap<(usize, usize), CdgaMap>,
    ) -> Result<Self, OrbitError> {
        if nodes.len() != lattice.len() {
            return Err(OrbitError::Malformed(format!(
                "{} nodes for a lattice of {} subgroups",
                nodes.len(),
                lattice.len()
            )));
        }
        for (&(l, k), map) in &shadows {
            if !lattice.covers().contains(&(l, k)) {
                return Err(OrbitError::Malformed(format!(
                    "{} -> {} is not a covering edge",
                    lattice.id(l),
                    lattice.id(k)
                )));
            }
            if map.source() != &nodes[l] || map.target() != &nodes[k] {
                return Err(OrbitError::Malformed(format!(
                    "shadow {} -> {} does not connect the nodes",
                    lattice.id(l),
                    lattice.id(k)
                )));
            }
        }
        Ok(OrbitDiagram {
            lattice,
            nodes,
            shadows,
        })
    }

    /// Builds nodes first, then one shadow per covering edge.
    pub fn from_fns(
        lattice: Arc<SubgroupLattice>,
        mut node: impl FnMut(usize) -> Result<PresentedCdga, OrbitError>,
        mut shadow: impl FnMut(usize, usize, &PresentedCdga, &PresentedCdga) -> Result<CdgaMap, OrbitError>,
    ) -> Result<Self, OrbitError> {
        let nodes = (0..lattice.len()).map(&mut node).collect::<Result<Vec<_>, _>>()?;
        let mut shadows = BTreeMap::new();
        for &(l, k) in lattice.covers() {
            shadows.insert((l, k), shadow(l, k, &nodes[l], &nodes[k])?);
        }
        Self::new(lattice, nodes, shadows)
    }

    pub fn lattice(&self) -> &Arc<SubgroupLattice> {
        &self.lattice
    }

    pub fn group(&self) -> &AbelianGroup {
        self.lattice.group()
    }

    pub fn nodes(&self) -> &[PresentedCdga] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &PresentedCdga {
        &self.nodes[i]
    }

    pub fn node_by_id(&self, id: &str) -> Option<&PresentedCdga> {
        self.lattice.index_of_id(id).map(|i| &self.nodes[i])
    }

    pub fn shadow(&self, l: usize, k: usize) -> Option<&CdgaMap> {
        self.shadows.get(&(l, k))
    }

    pub fn shadows(&self) -> &BTreeMap<(usize, usize), CdgaMap> {
        &self.shadows
    }

    /// Composite of shadows along a chain of covering edges.
    pub fn composite(&self, chain: &[usize]) -> Result<CdgaMap, OrbitError> {
        let first = *chain
            .first()
            .ok_or_else(|| OrbitError::Malformed("empty chain".into()))?;
        let mut acc = CdgaMap::identity(&self.nodes[first]);
        for w in chain.windows(2) {
            let s = self.shadow(w[0], w[1]).ok_or_else(|| OrbitError::Edge {
                from: self.lattice.id(w[0]).into(),
                to: self.lattice.id(w[1]).into(),
                reason: "missing shadow".into(),
            })?;
            acc = acc.then(s).map_err(|e| OrbitError::Malformed(e.to_string()))?;
        }
        Ok(acc)
    }

    /// Node validity, shadow validity and path independence. A path
    /// violation is reported only where it first appears, not at the
    /// subgroups above it.
    pub fn validate(&self) -> Vec<DiagramViolation> {
        let id = |i: usize| self.lattice.id(i).to_string();
        let mut out = Vec::new();
        for (i, a) in self.nodes.iter().enumerate() {
            for v in a.validate().violations {
                out.push(DiagramViolation::Node {
                    node: id(i),
                    message: v.to_string(),
                });
            }
        }
        for &(l, k) in self.lattice.covers() {
            match self.shadow(l, k) {
                None => out.push(DiagramViolation::MissingShadow { from: id(l), to: id(k) }),
                Some(s) => {
                    for v in s.check() {
                        out.push(DiagramViolation::Shadow {
                            from: id(l),
                            to: id(k),
                            message: v.to_string(),
                        });
                    }
                }
            }
        }
        out.extend(self.path_violations());
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn path_violations(&self) -> Vec<DiagramViolation> {
        let n = self.lattice.len();
        let mut out = Vec::new();
        for l in 0..n {
            let a = &self.nodes[l];
            let start: Vec<MultiPoly> = (0..a.len()).map(|i| MultiPoly::var(a.vars(), i)).collect();
            let mut comps: Vec<Vec<Vec<MultiPoly>>> = vec![Vec::new(); n];
            let mut bad = vec![false; n];
            comps[l] = vec![start];
            // Subgroups are stored in increasing order, so index order is a
            // linear extension of containment.
            for k in l + 1..n {
                if !self.lattice.contains(l, k) {
                    continue;
                }
                let mut set: Vec<Vec<MultiPoly>> = Vec::new();
                let mut inherited = false;
                for j in self.lattice.lower_covers(k).filter(|&j| self.lattice.contains(l, j)) {
                    inherited |= bad[j];
                    let Some(s) = self.shadow(j, k) else { continue };
                    for c in &comps[j] {
                        let img: Vec<MultiPoly> = c.iter().map(|p| s.apply(p)).collect();
                        if !set.contains(&img) {
                            set.push(img);
                        }
                    }
                }
                if set.len() > 1 {
                    bad[k] = true;
                    if !inherited {
                        out.push(DiagramViolation::PathDependence {
                            from: self.lattice.id(l).into(),
                            to: self.lattice.id(k).into(),
                            composites: set.len(),
                        });
                    }
                }
                comps[k] = set;
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let nodes: serde_json::Map<String, Value> = (0..self.nodes.len())
            .map(|i| {
                (
                    self.lattice.id(i).to_string(),
                    serde_json::to_value(self.nodes[i].to_json()).expect("serializable"),
                )
            })
            .collect();
        let edges: Vec<Value> = self
            .shadows
            .iter()
            .map(|(&(l, k), m)| {
                json!({
                    "from": self.lattice.id(l),
                    "to": self.lattice.id(k),
                    "map": serde_json::to_value(m.to_json()).expect("serializable"),
                })
            })
            .collect();
        json!({ "group": self.group().to_string(), "nodes": nodes, "edges": edges })
    }

    pub fn from_json(value: &Value) -> Result<Self, OrbitError> {
        let json: DiagramJson =
            serde_json::from_value(value.clone()).map_err(|e| OrbitError::Malformed(e.to_string()))?;
        let group: AbelianGroup = json.group.parse()?;
        let lattice = Arc::new(SubgroupLattice::build(&group, DEFAULT_GROUP_BOUND)?);
        let mut nodes = Vec::with_capacity(lattice.len());
        for i in 0..lattice.len() {
            let id = lattice.id(i);
            let node = json
                .nodes
                .get(id)
                .ok_or_else(|| OrbitError::Malformed(format!("no node for subgroup {id}")))?;
            nodes.push(PresentedCdga::from_json(node).map_err(|e| OrbitError::Node {
                node: id.to_string(),
                source: e,
            })?);
        }
        let mut shadows = BTreeMap::new();
        for e in &json.edges {
            let find = |id: &str| {
                lattice
                    .index_of_id(id)
                    .ok_or_else(|| OrbitError::Malformed(format!("unknown subgroup {id}")))
            };
            let (l, k) = (find(&e.from)?, find(&e.to)?);
            let map = CdgaMap::from_json(&e.map).map_err(|err| OrbitError::Edge {
                from: e.from.clone(),
                to: e.to.clone(),
                reason: err.to_string(),
            })?;
            shadows.insert((l, k), map);
        }
        Self::new(lattice, nodes, shadows)
    }
}

#[derive(Deserialize)]
struct DiagramJson {
    group: String,
    nodes: BTreeMap<String, CdgaJson>,
    edges: Vec<EdgeJson>,
}

#[derive(Deserialize)]
struct EdgeJson {
    from: String,
    to: String,
    map: CdgaMapJson,
}

pub fn validate_diagram(d: &OrbitDiagram) -> Vec<DiagramViolation> {
    d.validate()
}

/// What a shadow does to the Bott class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaImage {
    Keep,
    Kill,
    NotApplicable,
}

impl BetaImage {
    /// Status of a composite: first `self`, then `next`.
    pub fn then(self, next: BetaImage) -> BetaImage {
        use BetaImage::*;
        match (self, next) {
            (NotApplicable, _) | (_, NotApplicable) => NotApplicable,
            (Kill, _) | (_, Kill) => Kill,
            (Keep, Keep) => Keep,
        }
    }
}

impl fmt::Display for BetaImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BetaImage::Keep => "beta",
            BetaImage::Kill => "0",
            BetaImage::NotApplicable => "n/a",
        })
    }
}

/// Degree-0 part of an induced edge: ζ_m ↦ ζ_n^exponent, or the map to the
/// zero ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Degree0Map {
    Embedding { m: u64, n: u64, exponent: u64 },
    IntoZero,
}

impl Degree0Map {
    pub fn standard(m: u64, n: u64) -> Self {
        Degree0Map::Embedding {
            m,
            n,
            exponent: (n / m) % n,
        }
    }

    pub fn is_standard(&self) -> bool {
        match *self {
            Degree0Map::Embedding { m, n, exponent } => n % m == 0 && exponent % n == (n / m) % n,
            Degree0Map::IntoZero => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyEdge {
    pub degree0: Degree0Map,
    pub beta: BetaImage,
    /// Whether the degree-0 map has zero kernel; absent for maps into zero.
    pub injective: Option<bool>,
}

/// Homology of an orbit diagram: node values and induced edge data.
#[derive(Clone, Debug)]
pub struct HomologyDiagram {
    lattice: Arc<SubgroupLattice>,
    values: Vec<GradedRingValue>,
    edges: BTreeMap<(usize, usize), HomologyEdge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Composite {
    Zero,
    Map { exponent: u64, beta: BetaImage },
}

impl HomologyDiagram {
    pub fn from_parts(
        lattice: Arc<SubgroupLattice>,
        values: Vec<GradedRingValue>,
        edges: BTreeMap<(usize, usize), HomologyEdge>,
    ) -> Result<Self, OrbitError> {
        if values.len() != lattice.len() {
            return Err(OrbitError::Malformed("one value per subgroup required".into()));
        }
        Ok(HomologyDiagram {
            lattice,
            values,
            edges,
        })
    }

    /// ℚ(ζ_|K|) at cyclic K and 0 elsewhere, optionally with β, standard
    /// degree-0 inclusions, and β-images chosen per edge by `beta`.
    pub fn standard(
        lattice: Arc<SubgroupLattice>,
        bott: Option<bool>,
        mut beta: impl FnMut(usize, usize) -> BetaImage,
    ) -> Self {
        let values: Vec<GradedRingValue> = lattice
            .nodes()
            .iter()
            .map(|s| match s.cyclic_order() {
                None => GradedRingValue::Zero,
                Some(n) => match bott {
                    None => GradedRingValue::Field { n },
                    Some(inv) => GradedRingValue::Field { n }.with_beta(inv),
                },
            })
            .collect();
        let mut edges = BTreeMap::new();
        for &(l, k) in lattice.covers() {
            let edge = match (values[l].order(), values[k].order()) {
                (Some(m), Some(n)) => HomologyEdge {
                    degree0: Degree0Map::standard(m, n),
                    beta: if bott.is_some() { beta(l, k) } else { BetaImage::NotApplicable },
                    injective: Some(true),
                },
                _ => HomologyEdge {
                    degree0: Degree0Map::IntoZero,
                    beta: BetaImage::NotApplicable,
                    injective: None,
                },
            };
            edges.insert((l, k), edge);
        }
        HomologyDiagram {
            lattice,
            values,
            edges,
        }
    }

    pub fn lattice(&self) -> &Arc<SubgroupLattice> {
        &self.lattice
    }

    pub fn values(&self) -> &[GradedRingValue] {
        &self.values
    }

    pub fn value(&self, i: usize) -> GradedRingValue {
        self.values[i]
    }

    pub fn edge(&self, l: usize, k: usize) -> Option<&HomologyEdge> {
        self.edges.get(&(l, k))
    }

    pub fn edges(&self) -> &BTreeMap<(usize, usize), HomologyEdge> {
        &self.edges
    }

    /// β-images on edges between nonzero nodes that carry β.
    pub fn beta_pattern(&self) -> BTreeMap<(usize, usize), BetaImage> {
        self.edges
            .iter()
            .filter(|(_, e)| e.beta != BetaImage::NotApplicable)
            .map(|(&k, e)| (k, e.beta))
            .collect()
    }

    fn identity_composite(&self, i: usize) -> Composite {
        match self.values[i] {
            GradedRingValue::Zero => Composite::Zero,
            v => Composite::Map {
                exponent: 1,
                beta: if v.has_beta() { BetaImage::Keep } else { BetaImage::NotApplicable },
            },
        }
    }

    fn extend(&self, c: Composite, e: &HomologyEdge) -> Composite {
        match (c, e.degree0) {
            (Composite::Zero, _) | (_, Degree0Map::IntoZero) => Composite::Zero,
            (Composite::Map { exponent, beta }, Degree0Map::Embedding { n, exponent: j, .. }) => {
                Composite::Map {
                    exponent: (exponent * j) % n,
                    beta: beta.then(e.beta),
                }
            }
        }
    }

    /// Missing edges, non-injective degree-0 maps into nonzero nodes, and
    /// path dependence of composites.
    pub fn validate(&self) -> Vec<DiagramViolation> {
        let id = |i: usize| self.lattice.id(i).to_string();
        let mut out = Vec::new();
        for &(l, k) in self.lattice.covers() {
            match self.edge(l, k) {
                None => out.push(DiagramViolation::MissingShadow { from: id(l), to: id(k) }),
                Some(e) if e.injective == Some(false) => out.push(DiagramViolation::Shadow {
                    from: id(l),
                    to: id(k),
                    message: "degree-0 map is not injective".into(),
                }),
                Some(_) => {}
            }
        }
        let n = self.lattice.len();
        for l in 0..n {
            let mut comps: Vec<Vec<Composite>> = vec![Vec::new(); n];
            let mut bad = vec![false; n];
            comps[l] = vec![self.identity_composite(l)];
            for k in l + 1..n {
                if !self.lattice.contains(l, k) {
                    continue;
                }
                let mut set = Vec::new();
                let mut inherited = false;
                for j in self.lattice.lower_covers(k).filter(|&j| self.lattice.contains(l, j)) {
                    inherited |= bad[j];
                    let Some(e) = self.edge(j, k) else { continue };
                    for &c in &comps[j] {
                        let c = self.extend(c, e);
                        if !set.contains(&c) {
                            set.push(c);
                        }
                    }
                }
                if set.len() > 1 {
                    bad[k] = true;
                    if !inherited {
                        out.push(DiagramViolation::PathDependence {
                            from: id(l),
                            to: id(k),
                            composites: set.len(),
                        });
                    }
                }
                comps[k] = set;
            }
        }
        out
    }

    /// The homology as an orbit diagram with zero differentials.
    pub fn to_formal_diagram(&self) -> Result<OrbitDiagram, OrbitError> {
        let values = self.values.clone();
        let edges = self.edges.clone();
        let lattice = Arc::clone(&self.lattice);
        OrbitDiagram::from_fns(
            Arc::clone(&self.lattice),
            |i| Ok(formal_model(values[i])),
            |l, k, src, tgt| {
                let edge = edges.get(&(l, k)).ok_or_else(|| OrbitError::Edge {
                    from: lattice.id(l).into(),
                    to: lattice.id(k).into(),
                    reason: "missing homology edge".into(),
                })?;
                let mut exprs: Vec<(&str, String)> = Vec::new();
                if let Degree0Map::Embedding { exponent, .. } = edge.degree0 {
                    if src.has_generator(FIELD_GEN) {
                        exprs.push((FIELD_GEN, format!("{FIELD_GEN}^{exponent}")));
                    }
                    if src.has_generator(BETA) && edge.beta == BetaImage::Keep {
                        exprs.push((BETA, BETA.into()));
                    }
                    if src.has_generator(BETA_INV) {
                        if edge.beta != BetaImage::Keep {
                            return Err(OrbitError::Edge {
                                from: lattice.id(l).into(),
                                to: lattice.id(k).into(),
                                reason: "an invertible beta cannot map to zero".into(),
                            });
                        }
                        exprs.push((BETA_INV, BETA_INV.into()));
                    }
                }
                let borrowed: Vec<(&str, &str)> = exprs.iter().map(|(a, b)| (*a, b.as_str())).collect();
                CdgaMap::from_exprs(src.clone(), tgt.clone(), &borrowed).map_err(|e| OrbitError::Edge {
                    from: lattice.id(l).into(),
                    to: lattice.id(k).into(),
                    reason: e.to_string(),
                })
            },
        )
    }

    pub fn to_json(&self) -> Value {
        let nodes: serde_json::Map<String, Value> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let mut obj = serde_json::to_value(v).expect("serializable");
                obj["ring"] = json!(v.to_string());
                obj["h0_dim"] = json!(v.h0_dim());
                (self.lattice.id(i).to_string(), obj)
            })
            .collect();
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|(&(l, k), e)| {
                json!({
                    "from": self.lattice.id(l),
                    "to": self.lattice.id(k),
                    "degree0": e.degree0,
                    "beta": e.beta,
                    "injective": e.injective,
                })
            })
            .collect();
        json!({
            "group": self.lattice.group().to_string(),
            "nodes": nodes,
            "edges": edges,
        })
    }
}

fn node_err(lattice: &SubgroupLattice, i: usize) -> impl Fn(CdgaError) -> OrbitError + '_ {
    move |e| OrbitError::Node {
        node: lattice.id(i).to_string(),
        source: e,
    }
}

/// Pushes the designated root of unity and the Bott class through a shadow.
fn induced_edge(
    src: &PresentedCdga,
    si: &HomologyInfo,
    tgt: &PresentedCdga,
    ti: &HomologyInfo,
    shadow: &CdgaMap,
) -> Result<HomologyEdge, String> {
    let (m, n) = match (si.value.order(), ti.value.order()) {
        (_, None) => {
            return Ok(HomologyEdge {
                degree0: Degree0Map::IntoZero,
                beta: BetaImage::NotApplicable,
                injective: None,
            })
        }
        (None, Some(_)) => return Err("no ring map from the zero ring to a nonzero ring".into()),
        (Some(m), Some(n)) => (m, n),
    };
    let w = si.generator.rebase(src.vars()).map_err(|e| e.to_string())?;
    let img = ti.express_cyclotomic(&shadow.apply(&w)).map_err(|e| e.to_string())?;
    let exponent = (0..n)
        .find(|&j| CyclotomicElt::zeta_pow(n, j) == img)
        .ok_or_else(|| format!("image {img} of the root of unity is not a power of the target root"))?;
    let rows: Vec<_> = (0..euler_phi(m))
        .map(|i| CyclotomicElt::zeta_pow(n, exponent * i).coeffs().to_vec())
        .collect();
    let injective = rank(rows) == euler_phi(m) as usize;
    let beta = match (&si.bott, &ti.bott) {
        (Some(b), Some(_)) => {
            let p = shadow.apply(&src.gen(b).map_err(|e| e.to_string())?);
            let c = ti.bott_coefficient(tgt, &p).map_err(|e| e.to_string())?;
            if c.is_zero() {
                BetaImage::Kill
            } else {
                BetaImage::Keep
            }
        }
        _ => BetaImage::NotApplicable,
    };
    Ok(HomologyEdge {
        degree0: Degree0Map::Embedding { m, n, exponent },
        beta,
        injective: Some(injective),
    })
}

pub fn homology_diagram(d: &OrbitDiagram) -> Result<HomologyDiagram, OrbitError> {
    let lattice = d.lattice();
    let infos = (0..d.nodes.len())
        .map(|i| homology_of(&d.nodes[i]).map_err(node_err(lattice, i)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut edges = BTreeMap::new();
    for (&(l, k), s) in &d.shadows {
        let e = induced_edge(&d.nodes[l], &infos[l], &d.nodes[k], &infos[k], s).map_err(|reason| {
            OrbitError::Edge {
                from: lattice.id(l).into(),
                to: lattice.id(k).into(),
                reason,
            }
        })?;
        edges.insert((l, k), e);
    }
    HomologyDiagram::from_parts(
        Arc::clone(lattice),
        infos.iter().map(|i| i.value).collect(),
        edges,
    )
}

/// Compares two homology diagrams within the family of standard degree-0
/// inclusions: node values must agree, and then the β-pattern decides.
pub fn homology_diagram_isomorphic(a: &HomologyDiagram, b: &HomologyDiagram) -> Result<bool, OrbitError> {
    if a.lattice.group() != b.lattice.group() || a.lattice.len() != b.lattice.len() {
        return Err(OrbitError::NotApplicable("diagrams over different lattices".into()));
    }
    for h in [a, b] {
        if h.edges.values().any(|e| !e.degree0.is_standard()) {
            return Err(OrbitError::NotApplicable(
                "degree-0 edges are not the standard inclusions".into(),
            ));
        }
    }
    if a.values != b.values {
        return Ok(false);
    }
    Ok(a.beta_pattern() == b.beta_pattern())
}

/// A natural transformation between orbit diagrams, one map per subgroup.
#[derive(Clone, Debug)]
pub struct DiagramMap {
    source: OrbitDiagram,
    target: OrbitDiagram,
    components: Vec<CdgaMap>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiagramMapViolation {
    Endpoints { node: String },
    Component { node: String, message: String },
    Naturality {
        from: String,
        to: String,
        generator: String,
        via_source: String,
        via_target: String,
    },
}

impl fmt::Display for DiagramMapViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramMapViolation::Endpoints { node } => {
                write!(f, "component at {node} does not connect the diagrams")
            }
            DiagramMapViolation::Component { node, message } => write!(f, "at {node}: {message}"),
            DiagramMapViolation::Naturality {
                from,
                to,
                generator,
                via_source,
                via_target,
            } => write!(
                f,
                "square {from} -> {to} fails on {generator}: {via_source} vs {via_target}"
            ),
        }
    }
}

impl DiagramMap {
    pub fn new(source: OrbitDiagram, target: OrbitDiagram, components: Vec<CdgaMap>) -> Result<Self, OrbitError> {
        if source.group() != target.group() || components.len() != source.nodes.len() {
            return Err(OrbitError::Malformed("components do not match the diagrams".into()));
        }
        Ok(DiagramMap {
            source,
            target,
            components,
        })
    }

    pub fn identity(d: &OrbitDiagram) -> Self {
        DiagramMap {
            source: d.clone(),
            target: d.clone(),
            components: d.nodes.iter().map(CdgaMap::identity).collect(),
        }
    }

    pub fn source(&self) -> &OrbitDiagram {
        &self.source
    }

    pub fn target(&self) -> &OrbitDiagram {
        &self.target
    }

    pub fn components(&self) -> &[CdgaMap] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &CdgaMap {
        &self.components[i]
    }

    /// Per-node map checks and naturality squares on generators.
    pub fn validate(&self) -> Vec<DiagramMapViolation> {
        let lat = self.source.lattice();
        let id = |i: usize| lat.id(i).to_string();
        let mut out = Vec::new();
        for (i, f) in self.components.iter().enumerate() {
            if f.source() != &self.source.nodes[i] || f.target() != &self.target.nodes[i] {
                out.push(DiagramMapViolation::Endpoints { node: id(i) });
                continue;
            }
            for v in f.check() {
                out.push(DiagramMapViolation::Component {
                    node: id(i),
                    message: v.to_string(),
                });
            }
        }
        if !out.is_empty() {
            return out;
        }
        for &(l, k) in lat.covers() {
            let (Some(s), Some(t)) = (self.source.shadow(l, k), self.target.shadow(l, k)) else {
                continue;
            };
            let (fl, fk) = (&self.components[l], &self.components[k]);
            for (g, img) in self.source.nodes[l].generators().iter().zip(s.images()) {
                let via_source = fk.apply(img);
                let via_target = t.apply(fl.image_of(&g.name).expect("generator of the node"));
                if via_source != via_target {
                    out.push(DiagramMapViolation::Naturality {
                        from: id(l),
                        to: id(k),
                        generator: g.name.clone(),
                        via_source: via_source.to_string(),
                        via_target: via_target.to_string(),
                    });
                }
            }
        }
        out
    }

    /// Node-wise homology isomorphism: shapes agree, the designated root of
    /// unity goes to a root of the same order, and β to a nonzero multiple
    /// of β. A field map is injective, so equal finite dimension makes it
    /// bijective.
    pub fn is_quasi_iso(&self) -> Result<bool, OrbitError> {
        let lat = self.source.lattice();
        for (i, f) in self.components.iter().enumerate() {
            let (a, b) = (&self.source.nodes[i], &self.target.nodes[i]);
            let si = homology_of(a).map_err(node_err(lat, i))?;
            let ti = homology_of(b).map_err(node_err(lat, i))?;
            if si.value != ti.value {
                return Ok(false);
            }
            let Some(n) = si.value.order() else { continue };
            let w = si.generator.rebase(a.vars()).map_err(|e| node_err(lat, i)(e.into()))?;
            let img = ti.express_cyclotomic(&f.apply(&w)).map_err(node_err(lat, i))?;
            if img.order() != Some(n) {
                return Ok(false);
            }
            if let Some(beta) = &si.bott {
                let p = f.apply(&a.gen(beta).map_err(node_err(lat, i))?);
                match ti.bott_coefficient(b, &p) {
                    Ok(c) if !c.is_zero() => {}
                    _ => return Ok(false),
                }
            }
        }
        Ok(true)
    }
}

pub fn validate_diagram_map(f: &DiagramMap) -> Vec<DiagramMapViolation> {
    f.validate()
}

pub fn is_quasi_iso(f: &DiagramMap) -> Result<bool, OrbitError> {
    f.is_quasi_iso()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice(g: &str) -> Arc<SubgroupLattice> {
        Arc::new(SubgroupLattice::build(&g.parse().unwrap(), DEFAULT_GROUP_BOUND).unwrap())
    }

    /// ℚ[β] at every node of C_pq with β kept or killed by edge.
    fn beta_diagram(g: &str, kill: &[(&str, &str)]) -> OrbitDiagram {
        let lat = lattice(g);
        let l2 = Arc::clone(&lat);
        OrbitDiagram::from_fns(
            Arc::clone(&lat),
            |_| Ok(PresentedCdga::new([("beta", 2)]).unwrap()),
            |l, k, s, t| {
                let killed = kill.contains(&(l2.id(l), l2.id(k)));
                let img = if killed { "0" } else { "beta" };
                Ok(CdgaMap::from_exprs(s.clone(), t.clone(), &[("beta", img)]).unwrap())
            },
        )
        .unwrap()
    }

    #[test]
    fn trivial_group_is_vacuously_valid() {
        let d = beta_diagram("C1", &[]);
        assert!(d.is_valid());
        assert_eq!(d.nodes().len(), 1);
    }

    #[test]
    fn inconsistent_beta_is_located() {
        // Kept along e -> C3 -> C15, killed along e -> C5 -> C15.
        let d = beta_diagram("C15", &[("e", "C5")]);
        let v = d.validate();
        assert_eq!(
            v,
            vec![DiagramViolation::PathDependence {
                from: "e".into(),
                to: "C15".into(),
                composites: 2
            }]
        );
        assert!(beta_diagram("C15", &[("e", "C5"), ("C3", "C15")]).is_valid());
    }

    #[test]
    fn composites_along_chains() {
        let d = beta_diagram("C4", &[("C2", "C4")]);
        let c = d.composite(&[0, 1, 2]).unwrap();
        assert!(c.images()[0].is_zero());
        assert!(d.composite(&[0, 2]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let d = beta_diagram("C2xC2", &[]);
        let back = OrbitDiagram::from_json(&d.to_json()).unwrap();
        assert_eq!(back.nodes(), d.nodes());
        assert_eq!(back.shadows(), d.shadows());
    }

    #[test]
    fn standard_homology_diagrams() {
        let lat = lattice("C15");
        let h = HomologyDiagram::standard(Arc::clone(&lat), Some(false), |_, _| BetaImage::Keep);
        assert!(h.validate().is_empty());
        let five = lat.index_of_id("C5").unwrap();
        let top = lat.top();
        let h2 = HomologyDiagram::standard(Arc::clone(&lat), Some(false), |_, k| {
            if k == top { BetaImage::Kill } else { BetaImage::Keep }
        });
        assert!(h2.validate().is_empty());
        assert!(!homology_diagram_isomorphic(&h, &h2).unwrap());
        let bad = HomologyDiagram::standard(Arc::clone(&lat), Some(false), |l, k| {
            if (l, k) == (0, five) { BetaImage::Kill } else { BetaImage::Keep }
        });
        // Killing e -> C5 only breaks path independence at (e, C15).
        let v = bad.validate();
        assert_eq!(v.len(), 1);
        let formal = h.to_formal_diagram().unwrap();
        assert!(formal.is_valid());
    }

    #[test]
    fn beta_composition() {
        use BetaImage::*;
        assert_eq!(Keep.then(Keep), Keep);
        assert_eq!(Keep.then(Kill), Kill);
        assert_eq!(Kill.then(Keep), Kill);
        assert_eq!(Kill.then(NotApplicable), NotApplicable);
    }
}
