//! Counting β-patterns on the homology of the Bott-extended diagram,
//! deciding existence of degree-0 shadows out of cyclotomic fields, and the
//! combined uniqueness report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::abelian::{AbelianGroup, SubgroupLattice, DEFAULT_GROUP_BOUND};
use crate::cdga::{formal_model, homology_of, CdgaError, CdgaMap, GradedRingValue, PresentedCdga, FIELD_GEN};
use crate::constructions::{
    build_A_kill_beta, build_B, build_D_KU, build_Dprime_ku, build_counterexample, build_formality_map,
};
use crate::exact::cyclotomic::{cyclotomic_at, rational_roots_of_cyclotomic};
use crate::exact::{is_prime, unit_root_solutions, MultiPoly};
use crate::orbit::{
    homology_diagram, homology_diagram_isomorphic, BetaImage, DiagramViolation, HomologyDiagram,
    OrbitDiagram, OrbitError,
};

/// Largest number of free edges the brute-force enumeration accepts.
pub const MAX_PATTERN_EDGES: usize = 20;

/// Keep/kill status on each covering edge between cyclic subgroups.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BetaPattern {
    pub statuses: BTreeMap<(usize, usize), BetaImage>,
}

impl BetaPattern {
    pub fn all(edges: &[(usize, usize)], status: BetaImage) -> Self {
        BetaPattern {
            statuses: edges.iter().map(|&e| (e, status)).collect(),
        }
    }

    pub fn status(&self, l: usize, k: usize) -> BetaImage {
        self.statuses.get(&(l, k)).copied().unwrap_or(BetaImage::NotApplicable)
    }

    pub fn kills(&self) -> usize {
        self.statuses.values().filter(|s| **s == BetaImage::Kill).count()
    }

    /// As a homology diagram ℚ(ζ_|K|)[β] with standard degree-0 inclusions.
    pub fn materialize(&self, lattice: &Arc<SubgroupLattice>) -> HomologyDiagram {
        HomologyDiagram::standard(Arc::clone(lattice), Some(false), |l, k| self.status(l, k))
    }

    pub fn labelled(&self, lattice: &SubgroupLattice) -> BTreeMap<String, BetaImage> {
        self.statuses
            .iter()
            .map(|(&(l, k), &s)| (format!("{}->{}", lattice.id(l), lattice.id(k)), s))
            .collect()
    }
}

/// Covering edges whose upper end is cyclic (so both ends are).
pub fn cyclic_edges(lattice: &SubgroupLattice) -> Vec<(usize, usize)> {
    lattice
        .covers()
        .iter()
        .copied()
        .filter(|&(_, k)| lattice.node(k).is_cyclic())
        .collect()
}

/// Direct consistency check: for cyclic L ≤ N, every maximal chain gives
/// the same composite status. Returns the first offending pair.
pub fn path_inconsistency(lattice: &SubgroupLattice, p: &BetaPattern) -> Option<(usize, usize)> {
    for l in 0..lattice.len() {
        for n in l + 1..lattice.len() {
            if !lattice.node(n).is_cyclic() || !lattice.contains(l, n) {
                continue;
            }
            let mut seen: Option<BetaImage> = None;
            for chain in lattice.maximal_chains(l, n) {
                let s = chain
                    .windows(2)
                    .fold(BetaImage::Keep, |acc, w| acc.then(p.status(w[0], w[1])));
                match seen {
                    None => seen = Some(s),
                    Some(t) if t != s => return Some((l, n)),
                    _ => {}
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
pub struct BetaEnumeration {
    pub lattice: Arc<SubgroupLattice>,
    pub edges: Vec<(usize, usize)>,
    pub patterns: Vec<BetaPattern>,
    /// Rejected assignments with the pair where consistency first fails.
    pub rejected: Vec<(BetaPattern, (usize, usize))>,
}

impl BetaEnumeration {
    pub fn count(&self) -> usize {
        self.patterns.len()
    }
}

fn enumerate_with(g: &AbelianGroup, allow_kill: bool) -> Result<BetaEnumeration, OrbitError> {
    let lattice = Arc::new(SubgroupLattice::build(g, DEFAULT_GROUP_BOUND)?);
    let edges = cyclic_edges(&lattice);
    if edges.len() > MAX_PATTERN_EDGES {
        return Err(OrbitError::NotApplicable(format!(
            "{} free edges exceed the enumeration limit of {MAX_PATTERN_EDGES}",
            edges.len()
        )));
    }
    let mut patterns = Vec::new();
    let mut rejected = Vec::new();
    for mask in 0u64..(1u64 << edges.len()) {
        if !allow_kill && mask != 0 {
            break;
        }
        let p = BetaPattern {
            statuses: edges
                .iter()
                .enumerate()
                .map(|(i, &e)| {
                    let kill = mask >> i & 1 == 1;
                    (e, if kill { BetaImage::Kill } else { BetaImage::Keep })
                })
                .collect(),
        };
        if let Some(at) = path_inconsistency(&lattice, &p) {
            rejected.push((p, at));
            continue;
        }
        let violations = p.materialize(&lattice).validate();
        if !violations.is_empty() {
            return Err(OrbitError::Malformed(format!(
                "consistent pattern fails diagram validation: {}",
                violations[0]
            )));
        }
        patterns.push(p);
    }
    Ok(BetaEnumeration {
        lattice,
        edges,
        patterns,
        rejected,
    })
}

/// All path-consistent keep/kill assignments with degree-0 data fixed to
/// the standard inclusions.
pub fn enumerate_beta_patterns(g: &AbelianGroup) -> Result<BetaEnumeration, OrbitError> {
    enumerate_with(g, true)
}

/// With β invertible a ring map cannot kill it into a nonzero node, so
/// only the all-keep assignment survives.
pub fn enumerate_beta_patterns_invertible(g: &AbelianGroup) -> Result<usize, OrbitError> {
    Ok(enumerate_with(g, false)?.count())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Exists,
    Impossible,
}

/// Existence of a degree-0 ring map ℚ(ζ_m) → target.
#[derive(Clone, Debug)]
pub struct ObstructionResult {
    pub source: GradedRingValue,
    pub verdict: Verdict,
    /// The witness map from the presentation ℚ[z]/(Φ_m(z)).
    pub witness: Option<CdgaMap>,
    /// Image of the source root, in the target generators.
    pub root_image: Option<String>,
    pub certificate: Vec<String>,
}

impl ObstructionResult {
    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source.to_string(),
            "verdict": self.verdict,
            "root_image": self.root_image,
            "certificate": self.certificate,
        })
    }
}

fn witness_map(
    source: &PresentedCdga,
    target: &PresentedCdga,
    image: MultiPoly,
) -> Result<CdgaMap, CdgaError> {
    let mut assignment = BTreeMap::new();
    if source.has_generator(FIELD_GEN) {
        assignment.insert(FIELD_GEN.to_string(), image);
    }
    let map = CdgaMap::new(source.clone(), target.clone(), &assignment)?;
    if let Some(v) = map.check().first() {
        return Err(CdgaError::VerificationFailed(v.to_string()));
    }
    Ok(map)
}

/// Decides whether ℚ(ζ_m) maps to the target in degree 0. Free targets
/// without negative-degree generators have a polynomial ring in degree 0,
/// where roots of Φ_m must be rational; targets presented by relations must
/// have a cyclotomic field as degree-0 ring, searched by roots of unity.
pub fn decide_norm_shadow(source: GradedRingValue, target: &PresentedCdga) -> Result<ObstructionResult, CdgaError> {
    let GradedRingValue::Field { n: m } = source else {
        return Err(CdgaError::NotApplicable(format!("source {source} is not a field in degree 0")));
    };
    let src = formal_model(source);
    if !target.relations().is_empty() {
        let all_cycles = target.degree_zero_cycles().len() == target.len();
        let info = homology_of(target)?;
        let Some(n) = info.value.order().filter(|_| all_cycles && !info.value.has_beta()) else {
            return Err(CdgaError::NotApplicable(
                "target with relations is not a cyclotomic field".into(),
            ));
        };
        let roots = unit_root_solutions(m, n)?;
        let Some(r) = roots.first() else {
            return Ok(ObstructionResult {
                source,
                verdict: Verdict::Impossible,
                witness: None,
                root_image: None,
                certificate: vec![
                    format!("every root of unity in Q(zeta_{n}) is +-zeta_{n}^k"),
                    format!("none of them is a root of Phi_{m}"),
                ],
            });
        };
        let gen = info.generator.rebase(target.vars())?;
        let mut image = target.reduce(&target.pow(&gen, r.exponent as u32));
        if r.sign < 0 {
            image = -&image;
        }
        let root_image = format!("{}zeta_{n}^{}", if r.sign < 0 { "-" } else { "" }, r.exponent);
        let witness = witness_map(&src, target, image)?;
        return Ok(ObstructionResult {
            source,
            verdict: Verdict::Exists,
            witness: Some(witness),
            root_image: Some(root_image),
            certificate: vec![format!("Phi_{m}({}) = 0 in Q(zeta_{n})", r.value)],
        });
    }
    if let Some(g) = target.generators().iter().find(|g| g.degree < 0) {
        return Err(CdgaError::NotApplicable(format!(
            "generator {} of negative degree: degree-0 part is not a polynomial ring",
            g.name
        )));
    }
    let poly_vars: Vec<String> = target
        .generators()
        .iter()
        .filter(|g| g.degree == 0)
        .map(|g| g.name.clone())
        .collect();
    let ring = if poly_vars.is_empty() {
        "Q".to_string()
    } else {
        format!("Q[{}]", poly_vars.join(", "))
    };
    if let Some(root) = rational_roots_of_cyclotomic(m).into_iter().next() {
        let image = target.constant(root.clone());
        let witness = witness_map(&src, target, image)?;
        return Ok(ObstructionResult {
            source,
            verdict: Verdict::Exists,
            witness: Some(witness),
            root_image: Some(root.to_string()),
            certificate: vec![format!("Phi_{m}({root}) = 0 in {ring}")],
        });
    }
    let mut certificate = vec![format!(
        "a ring map sends zeta_{m} to some f in degree 0 of the target, the polynomial ring {ring}, an integral domain"
    )];
    if is_prime(m) {
        certificate.push(format!(
            "f^{m} = n(zeta_{m}^{m}) = n(1) = 1, so f is a unit of {ring}, hence a nonzero rational constant by degree"
        ));
        certificate.push(format!("1 is the only rational root of unity of odd order {m}, so f = 1"));
        certificate.push(format!(
            "then n(Phi_{m}(zeta_{m})) = Phi_{m}(1) = {m} != 0 although Phi_{m}(zeta_{m}) = 0: the map is not injective, impossible for a field into a nonzero ring"
        ));
    } else {
        certificate.push(format!(
            "Phi_{m}(f) = 0 makes f algebraic over Q, hence a rational constant by degree"
        ));
        certificate.push(format!(
            "rational root candidates are +-1, and Phi_{m}(1) = {}, Phi_{m}(-1) = {}",
            cyclotomic_at(m, 1),
            cyclotomic_at(m, -1)
        ));
    }
    Ok(ObstructionResult {
        source,
        verdict: Verdict::Impossible,
        witness: None,
        root_image: None,
        certificate,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeRow {
    pub subgroup: String,
    pub order: u64,
    pub cyclic: bool,
    pub predicted: String,
    pub computed: String,
    pub h0_dim: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FormalityCheck {
    pub construction: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonIsoWitness {
    pub objectwise_equal: bool,
    pub isomorphic: bool,
    pub keep_pattern: BTreeMap<String, BetaImage>,
    pub kill_pattern: BTreeMap<String, BetaImage>,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionSummary {
    pub subgroup: String,
    pub p: u64,
    pub verdict: Verdict,
    pub root_image: Option<String>,
    pub certificate: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessReport {
    pub group: String,
    pub convention: String,
    pub homology_table: Vec<NodeRow>,
    pub formality: Vec<FormalityCheck>,
    pub periodic_beta_kept: bool,
    pub pattern_count: usize,
    pub invertible_count: usize,
    pub patterns: Vec<BTreeMap<String, BetaImage>>,
    pub noniso_witness: NonIsoWitness,
    pub obstructions: Vec<ObstructionSummary>,
    pub failures: Vec<String>,
    pub passed: bool,
}

const CONVENTION: &str = "patterns are path-consistent keep/kill assignments on covering edges \
between cyclic subgroups, with degree-0 data fixed to the standard inclusions";

fn formality_check(name: &str, d: Result<OrbitDiagram, OrbitError>) -> FormalityCheck {
    let outcome = d.and_then(|d| {
        let n = d.nodes().len();
        build_formality_map(&d).map(|_| n)
    });
    match outcome {
        Ok(n) => FormalityCheck {
            construction: name.into(),
            ok: true,
            detail: format!("map onto homology verified at {n} subgroups"),
        },
        Err(e) => FormalityCheck {
            construction: name.into(),
            ok: false,
            detail: e.to_string(),
        },
    }
}

fn objectwise_equal(a: &HomologyDiagram, b: &HomologyDiagram) -> bool {
    a.values() == b.values()
}

pub fn uniqueness_report(g: &AbelianGroup) -> Result<UniquenessReport, OrbitError> {
    let mut failures = Vec::new();
    let b = build_B(g)?;
    let hb = homology_diagram(&b)?;
    let lat = Arc::clone(b.lattice());
    let homology_table: Vec<NodeRow> = (0..lat.len())
        .map(|i| {
            let s = lat.node(i);
            let predicted = match s.cyclic_order() {
                Some(n) => GradedRingValue::Field { n },
                None => GradedRingValue::Zero,
            };
            let computed = hb.value(i);
            NodeRow {
                subgroup: lat.id(i).into(),
                order: s.order(),
                cyclic: s.is_cyclic(),
                predicted: predicted.to_string(),
                computed: computed.to_string(),
                h0_dim: computed.h0_dim(),
                ok: predicted == computed,
            }
        })
        .collect();
    for r in homology_table.iter().filter(|r| !r.ok) {
        failures.push(format!("homology at {} is {}, expected {}", r.subgroup, r.computed, r.predicted));
    }

    let formality = vec![
        formality_check("B", Ok(b.clone())),
        formality_check("Dprime-ku", build_Dprime_ku(g)),
        formality_check("D-KU", build_D_KU(g)),
    ];
    for f in formality.iter().filter(|f| !f.ok) {
        failures.push(format!("formality of {}: {}", f.construction, f.detail));
    }

    let hd = homology_diagram(&build_D_KU(g)?)?;
    let periodic_beta_kept = hd.beta_pattern().values().all(|&s| s == BetaImage::Keep);
    if !periodic_beta_kept {
        failures.push("a shadow of the periodic diagram kills beta".into());
    }
    let invertible_count = enumerate_beta_patterns_invertible(g)?;
    if invertible_count != 1 {
        failures.push(format!("{invertible_count} invertible patterns, expected 1"));
    }

    let enumeration = enumerate_beta_patterns(g)?;
    let pattern_count = enumeration.count();
    let nontrivial = g.order() > 1;
    if nontrivial && pattern_count <= 1 {
        failures.push(format!("only {pattern_count} pattern for a nontrivial group"));
    }
    let keep = homology_diagram(&build_Dprime_ku(g)?)?;
    let kill = homology_diagram(&build_A_kill_beta(g)?)?;
    let isomorphic = homology_diagram_isomorphic(&keep, &kill)?;
    let eq = objectwise_equal(&keep, &kill);
    let label = |h: &HomologyDiagram| -> BTreeMap<String, BetaImage> {
        h.beta_pattern()
            .into_iter()
            .map(|((l, k), s)| (format!("{}->{}", lat.id(l), lat.id(k)), s))
            .collect()
    };
    let noniso_witness = NonIsoWitness {
        objectwise_equal: eq,
        isomorphic,
        keep_pattern: label(&keep),
        kill_pattern: label(&kill),
        ok: eq && isomorphic != nontrivial,
    };
    if !noniso_witness.ok {
        failures.push("the keep/kill pair does not behave as predicted".into());
    }

    let mut obstructions = Vec::new();
    for i in 0..lat.len() {
        let Some((p, 2)) = lat.node(i).prime_power() else { continue };
        let c = build_counterexample(p)?;
        let expected = if p == 2 { Verdict::Exists } else { Verdict::Impossible };
        if c.query.verdict != expected {
            failures.push(format!("shadow decision at {} disagrees", lat.id(i)));
        }
        obstructions.push(ObstructionSummary {
            subgroup: lat.id(i).into(),
            p,
            verdict: c.query.verdict,
            root_image: c.query.root_image.clone(),
            certificate: c.query.certificate.clone(),
        });
    }

    Ok(UniquenessReport {
        group: g.to_string(),
        convention: CONVENTION.into(),
        homology_table,
        formality,
        periodic_beta_kept,
        pattern_count,
        invertible_count,
        patterns: enumeration.patterns.iter().map(|p| p.labelled(&lat)).collect(),
        noniso_witness,
        obstructions,
        passed: failures.is_empty(),
        failures,
    })
}

impl UniquenessReport {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
        let _ = writeln!(s, "group {}", self.group);
        let _ = writeln!(s, "homology of B:");
        for r in &self.homology_table {
            let _ = writeln!(
                s,
                "  {:<8} order {:<3} {:<14} dim {:<3} {}",
                r.subgroup, r.order, r.computed, r.h0_dim, mark(r.ok)
            );
        }
        let _ = writeln!(s, "formality maps:");
        for f in &self.formality {
            let _ = writeln!(s, "  {:<10} {} ({})", f.construction, mark(f.ok), f.detail);
        }
        let _ = writeln!(
            s,
            "periodic: beta kept on every edge: {}, invertible patterns: {}",
            self.periodic_beta_kept, self.invertible_count
        );
        let _ = writeln!(s, "connective: {} patterns ({})", self.pattern_count, self.convention);
        let w = &self.noniso_witness;
        let _ = writeln!(
            s,
            "keep/kill pair: objectwise equal {}, isomorphic {} {}",
            w.objectwise_equal,
            w.isomorphic,
            mark(w.ok)
        );
        for o in &self.obstructions {
            let _ = writeln!(s, "shadow into {} from Q(zeta_{}): {:?}", o.subgroup, o.p, o.verdict);
            for line in &o.certificate {
                let _ = writeln!(s, "    {line}");
            }
        }
        let _ = writeln!(s, "{}", if self.passed { "PASS" } else { "FAIL" });
        for f in &self.failures {
            let _ = writeln!(s, "  {f}");
        }
        s
    }
}

/// Rejected assignments of an enumeration as diagram violations, for
/// reporting.
pub fn rejected_as_violations(e: &BetaEnumeration) -> Vec<DiagramViolation> {
    e.rejected
        .iter()
        .map(|(_, (l, n))| DiagramViolation::PathDependence {
            from: e.lattice.id(*l).into(),
            to: e.lattice.id(*n).into(),
            composites: 2,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> AbelianGroup {
        s.parse().unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_beta_patterns(&g("C9")).unwrap().count(), 4);
        assert_eq!(enumerate_beta_patterns(&g("C15")).unwrap().count(), 10);
        assert_eq!(enumerate_beta_patterns(&g("C8")).unwrap().count(), 8);
        assert_eq!(enumerate_beta_patterns(&g("C2xC2")).unwrap().count(), 8);
        assert_eq!(enumerate_beta_patterns(&g("C1")).unwrap().count(), 1);
        for s in ["C4", "C15", "C2xC2"] {
            assert_eq!(enumerate_beta_patterns_invertible(&g(s)).unwrap(), 1);
        }
    }

    #[test]
    fn pq_rejections_sit_at_bottom_and_top() {
        let e = enumerate_beta_patterns(&g("C15")).unwrap();
        assert_eq!(e.rejected.len(), 6);
        let top = e.lattice.top();
        assert!(e.rejected.iter().all(|(_, at)| *at == (0, top)));
    }

    #[test]
    fn shadow_decisions() {
        let target = |p: u64| {
            let x = "x";
            let a = PresentedCdga::new([(x, 0), ("y", 1)]).unwrap();
            let phi = crate::exact::cyclotomic(p * p).rebase(a.vars()).unwrap();
            let mut a = a;
            a.set_d("y", phi).unwrap();
            a
        };
        let r = decide_norm_shadow(GradedRingValue::Field { n: 3 }, &target(3)).unwrap();
        assert_eq!(r.verdict, Verdict::Impossible);
        assert!(r.certificate.iter().any(|l| l.contains("f = 1")));
        let r = decide_norm_shadow(GradedRingValue::Field { n: 2 }, &target(2)).unwrap();
        assert_eq!(r.verdict, Verdict::Exists);
        assert_eq!(r.root_image.as_deref(), Some("-1"));
        let w = r.witness.unwrap();
        assert_eq!(w.image_of("z").unwrap(), &w.target().constant(crate::exact::q(-1)));

        let field9 = formal_model(GradedRingValue::Field { n: 9 });
        let r = decide_norm_shadow(GradedRingValue::Field { n: 3 }, &field9).unwrap();
        assert_eq!(r.verdict, Verdict::Exists);
        assert_eq!(r.root_image.as_deref(), Some("zeta_9^3"));
        let r = decide_norm_shadow(GradedRingValue::Field { n: 4 }, &field9).unwrap();
        assert_eq!(r.verdict, Verdict::Impossible);
        assert!(decide_norm_shadow(GradedRingValue::Zero, &field9).is_err());
    }

    #[test]
    fn decision_matches_unit_roots() {
        for m in 1..=12u64 {
            for n in 1..=12u64 {
                let r = decide_norm_shadow(GradedRingValue::Field { n: m }, &formal_model(GradedRingValue::Field { n })).unwrap();
                let expected = !unit_root_solutions(m, n).unwrap().is_empty();
                assert_eq!(r.verdict == Verdict::Exists, expected, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn report_c4() {
        let r = uniqueness_report(&g("C4")).unwrap();
        assert!(r.passed, "{}", r.render_text());
        assert_eq!((r.pattern_count, r.invertible_count), (4, 1));
        assert!(!r.noniso_witness.isomorphic);
        assert_eq!(r.obstructions.len(), 1);
        let t = uniqueness_report(&g("C1")).unwrap();
        assert!(t.passed);
        assert_eq!(t.pattern_count, 1);
    }
}
