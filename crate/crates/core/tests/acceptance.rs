//! Acceptance gate: nine end-to-end checks, each printed as one PASS/FAIL
//! line. Exits nonzero if any check fails. All comparisons are exact.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use gcmodel::abelian::{AbelianGroup, SubgroupLattice, DEFAULT_GROUP_BOUND};
use gcmodel::cdga::{
    acyclic_by_unit_boundary, complete_intersection_certificate, homology_of, truncated_homology_oracle,
    GradedRingValue, PresentedCdga,
};
use gcmodel::constructions::{
    build_A_kill_beta, build_B, build_D_KU, build_Dprime_ku, build_counterexample, build_formality_map,
    GAMMA, GAMMA_BAR, LINK,
};
use gcmodel::exact::cyclotomic::{cyclo_embed, cyclotomic_coeffs, verify_cyclotomic_identity};
use gcmodel::exact::{cyclotomic, divisors, euler_phi, q, IdealNF, Monomial, MultiPoly, Rational};
use gcmodel::orbit::{
    homology_diagram, homology_diagram_isomorphic, is_quasi_iso, validate_diagram_map, BetaImage, OrbitDiagram,
};
use gcmodel::structures::{
    enumerate_beta_patterns, enumerate_beta_patterns_invertible, path_inconsistency, BetaPattern,
    decide_norm_shadow, Verdict,
};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const LEMMA_GROUPS: [&str; 6] = ["C4", "C6", "C12", "C2xC2", "C2xC4", "C3xC3"];
const FORMALITY_GROUPS: [&str; 4] = ["C4", "C6", "C12", "C2xC2"];
const TESTED_GROUPS: [&str; 9] = ["C4", "C6", "C12", "C2xC2", "C2xC4", "C3xC3", "C9", "C15", "C8"];

fn group(s: &str) -> AbelianGroup {
    s.parse().expect("group literal")
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Rational coefficients of Φ_n, lowest first, from the integer table.
fn phi_rational(n: u64) -> Vec<Rational> {
    cyclotomic_coeffs(n).into_iter().map(Rational::from_integer).collect()
}

fn lemma_homology() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for s in LEMMA_GROUPS {
        let d = ok(build_B(&group(s)))?;
        let lat = d.lattice();
        for i in 0..lat.len() {
            let node = d.node(i);
            let info = ok(homology_of(node))?;
            match lat.node(i).cyclic_order() {
                Some(n) => {
                    ensure!(info.value == GradedRingValue::Field { n }, "{s}/{}: got {}", lat.id(i), info.value);
                    // Dimension from the quotient ring itself.
                    let cert = complete_intersection_certificate(node)
                        .ok_or_else(|| format!("{s}/{}: no complete intersection", lat.id(i)))?;
                    ensure!(cert.h0_dim as u64 == euler_phi(n), "{s}/{}: dim {}", lat.id(i), cert.h0_dim);
                    ensure!(info.min_poly == phi_rational(n), "{s}/{}: minimal polynomial", lat.id(i));
                    // Φ_n kills the generator, and deg Φ_n equals the dimension.
                    let ideal = info.quotient();
                    let g = ok(info.generator.rebase(ideal.vars()))?;
                    let at = cyclotomic(n).compose(&[g]);
                    ensure!(ideal.normal_form(&at).is_zero(), "{s}/{}: Phi_n(generator) != 0", lat.id(i));
                }
                None => {
                    ensure!(info.value == GradedRingValue::Zero, "{s}/{}: got {}", lat.id(i), info.value);
                    ensure!(acyclic_by_unit_boundary(node), "{s}/{}: 1 is not a boundary", lat.id(i));
                }
            }
            checked += 1;
        }
    }
    let t = start.elapsed();
    ensure!(t.as_secs_f64() < 10.0, "took {t:?}");
    Ok(format!("{checked} subgroups in {:.2}s", t.as_secs_f64()))
}

fn cyclotomic_identity() -> Outcome {
    for p in [2, 3, 5] {
        for k in 1..=3 {
            ensure!(ok(verify_cyclotomic_identity(p, k))?, "fails at p={p} k={k}");
        }
    }
    Ok("9 identities".into())
}

fn pattern_counts() -> Outcome {
    let mut counts = Vec::new();
    for (s, want) in [("C9", 4usize), ("C15", 10)] {
        let got = ok(enumerate_beta_patterns(&group(s)))?.count();
        ensure!(got == want, "{s}: {got} patterns, expected {want}");
        counts.push(format!("{s}:{got}"));
    }
    for n in 1..=6u32 {
        let s = format!("C{}", 1u64 << n);
        let got = ok(enumerate_beta_patterns(&group(&s)))?.count();
        ensure!(got == 1 << n, "{s}: {got} patterns");
        counts.push(format!("{s}:{got}"));
    }
    // Keep along e -> C3 -> C15, kill along e -> C5 -> C15.
    let lat = ok(SubgroupLattice::build(&group("C15"), DEFAULT_GROUP_BOUND))?;
    let id = |s: &str| lat.index_of_id(s).expect("subgroup id");
    let (e, c3, c5, top) = (id("e"), id("C3"), id("C5"), id("C15"));
    let p = BetaPattern {
        statuses: BTreeMap::from([
            ((e, c3), BetaImage::Keep),
            ((c3, top), BetaImage::Keep),
            ((e, c5), BetaImage::Kill),
            ((c5, top), BetaImage::Kill),
        ]),
    };
    let at = path_inconsistency(&lat, &p);
    ensure!(at == Some((e, top)), "mixed assignment flagged at {at:?}");
    let lat = Arc::new(lat);
    ensure!(!p.materialize(&lat).validate().is_empty(), "diagram validation accepts mixed assignment");
    Ok(format!("{}; mixed assignment rejected at (e, C15)", counts.join(" ")))
}

fn obstruction() -> Outcome {
    for p in [3u64, 5, 7] {
        let c = ok(build_counterexample(p))?;
        ensure!(c.query.verdict == Verdict::Impossible, "p={p}: a shadow exists");
        let cert = c.query.certificate.join(" | ");
        for step in [format!("f^{p} = "), "f = 1".to_string(), "not injective".to_string()] {
            ensure!(cert.contains(&step), "p={p}: certificate lacks `{step}`");
        }
        // Same decision straight from the top node.
        let again = ok(decide_norm_shadow(GradedRingValue::Field { n: p }, c.diagram.node(c.top())))?;
        ensure!(again.verdict == Verdict::Impossible, "p={p}: direct query disagrees");
    }
    let c = ok(build_counterexample(2))?;
    ensure!(c.query.verdict == Verdict::Exists, "p=2: no shadow");
    let w = c.query.witness.as_ref().ok_or("p=2: no witness")?;
    let img = ok(w.image_of("z"))?;
    ensure!(img.as_constant() == Some(q(-1)), "p=2: z maps to {img}");
    ensure!(w.is_cdga_map(), "p=2: witness is not a map");
    let full = c.completed().ok_or("p=2: completed diagram missing")?;
    ensure!(full.is_valid(), "p=2: completed diagram invalid");
    Ok("impossible for p=3,5,7; z -> -1 for p=2".into())
}

fn formality() -> Outcome {
    let mut n = 0;
    for s in FORMALITY_GROUPS {
        let g = group(s);
        let builds: [(&str, fn(&AbelianGroup) -> Result<OrbitDiagram, _>); 3] =
            [("B", build_B), ("Dprime-ku", build_Dprime_ku), ("D-KU", build_D_KU)];
        for (name, build) in builds {
            let d = ok(build(&g))?;
            let f = ok(build_formality_map(&d))?;
            let v = validate_diagram_map(&f);
            ensure!(v.is_empty(), "{name}({s}): {} violations, first {:?}", v.len(), v[0]);
            ensure!(ok(is_quasi_iso(&f))?, "{name}({s}): not a quasi-isomorphism");
            n += 1;
        }
    }
    Ok(format!("{n} maps"))
}

fn non_uniqueness() -> Outcome {
    let mut n = 0;
    for s in TESTED_GROUPS {
        let g = group(s);
        let keep = ok(homology_diagram(&ok(build_Dprime_ku(&g))?))?;
        let kill = ok(homology_diagram(&ok(build_A_kill_beta(&g))?))?;
        ensure!(keep.values() == kill.values(), "{s}: node data differ");
        ensure!(!ok(homology_diagram_isomorphic(&keep, &kill))?, "{s}: reported isomorphic");
        let kp = keep.beta_pattern();
        let lp = kill.beta_pattern();
        ensure!(!kp.is_empty(), "{s}: no beta edges");
        ensure!(kp.values().all(|b| *b == BetaImage::Keep), "{s}: keep side kills");
        ensure!(lp.values().all(|b| *b == BetaImage::Kill), "{s}: kill side keeps");
        n += 1;
    }
    Ok(format!("{n} groups, all-keep vs all-kill"))
}

fn periodic_forcing() -> Outcome {
    for s in TESTED_GROUPS {
        let g = group(s);
        let h = ok(homology_diagram(&ok(build_D_KU(&g))?))?;
        for (&(l, k), e) in h.edges() {
            if h.value(l).is_zero() || h.value(k).is_zero() {
                continue;
            }
            ensure!(e.beta == BetaImage::Keep, "{s}: beta not kept on ({l}, {k})");
        }
        let c = ok(enumerate_beta_patterns_invertible(&g))?;
        ensure!(c == 1, "{s}: {c} invertible patterns");
    }
    Ok(format!("{} groups", TESTED_GROUPS.len()))
}

fn oracle_concordance() -> Outcome {
    let window = (-2, 2);
    let mut cases: Vec<(String, PresentedCdga)> = Vec::new();
    for s in ["C2", "C4"] {
        let d = ok(build_B(&group(s)))?;
        let top = d.lattice().top();
        cases.push((format!("B({s})"), d.node(top).clone()));
    }
    let block = ok(PresentedCdga::new([(GAMMA, 2), (GAMMA_BAR, -2), (LINK, 1)]))?;
    let block = ok(block.with_d(LINK, &format!("{GAMMA}*{GAMMA_BAR} - 1")))?;
    // The block inside the D-KU node at C2 must carry the same differential.
    let d = ok(build_D_KU(&group("C2")))?;
    let node = d.node(d.lattice().top());
    let in_node = ok(ok(block.d_of(LINK))?.rebase(node.vars()))?;
    ensure!(ok(node.d_of(LINK))? == &in_node, "D-KU(C2) link differential differs from the block");
    cases.push(("Laurent block".into(), block));
    let mut out = Vec::new();
    for (name, a) in cases {
        let r = ok(truncated_homology_oracle(&a, window, 10, 4))?;
        ensure!(r.stabilized, "{name}: not stabilized ({:?} vs {:?})", r.dims, r.extended_dims);
        let expected: Vec<usize> = match ok(homology_of(&a))?.value {
            v => (window.0..=window.1).map(|k| v.dim_in_degree(k)).collect(),
        };
        ensure!(r.dims == expected, "{name}: oracle {:?}, certificate {:?}", r.dims, expected);
        out.push(format!("{name} {:?}", r.dims));
    }
    Ok(out.join("; "))
}

fn random_poly(rng: &mut ChaCha8Rng, vars: &Arc<[String]>, max_deg: u32, terms: usize) -> MultiPoly {
    MultiPoly::from_terms(
        vars,
        (0..terms).map(|_| {
            let m = Monomial((0..vars.len()).map(|_| rng.gen_range(0..=max_deg)).collect());
            let c = Rational::new(BigInt::from(rng.gen_range(-9i64..=9)), BigInt::from(rng.gen_range(1i64..=4)));
            (m, c)
        }),
    )
}

fn properties() -> Outcome {
    // Differentials square to zero and composites agree on every diagram.
    let mut diagrams = 0;
    for s in TESTED_GROUPS {
        let g = group(s);
        let builds: [fn(&AbelianGroup) -> Result<OrbitDiagram, _>; 4] =
            [build_B, build_Dprime_ku, build_D_KU, build_A_kill_beta];
        for build in builds {
            let d = ok(build(&g))?;
            for a in d.nodes() {
                for i in 0..a.len() {
                    ensure!(a.d(&a.d_gen(i).clone()).is_zero(), "{s}: d^2 != 0 on {}", a.generators()[i].name);
                }
            }
            let v = d.validate();
            ensure!(v.is_empty(), "{s}: {:?}", v[0]);
            diagrams += 1;
        }
    }
    // Field inclusions compose along divisor chains of 60.
    let divs = divisors(60);
    let mut chains = 0;
    for &a in &divs {
        for &b in divs.iter().filter(|&&b| b % a == 0) {
            for &c in divs.iter().filter(|&&c| c % b == 0) {
                let lhs = ok(cyclo_embed(a, b))?.then(&ok(cyclo_embed(b, c))?);
                ensure!(lhs == ok(cyclo_embed(a, c))?, "composition fails at {a}|{b}|{c}");
                chains += 1;
            }
        }
    }
    // ∏_{d|n} Φ_d = x^n − 1.
    for n in 1..=60u64 {
        let prod = divisors(n).into_iter().fold(MultiPoly::one(cyclotomic(1).vars()), |acc, d| &acc * &cyclotomic(d));
        let x = MultiPoly::var(prod.vars(), 0);
        let target = &x.pow(n as u32) - &MultiPoly::one(prod.vars());
        ensure!(prod == target, "product identity fails at n={n}");
    }
    // Normal forms are idempotent and differ from the input by an ideal member.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let vars: Arc<[String]> = ["u", "v", "w"].iter().map(|s| s.to_string()).collect::<Vec<_>>().into();
    let mut cases = 0;
    for _ in 0..60 {
        let k = rng.gen_range(1..=3);
        let gens: Vec<MultiPoly> = (0..k).map(|_| random_poly(&mut rng, &vars, 2, 3)).collect();
        let ideal = IdealNF::new(&vars, gens);
        for _ in 0..20 {
            let f = random_poly(&mut rng, &vars, 4, 6);
            let nf = ideal.normal_form(&f);
            ensure!(ideal.normal_form(&nf) == nf, "normal form not idempotent on {f}");
            ensure!(ideal.contains(&(&f - &nf)), "f - NF(f) outside the ideal for {f}");
            cases += 1;
        }
    }
    ensure!(cases >= 1000, "only {cases} cases");
    Ok(format!("{diagrams} diagrams, {chains} chains, n<=60, {cases} normal forms"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("homology of B over every subgroup", lemma_homology),
        ("cyclotomic composition identity", cyclotomic_identity),
        ("beta-pattern counts", pattern_counts),
        ("shadow obstruction over C_{p^2}", obstruction),
        ("constructive formality maps", formality),
        ("connective non-uniqueness", non_uniqueness),
        ("periodic forcing", periodic_forcing),
        ("oracle concordance", oracle_concordance),
        ("property suites", properties),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {}: {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
