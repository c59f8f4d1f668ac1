//! `gcmodel`: subgroup lattices, diagram construction, homology, pattern
//! counts and obstruction checks from the command line.
//!
//! Exit status is 0 on success, 2 when the answer is a mathematical negative
//! (failed validation, an obstruction, a failed report) and 1 on errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gcmodel::abelian::{AbelianGroup, SubgroupLattice, DEFAULT_GROUP_BOUND};
use gcmodel::cdga::{truncated_homology_oracle, validate_cdga, CdgaJson, CdgaMap, CdgaMapJson, PresentedCdga};
use gcmodel::constructions::{
    build_A_kill_beta, build_B, build_D_KU, build_Dprime_ku, build_counterexample, build_example_C2_pair,
    Counterexample,
};
use gcmodel::exact::factorize;
use gcmodel::orbit::{homology_diagram, OrbitDiagram};
use gcmodel::structures::{
    enumerate_beta_patterns, enumerate_beta_patterns_invertible, uniqueness_report, Verdict,
};

#[derive(Parser, Debug)]
#[command(name = "gcmodel", version, about = "Exact algebraic models over subgroup lattices of finite abelian groups")]
struct Cli {
    /// Output format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Also write the JSON result to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Construction {
    #[value(name = "B")]
    B,
    #[value(name = "D-KU")]
    DKu,
    #[value(name = "Dprime-ku")]
    DprimeKu,
    #[value(name = "A-kill-beta")]
    AKillBeta,
    #[value(name = "counterexample")]
    Counterexample,
    #[value(name = "example-2-10")]
    ExamplePair,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List subgroups, cyclicity and covering edges.
    Subgroups { group: String },
    /// Build a diagram, validate it and emit its JSON.
    Build {
        #[arg(value_enum)]
        construction: Construction,
        group: String,
    },
    /// Homology of every node of a diagram file, with induced edge data.
    Homology {
        file: PathBuf,
        /// Cross-check with the weight-truncated homology oracle.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        weight_bound: u32,
        /// Degree window for the oracle, as LO:HI.
        #[arg(long, default_value = "-2:2", value_parser = parse_window, allow_hyphen_values = true)]
        window: (i64, i64),
        /// Extra weight used for the stabilization check.
        #[arg(long, default_value_t = 4)]
        delta: u32,
    },
    /// Validate a diagram, CDGA or map file.
    Validate { file: PathBuf },
    /// Count consistent β-patterns on the homology diagram.
    Enumerate {
        group: String,
        /// β invertible: killing is not allowed.
        #[arg(long)]
        invertible: bool,
    },
    /// Decide shadows out of ℚ(ζ_p) at every cyclic subgroup of order p².
    Obstruction { group: String },
    /// Full structure report for a group.
    Report { group: String },
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if lo > hi {
        return Err(format!("empty window {lo}:{hi}"));
    }
    Ok((lo, hi))
}

/// What a command produced: text for humans, JSON for files and scripts.
struct Output {
    text: String,
    json: Value,
    negative: bool,
}

fn parse_group(s: &str) -> Result<AbelianGroup> {
    s.parse::<AbelianGroup>().map_err(|e| anyhow!("bad group `{s}`: {e}"))
}

fn read_json(path: &Path) -> Result<Value> {
    let raw = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&raw).with_context(|| format!("parsing {}", path.display()))
}

/// Accepts a bare diagram or any object with a `diagram` field.
fn read_diagram(path: &Path) -> Result<OrbitDiagram> {
    let v = read_json(path)?;
    let d = v.get("diagram").unwrap_or(&v);
    Ok(OrbitDiagram::from_json(d)?)
}

fn cmd_subgroups(group: &str) -> Result<Output> {
    let g = parse_group(group)?;
    let lat = SubgroupLattice::build(&g, DEFAULT_GROUP_BOUND)?;
    let mut text = format!("{} subgroups of {g}\n", lat.len());
    for i in 0..lat.len() {
        let s = lat.node(i);
        let _ = writeln!(
            text,
            "  {:<8} order {:<4} {}",
            lat.id(i),
            s.order(),
            if s.is_cyclic() { "cyclic" } else { "non-cyclic" }
        );
    }
    let _ = writeln!(text, "covering edges:");
    for &(l, k) in lat.covers() {
        let _ = writeln!(text, "  {} < {}", lat.id(l), lat.id(k));
    }
    Ok(Output {
        text,
        json: lat.to_json(),
        negative: false,
    })
}

fn describe_diagram(d: &OrbitDiagram, text: &mut String) -> bool {
    let lat = d.lattice();
    for i in 0..lat.len() {
        let a = d.node(i);
        let gens: Vec<String> = a.generators().iter().map(|g| format!("{}({})", g.name, g.degree)).collect();
        let _ = writeln!(text, "  {:<8} {}", lat.id(i), gens.join(" "));
    }
    let _ = writeln!(text, "  {} shadows", d.shadows().len());
    let v = d.validate();
    for x in &v {
        let _ = writeln!(text, "  violation: {x}");
    }
    let _ = writeln!(text, "{}", if v.is_empty() { "valid" } else { "INVALID" });
    v.is_empty()
}

fn p_squared(g: &AbelianGroup) -> Result<u64> {
    let n = g.order();
    match (g.cyclic_orders().len(), factorize(n).as_slice()) {
        (1, [(p, 2)]) => Ok(*p),
        _ => bail!("the counterexample needs a cyclic group of order p^2, got {g}"),
    }
}

fn describe_counterexample(c: &Counterexample, text: &mut String) -> bool {
    let q = &c.query;
    let _ = writeln!(
        text,
        "chain e < C{p} < C{pp}: nodes Q, Q(zeta_{p}), Q[x] (x) E(y) with d(y) = Phi_{pp}(x); H0 of the top has dimension {}",
        c.top_h0_dim,
        p = c.p,
        pp = c.p * c.p
    );
    match q.verdict {
        Verdict::Impossible => {
            let _ = writeln!(text, "no shadow exists from Q(zeta_{}) to the top node", c.p);
        }
        Verdict::Exists => {
            let _ = writeln!(
                text,
                "a shadow exists: zeta_{} -> {}",
                c.p,
                q.root_image.as_deref().unwrap_or("?")
            );
        }
    }
    for line in &q.certificate {
        let _ = writeln!(text, "  {line}");
    }
    q.verdict == Verdict::Exists
}

fn cmd_build(construction: Construction, group: &str) -> Result<Output> {
    let g = parse_group(group)?;
    let mut text = String::new();
    let (json, ok) = match construction {
        Construction::Counterexample => {
            let c = build_counterexample(p_squared(&g)?)?;
            let ok = describe_counterexample(&c, &mut text);
            (c.to_json(), ok)
        }
        Construction::ExamplePair => {
            if g.order() != 2 {
                bail!("example-2-10 is defined over C2 only, got {g}");
            }
            let (keep, kill) = build_example_C2_pair()?;
            let _ = writeln!(text, "shadow x -> x:");
            let a = describe_diagram(&keep, &mut text);
            let _ = writeln!(text, "shadow x -> 0:");
            let b = describe_diagram(&kill, &mut text);
            (json!({ "identity": keep.to_json(), "zero": kill.to_json() }), a && b)
        }
        _ => {
            let d = match construction {
                Construction::B => build_B(&g)?,
                Construction::DKu => build_D_KU(&g)?,
                Construction::DprimeKu => build_Dprime_ku(&g)?,
                _ => build_A_kill_beta(&g)?,
            };
            let _ = writeln!(text, "diagram over {g}:");
            let ok = describe_diagram(&d, &mut text);
            (d.to_json(), ok)
        }
    };
    Ok(Output {
        text,
        json,
        negative: !ok,
    })
}

fn cmd_homology(file: &Path, oracle: bool, weight_bound: u32, window: (i64, i64), delta: u32) -> Result<Output> {
    let d = read_diagram(file)?;
    let h = homology_diagram(&d)?;
    let lat = d.lattice();
    let mut text = String::new();
    for i in 0..lat.len() {
        let v = h.value(i);
        let _ = writeln!(text, "  {:<8} {:<26} H0 dim {}", lat.id(i), v.to_string(), v.h0_dim());
    }
    for (&(l, k), e) in h.edges() {
        let _ = writeln!(text, "  {} -> {}: beta -> {}", lat.id(l), lat.id(k), e.beta);
    }
    let violations = h.validate();
    for v in &violations {
        let _ = writeln!(text, "  violation: {v}");
    }
    let mut json = h.to_json();
    let mut negative = !violations.is_empty();
    if oracle {
        let mut reports = serde_json::Map::new();
        for i in 0..lat.len() {
            let id = lat.id(i);
            match truncated_homology_oracle(d.node(i), window, weight_bound, delta) {
                Ok(r) => {
                    let expected: Vec<usize> = (window.0..=window.1).map(|k| h.value(i).dim_in_degree(k)).collect();
                    let agrees = r.dims == expected;
                    negative |= !(agrees && r.stabilized);
                    let _ = writeln!(
                        text,
                        "  oracle {id}: dims {:?} over {}..={} (W={}), stabilized {}, matches {}",
                        r.dims, window.0, window.1, r.weight_bound, r.stabilized, agrees
                    );
                    let mut v = serde_json::to_value(&r)?;
                    v["matches"] = json!(agrees);
                    reports.insert(id.to_string(), v);
                }
                Err(e) => {
                    let _ = writeln!(text, "  oracle {id}: unavailable ({e})");
                    reports.insert(id.to_string(), json!({ "unavailable": e.to_string() }));
                }
            }
        }
        json["oracle"] = Value::Object(reports);
    }
    Ok(Output { text, json, negative })
}

fn cmd_validate(file: &Path) -> Result<Output> {
    let v = read_json(file)?;
    let (kind, problems): (&str, Vec<String>) = if v.get("nodes").is_some() || v.get("diagram").is_some() {
        let d = OrbitDiagram::from_json(v.get("diagram").unwrap_or(&v))?;
        ("diagram", d.validate().iter().map(|x| x.to_string()).collect())
    } else if v.get("assignment").is_some() {
        let m: CdgaMapJson = serde_json::from_value(v)?;
        let m = CdgaMap::from_json(&m)?;
        ("map", m.check().iter().map(|x| x.to_string()).collect())
    } else if v.get("generators").is_some() {
        let a: CdgaJson = serde_json::from_value(v)?;
        let a = PresentedCdga::from_json(&a)?;
        ("cdga", validate_cdga(&a).violations.iter().map(|x| x.to_string()).collect())
    } else {
        bail!("{} is not a diagram, map or CDGA file", file.display());
    };
    let mut text = String::new();
    for p in &problems {
        let _ = writeln!(text, "  {p}");
    }
    let _ = writeln!(text, "{kind} {}", if problems.is_empty() { "valid" } else { "INVALID" });
    Ok(Output {
        text,
        json: json!({ "kind": kind, "valid": problems.is_empty(), "violations": problems }),
        negative: !problems.is_empty(),
    })
}

fn cmd_enumerate(group: &str, invertible: bool) -> Result<Output> {
    let g = parse_group(group)?;
    if invertible {
        let n = enumerate_beta_patterns_invertible(&g)?;
        return Ok(Output {
            text: format!("{n}\n"),
            json: json!({ "group": g.to_string(), "invertible": true, "count": n }),
            negative: false,
        });
    }
    let e = enumerate_beta_patterns(&g)?;
    let mut text = format!("{}\n", e.count());
    let patterns: Vec<Value> = e.patterns.iter().map(|p| json!(p.labelled(&e.lattice))).collect();
    for p in &e.patterns {
        let cells: Vec<String> = p.labelled(&e.lattice).iter().map(|(k, v)| format!("{k}:{v}")).collect();
        let _ = writeln!(text, "  {}", cells.join(" "));
    }
    let rejected: Vec<Value> = e
        .rejected
        .iter()
        .map(|(p, (l, n))| {
            json!({
                "pattern": p.labelled(&e.lattice),
                "inconsistent_at": [e.lattice.id(*l), e.lattice.id(*n)],
            })
        })
        .collect();
    let _ = writeln!(text, "  {} assignments rejected as path-inconsistent", rejected.len());
    Ok(Output {
        text,
        json: json!({
            "group": g.to_string(),
            "invertible": false,
            "count": e.count(),
            "patterns": patterns,
            "rejected": rejected,
        }),
        negative: false,
    })
}

fn cmd_obstruction(group: &str) -> Result<Output> {
    let g = parse_group(group)?;
    let lat = SubgroupLattice::build(&g, DEFAULT_GROUP_BOUND)?;
    let mut text = String::new();
    let mut entries = Vec::new();
    let mut negative = false;
    for i in 0..lat.len() {
        let Some((p, 2)) = lat.node(i).prime_power() else { continue };
        let c = build_counterexample(p)?;
        let _ = writeln!(text, "{}:", lat.id(i));
        negative |= !describe_counterexample(&c, &mut text);
        let mut v = c.to_json();
        v["subgroup"] = json!(lat.id(i));
        entries.push(v);
    }
    if entries.is_empty() {
        let _ = writeln!(text, "{g} has no cyclic subgroup of order p^2");
    }
    Ok(Output {
        text,
        json: json!({ "group": g.to_string(), "queries": entries }),
        negative,
    })
}

fn cmd_report(group: &str) -> Result<Output> {
    let g = parse_group(group)?;
    let r = uniqueness_report(&g)?;
    Ok(Output {
        text: r.render_text(),
        json: serde_json::to_value(&r)?,
        negative: !r.passed,
    })
}

fn run(cli: Cli) -> Result<bool> {
    let out = match &cli.command {
        Command::Subgroups { group } => cmd_subgroups(group)?,
        Command::Build { construction, group } => cmd_build(*construction, group)?,
        Command::Homology {
            file,
            oracle,
            weight_bound,
            window,
            delta,
        } => cmd_homology(file, *oracle, *weight_bound, *window, *delta)?,
        Command::Validate { file } => cmd_validate(file)?,
        Command::Enumerate { group, invertible } => cmd_enumerate(group, *invertible)?,
        Command::Obstruction { group } => cmd_obstruction(group)?,
        Command::Report { group } => cmd_report(group)?,
    };
    let rendered = serde_json::to_string_pretty(&out.json)? + "\n";
    if let Some(path) = &cli.out {
        fs::write(path, &rendered).with_context(|| format!("writing {}", path.display()))?;
    }
    match cli.format {
        Format::Text => print!("{}", out.text),
        Format::Json => print!("{rendered}"),
    }
    Ok(!out.negative)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
