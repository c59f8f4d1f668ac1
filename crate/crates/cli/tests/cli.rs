use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcmodel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let o = run(&all);
    let v = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)));
    (o.status.code().unwrap(), v)
}

fn file_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn subgroup_counts() {
    for (g, n) in [("C12", 6), ("C2xC2", 5), ("C1", 1)] {
        let (code, v) = json(&["subgroups", g]);
        assert_eq!(code, 0);
        assert_eq!(v["subgroups"].as_array().unwrap().len(), n, "{g}: {v}");
    }
    let o = run(&["subgroups", "C2xC2"]);
    assert!(stdout(&o).starts_with("5 subgroups"));
}

#[test]
fn malformed_group_is_an_error() {
    let o = run(&["subgroups", "C0x"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad group"));
}

#[test]
fn build_then_homology_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b6.json");
    let o = run(&["build", "B", "C6", "--out", file_arg(&path)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("valid"));
    let (code, h) = json(&["homology", file_arg(&path)]);
    assert_eq!(code, 0);
    let rings: Vec<&str> = ["e", "C2", "C3", "C6"].iter().map(|id| h["nodes"][id]["ring"].as_str().unwrap()).collect();
    assert_eq!(rings, ["Q", "Q(zeta_2)", "Q(zeta_3)", "Q(zeta_6)"]);
    let v = run(&["validate", file_arg(&path)]);
    assert_eq!(v.status.code(), Some(0));
}

#[test]
fn build_output_is_deterministic() {
    let a = run(&["--format", "json", "build", "A-kill-beta", "C2"]);
    let b = run(&["--format", "json", "build", "A-kill-beta", "C2"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn oracle_on_small_diagrams() {
    let dir = tempfile::tempdir().unwrap();
    let b2 = dir.path().join("b2.json");
    run(&["build", "B", "C2", "--out", file_arg(&b2)]);
    let (code, h) = json(&["homology", file_arg(&b2), "--oracle", "--weight-bound", "10"]);
    assert_eq!(code, 0);
    let top = &h["oracle"]["C2"];
    assert_eq!(top["stabilized"], Value::Bool(true));
    assert_eq!(top["dims"], serde_json::json!([0, 0, 1, 0, 0]));

    let d = dir.path().join("d22.json");
    run(&["build", "D-KU", "C2xC2", "--out", file_arg(&d)]);
    let (_, h) = json(&["homology", file_arg(&d)]);
    assert_eq!(h["nodes"]["H4"]["ring"], "0");
}

#[test]
fn counterexample_exit_codes() {
    let o = run(&["build", "counterexample", "C9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("no shadow exists"));
    let o = run(&["build", "counterexample", "C4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("-1"));
    let o = run(&["build", "counterexample", "C6"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn enumerate_counts() {
    for (args, n) in [
        (vec!["enumerate", "C9"], 4),
        (vec!["enumerate", "C15"], 10),
        (vec!["enumerate", "C15", "--invertible"], 1),
    ] {
        let (code, v) = json(&args);
        assert_eq!(code, 0);
        assert_eq!(v["count"], n, "{args:?}");
    }
}

#[test]
fn reports() {
    let (code, v) = json(&["report", "C4"]);
    assert_eq!(code, 0);
    assert_eq!(v["pattern_count"], 4);
    assert_eq!(v["invertible_count"], 1);
    assert_eq!(v["noniso_witness"]["isomorphic"], false);
    let (code, v) = json(&["report", "C1"]);
    assert_eq!((code, v["passed"].clone()), (0, Value::Bool(true)));
    assert_eq!(run(&["report", "C2xC4"]).status.code(), Some(0));
}

#[test]
fn obstruction_and_validation_negatives() {
    assert_eq!(run(&["obstruction", "C4"]).status.code(), Some(0));
    assert_eq!(run(&["obstruction", "C18"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c9.json");
    run(&["build", "counterexample", "C9", "--out", file_arg(&c)]);
    // The open shadow is a missing edge.
    assert_eq!(run(&["validate", file_arg(&c)]).status.code(), Some(2));
}

#[test]
fn size_bounds() {
    assert_eq!(run(&["build", "B", "C64"]).status.code(), Some(1));
    assert_eq!(run(&["subgroups", "C64"]).status.code(), Some(0));
    assert_eq!(run(&["homology", "/nonexistent.json"]).status.code(), Some(1));
}
