use std::io::Write;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::NamedTempFile;

use holant::signatures::{signature_to_json, Signature, Transform2};

fn holant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holant")).args(args).output().expect("binary runs")
}

fn file(v: &Value) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    write!(f, "{v}").unwrap();
    f
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn eq(k: usize) -> Value {
    json!({"named": "EQ", "arity": k})
}

fn triangle() -> Value {
    json!({
        "vertices": [{"id": 0, "fn": eq(2)}, {"id": 1, "fn": eq(2)}, {"id": 2, "fn": eq(2)}],
        "edges": [[[0, 2], [1, 1]], [[1, 2], [2, 1]], [[2, 2], [0, 1]]],
    })
}

#[test]
fn triangle_of_equalities() {
    let g = file(&triangle());
    let path = g.path().to_str().unwrap();
    let o = holant(&["--pretty", "eval", path]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).lines().next() == Some("Z = 2"));
    let o = holant(&["eval", path]);
    let v = stdout_json(&o);
    assert_eq!(v["Z"], "2");
    assert_eq!(v["arg"], 0.0);
    let o = holant(&["--backend", "float", "eval", path]);
    assert_eq!(stdout_json(&o)["Z"]["re"], 2.0);
}

#[test]
fn forced_brute_matches_auto_on_a_transformed_matching_grid() {
    let f = signature_to_json(&Signature::one(3).holo(&Transform2::k1()));
    let g = file(&json!({
        "vertices": [{"id": 0, "fn": f}, {"id": 1, "fn": f}],
        "edges": [[[0, 1], [1, 1]], [[0, 2], [1, 2]], [[0, 3], [1, 3]]],
    }));
    let path = g.path().to_str().unwrap();
    let auto = stdout_json(&holant(&["eval", path]));
    let brute = stdout_json(&holant(&["--force", "brute", "eval", path]));
    assert_eq!(auto["Z"], brute["Z"]);
    assert_eq!(brute["evaluator"], "brute");
    assert_ne!(auto["evaluator"], "brute");
}

#[test]
fn invalid_grid_exits_one_with_report() {
    let g = file(&json!({"vertices": [{"id": 0, "fn": eq(3)}], "edges": [[[0, 1], [0, 2]]]}));
    let o = holant(&["eval", g.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["report"]["ok"], false);
    let o = holant(&["eval", "/nonexistent/grid.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn brute_budget_exits_two() {
    let g = file(&triangle());
    let o = holant(&["--force", "brute", "--budget-edges", "2", "eval", g.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn classify_fixtures() {
    let run = |fs: Value| stdout_json(&holant(&["classify", file(&fs).path().to_str().unwrap()]));
    let r = run(json!([eq(3)]));
    assert_eq!(r["cond_OE"]["status"], "holds");
    assert_eq!(r["cond_OE"]["O"], json!([["1", "0"], ["0", "1"]]));
    let r = run(json!([eq(3), {"named": "ONE", "arity": 3}]));
    assert_eq!(r["verdict"]["kind"], "Universal");
    let r = run(json!([signature_to_json(&Signature::one(3).holo(&Transform2::k1()))]));
    assert_eq!(r["cond_KM"], json!(["K1"]));
}

#[test]
fn synth_and_reductions() {
    let o = holant(&["synth", "pldu", "--matrix", r#"[["1","2"],["3","4"]]"#]);
    assert_eq!(stdout_json(&o)["kind"], "PLDU");
    let o = holant(&["synth", "pldu", "--matrix", r#"[["1","2"],["2","4"]]"#]);
    assert_eq!(o.status.code(), Some(1));
    let graph = file(&json!({"n": 3, "edges": [[0, 1], [1, 2]]}));
    let v = stdout_json(&holant(&["reduce-is", graph.path().to_str().unwrap(), "--lambda", "2", "--evaluate"]));
    // Independent sets of a path on three vertices: 1 + 3λ + λ².
    assert_eq!(v["value"]["Z"], "11");
    assert_eq!(v["brute"], "11");
    let csp = file(&json!({"variables": ["a", "b"], "constraints": [{"fn": {"named": "NAND", "arity": 2}, "scope": ["a", "b"]}]}));
    let v = stdout_json(&holant(&["csp2holant", csp.path().to_str().unwrap(), "--evaluate"]));
    assert_eq!(v["value"]["Z"], "3");
    assert_eq!(v["brute"], "3");
    let tri = file(&triangle());
    let sub = holant(&["transform", tri.path().to_str().unwrap(), "--rewrite", "subdivide"]);
    let sub = file(&stdout_json(&sub));
    assert_eq!(stdout_json(&holant(&["eval", sub.path().to_str().unwrap()]))["Z"], "2");
}

#[test]
fn suites_pass() {
    for name in ["verify-identities", "oracle-equivalence", "closure-laws"] {
        let o = holant(&["suite", name]);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stdout));
        assert_eq!(stdout_json(&o)["passed"], true);
    }
    assert_eq!(holant(&["suite", "nope"]).status.code(), Some(1));
    assert!(holant(&["verify-identities", "--draws", "5"]).status.success());
}

#[test]
fn output_is_deterministic() {
    let a = holant(&["--seed", "7", "suite", "closure-laws"]);
    let b = holant(&["--seed", "7", "suite", "closure-laws"]);
    assert_eq!(a.stdout, b.stdout);
    let f = file(&json!([eq(3), {"named": "ONE", "arity": 3}]));
    let a = holant(&["classify", f.path().to_str().unwrap()]);
    let b = holant(&["classify", f.path().to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
}
