use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run_job(dir: &Path, name: &str, job: &str, args: &[&str]) -> Output {
    let path = dir.join(name);
    std::fs::write(&path, job).unwrap();
    Command::new(env!("CARGO_BIN_EXE_symdyn-info"))
        .arg("run")
        .arg(&path)
        .args(args)
        .output()
        .unwrap()
}

fn parse(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn value_of(doc: &Value, quantity: &str) -> f64 {
    let entry = doc["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["quantity"] == quantity)
        .unwrap_or_else(|| panic!("no {quantity} in {doc}"));
    entry["value"].as_f64().unwrap()
}

#[test]
fn uniform_entropy_in_bits() {
    let dir = TempDir::new().unwrap();
    let job = r#"{"schema_version":1,"command":"entropy","input":{"p":[0.25,0.25,0.25,0.25]}}"#;
    let out = run_job(dir.path(), "e.json", job, &["--base", "2"]);
    assert!(out.status.success());
    let doc = parse(&out);
    assert_eq!(value_of(&doc, "entropy"), 2.0);
    assert_eq!(doc["results"][0]["operation"], "shannon_entropy");
    assert_eq!(doc["base"], "2");
}

#[test]
fn two_state_chain_has_zero_entropy_production() {
    let dir = TempDir::new().unwrap();
    let job = r#"{"schema_version":1,"command":"ep","input":{"chain":[[0.3,0.7],[0.6,0.4]]}}"#;
    let out = run_job(dir.path(), "ep.json", job, &[]);
    assert!(out.status.success());
    let ep = value_of(&parse(&out), "entropy_production");
    assert!(ep.abs() <= 1e-12, "{ep}");
}

#[test]
fn malformed_row_is_a_schema_error() {
    let dir = TempDir::new().unwrap();
    let job = r#"{"schema_version":1,"command":"ep","input":{"chain":[[0.5,0.4],[0.3,0.7]]}}"#;
    let out = run_job(dir.path(), "bad.json", job, &[]);
    assert_eq!(out.status.code(), Some(2));
    let doc = parse(&out);
    assert_eq!(doc["status"], "error");
    assert_eq!(doc["error"]["kind"], "SchemaError");
    assert_eq!(doc["error"]["source"], "NotStochastic");
}

#[test]
fn unknown_fields_and_commands_are_rejected() {
    let dir = TempDir::new().unwrap();
    let out = run_job(
        dir.path(),
        "a.json",
        r#"{"schema_version":1,"command":"entropy","input":{"prob":[1.0]}}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    let out = run_job(
        dir.path(),
        "b.json",
        r#"{"schema_version":1,"command":"nope"}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(parse(&out)["error"]["kind"], "SchemaError");
}

#[test]
fn orbit_sweep_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let job = r#"{
        "schema_version": 1,
        "command": "specgain",
        "input": {
            "chain": [[0.2, 0.5, 0.3], [0.6, 0.1, 0.3], [0.25, 0.25, 0.5]],
            "potential": {"matrix": [[0.1, -0.3, 0.2], [0.5, 0.0, -0.4], [0.3, 0.3, -0.1]]}
        },
        "options": {"mode": "orbit", "n": [50, 200], "trials": 64}
    }"#;
    let t1 = dir.path().join("t1.csv");
    let t2 = dir.path().join("t2.csv");
    let a = run_job(
        dir.path(),
        "s.json",
        job,
        &["--seed", "11", "--table", t1.to_str().unwrap()],
    );
    let b = run_job(
        dir.path(),
        "s.json",
        job,
        &["--seed", "11", "--table", t2.to_str().unwrap()],
    );
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(std::fs::read(&t1).unwrap(), std::fs::read(&t2).unwrap());
    let doc = parse(&a);
    assert_eq!(doc["seed"], 11);
    let table = std::fs::read_to_string(&t1).unwrap();
    assert_eq!(table.lines().count(), 5);
    assert!(table.starts_with("quantity,operation,index,component,value\n"));

    let c = run_job(dir.path(), "s.json", job, &["--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn specific_gain_routes_are_consistent() {
    let dir = TempDir::new().unwrap();
    let job = |mode: &str| {
        format!(
            r#"{{"schema_version":1,"command":"specgain","input":{{
                "chain":[[0.2,0.8],[0.6,0.4]],
                "potential":{{"matrix":[[0.1,-0.3],[0.5,0.2]]}}}},
                "options":{{"mode":"{mode}","n":12}}}}"#
        )
    };
    let formula = value_of(
        &parse(&run_job(dir.path(), "f.json", &job("formula"), &[])),
        "specific_gain",
    );
    let cylinder = value_of(
        &parse(&run_job(dir.path(), "c.json", &job("cylinder"), &[])),
        "specific_gain",
    );
    assert!(formula > 0.0);
    // the cylinder route at finite n carries an O(1/n) boundary term
    assert!((formula - cylinder).abs() < 0.1, "{formula} vs {cylinder}");
}

#[test]
fn forbidden_words_yield_infinite_gain() {
    let dir = TempDir::new().unwrap();
    let job = r#"{"schema_version":1,"command":"kl","input":{"p":[0.5,0.5],"q":[1.0,0.0]}}"#;
    let out = run_job(dir.path(), "kl.json", job, &[]);
    assert!(out.status.success());
    assert_eq!(parse(&out)["results"][0]["value"], "inf");
}

#[test]
fn pressure_is_not_converted_between_bases() {
    let dir = TempDir::new().unwrap();
    let job = r#"{"schema_version":1,"command":"spectral","input":{"potential":{"matrix":[[0.0,0.0],[0.0,0.0]]}}}"#;
    let doc = parse(&run_job(dir.path(), "sp.json", job, &["--base", "2"]));
    assert!((value_of(&doc, "lambda") - 2.0).abs() <= 1e-12);
    assert!((value_of(&doc, "pressure") - 2f64.ln()).abs() <= 1e-12);
}

#[test]
fn tfca_commands_run() {
    let dir = TempDir::new().unwrap();
    let cosine = r#"{"schema_version":1,"command":"tfca-ep","input":{"continuous":{"family":"cosine","alpha":0.7}}}"#;
    let out = run_job(
        dir.path(),
        "c.json",
        cosine,
        &["--nodes", "16", "--rule", "midpoint"],
    );
    assert!(out.status.success());
    assert!(value_of(&parse(&out), "entropy_production").abs() <= 1e-10);

    let custom = r#"{"schema_version":1,"command":"tfca-spectral","input":{
        "continuous":{"family":"bilinear","alpha":1.0,"beta":0.0,"gamma":0.0},
        "quadrature":{"nodes":[0.0,1.0],"weights":[0.5,0.5]}}}"#;
    let out = run_job(dir.path(), "s.json", custom, &[]);
    assert!(out.status.success());
    // matrix [[1, 1], [1, e]] / 2
    let e = std::f64::consts::E;
    let expected = ((1.0 + e) + ((1.0 - e).powi(2) + 4.0).sqrt()) / 4.0;
    assert!((value_of(&parse(&out), "lambda") - expected).abs() <= 1e-12);
}

#[test]
fn oracle_reaches_negative_conditional_entropy() {
    let dir = TempDir::new().unwrap();
    let job = r#"{"schema_version":1,"command":"variational-oracle","input":{"joint":[[0.10,0.20],[0.45,0.25]]}}"#;
    let doc = parse(&run_job(dir.path(), "o.json", job, &[]));
    let sup = value_of(&doc, "supremum");
    let target = value_of(&doc, "negative_conditional_entropy");
    assert!((sup - target).abs() <= 1e-6, "{sup} vs {target}");
}

#[test]
fn symmetric_and_involution_reports() {
    let dir = TempDir::new().unwrap();
    let job = r#"{"schema_version":1,"command":"symmetric","input":{"potential":{"matrix":[[0.0,1.0],[1.0,0.5]]}}}"#;
    let doc = parse(&run_job(dir.path(), "sym.json", job, &[]));
    assert_eq!(doc["results"][0]["value"], true);

    let job = r#"{"schema_version":1,"command":"involution","input":{"potential":{"alphabet":3,"table":[0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,-0.9]}}}"#;
    let doc = parse(&run_job(dir.path(), "inv.json", job, &[]));
    assert!((value_of(&doc, "lambda") - value_of(&doc, "lambda_dual")).abs() <= 1e-10);
    assert!(value_of(&doc, "cocycle_residual") <= 1e-12);
}
