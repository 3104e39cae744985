use std::process::Command;

use gcdissect::cli::{run, EXIT_OK, EXIT_REFUSED, EXIT_USAGE};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, Value) {
    let mut v = vec!["gcdissect".to_string()];
    v.extend(args.iter().map(|s| s.to_string()));
    let (code, out) = run(&v);
    let json = serde_json::from_str(&out).unwrap_or(Value::String(out));
    (code, json)
}

#[test]
fn classify_points() {
    let (code, v) = call(&["classify", "--points", "0,0;4/5,0;1/2,1/2;0,4/5"]);
    assert_eq!(code, EXIT_OK, "{v}");
    assert_eq!(v["class"], "Q:2/5,5/8");
    assert_eq!(v["kite"], true);
    let (code, v) = call(&["classify", "--points", "0,0;1,0;1/2,1/2;0,1"]);
    assert_eq!(code, EXIT_REFUSED);
    assert!(v["error"].is_string());
    let (code, _) = call(&["classify", "--points", "0,0;1,0"]);
    assert_ne!(code, EXIT_OK);
}

#[test]
fn flip_and_compose() {
    let (code, v) = call(&["flip", "--class", "Q:1/5,1/2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["flipped"]["class"], "Q:1/4,5/8");
    let (_, v) = call(&[
        "compose", "--left", "T:1/2", "--right", "T:1/3", "--op", "dot",
    ]);
    assert_eq!(v["set"], "{T:1/6}");
    let (code, _) = call(&["flip", "--class", "T:1/2"]);
    assert_eq!(code, EXIT_REFUSED);
}

#[test]
fn search_and_parity() {
    let (code, v) = call(&["search", "--class", "Q:1/2,2/3", "--n", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["count"], 0);
    let (_, v) = call(&["parity", "--n", "3"]);
    assert_eq!(v["parity_holds"], true);
    let exps: Vec<u64> = v["table"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["exponent"].as_u64().unwrap())
        .collect();
    assert_eq!(exps, vec![1, 3]);
}

#[test]
fn family_values() {
    let (code, v) = call(&["family", "--id", "II", "--alpha", "1/2"]);
    assert_eq!(code, EXIT_OK);
    let b: f64 = v["beta"].as_str().unwrap().parse().unwrap();
    assert!((b - 0.828_427_124_746_190_1).abs() < 1e-12);
    let (code, _) = call(&["family", "--id", "IX", "--alpha", "1/2"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn dissect_verify_render() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("p.json");
    let svg = dir.path().join("p.svg");
    let p = plan.to_str().unwrap();
    let (code, _) = call(&["dissect", "--class", "Q:1/5,1/2", "--n", "5", "--out", p]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(call(&["verify", "--plan", p]).0, EXIT_OK);
    let (code, _) = call(&["render", "--plan", p, "--svg", svg.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let drawing = std::fs::read_to_string(&svg).unwrap();
    assert!(drawing.starts_with("<?xml") && drawing.contains("<svg"));

    // A plan with a moved vertex must fail verification.
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&plan).unwrap()).unwrap();
    doc["tiles"][0]["points"][1][0] = Value::String("1/1000".into());
    std::fs::write(&plan, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    assert_eq!(call(&["verify", "--plan", p]).0, EXIT_REFUSED);

    std::fs::write(&plan, "{ not json").unwrap();
    assert_eq!(call(&["verify", "--plan", p]).0, EXIT_USAGE);
}

#[test]
fn selfaffine_paths() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("p.json");
    let p = plan.to_str().unwrap();
    for n in ["5", "6"] {
        let (code, v) = call(&["selfaffine", "--class", "Q:1/2,2/3", "--n", n, "--out", p]);
        assert_eq!(code, EXIT_OK, "{v}");
        assert_eq!(call(&["verify", "--plan", p]).0, EXIT_OK);
    }
    assert_eq!(
        call(&["selfaffine", "--class", "Q:1/2,2/3", "--n", "3"]).0,
        EXIT_REFUSED
    );
}

#[test]
fn usage_errors() {
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(
        call(&["dissect", "--class", "Q:2/3,1/3", "--n", "5"]).0,
        EXIT_USAGE
    );
    assert_eq!(call(&["dissect", "--class", "Q:1/5,1/2"]).0, EXIT_USAGE);
    assert_eq!(call(&["--help"]).0, EXIT_OK);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_gcdissect");
    let out = Command::new(bin)
        .args(["dissect", "--class", "Q:1/2,2/3", "--n", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_REFUSED));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["error"].as_str().unwrap().contains("kite"));
    let out = Command::new(bin)
        .args(["dissect", "--class", "T:1/2", "--n", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["tiles"].as_array().unwrap().len(), 4);
}
