use std::process::{Command, Output};

use qgkpz::trees::{parse_tree, Tree};
use serde_json::Value;

fn qgkpz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgkpz")).args(args).env_remove("QGKPZ_CONFIG").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn enumerate_json_round_trips() {
    let out = qgkpz(&["enumerate", "--noises", "2", "--json"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["command"], "enumerate");
    assert_eq!(doc["config"]["alpha"], "-3/2");
    let records = doc["results"].as_array().unwrap();
    assert_eq!(records.len(), 2);
    for r in records {
        let text = parse_tree(r["tree"].as_str().unwrap()).unwrap();
        let structure: Tree = serde_json::from_value(r["structure"].clone()).unwrap();
        assert_eq!(text, structure);
        assert_eq!(r["degree"], "-51/50");
    }
}

#[test]
fn four_noise_sector() {
    let out = qgkpz(&["enumerate", "--noises", "4", "--json"]);
    assert_eq!(json(&out)["results"].as_array().unwrap().len(), 23);
}

#[test]
fn upsilon_of_noise_cherry() {
    let out = qgkpz(&["upsilon", "--nonlinearity", "F", "--tree", "Xi[I(Xi)]"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().next(), Some("g*g'"));
    let out = qgkpz(&["upsilon", "--nonlinearity", "V:c", "--tree", "One[I{1}(Xi)]", "--json"]);
    assert_eq!(json(&out)["results"]["value"]["qDenominatorPower"], 0);
}

#[test]
fn locality_exit_codes() {
    let out = qgkpz(&["locality", "--tau1", "Xi", "--tau2", "Xi", "--json"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["results"]["pass"], true);
    assert_eq!(doc["results"]["slots"].as_array().unwrap().len(), 2);
    assert_eq!(code(&qgkpz(&["locality", "--tau1", "Xi", "--tau2", "Xi[I(Xi)]"])), 1);
}

#[test]
fn null_exit_codes() {
    assert_eq!(code(&qgkpz(&["null", "--tau1", "Xi", "--tau2", "Xi", "--kind", "cherry:1,1"])), 0);
    assert_eq!(code(&qgkpz(&["null", "--tau1", "Xi", "--tau2", "Xi", "--kind", "single:3"])), 0);
    assert_eq!(code(&qgkpz(&["null", "--tau1", "Xi", "--tau2", "Xi", "--kind", "cherry:0,1"])), 1);
    assert_eq!(code(&qgkpz(&["null", "--tau1", "Xi", "--tau2", "Xi", "--kind", "triple:1"])), 2);
}

#[test]
fn sector_two_counterterm() {
    let out = qgkpz(&["counterterm", "--sector", "2", "--mode", "local", "--json"]);
    assert_eq!(code(&out), 0);
    let terms = json(&out)["results"]["terms"].as_array().unwrap().clone();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["constant"], "C(One[Ix(Xi), Ix(Xi)])");
    let raw = qgkpz(&["counterterm", "--sector", "2", "--mode", "raw", "--json"]);
    assert_eq!(json(&raw)["results"]["terms"].as_array().unwrap().len(), 5);
    assert_eq!(code(&qgkpz(&["counterterm", "--sector", "3"])), 2);
}

#[test]
fn coherence_report() {
    let out = qgkpz(&["coherence", "--max-noises", "2", "--report", "json"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["results"]["passed"], true);
    assert_eq!(doc["config"]["maxNoises"], 2);
}

#[test]
fn ito_constant_of_polynomial_bump() {
    let out = qgkpz(&["ito-constant", "--eps", "0.1", "--mollifier", "poly", "--json"]);
    assert_eq!(code(&out), 0);
    let scaled = json(&out)["results"]["scaled"].as_f64().unwrap();
    assert!((scaled - 5.0 / 7.0).abs() < 1e-10);
    assert_eq!(code(&qgkpz(&["ito-constant", "--eps", "0", "--mollifier", "poly"])), 2);
    assert_eq!(code(&qgkpz(&["ito-constant", "--eps", "1", "--mollifier", "file:/nonexistent"])), 2);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&qgkpz(&[])), 2);
    assert_eq!(code(&qgkpz(&["bogus"])), 2);
    let out = qgkpz(&["parse", "--tree", "One[Ix(Xi"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Tree grammar"));
    assert_eq!(code(&qgkpz(&["enumerate", "--noises", "2", "--alpha", "-2"])), 2);
}

#[test]
fn config_file_from_environment() {
    let dir = std::env::temp_dir().join(format!("qgkpz-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.conf");
    std::fs::write(&path, "# shared settings\nformat = json\nkappa = 1/50\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qgkpz")).args(["enumerate", "--noises", "2"]).env("QGKPZ_CONFIG", &path).output().unwrap();
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["config"]["kappa"], "1/50");
    let flag = Command::new(env!("CARGO_BIN_EXE_qgkpz")).args(["enumerate", "--noises", "2", "--kappa", "1/10"]).env("QGKPZ_CONFIG", &path).output().unwrap();
    assert_eq!(json(&flag)["config"]["kappa"], "1/10");
    std::fs::write(&path, "colour = red\n").unwrap();
    let bad = Command::new(env!("CARGO_BIN_EXE_qgkpz")).args(["enumerate", "--noises", "2"]).env("QGKPZ_CONFIG", &path).output().unwrap();
    assert_eq!(code(&bad), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}
