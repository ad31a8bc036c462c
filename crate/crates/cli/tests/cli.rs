use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use r2d_core::shift::revalidate_witness;
use r2d_core::symbolic::pattern::RectPattern;
use r2d_core::{Direction, Shape};

fn r2d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_r2d"))
        .args(args)
        .output()
        .expect("r2d runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn verdict(doc: &Value, check: &str) -> String {
    doc["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["check"] == check)
        .map(|v| v["status"].as_str().unwrap().to_string())
        .unwrap_or_else(|| panic!("no verdict {check} in {doc}"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

/// 2×2 binary arrays with `x(i+1,j) + x(i,j) + x(i,j+1) = 0 mod 2`, rendered bottom row first.
fn ledrappier_2x2() -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for code in 0..16u32 {
        let x = |i: u32, j: u32| (code >> (j * 2 + i)) & 1;
        if (x(1, 0) + x(0, 0) + x(0, 1)) % 2 == 0 {
            out.insert(format!("{}{}/{}{}", x(0, 0), x(1, 0), x(0, 1), x(1, 1)));
        }
    }
    out
}

#[test]
fn patterns_on_ledrappier_match_brute_force() {
    let doc = json(&r2d(&["patterns", "--model", "ledrappier", "--shape", "2,2"]));
    assert_eq!(doc["results"]["count"], 8);
    let listed: BTreeSet<String> = doc["results"]["patterns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p.as_str().unwrap().to_string())
        .collect();
    assert_eq!(listed, ledrappier_2x2());
}

#[test]
fn k0_on_circle_is_z_sixth() {
    let doc = json(&r2d(&["k0", "--model", "circle-2-3"]));
    assert_eq!(verdict(&doc, "supernatural"), "2^∞·3^∞");
    assert_eq!(verdict(&doc, "k0"), "Z[1/6]");
    assert_eq!(doc["parameters"]["chain"].as_array().unwrap().len(), 4);
    assert!(doc["defaults"].as_array().unwrap().contains(&Value::from("chain")));
}

#[test]
fn fullshift_refutation_is_an_answer() {
    let out = r2d(&["localhomeo", "--model", "fullshift", "--dir", "1", "--window", "0,0", "--depth", "4,4"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(verdict(&doc, "local-injectivity"), "RefutedWithWitness");
    let w = &doc["results"]["witness"];
    assert_eq!(w["revalidates"], true);
    // feed the witness back through the library
    let pattern = |v: &Value| {
        let shape: Shape = v["shape"].as_str().unwrap().parse().unwrap();
        let cells: Vec<u16> = v["cells"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap() as u16).collect();
        RectPattern::new(shape, cells).unwrap()
    };
    let model = r2d_cli::load("fullshift").unwrap().handle;
    let pair = (pattern(&w["first"]), pattern(&w["second"]));
    assert_ne!(pair.0, pair.1);
    assert!(revalidate_witness(&model, Direction::Horizontal, &[(0, 0)], &pair));
}

#[test]
fn ledrappier_is_locally_injective() {
    for dir in ["1", "2"] {
        let doc = json(&r2d(&["localhomeo", "--model", "ledrappier", "--dir", dir, "--window", "0,0", "--depth", "4,4"]));
        assert_eq!(verdict(&doc, "local-injectivity"), "VerifiedAtDepth");
        assert!(doc["results"]["witness"].is_null());
    }
}

#[test]
fn unknown_field_is_a_parse_error_naming_it() {
    let path = tmp("unknown-field.toml");
    std::fs::write(&path, "kind = \"circle\"\ndegrees = [2, 3]\ncolour = 1\n").unwrap();
    let out = r2d(&["validate", "--model", path.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("colour") && err.contains("line 3"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn library_errors_exit_nonzero() {
    let out = r2d(&["patterns", "--model", "ledrappier", "--shape", "two"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--shape"));
    let out = r2d(&["validate"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--model"));
}

#[test]
fn defaults_are_echoed() {
    let doc = json(&r2d(&["expectation", "--model", "ledrappier", "--dir", "1"]));
    assert_eq!(doc["parameters"]["depth"], "3,3");
    assert_eq!(doc["defaults"], serde_json::json!(["depth"]));
    assert_eq!(verdict(&doc, "operator-identities"), "hold");
    let doc = json(&r2d(&["transfer", "--model", "circle-2-3", "--dir", "2"]));
    assert_eq!(doc["parameters"]["span"], 6);
    assert_eq!(verdict(&doc, "operator-identities"), "hold");
}

#[test]
fn rationals_are_fraction_strings() {
    let doc = json(&r2d(&["expectation", "--model", "ledrappier", "--dir", "2", "--depth", "2,2"]));
    let entries = doc["results"]["matrix"]["entries"].as_array().unwrap();
    assert!(!entries.is_empty());
    assert!(entries.iter().all(|e| e[2] == "1/2"), "{entries:?}");
}

#[test]
fn out_and_diagram_files() {
    let out = tmp("k0.json");
    let dot = tmp("k0.dot");
    let printed = r2d(&["k0", "--model", "ledrappier"]);
    let written = r2d(&["k0", "--model", "ledrappier", "--out", out.to_str().unwrap(), "--diagram", dot.to_str().unwrap()]);
    assert!(written.status.success());
    assert!(written.stdout.is_empty());
    assert_eq!(std::fs::read(&out).unwrap(), printed.stdout);
    let dot = std::fs::read_to_string(&dot).unwrap();
    assert!(dot.starts_with("digraph bratteli"));
    assert!(dot.contains("[label=\"2\"]"), "{dot}");
    let none = r2d(&["validate", "--model", "ledrappier", "--diagram", tmp("x.dot").to_str().unwrap()]);
    assert!(!none.status.success());
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        vec!["report", "--model", "circle-2-3"],
        vec!["groupoid", "--model", "ledrappier", "--n", "1,0", "--depth", "2,2"],
        vec!["frame", "--model", "ledrappier", "--dir", "2"],
    ] {
        let a = r2d(&args);
        let b = r2d(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn simplicity_branches() {
    let doc = json(&r2d(&["simplicity", "--model", "circle-2-3", "--budget", "2"]));
    assert_eq!(verdict(&doc, "simplicity"), "evidence-for-simple");
    let doc = json(&r2d(&["simplicity", "--model", "reducible-kgraph"]));
    assert_eq!(verdict(&doc, "simplicity"), "obstruction-found");
}

#[test]
fn kgraph_core_sizes() {
    let doc = json(&r2d(&["bratteli", "--model", "kgraph-2-3", "--mode", "kgraph"]));
    assert_eq!(doc["results"]["total_dimensions"], serde_json::json!([1, 6, 36, 216]));
}

#[test]
fn every_bundled_model_validates() {
    for (name, _) in r2d_cli::BUNDLED {
        let doc = json(&r2d(&["validate", "--model", name]));
        assert_eq!(verdict(&doc, "validation"), "valid", "{name}");
        assert_eq!(doc["model"]["name"], name);
    }
}
