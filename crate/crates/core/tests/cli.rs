//! End-to-end behaviour of the `lie2` binary and the shipped files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lie2core::io::{fixture, fixture_file_stem, FIXTURE_NAMES};

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn fixture_path(name: &str) -> PathBuf {
    manifest().join("fixtures").join(format!("{}.json", fixture_file_stem(name)))
}

fn lie2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lie2")).args(args).output().expect("binary runs")
}

fn schema(name: &str) -> jsonschema::Validator {
    let text = std::fs::read_to_string(manifest().join("../../docs").join(name)).expect("schema file");
    jsonschema::validator_for(&serde_json::from_str(&text).expect("schema JSON")).expect("valid schema")
}

fn temp_file(tag: &str, contents: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("lie2-cli-{}-{tag}.json", std::process::id()));
    std::fs::write(&p, contents).expect("temp file");
    p
}

#[test]
fn shipped_fixtures_match_export_and_schema() {
    let v = schema("structure.schema.json");
    for name in FIXTURE_NAMES {
        let text = std::fs::read_to_string(fixture_path(name)).expect("shipped fixture");
        assert_eq!(text.trim_end(), fixture(name).unwrap().to_json(), "{name} is stale; re-export it");
        assert!(v.is_valid(&serde_json::from_str(&text).unwrap()), "{name}");
    }
}

#[test]
fn structure_schema_rejects_what_the_loader_rejects() {
    let v = schema("structure.schema.json");
    let mut doc: serde_json::Value = serde_json::from_str(&fixture("FX-AFF1DER").unwrap().to_json()).unwrap();
    doc["lie2"]["surplus"] = serde_json::json!(1);
    assert!(!v.is_valid(&doc));
    let p = temp_file("surplus", &doc.to_string());
    let out = lie2(&["check", "lie2", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/lie2/surplus"));
    let _ = std::fs::remove_file(p);
}

#[test]
fn help_documents_every_flag() {
    let out = lie2(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for flag in ["--json", "--seed", "--mutations", "--weil-cutoff", "--no-timing"] {
        assert!(text.contains(flag), "{flag} missing from --help");
    }
    for cmd in ["check", "build", "export", "cohomology"] {
        assert!(text.contains(cmd), "{cmd} missing from --help");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(lie2(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lie2(&["check", "lie2", "/nonexistent.json"]).status.code(), Some(2));
    let abelian = fixture_path("FX-ABELIAN");
    assert_eq!(lie2(&["check", "poisson", abelian.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(lie2(&["export", "fixture", "FX-NOPE"]).status.code(), Some(2));

    let mut doc: serde_json::Value = serde_json::from_str(&fixture("FX-AFF1DER").unwrap().to_json()).unwrap();
    doc["lie2"]["ell"][0][0] = serde_json::json!("7");
    let p = temp_file("ell", &doc.to_string());
    let out = lie2(&["check", "lie2", "--json", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let axioms = &report["checks"]["lie2.axioms"]["clauses"];
    let failing: Vec<&str> = axioms
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert!(failing.contains(&"ii"), "{failing:?}");
    let _ = std::fs::remove_file(p);
}

#[test]
fn reports_are_deterministic_and_schema_valid() {
    let v = schema("report.schema.json");
    let f = fixture_path("FX-STRING-SO3");
    let args = ["check", "all", "--json", "--no-timing", "--seed", "5", "--mutations", "4", f.to_str().unwrap()];
    let (a, b) = (lie2(&args), lie2(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v.is_valid(&doc));
    assert_eq!(doc["mutations"].as_array().unwrap().len(), 4);
    assert!(doc["mutations"].as_array().unwrap().iter().all(|m| m["detected"] == true));
}

#[test]
fn cohomology_and_build_commands() {
    let f = fixture_path("FX-SO3-PAIR");
    let out = lie2(&["cohomology", "--json", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["data"]["dims"], serde_json::json!([1, 0, 0, 1]));
    let t = fixture_path("FX-TANGENT-R2");
    assert_eq!(lie2(&["cohomology", t.to_str().unwrap()]).status.code(), Some(2));

    let out = lie2(&["build", "adjoint", "--json", t.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(schema("report.schema.json").is_valid(&doc));
    let adjoint = doc["data"]["adjoint"].as_array().unwrap();
    // ∂ = ρ on q_a, and the x∂x Christoffel symbol appears in the connection part.
    assert!(adjoint.iter().any(|e| e["from"] == "q1" && e["to"] == "X1" && e["value"] == "1"));
    assert!(adjoint.iter().any(|e| e["value"].as_str().unwrap().contains("x1") && e["shape"] == serde_json::json!([1, 0])));
}

#[test]
fn export_to_stdout_parses() {
    let out = lie2(&["export", "fixture", "fx_so3_pair"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim_end(), fixture("FX-SO3-PAIR").unwrap().to_json());
}
