//! Black-box tests of the command line interface: exit codes, JSON output,
//! and seed handling.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyptype"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn analyze_reports_the_shape() {
    let out = run(&["analyze", fixture("theta.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["genus"], 2);
    assert_eq!(doc["stable"], true);
    assert_eq!(doc["d_invariant"], 0);
    assert_eq!(doc["c1_sets"].as_array().unwrap().len(), 3);
}

#[test]
fn check_mode_reflects_the_verdict_in_the_exit_code() {
    let out = run(&["hyptype", "--check", fixture("theta.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["verdict"], true);

    let out = run(&["hyptype", "--check", fixture("k4.json").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let doc = json(&out);
    assert_eq!(doc["verdict"], false);
    assert_eq!(doc["pattern"], "k4");
    assert!(doc["minor"]["branch_sets"].is_object());

    let out = run(&["hyptype", "--check", fixture("l3.json").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["pattern"], "l3");
}

#[test]
fn bad_inputs_exit_two() {
    let out = run(&["analyze", "/nonexistent/graph.json"]);
    assert_eq!(code(&out), 2);

    let dir = std::env::temp_dir();
    let path = dir.join("hyptype-cli-bad-ends.json");
    std::fs::write(
        &path,
        r#"{"vertices": [{"id": "a"}], "edges": [{"id": "x", "ends": ["a", "b"]}]}"#,
    )
    .unwrap();
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("edges[0].ends[1]"), "unhelpful error: {err}");

    let out = run(&["hyptype", fixture("cycle5.json").to_str().unwrap()]);
    assert_eq!(code(&out), 2, "genus 1 input must be rejected");
}

#[test]
fn oversized_inputs_exit_three() {
    let dir = std::env::temp_dir();
    let path = dir.join("hyptype-cli-oversized.json");
    let vertices: Vec<String> = (0..14).map(|i| format!(r#"{{"id": "v{i}"}}"#)).collect();
    let edges: Vec<String> = (0..14)
        .flat_map(|i| {
            let a = i;
            let b = (i + 1) % 14;
            [
                format!(r#"{{"id": "e{i}", "ends": ["v{a}", "v{b}"], "length": "1"}}"#),
                format!(r#"{{"id": "d{i}", "ends": ["v{a}", "v{b}"], "length": "1"}}"#),
            ]
        })
        .collect();
    std::fs::write(
        &path,
        format!(
            r#"{{"vertices": [{}], "edges": [{}]}}"#,
            vertices.join(", "),
            edges.join(", ")
        ),
    )
    .unwrap();
    let out = run(&["hyperelliptic", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
}

#[test]
fn connectivize_collapses_a_cycle_to_a_loop() {
    let out = run(&[
        "connectivize",
        "--level",
        "3",
        fixture("cycle5.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    let edges = doc["curve"]["edges"].as_array().unwrap();
    assert_eq!(edges.len(), 1);
    assert_eq!(edges[0]["length"], "5");
    assert_eq!(doc["psi"].as_object().unwrap().len(), 5);
}

#[test]
fn jacobian_compare_recognizes_equal_jacobians() {
    let out = run(&[
        "jacobian",
        "--compare",
        fixture("fig1b.json").to_str().unwrap(),
        fixture("fig1a.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["comparison"]["isomorphic"], true);
    assert_eq!(doc["determinant"], "4");

    let out = run(&[
        "jacobian",
        "--compare",
        fixture("theta112.json").to_str().unwrap(),
        fixture("theta.json").to_str().unwrap(),
    ]);
    assert_eq!(json(&out)["comparison"]["isomorphic"], false);
}

#[test]
fn ears_reports_obstructions_as_data() {
    let out = run(&["ears", "--stage", "nested", fixture("k4.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert!(doc["obstruction"].as_str().unwrap().contains("K4"));

    let out = run(&["ears", "--stage", "hed", fixture("theta.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["stage"], "hed");
    assert!(doc["involution"].is_object());
}

#[test]
fn quotient_halves_a_flipped_theta() {
    let out = run(&["hyperelliptic", fixture("theta.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["hyperelliptic"], true);
    let inv = doc["involution"].clone();
    let path = std::env::temp_dir().join("hyptype-cli-theta-inv.json");
    std::fs::write(&path, serde_json::to_string(&inv).unwrap()).unwrap();

    let out = run(&[
        "quotient",
        "--involution",
        path.to_str().unwrap(),
        fixture("theta.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    for edge in doc["curve"]["edges"].as_array().unwrap() {
        assert_eq!(edge["length"], "1/2");
    }
    assert_eq!(doc["edge_fates"].as_object().unwrap().len(), 3);
}

#[test]
fn seed_env_var_overrides_the_flag() {
    let a = run(&["gen", "--seed", "7", "--genus", "3", "--max-edges", "9"]);
    let b = Command::new(env!("CARGO_BIN_EXE_hyptype"))
        .args(["gen", "--seed", "99", "--genus", "3", "--max-edges", "9"])
        .env("HYPTYPE_SEED", "7")
        .output()
        .expect("binary runs");
    assert_eq!(code(&a), 0);
    assert_eq!(code(&b), 0);
    assert_eq!(a.stdout, b.stdout, "env seed did not win over the flag");
    let c = run(&["gen", "--seed", "99", "--genus", "3", "--max-edges", "9"]);
    assert_ne!(a.stdout, c.stdout, "different seeds agree suspiciously");
}

#[test]
fn sweep_cross_validates_and_flags_metric_gaps() {
    let out = run(&["sweep", "--genus-max", "3", "--random", "20", "--seed", "5"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["disagreements"].as_array().unwrap().len(), 0);
    assert_eq!(doc["total"], doc["agreements"]);
    assert!(
        !doc["type_but_not_strongly"].as_array().unwrap().is_empty(),
        "expected at least one type verdict without a hyperelliptic metric"
    );
}

#[test]
fn missing_lengths_warn_but_parse() {
    let path = std::env::temp_dir().join("hyptype-cli-default-length.json");
    std::fs::write(
        &path,
        r#"{"vertices": [{"id": "a"}, {"id": "b"}],
            "edges": [{"id": "x", "ends": ["a", "b"]},
                      {"id": "y", "ends": ["a", "b"], "length": "2"},
                      {"id": "z", "ends": ["a", "b"], "length": "3"}]}"#,
    )
    .unwrap();
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("length"), "no warning for the defaulted length: {err}");
    assert_eq!(json(&out)["genus"], 2);
}
