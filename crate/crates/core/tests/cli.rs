use std::fs;
use std::path::{Path, PathBuf};

use etale_kit::cli::{run_command, Outcome};
use serde_json::{json, Value};
use tempfile::TempDir;

fn run(args: &[&str]) -> Outcome {
    run_command(std::iter::once("etale-kit").chain(args.iter().copied()))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path: PathBuf = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn make(dir: &Path, name: &str, spec: Value) -> String {
    let out = run(&["make", &spec.to_string()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    write(dir, name, &out.stdout)
}

fn json_out(out: &Outcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", out.stdout))
}

/// A hom document with real entries, row-major.
fn hom(dir: &Path, name: &str, source: &str, target: &str, rows: usize, cols: usize, entries: &[f64]) -> String {
    let entries: Vec<[f64; 2]> = entries.iter().map(|&x| [x, 0.0]).collect();
    let doc = json!({ "source": source, "target": target, "rows": rows, "cols": cols, "entries": entries });
    write(dir, name, &doc.to_string())
}

fn identity(n: usize) -> Vec<f64> {
    (0..n * n).map(|i| if i / n == i % n { 1.0 } else { 0.0 }).collect()
}

#[test]
fn make_then_validate_succeeds() {
    let dir = TempDir::new().unwrap();
    let r2 = make(dir.path(), "r2.json", json!({"family": "pair", "params": 2}));
    let out = run(&["--json", "validate", &r2]);
    assert_eq!(out.code, 0);
    let report = json_out(&out);
    assert_eq!(report["command"], "validate");
    assert_eq!(report["result"]["arrows"], 4);
    assert!(out.stdout.ends_with('\n'));
}

#[test]
fn make_output_is_canonical() {
    let first = run(&["make", r#"{"family":"group_bundle","params":[2,1]}"#]);
    let second = run(&["make", r#"{"params":[2,1],"family":"group_bundle"}"#]);
    assert_eq!(first.code, 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn missing_file_and_bad_json_exit_1() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["validate", "/nonexistent/g.json"]).code, 1);
    let bad = write(dir.path(), "bad.json", "{ not json");
    assert_eq!(run(&["validate", &bad]).code, 1);
    assert_eq!(run(&["no-such-command"]).code, 1);
}

#[test]
fn broken_tables_exit_2_with_witness() {
    let dir = TempDir::new().unwrap();
    let mut doc: Value = serde_json::from_str(&run(&["make", r#"{"family":"pair","params":2}"#]).stdout).unwrap();
    doc["inv"][2] = json!(2);
    let path = write(dir.path(), "broken.json", &doc.to_string());
    let out = run(&["--json", "validate", &path]);
    assert_eq!(out.code, 2);
    let violations = &json_out(&out)["result"]["violations"];
    assert!(violations.as_array().is_some_and(|v| !v.is_empty()), "{}", out.stdout);

    // out-of-range entries are structural, still a validation failure
    doc["src"][0] = json!(99);
    let path = write(dir.path(), "range.json", &doc.to_string());
    assert_eq!(run(&["validate", &path]).code, 2);
}

#[test]
fn analyze_reports_effectiveness() {
    let dir = TempDir::new().unwrap();
    let z2 = make(dir.path(), "z2.json", json!({"family": "cyclic_group", "params": 2}));
    let out = run(&["--json", "analyze", &z2]);
    assert_eq!(out.code, 0);
    assert_eq!(json_out(&out)["result"]["effective"], false);
}

#[test]
fn bisection_count_of_pair_3() {
    let dir = TempDir::new().unwrap();
    let r3 = make(dir.path(), "r3.json", json!({"family": "pair", "params": 3}));
    let out = run(&["--json", "bisections", &r3]);
    assert_eq!(out.code, 0);
    assert_eq!(json_out(&out)["result"]["count"], 34);
}

#[test]
fn norm_of_an_element() {
    let dir = TempDir::new().unwrap();
    let r2 = make(dir.path(), "r2.json", json!({"family": "pair", "params": 2}));
    let f = write(dir.path(), "f.json", r#"{"coeff":[[0,0],[0,0],[3,0],[0,4]]}"#);
    let out = run(&["norm", &r2, &f]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    // δ-bisection element: norm is the largest coefficient modulus
    assert!(out.stdout.contains("norm: 4\n"), "{}", out.stdout);

    let short = write(dir.path(), "short.json", r#"{"coeff":[[1,0]]}"#);
    assert_eq!(run(&["norm", &r2, &short]).code, 1);
}

#[test]
fn decompose_identity_and_refusals() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    make(d, "r2.json", json!({"family": "pair", "params": 2}));
    make(d, "z2.json", json!({"family": "cyclic_group", "params": 2}));

    let id = hom(d, "id.json", "r2.json", "r2.json", 4, 4, &identity(4));
    let out = run(&["--json", "decompose", "--germs", "--hom", &id]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    assert_eq!(json_out(&out)["result"]["F"], json!([0, 1]));

    let doubled: Vec<f64> = identity(4).iter().map(|x| 2.0 * x).collect();
    let twice = hom(d, "twice.json", "r2.json", "r2.json", 4, 4, &doubled);
    assert_eq!(run(&["decompose", "--hom", &twice]).code, 2);

    let into_z2 = hom(d, "z2id.json", "z2.json", "z2.json", 2, 2, &identity(2));
    assert_eq!(run(&["decompose", "--hom", &into_z2]).code, 2);

    let wrong_shape = hom(d, "shape.json", "r2.json", "r2.json", 4, 4, &[1.0; 3]);
    assert_eq!(run(&["decompose", "--hom", &wrong_shape]).code, 1);
}

#[test]
fn rigidity_of_z2_onto_a_point() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    make(d, "z2.json", json!({"family": "cyclic_group", "params": 2}));
    make(d, "pt.json", json!({"family": "pair", "params": 1}));
    let sum = hom(d, "sum.json", "z2.json", "pt.json", 1, 2, &[1.0, 1.0]);
    assert_eq!(run(&["rigidity", "--hom", &sum]).code, 0);
    let zero = hom(d, "zero.json", "z2.json", "pt.json", 1, 2, &[0.0, 0.0]);
    assert_eq!(run(&["rigidity", "--hom", &zero]).code, 2);
}

#[test]
fn faut_refuses_the_swap() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    make(d, "r2.json", json!({"family": "pair", "params": 2}));
    #[rustfmt::skip]
    let swap = [
        0.0, 1.0, 0.0, 0.0,
        1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, 1.0, 0.0,
    ];
    let path = hom(d, "swap.json", "r2.json", "r2.json", 4, 4, &swap);
    assert_eq!(run(&["faut", "--hom", &path]).code, 2);
    let id = hom(d, "id.json", "r2.json", "r2.json", 4, 4, &identity(4));
    assert_eq!(run(&["faut", "--hom", &id]).code, 0);
}

#[test]
fn aut_orders_of_pair_3() {
    let dir = TempDir::new().unwrap();
    let r3 = make(dir.path(), "r3.json", json!({"family": "pair", "params": 3}));
    let out = run(&["--json", "aut", &r3, "--order", "3"]);
    assert_eq!(out.code, 0);
    let result = &json_out(&out)["result"];
    assert_eq!(result["aut_order"], 6);
    assert_eq!(result["cocycle_order"], 9);
    assert_eq!(result["semidirect_order"], 54);
}

#[test]
fn cap_is_enforced() {
    let dir = TempDir::new().unwrap();
    let r3 = make(dir.path(), "r3.json", json!({"family": "pair", "params": 3}));
    assert_eq!(run(&["--cap", "4", "bisections", &r3]).code, 2);
}

#[test]
fn selftest_passes_and_timing_is_opt_in() {
    let out = run(&["--json", "selftest", "--seed", "7"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(json_out(&out).get("timing_ms").is_none());
    let timed = run(&["--json", "--timing", "selftest", "--seed", "7"]);
    assert!(json_out(&timed).get("timing_ms").is_some());
}
