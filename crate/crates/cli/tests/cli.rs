use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn instance(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockfact")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_of(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = run(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn davenport_of_c3_c3() {
    let o = run(&["davenport", "[3,3]"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "5\n");
    assert_eq!(json_of(&["davenport", "[3,3]"])["davenport"], json!(5));
}

#[test]
fn predict_k1() {
    let v = json_of(&["predict", &instance("k1.json")]);
    assert_eq!(v["c"], json!({"kind": "exact", "value": 3}));
    assert_eq!(v["cmon"], json!({"kind": "exact", "value": 3}));
    assert_eq!(v["rho"], json!({"kind": "exact", "value": "3/2"}));
    assert_eq!(v["delta"], json!({"kind": "exact", "set": [1]}));
    assert_eq!(v["k"], json!(1));
    assert!(v["provenance"]["c"].as_str().is_some_and(|s| !s.is_empty()));
    assert!(v["digest"].as_str().is_some_and(|s| s.len() == 64));
    let pretty = stdout(&run(&["predict", &instance("k1.json")]));
    for line in ["c: 3\n", "rho: 3/2\n", "delta: [1]\n"] {
        assert!(pretty.contains(line), "{pretty}");
    }
}

#[test]
fn factorize_identity() {
    let v = json_of(&["factorize", &instance("k1.json"), r#"{"free": {}, "parts": [{"valuation": 0}]}"#]);
    assert_eq!(v["Z"], json!([[]]));
    assert_eq!(v["L"], json!([0]));
    assert_eq!(v["rho"], json!("1"));
    assert_eq!(v["cap"], json!(8));
}

#[test]
fn factorize_two_lengths() {
    let v = json_of(&["factorize", &instance("k1.json"), r#"{"free": {"1": 3}, "parts": [{"valuation": 3}]}"#]);
    assert_eq!(v["L"], json!([3, 4]));
    assert_eq!(v["delta"], json!([1]));
    assert_eq!(v["rho"], json!("4/3"));
    assert_eq!(v["c"], json!(3));
    assert_eq!(v["Z"].as_array().unwrap().len(), 2);
}

#[test]
fn invariants_to_file_as_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.jsonl");
    let out = path.to_string_lossy().into_owned();
    let args = ["invariants", &instance("k2.json"), "--cap", "6", "--format", "jsonl", "--out", &out];
    let o = run(&args);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1);
    let v: Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(v["cap"], json!(6));
    assert_eq!(v["c"], json!(4));
    assert_eq!(v["rho"], json!("2"));
    assert_eq!(v["delta"], json!([1, 2]));
    assert!(v["digest"].is_string());
    // the same run again writes the same bytes
    assert!(run(&args).status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
}

#[test]
fn per_element_rows_carry_digest_and_cap() {
    let o = run(&["invariants", &instance("k1.json"), "--cap", "4", "--elements", "--format", "jsonl"]);
    assert!(o.status.success());
    let rows: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(rows.len() > 1);
    assert!(rows.iter().all(|r| r["cap"] == json!(4) && r["digest"].is_string() && r["L"].is_array()));
}

#[test]
fn atoms_csv_agrees_with_closed_form() {
    let o = run(&["atoms", &instance("k1.json"), "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("atom,cap,closed_form,degree,digest"));
    assert_eq!(lines.count(), 3);
    let v = json_of(&["atoms", &instance("k1.json"), "--include-zero"]);
    assert_eq!(v["count"], json!(4));
    assert_eq!(v["closed_form_agrees"], json!(true));
}

#[test]
fn atoms_without_closed_form() {
    let v = json_of(&["atoms", &instance("c3_blocks.json")]);
    assert_eq!(v["closed_form_agrees"], Value::Null);
    // minimal zero-sum sequences over C3 without the letter 0: g1^3, g2^3, g1 g2
    assert_eq!(v["count"], json!(3));
}

#[test]
fn malformed_instance_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"group": [2], "components": [{"units": [2], "k": 1, "levels": [["0"]], "iota_p": ["x"], "iota_units": [[1]]}]}"#,
    )
    .unwrap();
    let o = run(&["predict", &path.to_string_lossy()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("components[0].iota_p"), "{err}");
}

#[test]
fn missing_file_and_bad_literal_exit_2() {
    assert_eq!(run(&["predict", "/nonexistent/instance.json"]).status.code(), Some(2));
    assert_eq!(run(&["factorize", &instance("k1.json"), "{not json"]).status.code(), Some(2));
    assert_eq!(run(&["davenport", "[0]"]).status.code(), Some(2));
    assert_eq!(run(&["--cap", "0", "davenport", "[2]"]).status.code(), Some(2));
}

#[test]
fn degree_above_cap_exits_3() {
    let o = run(&["factorize", &instance("k1.json"), r#"{"free": {"1": 5}, "parts": [{"valuation": 5}]}"#, "--cap", "8"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_scenario_reports() {
    let o = run(&["verify", "--suite", "default", "--scenario", "sharp_local", "--scenario", "tame_degree", "--format", "jsonl"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 8);
    for r in &rows {
        assert!(r["digest"].is_string() && r["cap"].is_u64());
        assert!(r["checks"].as_array().unwrap().iter().all(|c| c["verdict"] != json!("violation")));
    }
    assert_eq!(run(&["verify", "--suite", "nightly"]).status.code(), Some(2));
}
