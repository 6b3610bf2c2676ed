use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locsmith")).args(args).output().expect("binary runs")
}

fn structured(cmd: &str, file: &str, extra: &[&str]) -> Value {
    let path = fixture(file);
    let mut args = vec![cmd, path.to_str().unwrap(), "--format", "structured"];
    args.extend_from_slice(extra);
    let out = run(&args);
    assert!(out.status.success(), "{cmd} {file}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("structured output parses")
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect()
}

fn all_passed(v: &Value) -> bool {
    v["verification"].as_array().unwrap().iter().all(|c| c["passed"] == Value::Bool(true))
}

#[test]
fn analyze_f2() {
    let v = structured("analyze", "f2.json", &["--check"]);
    assert_eq!(v["stabilization"]["k"], 2);
    assert_eq!(v["stabilization"]["exponents"], serde_json::json!([0, 2]));
    assert!(all_passed(&v));
}

#[test]
fn recentering_f2_at_one_is_regular() {
    let v = structured("analyze", "f2.json", &["--at", "1"]);
    assert_eq!(v["stabilization"]["k"], 0);
    assert_eq!(v["stabilization"]["exponents"], serde_json::json!([0, 0]));
    assert_eq!(v["shift"], "1");
}

#[test]
fn empty_input_is_trivial() {
    let v = structured("analyze", "empty.json", &["--check"]);
    assert_eq!(v["stabilization"]["k"], 0);
    assert_eq!(v["stabilization"]["degenerate"], true);
    for cmd in ["diagonalize", "ginverse", "solve", "artin", "oracle-smith"] {
        structured(cmd, "empty.json", &["--check"]);
    }
}

#[test]
fn oracle_on_jordan_block() {
    let v = structured("oracle-smith", "jordan3.json", &["--check"]);
    let polys: Vec<&str> = v["oracle"]["invariant_factors"].as_array().unwrap().iter().map(|f| f["polynomial"].as_str().unwrap()).collect();
    assert_eq!(polys, ["1", "1", "ε^3"]);
    assert!(all_passed(&v));
}

#[test]
fn diagonalize_f1_geometric_series() {
    let v = structured("diagonalize", "f1.json", &["--check"]);
    let coeffs = v["transforms"]["phi"]["series"]["coefficients"].as_array().unwrap();
    assert_eq!(coeffs.len(), 7);
    for (t, c) in coeffs.iter().enumerate() {
        let want = if t % 2 == 0 { "1" } else { "-1" };
        assert_eq!(c[0][0], want, "φ coefficient {t}");
    }
    assert_eq!(v["diagonal"]["delta"]["coefficients"][0], serde_json::json!([["1"]]));
    assert!(all_passed(&v));
}

#[test]
fn solve_f4_single_generator() {
    let v = structured("solve", "f4.json", &["--check"]);
    let gens = v["solutions"]["flat_basis"].as_array().unwrap();
    assert_eq!(gens.len(), 1);
    let b = gens[0]["coefficients"].as_array().unwrap();
    assert_eq!(strings(&b[0]), ["0", "1"]);
    assert_eq!(strings(&b[1]), ["-1", "0"]);
    assert!(all_passed(&v));
}

#[test]
fn artin_splits_a_rough_curve() {
    let v = structured("artin", "f4-curve.json", &["--check"]);
    assert_eq!(v["greenberg"][0]["greenberg"], 1);
    let a = &v["approximation"];
    assert_eq!(a["input"]["exact"], false);
    assert_eq!(a["exact_solution"]["exact"], true);
    assert_eq!(strings(&a["exact_solution"]["coefficients"][0]), ["0", "1"]);
    assert!(all_passed(&v));
}

#[test]
fn ginverse_checks_hold_on_fixtures() {
    for file in ["f1.json", "f2.json", "f3.json", "f4.json", "f5.json", "jordan3.json", "gaussian.json"] {
        let v = structured("ginverse", file, &["--check"]);
        assert!(all_passed(&v), "{file}");
        assert_eq!(v["inverse"]["pole_order"], v["stabilization"]["k"], "{file}");
    }
}

#[test]
fn custom_samples_are_used() {
    let v = structured("ginverse", "f2.json", &["--check", "--sample", "3,-1/2"]);
    let names: Vec<&str> = v["verification"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"LXL=L@3"));
    assert!(names.contains(&"LXL=L@-1/2"));
    assert!(!names.iter().any(|n| n.ends_with("@1/7")));
}

#[test]
fn order_flag_extends_the_expansion() {
    let v = structured("diagonalize", "f1.json", &["--order", "10"]);
    assert_eq!(v["diagonal"]["identities_through_order"], 10);
}

#[test]
fn jets_report_their_validity() {
    let v = structured("diagonalize", "f2-jet.json", &["--check"]);
    assert_eq!(v["stabilization"]["certification"], "through-order-only");
    assert_eq!(v["transforms"]["psi"]["valid_order"], 5);
    assert!(all_passed(&v));
}

#[test]
fn float_runs_carry_the_banner() {
    let v = structured("diagonalize", "float-f3.json", &["--check"]);
    assert_eq!(v["backend"], "float");
    assert!(v["banner"].as_str().unwrap().contains("tolerance-dependent"));
    let path = fixture("f2.json");
    let out = run(&["analyze", path.to_str().unwrap(), "--backend", "float", "--tol", "1e-9"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("!!! tolerance-dependent"));
    assert!(text.contains("exponents: [0, 2]"));
    let exact = run(&["analyze", path.to_str().unwrap()]);
    assert!(!String::from_utf8(exact.stdout).unwrap().contains("tolerance-dependent"));
}

#[test]
fn structured_output_is_deterministic() {
    let path = fixture("f3.json");
    let a = run(&["ginverse", path.to_str().unwrap(), "--check", "--format", "structured"]);
    let b = run(&["ginverse", path.to_str().unwrap(), "--check", "--format", "structured"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("locsmith-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let target = dir.join("report.json");
    let path = fixture("f2.json");
    let out = run(&["analyze", path.to_str().unwrap(), "--format", "structured", "--out", target.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["stabilization"]["k"], 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn parse_errors_exit_2() {
    let dir = std::env::temp_dir().join(format!("locsmith-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cases = [
        ("missing.json", r#"{"field": "rational"}"#),
        ("badentry.json", r#"{"field": "rational", "kind": "polynomial", "rows": 1, "cols": 1, "coefficients": [[["1/0"]]]}"#),
        ("shape.json", r#"{"field": "rational", "kind": "polynomial", "rows": 1, "cols": 2, "coefficients": [[["1"]]]}"#),
        ("field.json", r#"{"field": "real", "kind": "polynomial", "rows": 1, "cols": 1, "coefficients": [[["1"]]]}"#),
        ("notjson.json", "rows: 1"),
    ];
    for (name, body) in cases {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        let out = run(&["analyze", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}");
    }
    let jet = fixture("f2-jet.json");
    assert_eq!(run(&["analyze", jet.to_str().unwrap(), "--at", "1"]).status.code(), Some(2));
    assert_eq!(run(&["oracle-smith", jet.to_str().unwrap()]).status.code(), Some(2));
    let g = fixture("gaussian.json");
    assert_eq!(run(&["analyze", g.to_str().unwrap(), "--backend", "float"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", dir.join("absent.json").to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn small_k_max_exits_3_with_partial_data() {
    let path = fixture("f2.json");
    let out = run(&["analyze", path.to_str().unwrap(), "--k-max", "1", "--format", "structured"]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["partial"]["k_max"], 1);
    assert_eq!(v["partial"]["partial_range_dims"], serde_json::json!([1, 0]));
}
