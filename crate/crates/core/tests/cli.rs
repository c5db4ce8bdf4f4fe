//! End-to-end runs of the `specfold` binary on the species files in `tests/species`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use specfold::species::DynkinType;

fn species(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/species")
        .join(format!("{name}.json"))
        .display()
        .to_string()
}

fn golden(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specfold"))
        .args(args)
        .env_remove("SPECFOLD_PRIME")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

/// Summand multiplicities per homological degree from a complex dump.
fn counts_of_dump(complex: &Value) -> Vec<BTreeMap<String, u64>> {
    complex["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| {
            let mut m = BTreeMap::new();
            for s in t.as_array().unwrap() {
                *m.entry(s["vertex"].as_str().unwrap().to_string()).or_insert(0) += s["multiplicity"].as_u64().unwrap();
            }
            m
        })
        .collect()
}

fn counts_of_golden(v: &Value) -> Vec<BTreeMap<String, u64>> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|t| t.as_object().unwrap().iter().map(|(k, m)| (k.clone(), m.as_u64().unwrap())).collect())
        .collect()
}

#[test]
fn classify_reports_type_and_coxeter_number() {
    let out = run(&["classify", &species("a4")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "A4, representation finite, h=5\n");
}

#[test]
fn cyclic_quiver_exits_with_one() {
    let out = run(&["classify", &species("cyclic")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NotDynkin"));
}

#[test]
fn missing_file_exits_with_two() {
    let out = run(&["classify", "/nonexistent/species.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_prime_exits_with_two() {
    let out = run(&["--prime", "9", "classify", &species("a4")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ar_vertex_counts() {
    let e6 = stdout_json(&run(&["ar", &species("e6")]));
    let ty = DynkinType::E(6);
    assert_eq!(e6["vertices"].as_u64().unwrap() as usize, ty.rank() * ty.coxeter_number() / 2);
    let dot = run(&["ar", &species("c3"), "--dot"]);
    let text = String::from_utf8(dot.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains("[label=\"P") || l.contains("[label=\"τ")).count(), 9);
}

#[test]
fn koszul_matches_golden() {
    for (file, simple, name) in [("c3", "1", "c3_koszul.json"), ("d4", "2", "d4_koszul.json")] {
        let out = stdout_json(&run(&["koszul", &species(file), "--simple", simple]));
        let g = golden(name);
        assert_eq!(counts_of_dump(&out["complex"]), counts_of_golden(&g["terms"]), "{file}");
        assert_eq!(counts_of_dump(&out["q"]), counts_of_golden(&g["q"]), "{file}");
        assert_eq!(counts_of_dump(&out["r"]), counts_of_golden(&g["r"]), "{file}");
        assert_eq!(out["h0"], g["h0"]);
    }
}

#[test]
fn segre_matches_golden() {
    let out = stdout_json(&run(&["segre", "--left", &species("c3"), "--right", &species("d4"), "--simple", "1,2"]));
    let g = golden("c3_d4_product.json");
    assert_eq!(counts_of_dump(&out["complex"]), counts_of_golden(&g["terms"]));
    assert_eq!(counts_of_dump(&out["q"]), counts_of_golden(&g["q"]));
    assert_eq!(counts_of_dump(&out["r"]), counts_of_golden(&g["r"]));
    assert_eq!(out["simple"], g["h0"]);
}

#[test]
fn nakayama_verify_reports_falsified_literal_map() {
    let c3 = stdout_json(&run(&["nakayama", &species("c3"), "--verify"]));
    assert_eq!(c3["certificate"]["literal"], "PASS");
    let b2 = run(&["nakayama", &species("b2"), "--verify"]);
    assert_eq!(b2.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&b2.stdout).unwrap();
    assert_eq!(v["certificate"]["corrected"]["galois_exponent"], 1);
}

#[test]
fn selftest_is_deterministic() {
    let a = run(&["selftest"]);
    let b = run(&["selftest"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(1), "criterion 6 is red");
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 9);
    assert_eq!(text.lines().filter(|l| l.starts_with("[FAIL]")).count(), 1);
}

#[test]
fn environment_prime_is_used() {
    let out = Command::new(env!("CARGO_BIN_EXE_specfold"))
        .args(["selftest", "--criterion", "10"])
        .env("SPECFOLD_PRIME", "11")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("selftest over GF(11)"));
}
