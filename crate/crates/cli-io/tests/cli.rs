use std::path::PathBuf;
use std::process::{Command, Output};

use amalgam_engine::{random_shell, random_simplex};
use cli_io::fuzz;
use instances::SiteDescriptor;
use serde_json::Value;
use simplex_core::json::{chain_from_value, chain_to_string};
use simplex_core::{Chain, Convention};

fn amhom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amhom")).args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("amhom-{}-{name}", std::process::id()))
}

fn write_chain(name: &str, c: &Chain) -> String {
    let p = tmp(name);
    std::fs::write(&p, chain_to_string(c)).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn boundary_and_classify() {
    let h = SiteDescriptor::parse("dlo").unwrap().build().unwrap();
    let f = random_simplex(h.site(), &[0, 1, 2], &mut fuzz::rng(1, 0)).unwrap();
    let path = write_chain("simplex.json", &Chain::simplex(&f));

    let o = amhom(&["boundary", "--in", &path]);
    assert_eq!(o.status.code(), Some(0));
    let got = chain_from_value(&stdout_json(&o)).unwrap();
    assert_eq!(got, Chain::simplex(&f).boundary(Convention::Unreduced));

    let o = amhom(&["classify", "--in", &path]);
    assert_eq!(stdout_json(&o)["kind"], "boundary-candidate");

    let o = amhom(&["validate", "--site", "dlo", "--in", &path]);
    assert_eq!(o.status.code(), Some(0));
    // points are not groupoid objects
    let o = amhom(&["validate", "--site", "groupoid:Z2", "--in", &path]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(amhom(&["boundary"]).status.code(), Some(2));
    assert_eq!(amhom(&["boundary", "--in", "/definitely/not/here.json"]).status.code(), Some(2));
    assert_eq!(amhom(&["h2", "--site", "martian"]).status.code(), Some(2));
    assert_eq!(amhom(&["h2", "--site", "tetra"]).status.code(), Some(2));
    assert_eq!(amhom(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(amhom(&["boundary", "--convention", "sideways", "--in", "x"]).status.code(), Some(2));
}

#[test]
fn cap_exceeded_exits_three() {
    let o = amhom(&["homology", "--site", "dlo", "--universe", "6", "--dim", "2", "--cap", "10"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn homology_and_h2() {
    let o = amhom(&["homology", "--site", "parity:4", "--universe", "5", "--dim", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["group"], "ℤ_2");

    let o = amhom(&["h2", "--site", "groupoid:Z4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("H2 = ℤ_4"));

    let out = tmp("h2.json");
    let o = amhom(&["h2", "--site", "tower:Z6>Z2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["group"], "ℤ_6");
    assert_eq!(v["witnesses"].as_array().unwrap().len(), 6);

    let o = amhom(&["noncomm", "--site", "groupoid:Q8"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn reduce_then_verify_certificate() {
    let h = SiteDescriptor::parse("groupoid:Z2").unwrap().build().unwrap();
    let mut r = fuzz::rng(2, 0);
    let c = random_shell(h.site(), &[1, 3, 4, 6], &mut r).unwrap().chain().plus(&random_shell(h.site(), &[0, 2, 5, 7], &mut r).unwrap().chain());
    let path = write_chain("cycle.json", &c);
    let o = amhom(&["reduce", "--site", "groupoid:Z2", "--in", &path]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert!(v["invariant"]["epsilon"].is_array());

    let cert = tmp("cert.json");
    std::fs::write(&cert, v["certificate"].to_string()).unwrap();
    let o = amhom(&["verify-certificate", "--in", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    // flip one coefficient of the bounding chain
    let mut bad = v["certificate"].clone();
    let k = bad["bounding"]["terms"][0]["coef"].as_i64().unwrap();
    bad["bounding"]["terms"][0]["coef"] = Value::from(k + 1);
    std::fs::write(&cert, bad.to_string()).unwrap();
    let o = amhom(&["verify-certificate", "--in", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_amalg_reports_counterexample() {
    let o = amhom(&["check-amalg", "--site", "tetra", "--k", "4", "--trials", "100", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["trials"], 100);
    assert!(!v["counterexample"].is_null());
}

#[test]
fn verify_suite_subset() {
    let o = amhom(&["verify-suite", "--only", "noncomm,tower"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("criterion  5 [PASS]"));
    assert!(text.contains("criterion 10 [PASS]"));
    assert!(!text.contains("criterion  1 "));
}
