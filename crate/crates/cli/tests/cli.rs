use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lpdlab_core::factor_graph::read_alist;

fn lpdlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpdlab")).args(args).output().expect("binary runs")
}

fn ok_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn gen(dir: &Path, n: usize, dv: usize) -> String {
    let path = dir.join(format!("code_{n}_{dv}.alist"));
    let p = path.to_str().unwrap();
    let out = lpdlab(&["gen-code", "--n", &n.to_string(), "--dv", &dv.to_string(), "--seed", "5", "--out", p]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p.to_string()
}

#[test]
fn gen_code_writes_requested_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen(dir.path(), 40, 3);
    let g = read_alist(&p).unwrap();
    assert_eq!((g.n(), g.m()), (40, 20));
    assert!((0..40).all(|i| g.var_degree(i) == 3));
    // same seed, same file
    let again = lpdlab(&["gen-code", "--n", "40", "--dv", "3", "--seed", "5"]);
    assert_eq!(again.stdout, fs::read(&p).unwrap());
}

#[test]
fn decode_reports_success_and_dumps_lp() {
    let dir = tempfile::tempdir().unwrap();
    let code = gen(dir.path(), 60, 8);
    let lp = dir.path().join("final.lp");
    let out = lpdlab(&["decode", "--alist", &code, "--flips", "[3]", "--emit-lp", lp.to_str().unwrap()]);
    let v = ok_json(&out);
    assert_eq!(v["status"], "IntegralCodeword");
    assert_eq!(v["all_zero"], true);
    let text = fs::read_to_string(&lp).unwrap();
    assert!(text.contains("Minimize") && text.contains("Subject To"));

    // full enumeration needs small check degrees
    let small = gen(dir.path(), 40, 3);
    let cuts = ok_json(&lpdlab(&["decode", "--alist", &small, "--flips", "[1, 9, 30]"]));
    let full = ok_json(&lpdlab(&["decode", "--alist", &small, "--flips", "[1, 9, 30]", "--mode", "full"]));
    assert!((full["objective"].as_f64().unwrap() - cuts["objective"].as_f64().unwrap()).abs() < 1e-9);
}

#[test]
fn witness_and_matching_agree_on_one_flip() {
    let dir = tempfile::tempdir().unwrap();
    let code = gen(dir.path(), 30, 3);
    let w = ok_json(&lpdlab(&["witness", "--alist", &code, "--flips", "[0]"]));
    if w["found"] == true {
        assert_eq!(w["hyperflow_passes"], true);
    }
    let code = gen(dir.path(), 100, 8);
    let m = ok_json(&lpdlab(&["matching", "--alist", &code, "--flips", "[7]"]));
    assert_eq!(m["found"], true);
    assert_eq!(m["hyperflow_passes"], true);
}

#[test]
fn threshold_certifies_at_two_thousandths() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("cert.json");
    let out = lpdlab(&["threshold", "--alpha", "0.002", "--json-out", json.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["certified"], true);
    assert!(v["f"]["value"].as_f64().unwrap() < 0.0);
}

#[test]
fn montecarlo_output_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let out_dir = dir.path().join(name);
        let out = lpdlab(&[
            "montecarlo", "--n", "100", "--trials", "6", "--alphas", "0.01,0.03", "--seed", "11", "--workers", workers,
            "--out", out_dir.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        out_dir
    };
    let a = run("a", "1");
    let first: Vec<Vec<u8>> = ["trials.csv", "summary.csv", "plotdata.csv", "manifest.json"].iter().map(|f| fs::read(a.join(f)).unwrap()).collect();
    run("a", "1");
    for (k, f) in ["trials.csv", "summary.csv", "plotdata.csv", "manifest.json"].iter().enumerate() {
        assert_eq!(first[k], fs::read(a.join(f)).unwrap(), "{f}");
    }
    // the worker count changes scheduling only; the manifest records it
    let b = run("b", "3");
    for f in ["trials.csv", "summary.csv", "plotdata.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let rows = fs::read_to_string(a.join("trials.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 12);
}

#[test]
fn operational_errors_exit_one() {
    let out = lpdlab(&["decode", "--alist", "/nonexistent/code.alist"]);
    assert_eq!(out.status.code(), Some(1));
    let out = lpdlab(&["montecarlo", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let code = gen(dir.path(), 40, 3);
    let out = lpdlab(&["decode", "--alist", &code, "--flips", "[99]"]);
    assert_eq!(out.status.code(), Some(1));
}
