use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apmoments")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn sum_example() {
    let v = json(&["sum", "--mod", "4", "--res", "1", "--x", "30", "--fn", "const:1", "--u", "1", "--no-timing"]);
    let s = v["exact_sum"].as_f64().unwrap();
    assert!((s - (1.0 / 5.0 + 1.0 / 13.0 + 1.0 / 17.0 + 1.0 / 29.0)).abs() < 1e-14);
    assert_eq!(format!("{s:.6}"), "0.370229");
}

#[test]
fn classify_example() {
    let v = json(&["classify", "--fn", "invloglog", "--no-timing"]);
    assert_eq!(v["case"], "Case3");
    assert_eq!(v["sign"], "positive");
}

#[test]
fn moments_example() {
    let v = json(&["moments", "--mod", "4", "--res", "1", "--n", "30", "--fn", "omega", "--no-timing"]);
    assert_eq!(v["mean"].as_f64(), Some(1.0));
    assert_eq!(v["count"].as_u64(), Some(8));
    assert_eq!(v["mu"][0].as_f64(), Some(0.25));
    assert!(v["predictions"]["restricted_sum"].is_array());
    assert_eq!(v["coverage"].as_array().unwrap().len(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["moments", "--fn", "omega"]).status.code(), Some(2));
    assert_eq!(run(&["sum", "--x", "100", "--fn", "wat"]).status.code(), Some(2));
    assert_eq!(run(&["model", "exact", "--n", "100", "--mod", "0"]).status.code(), Some(2));
    // Bounded function fails the sqrt-mean precondition at run time.
    assert_eq!(run(&["ektest", "--n", "1000", "--fn", "sqrtloglog", "--normalization", "sqrt-mean"]).status.code(), Some(1));
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["model", "sample", "--mod", "4", "--res", "1", "--n", "1e5", "--fn", "one", "--trials", "2000", "--seed", "7", "--format", "csv", "--no-timing"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut changed = args.to_vec();
    changed[12] = "8";
    assert_ne!(run(&changed).stdout, a.stdout);
}

#[test]
fn csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ek.csv");
    let out = run(&[
        "ektest", "--mod", "4", "--res", "1", "--n", "1e5", "--normalization", "sqrt-mean", "--format", "csv", "--out",
        path.to_str().unwrap(), "--no-timing",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let body: String = text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["x", "F_emp", "Phi", "|diff|"]);
    assert_eq!(rdr.records().count(), 21);
}

#[test]
fn spill_round_trip_through_ektest() {
    let dir = tempfile::tempdir().unwrap();
    let spill = dir.path().join("values.bin");
    let spill = spill.to_str().unwrap();
    let base = ["--mod", "4", "--res", "1", "--n", "1e5", "--no-timing"];
    let m = run(&[&["moments", "--spill", spill][..], &base].concat());
    assert!(m.status.success());
    let direct = json(&[&["ektest"][..], &base].concat());
    let spilled = json(&["ektest", "--spill", spill, "--no-timing"]);
    assert_eq!(direct["ks"], spilled["ks"]);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "mod=4\nres=3\nn=30\nfn=omega\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = json(&["moments", "--config", cfg, "--no-timing"]);
    assert_eq!(from_file["l"].as_u64(), Some(3));
    let overridden = json(&["moments", "--config", cfg, "--res", "1", "--no-timing"]);
    assert_eq!(overridden["l"].as_u64(), Some(1));
    assert_eq!(overridden["mean"].as_f64(), Some(1.0));
}

#[test]
fn sieve_lines_default() {
    let out = run(&["sieve", "--limit", "30", "--mod", "4", "--res", "1", "--no-timing"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "5\n13\n17\n29\n");
}
