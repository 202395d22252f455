//! End-to-end checks of the `qgrand` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qgrand(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgrand")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qgrand-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn generate_is_deterministic_and_loads_back() {
    let dir = scratch("generate");
    let (a, b) = (dir.join("a.qrlc"), dir.join("b.qrlc"));
    for path in [&a, &b] {
        let out = qgrand(&["generate", "--n", "12", "--k", "3", "--gates", "300", "--seed", "9", "-o", s(path)]);
        assert!(out.status.success());
        let line = String::from_utf8(out.stdout).unwrap();
        assert!(line.contains("n=12 k=3 gates=300 rank=9/9 seed=9"), "{line}");
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let code = qgrand_core::code::QuantumCode::load(&a).unwrap();
    assert_eq!((code.n(), code.k(), code.gates().len()), (12, 3, 300));
}

#[test]
fn generate_rejects_bad_dimensions() {
    let dir = scratch("bad-dims");
    let out = qgrand(&["generate", "--n", "1", "--k", "1", "-o", s(&dir.join("x.qrlc"))]);
    assert_eq!(out.status.code(), Some(2));
    let out = qgrand(&["generate", "--n", "5", "--k", "5", "-o", s(&dir.join("x.qrlc"))]);
    assert_eq!(out.status.code(), Some(2));
}

fn trivial_code(dir: &Path) -> PathBuf {
    let path = dir.join("trivial.qrlc");
    let out = qgrand(&["generate", "--n", "2", "--k", "1", "--gates", "0", "-o", s(&path)]);
    assert!(out.status.success());
    path
}

#[test]
fn evaluate_trivial_code() {
    let dir = scratch("evaluate");
    let code = trivial_code(&dir);
    // stabilizer Z₁: listed patterns I, XI, YI, ZI, IX, IY, IZ at p = 0.1
    let v = json(&qgrand(&["evaluate", "--code", s(&code), "--p", "0.1", "--t", "1"]));
    let residual = 1.0 - 0.81 - 6.0 * 0.9 * 0.1 / 3.0;
    assert!((v["bler"].as_f64().unwrap() - 0.16).abs() < 1e-12);
    assert!((v["success_prob"].as_f64().unwrap() - 0.84).abs() < 1e-12);
    assert!((v["noise"]["residual"].as_f64().unwrap() - residual).abs() < 1e-12);

    let v = json(&qgrand(&["evaluate", "--code", s(&code), "--p", "0.1", "--t", "0"]));
    assert!((v["bler"].as_f64().unwrap() - 0.19).abs() < 1e-12);
}

#[test]
fn evaluate_csv_columns() {
    let dir = scratch("evaluate-csv");
    let code = trivial_code(&dir);
    let plain = dir.join("plain.csv");
    let cond = dir.join("cond.csv");
    let out = qgrand(&["evaluate", "--code", s(&code), "--p", "0.1", "--t", "2", "--csv", s(&plain)]);
    assert!(out.status.success());
    let out = qgrand(&[
        "evaluate", "--code", s(&code), "--p", "0.1", "--t", "2", "--csv", s(&cond), "--conditional",
    ]);
    assert!(out.status.success());
    let (h1, r1) = csv_rows(&plain);
    let (h2, r2) = csv_rows(&cond);
    assert_eq!(r1.len(), 1);
    assert_eq!(h2.len(), h1.len() + 1);
    assert!(h2.contains(&"conditional_bler".to_string()));
    assert!(!h1.contains(&"conditional_bler".to_string()));
    assert!(h1.ends_with(&["f1".to_string(), "f2".to_string()]));
    assert_eq!(r1[0][..10], r2[0][..10]);
}

#[test]
fn evaluate_reports_io_and_validation_failures() {
    let dir = scratch("evaluate-errors");
    let out = qgrand(&["evaluate", "--code", s(&dir.join("missing.qrlc")), "--p", "0.1"]);
    assert_eq!(out.status.code(), Some(3));

    let code = trivial_code(&dir);
    let noise = dir.join("noise.csv");
    fs::write(&noise, "pauli,probability\nIII,0.9\nXII,0.1\n").unwrap();
    let out = qgrand(&["evaluate", "--code", s(&code), "--noise-file", s(&noise)]);
    assert_eq!(out.status.code(), Some(2));

    fs::write(&noise, "pauli,probability\nII,0.9\nXI,0.05\nIZ,0.05\n").unwrap();
    // XI hides behind the identity; IZ is the stabilizer itself
    let v = json(&qgrand(&["evaluate", "--code", s(&code), "--noise-file", s(&noise)]));
    assert!((v["success_prob"].as_f64().unwrap() - 0.9).abs() < 1e-12);
    assert!((v["success_with_degenerate"].as_f64().unwrap() - 0.95).abs() < 1e-12);

    let out = qgrand(&["evaluate", "--code", s(&code)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = scratch("config");
    let code = trivial_code(&dir);
    let cfg = dir.join("eval.toml");
    fs::write(&cfg, format!("code = {:?}\np = 0.1\nt = 0\n", s(&code))).unwrap();
    let v = json(&qgrand(&["evaluate", "--config", s(&cfg)]));
    assert!((v["bler"].as_f64().unwrap() - 0.19).abs() < 1e-12);
    let v = json(&qgrand(&["evaluate", "--config", s(&cfg), "--t", "1"]));
    assert!((v["bler"].as_f64().unwrap() - 0.16).abs() < 1e-12);

    fs::write(&cfg, "bogus_key = 1\n").unwrap();
    assert_eq!(qgrand(&["evaluate", "--config", s(&cfg)]).status.code(), Some(2));
}

fn rate_sweep(dir: &Path, name: &str, threads: &str) -> Vec<u8> {
    let out_path = dir.join(name);
    let out = qgrand(&[
        "--threads", threads, "sweep", "--kind", "rate", "--n", "8", "--k-list", "2,4,6", "--t", "1", "--p", "0.01",
        "--samples", "4", "--gates", "200", "--seed", "5", "-o", s(&out_path),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    fs::read(out_path).unwrap()
}

#[test]
fn rate_sweep_shape_and_determinism() {
    let dir = scratch("rate");
    let one = rate_sweep(&dir, "one.csv", "1");
    let four = rate_sweep(&dir, "four.csv", "4");
    let again = rate_sweep(&dir, "again.csv", "4");
    assert_eq!(one, four);
    assert_eq!(four, again);

    let (header, rows) = csv_rows(&dir.join("one.csv"));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    for name in ["k", "axis_value", "series", "metric", "mean", "p10", "p90", "samples", "ideal_overlay", "seed"] {
        col(name);
    }
    for k in ["2", "4", "6"] {
        let metrics: Vec<_> = rows.iter().filter(|r| r[col("k")] == k).map(|r| r[col("metric")].clone()).collect();
        assert!(metrics.contains(&"bler".to_string()), "k = {k}");
        assert!(metrics.contains(&"f1".to_string()), "k = {k}");
    }
    for r in &rows {
        let (lo, hi): (f64, f64) = (r[col("p10")].parse().unwrap(), r[col("p90")].parse().unwrap());
        assert!(lo <= hi);
        assert_eq!(r[col("samples")], "4");
    }

    let meta: serde_json::Value = serde_json::from_slice(&fs::read(dir.join("one.json")).unwrap()).unwrap();
    assert_eq!(meta["sweep"], "rate");
    assert_eq!(meta["config"]["master_seed"], 5);
}

#[test]
fn ordering_sweep_has_two_series_per_entropy() {
    let dir = scratch("ordering");
    let out_path = dir.join("ordering.csv");
    let out = qgrand(&[
        "sweep", "--kind", "ordering", "--n", "10", "--k", "1", "--gates", "300", "--samples", "3",
        "--entropy-grid", "1.5,3.0", "--seed", "2", "-o", s(&out_path),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(&out_path);
    let series = header.iter().position(|h| h == "series").unwrap();
    let axis = header.iter().position(|h| h == "axis_value").unwrap();
    let mut values: Vec<_> = rows.iter().map(|r| r[axis].clone()).collect();
    values.dedup();
    for v in &values {
        let names: Vec<_> = rows.iter().filter(|r| &r[axis] == v).map(|r| r[series].clone()).collect();
        assert!(names.iter().any(|n| n.contains("greedy")), "{names:?}");
        assert!(names.iter().any(|n| n.contains("random")), "{names:?}");
    }
}

#[test]
fn sweep_and_simulate_require_a_seed() {
    let dir = scratch("seed");
    let out = qgrand(&["sweep", "--kind", "rate", "--n", "8", "--k-list", "2", "-o", s(&dir.join("x.csv"))]);
    assert_eq!(out.status.code(), Some(2));
    let code = trivial_code(&dir);
    let out = qgrand(&["simulate", "--code", s(&code), "--p", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_rejects_parameters_of_other_kinds() {
    let dir = scratch("foreign");
    let out = qgrand(&[
        "sweep", "--kind", "rate", "--n", "8", "--k-list", "2", "--seed", "1", "--entropy-grid", "0.5", "-o",
        s(&dir.join("x.csv")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_matches_the_table_and_is_reproducible() {
    let dir = scratch("simulate");
    let code = dir.join("c.qrlc");
    assert!(qgrand(&["generate", "--n", "8", "--k", "2", "--gates", "200", "--seed", "4", "-o", s(&code)]).status.success());
    let run = |threads: &str, log: &Path| {
        json(&qgrand(&[
            "--threads", threads, "simulate", "--code", s(&code), "--p", "0.02", "--t", "2", "--trials", "400",
            "--seed", "11", "-o", s(log),
        ]))
    };
    let (la, lb) = (dir.join("a.log"), dir.join("b.log"));
    let a = run("1", &la);
    let b = run("3", &lb);
    assert_eq!(a, b);
    assert_eq!(fs::read(&la).unwrap(), fs::read(&lb).unwrap());
    assert_eq!(a["trials"], 400);
    let rate = a["success_rate"].as_f64().unwrap();
    let eval = json(&qgrand(&["evaluate", "--code", s(&code), "--p", "0.02", "--t", "2"]));
    let expected = eval["success_with_degenerate"].as_f64().unwrap();
    let sigma = (expected * (1.0 - expected) / 400.0).sqrt();
    assert!((rate - expected).abs() < 5.0 * sigma + 1e-9, "{rate} vs {expected}");
}

#[test]
fn help_lists_commands_and_flags() {
    let out = qgrand(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for cmd in ["generate", "evaluate", "sweep", "simulate", "--threads"] {
        assert!(text.contains(cmd), "{cmd}");
    }
    let text = String::from_utf8(qgrand(&["sweep", "--help"]).stdout).unwrap();
    for flag in ["--kind", "--seed", "--samples", "--k-list", "--metadata"] {
        assert!(text.contains(flag), "{flag}");
    }
    assert_eq!(qgrand(&["frobnicate"]).status.code(), Some(2));
}
