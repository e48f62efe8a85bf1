use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resolventlab"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env("RESOLVENTLAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(text: &[u8]) -> Value {
    serde_json::from_slice(text).expect("valid JSON")
}

#[test]
fn region_membership_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["region", "--m", "2", "--delta", "0.5", "--z", "1+2i"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&fs::read(dir.path().join("region.json")).unwrap());
    assert_eq!(v["member"], true);
    assert!((v["dist"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let zeta = resolventlab::cplx::parse_complex(v["zeta"].as_str().unwrap()).unwrap();
    assert!((zeta.re + 3.0).abs() < 1e-12 && (zeta.im - 4.0).abs() < 1e-12);
    let echo = json(&fs::read(dir.path().join("run.json")).unwrap());
    assert_eq!(echo["config"]["seed"], 42);
    assert_eq!(echo["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn residue_value_and_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["residue", "--m", "4", "--z", "0.7071+0.7071i", "--t", "0"]);
    assert!(out.status.success());
    let v = json(&out.stdout);
    assert!((v["value_re"].as_f64().unwrap() - 2.22144).abs() < 1e-4);
    assert!(v["value_im"].as_f64().unwrap().abs() < 1e-10);
    assert!(v["rel_err"].as_f64().unwrap() < 1e-6);
}

#[test]
fn csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["multiplier", "--op", "apply", "--z", "0.5+2i", "--tau-grid", "0:4:8"]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("multiplier.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "tau,re,im,bound_ratio");
    assert_eq!(lines.len(), 1 + 9 + 1);
    assert!(lines.last().unwrap().starts_with("# seed=42, version="));
    assert!(!text.contains('\r'));
    for row in &lines[1..10] {
        for field in row.split(',') {
            let x: f64 = field.parse().unwrap();
            assert_eq!(field.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 3] = [
        &["oscint", "--symbol", "ellipse:1,2", "--n", "2", "--x", "3,1"],
        &["probe", "--what", "blowup", "--model", "zoll", "--n", "3", "--k-max", "40", "--k-range", "5:20"],
        &["spectra", "--model", "torus", "--n", "2", "--cutoff", "12", "--report", "weyl"],
    ];
    for args in cases {
        let mut snapshots = Vec::new();
        for _ in 0..2 {
            let out = run(dir.path(), args);
            assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
            let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir.path())
                .unwrap()
                .map(|e| e.unwrap())
                .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
                .collect();
            files.sort();
            snapshots.push((out.stdout, files));
        }
        assert_eq!(snapshots[0], snapshots[1], "{args:?}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["region", "--m", "two"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["region", "--z", "1+2j+"]).status.code(), Some(2));
}

#[test]
fn module_errors_exit_one_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["residue", "--m", "4", "--z", "0+1i"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out.stderr);
    assert_eq!(v["module"], "residue");
    assert!(v["message"].as_str().unwrap().contains("outside"));
    assert!(v["op"].is_string());
}

#[test]
fn identities_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["suite", "identities"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count(), 3, "{stdout}");
}
