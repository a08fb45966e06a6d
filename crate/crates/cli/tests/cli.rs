use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use serde_json::Value;
use tfloc::io::{load_csv, save_csv};
use tfloc::metrics::rel_l1_error;
use tfloc::RealMap;

fn tfloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfloc"))
        .args(args)
        .output()
        .expect("run tfloc")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "status {:?}\n{}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn unknown_method_exits_with_usage_code() {
    let out = tfloc(&["recover", "--method", "nope", "--symbol", "x.pgm", "--out", "y"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_symbol_file_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.pgm");
    let out = tfloc(&["recover", "--method", "gp", "--symbol", p(&missing), "--out", p(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_kernel_deconvolution_exits_with_numerical_code() {
    let dir = tempfile::tempdir().unwrap();
    let est = dir.path().join("est.csv");
    let kernel = dir.path().join("kernel.csv");
    save_csv(&RealMap::filled(8, 1.0), &est).unwrap();
    save_csv(&RealMap::zeros(8), &kernel).unwrap();
    let out = tfloc(&[
        "deconvolve", "--est", p(&est), "--kernel", p(&kernel), "--eps", "1e-9",
        "--out", p(&dir.path().join("d")),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn gen_symbol_writes_csv_and_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let pgm = dir.path().join("c.pgm");
    ok(&tfloc(&["gen-symbol", "--kind", "circle", "--size", "32", "--radius", "6", "--out", p(&csv)]));
    ok(&tfloc(&["gen-symbol", "--kind", "circle", "--size", "32", "--radius", "6", "--out", p(&pgm)]));
    let f = load_csv(&csv).unwrap();
    assert_eq!(f.size(), 32);
    assert!(f.as_slice().iter().all(|&v| v == 0.0 || v == 1.0));
    let g = tfloc::io::load_pgm(&pgm, tfloc::ValueRange::UNIT).unwrap();
    assert_eq!(f.max_abs_diff(&g), 0.0);
}

#[test]
fn recover_reruns_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let symbol = dir.path().join("s.pgm");
    ok(&tfloc(&["gen-symbol", "--kind", "gaussians", "--size", "24", "--out", p(&symbol)]));
    for method in ["wn", "was", "wawd", "pt", "gp"] {
        let a = dir.path().join(format!("{method}_a"));
        let b = dir.path().join(format!("{method}_b"));
        for stem in [&a, &b] {
            ok(&tfloc(&[
                "recover", "--method", method, "--symbol", p(&symbol), "--K", "20",
                "--seed", "7", "--out", p(stem),
            ]));
        }
        for ext in ["csv", "pgm"] {
            let x = fs::read(a.with_extension(ext)).unwrap();
            let y = fs::read(b.with_extension(ext)).unwrap();
            assert!(x == y, "{method}.{ext} differs between runs");
        }
        let mut ja: Value = serde_json::from_slice(&fs::read(a.with_extension("json")).unwrap()).unwrap();
        let mut jb: Value = serde_json::from_slice(&fs::read(b.with_extension("json")).unwrap()).unwrap();
        for j in [&mut ja, &mut jb] {
            j.as_object_mut().unwrap().remove("runtime_seconds");
            j.as_object_mut().unwrap().remove("outputs");
        }
        assert_eq!(ja, jb, "{method} sidecar differs");
    }
}

#[test]
fn gp_on_a_disk_is_fast_and_accurate() {
    let dir = tempfile::tempdir().unwrap();
    let symbol = dir.path().join("disk.csv");
    ok(&tfloc(&["gen-symbol", "--kind", "circle", "--size", "64", "--out", p(&symbol)]));
    let stem = dir.path().join("gp");
    let start = Instant::now();
    ok(&tfloc(&["recover", "--method", "gp", "--symbol", p(&symbol), "--out", p(&stem)]));
    assert!(start.elapsed().as_secs_f64() < 60.0);
    let est = load_csv(&stem.with_extension("csv")).unwrap();
    let truth = load_csv(&symbol).unwrap();
    let err = rel_l1_error(&est, &truth).unwrap();
    assert!(err < 0.5, "gp rel l1 {err}");
    let sidecar: Value = serde_json::from_slice(&fs::read(stem.with_extension("json")).unwrap()).unwrap();
    assert!(sidecar["symbol_hash"].is_string());
}

#[test]
fn impulse_modes_agree() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let m = dir.path().join("m");
    ok(&tfloc(&["impulse", "--mode", "analytic", "--size", "32", "--out", p(&a)]));
    ok(&tfloc(&["impulse", "--mode", "measured", "--pipeline", "gp", "--size", "32", "--out", p(&m)]));
    let ka = load_csv(&a.with_extension("csv")).unwrap();
    let km = load_csv(&m.with_extension("csv")).unwrap();
    assert!(ka.max_abs_diff(&km) < 1e-12);
}

#[test]
fn empty_bench_config_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bench.json");
    fs::write(&config, r#"{"schema_version": 1, "size": 16}"#).unwrap();
    let out_dir = dir.path().join("out");
    ok(&tfloc(&["bench", "--config", p(&config), "--out", p(&out_dir)]));
    for name in ["report.json", "report.txt", "report.csv"] {
        assert!(out_dir.join(name).exists(), "{name} missing");
    }
}

#[test]
fn bench_rejects_bad_schema_version() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bench.json");
    fs::write(&config, r#"{"schema_version": 9, "size": 16}"#).unwrap();
    let out = tfloc(&["bench", "--config", p(&config), "--out", p(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn small_bench_runs_every_method() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bench.json");
    fs::write(
        &config,
        r#"{"schema_version": 1, "size": 24, "K": 10, "symbols": [{"kind": "circle"}, {"kind": "tiles", "value_range": [-1, 1]}]}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = tfloc(&["bench", "--config", p(&config), "--out", p(&out_dir)]);
    ok(&out);
    let report: Value = serde_json::from_slice(&fs::read(out_dir.join("report.json")).unwrap()).unwrap();
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert_eq!(row["scores"].as_array().unwrap().len(), 5);
    }
}
