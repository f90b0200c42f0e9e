use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathnoise")).args(args).output().expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn report(out: &Output) -> Value {
    assert!(out.status.success(), "{}", stderr(out));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn write_csv(dir: &Path, name: &str, rows: impl IntoIterator<Item = (i64, f64, f64)>) -> PathBuf {
    let mut text = String::from("t,re,im\n");
    for (t, re, im) in rows {
        text.push_str(&format!("{t},{re:e},{im:e}\n"));
    }
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Sinc synthesis with coefficients centered in the past, on `-(len-1)..=0`.
fn band_limited(dir: &Path, center: f64, w: f64, len: i64) -> PathBuf {
    let rows = (-(len - 1)..=0).map(|t| {
        let s: f64 = (0..=6).map(|k| (1.0 + k as f64).recip() * (w / PI) * sinc(k as f64 * PI + w * t as f64)).sum();
        (t, s * (center * t as f64).cos(), s * (center * t as f64).sin())
    });
    write_csv(dir, "lbl.csv", rows)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_reports_sigma_and_writes_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "x.csv", [(0, 1.0, 0.0), (1, -0.5, 0.0)]);
    let r = report(&run(&["analyze", "--input", path(&input), "--grid", "64"]));
    assert!((r["sigma"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let out = dir.path().join("out");
    assert!(run(&["analyze", "--input", path(&input), "--grid", "64", "--out", path(&out)]).status.success());
    let spectrum = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert_eq!(spectrum.lines().count(), 65);
    assert!(out.join("report.json").exists());
}

#[test]
fn decompose2_writes_all_series() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "x.csv", [(-1, 0.3, 0.0), (0, 1.0, 0.0), (2, 0.0, 0.2)]);
    let out = dir.path().join("out");
    let o = run(&["decompose2", "--input", path(&input), "--eps", "0.1", "--grid", "256", "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["report.json", "Y.csv", "N.csv", "noise.csv", "predictable.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let r: Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(r["grid_size"], 256);
    assert_eq!(r["degenerate"], false);
}

#[test]
fn recover_uses_supplied_class() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "x.csv", [(1, 0.5, 0.0)]);
    let r = report(&run(&["recover", "--input", path(&input), "--m", "0", "--omega0", "0", "--sigma", "0.25"]));
    assert!((r["estimate_re"].as_f64().unwrap() + 0.5).abs() < 1e-9);
    assert_eq!(r["worst_case_error"].as_f64().unwrap(), 0.25);
    assert_eq!(r["omega0_source"], "supplied");
    assert_eq!(r["worst_case_source"], "supplied");
}

#[test]
fn project_recognizes_band_limited_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = band_limited(dir.path(), 0.0, PI / 2.0, 256);
    let out = dir.path().join("out");
    let o = run(&[
        "project", "--input", path(&input), "--band", "0,1.5707963267948966", "--coeffs", "8", "--horizon", "4", "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(r["relative_residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(r["left_bandlimited"], true);
    assert_eq!(r["solver"]["method"], "pseudoinverse");
    assert_eq!(std::fs::read_to_string(out.join("coefficients.csv")).unwrap().lines().count(), 18);
    assert_eq!(std::fs::read_to_string(out.join("extrapolation.csv")).unwrap().lines().count(), 5);
    assert!(out.join("x_hat.csv").exists());
}

#[test]
fn predict_and_multistep_run_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let input = band_limited(dir.path(), 2.0, 0.3, 400);
    let out = dir.path().join("predict");
    let o = run(&["predict", "--input", path(&input), "--tau-split", "-32", "--taps", "16", "--horizon", "3", "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(out.join("predictions.csv")).unwrap().lines().count(), 4);

    let out = dir.path().join("multi");
    let o = run(&["multistep", "--input", path(&input), "--band", "2,0.5", "--coeffs", "8", "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(r["steps"].as_array().is_some_and(|s| !s.is_empty()));
    for f in ["predictable.csv", "noise.csv", "x_hat_0.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "x.csv", [(0, 1.0, 0.0), (1, -0.5, 0.0)]);
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, format!(r#"{{"grid": 32, "input": "{}"}}"#, path(&input))).unwrap();
    let r = report(&run(&["analyze", "--config", path(&cfg), "--threads", "2"]));
    assert!((r["sigma"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    std::fs::write(&cfg, r#"{"grd": 32}"#).unwrap();
    let o = run(&["analyze", "--config", path(&cfg), "--input", path(&input)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kind=parse"));
}

#[test]
fn exit_codes_follow_error_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "x.csv", [(-1, 1.0, 0.0), (0, 0.5, 0.0)]);

    let o = run(&["analyze"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error code=2 kind=validation"));

    let o = run(&["analyze", "--nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kind=usage"));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "t,re,im\n0,1,0\n0,2,0\n").unwrap();
    let o = run(&["analyze", "--input", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kind=parse"));

    let o = run(&["project", "--input", path(&input), "--band", "0,1", "--coeffs", "40", "--horizon-T", "8", "--reg", "0"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("kind=factorization"));

    let zero = write_csv(dir.path(), "zero.csv", (-99..=0).map(|t| (t, 0.0, 0.0)));
    let o = run(&["estimate-band", "--input", path(&zero)]);
    assert_eq!(o.status.code(), Some(4));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["status"], "AMBIGUOUS");
    let o = run(&["predict", "--input", path(&zero)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(o.stdout.is_empty());
}
