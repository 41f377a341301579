use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn shp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shp")).args(args).output().expect("spawn shp")
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name).display().to_string()
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("valid JSON")
}

fn column(csv_text: &[u8], name: &str) -> Vec<f64> {
    let mut reader = csv::Reader::from_reader(csv_text);
    let idx = reader.headers().unwrap().iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    reader.records().map(|r| r.unwrap()[idx].parse().unwrap()).collect()
}

fn spread(values: &[f64]) -> f64 {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

fn write_temp(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn verify_default_run_passes() {
    let out = shp(&["verify", "--config", &config("verify.conf")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out.stdout);
    assert_eq!(report["schema_version"], "1");
    assert_eq!(report["passed"], true);
    let flags: Vec<&str> = report["convention_flags"].as_array().unwrap().iter().map(|f| f["id"].as_str().unwrap()).collect();
    assert!(flags.contains(&"gamma_n_square") && flags.contains(&"gamma5_square"), "{flags:?}");
}

#[test]
fn verify_unattainable_tolerance_exits_one() {
    let out = shp(&["verify", "--suite", "norms", "--samples", "20", "--tolerance", "1e-18"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out.stdout);
    assert_eq!(report["passed"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("norm_equality"));
}

#[test]
fn verify_zero_samples_is_config_error() {
    let out = shp(&["verify", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn malformed_config_reports_line_and_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(dir.path(), "bad.conf", "seed = 1\nsampels = 10\n");
    let out = shp(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":2") && err.contains("sampels"), "{err}");
}

#[test]
fn missing_config_is_file_error() {
    let out = shp(&["interference", "--config", "/nonexistent/scan.conf"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/scan.conf"));
}

#[test]
fn usage_error_exits_two() {
    assert_eq!(shp(&["wigner", "--boost1", "fast"]).status.code(), Some(2));
    assert_eq!(shp(&["wigner", "--axis1", "1,0"]).status.code(), Some(2));
}

#[test]
fn interference_reference_period_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let status = shp(&["interference", "--config", &config("interference.conf"), "--out", out.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(0));
    let csv_text = std::fs::read(&out).unwrap();
    assert!(!csv_text.contains(&b'\r'));
    assert_eq!(column(&csv_text, "delta_t_fs").len(), 2001);
    let summary = json(&std::fs::read(shp_cli::summary_path(&out)).unwrap());
    let period = summary["fringe_period_fs"].as_f64().unwrap();
    assert!((period - 0.9847).abs() < 1e-3, "{period}");
    assert_eq!(summary["flat_oscillation"], false);
}

#[test]
fn interference_equal_energies_is_flat() {
    let out = shp(&["interference", "--config", &config("interference_equal_energies.conf"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let result = json(&out.stdout);
    assert_eq!(result["flat_oscillation"], true);
    assert!(result["visibility"].is_number());
    assert!(result["fringe_period_fs"].is_null());
}

#[test]
fn interference_undersampled_grid_is_refused() {
    let out = shp(&["interference", "--config", &config("interference_raw_energies.conf"), "--samples", "101"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("samples"));
}

#[test]
fn wigner_collinear_boosts_give_identity() {
    let out = shp(&["wigner", "--boost1", "1", "--axis1", "0,0,1", "--boost2", "-2.5", "--axis2", "0,0,1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out.stdout)["angle"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn wigner_off_rest_foliation_stays_unitary() {
    let out = shp(&["wigner", "--config", &config("wigner.conf"), "--n", "2,1,1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let result = json(&out.stdout);
    assert!(result["unitarity_deviation"].as_f64().unwrap() < 1e-10);
    let det = &result["determinant"];
    assert!((det[0].as_f64().unwrap() - 1.0).abs() < 1e-10 && det[1].as_f64().unwrap().abs() < 1e-10);
    assert!(result["angle"].as_f64().unwrap() > 0.1);
}

#[test]
fn evolve_classical_conserves_k_and_stays_on_shell() {
    let out = shp(&["evolve", "--config", &config("evolve_classical.conf")]);
    assert_eq!(out.status.code(), Some(0));
    let k = column(&out.stdout, "K");
    assert!(k.len() > 10);
    assert!(spread(&k) <= 1e-8 * k[0].abs(), "{}", spread(&k));
    assert!(column(&out.stdout, "on_shell_check").iter().all(|c| c.abs() < 1e-12));
}

#[test]
fn evolve_quantum_conserves_norm() {
    let out = shp(&["evolve", "--config", &config("evolve_quantum.conf")]);
    assert_eq!(out.status.code(), Some(0));
    let norm = column(&out.stdout, "norm");
    assert!(spread(&norm) < 1e-10);
    assert!(column(&out.stdout, "tau").iter().any(|&t| t > 100.0));
}

#[test]
fn constants_lists_hbar() {
    let out = shp(&["constants", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("hbar,")), "{text}");
}

#[test]
fn seed_changes_verify_samples_deterministically() {
    let run = |seed: &str| shp(&["verify", "--suite", "little_group", "--samples", "50", "--seed", seed]).stdout;
    assert_eq!(run("7"), run("7"));
    assert_ne!(run("7"), run("8"));
}

#[test]
fn evolve_always_dumps_the_final_step() {
    let out = shp(&["evolve", "--config", &config("evolve_classical.conf"), "--samples", "250"]);
    assert_eq!(out.status.code(), Some(0));
    let tau = column(&out.stdout, "tau");
    assert_eq!(tau.len(), 4);
    assert!((tau[3] - 2.5).abs() < 1e-9, "{tau:?}");
}
