use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_oswec"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn reference() -> String {
    data("reference.json").display().to_string()
}

fn data_rows(csv: &Path) -> usize {
    // one `#` units line and one header line
    fs::read_to_string(csv).unwrap().lines().count() - 2
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_config(dir: &Path, alpha: f64, eta: f64) -> String {
    let path = dir.join("config.json");
    let text = format!(
        r#"{{
  "flap": {{ "inertia_dry_kg_m2": 1.0e7, "stiffness_Nm_per_rad": 4.375e6 }},
  "coefficients": {{ "analytic": {{ "added_inertia_kg_m2": 0.0, "damping_Nms_per_rad": 1.0e6, "alpha": {alpha} }} }},
  "excitation": {{ "transfer_file": "{}", "back_flap_eta": {eta} }}
}}"#,
        data("transfer_reference.csv").display()
    );
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn simulate_in_phase_writes_two_flaps() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(
        &["simulate", &reference(), "--scenario", "in-phase", "--d", "10", "--Te", "8.5", "--T0", "0.6e6"],
        dir.path(),
    );
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let v = json(&dir.path().join("simulate.json"));
    assert_eq!(v["flaps"].as_array().unwrap().len(), 2);
    let line = String::from_utf8(r.stdout).unwrap();
    assert!(line.starts_with("rms_rad=[") && line.contains("total_W="), "{line}");
    assert!(!dir.path().join("timeseries.csv").exists());
}

#[test]
fn simulate_wave_back_phase_follows_wavenumber() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(
        &["simulate", &reference(), "--wave", "--H", "1.75", "--Te", "8.5", "--beta", "0", "--d", "45", "--series"],
        dir.path(),
    );
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let v = json(&dir.path().join("simulate.json"));
    let k = (2.0 * std::f64::consts::PI / 8.5f64).powi(2) / 9.81;
    let back = v["forcing"]["flaps"][1]["phase_rad"].as_f64().unwrap();
    assert!((back + k * 45.0).abs() < 1e-12);
    assert_eq!(v["forcing"]["flaps"][0]["amplitude_Nm"].as_f64().unwrap().round(), 1.0e6);
    let ts = fs::read_to_string(dir.path().join("timeseries.csv")).unwrap();
    assert_eq!(ts.lines().nth(1), Some("t,theta_l,theta_r,omega_l,omega_r"));
}

#[test]
fn missing_coefficient_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{ "flap": { "inertia_dry_kg_m2": 1e7, "stiffness_Nm_per_rad": 4.375e6 },
             "coefficients": { "table_file": "absent_coeffs.csv" },
             "pto": { "damping_Nms_per_rad": 5e5 } }"#,
    )
    .unwrap();
    let r = run(
        &["simulate", cfg.to_str().unwrap(), "--scenario", "single", "--Te", "9.5", "--T0", "1e6"],
        dir.path(),
    );
    assert_eq!(r.status.code(), Some(1));
    let err = String::from_utf8(r.stderr).unwrap();
    assert!(err.contains("absent_coeffs.csv"), "{err}");
}

#[test]
fn unstable_integration_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("stiff.json");
    // natural period far below the time step: explicit integration diverges
    fs::write(
        &cfg,
        r#"{ "flap": { "inertia_dry_kg_m2": 1.0, "stiffness_Nm_per_rad": 1e8 },
             "coefficients": { "analytic": { "added_inertia_kg_m2": 0, "damping_Nms_per_rad": 1.0, "alpha": 0 } } }"#,
    )
    .unwrap();
    let r = run(
        &["simulate", cfg.to_str().unwrap(), "--scenario", "single", "--Te", "8.5", "--T0", "1e3"],
        dir.path(),
    );
    assert_eq!(r.status.code(), Some(2), "{}", String::from_utf8_lossy(&r.stderr));
}

#[test]
fn wave_sweep_has_full_grid() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["sweep", &reference(), "--study", "wave", "--distances", "10,45,70"], dir.path());
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(data_rows(&dir.path().join("sweep_wave.csv")), 3 * 9 * 2);
    let v = json(&dir.path().join("sweep_wave.json"));
    assert_eq!(v["results"].as_array().unwrap().len(), 3);
    assert_eq!(v["results"][0]["by"].as_array().unwrap().len(), 9);
    let first = fs::read_to_string(dir.path().join("sweep_wave.csv")).unwrap();
    assert!(first.starts_with("# columns:"));
}

#[test]
fn heading_sweep_has_ten_rows() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["sweep", &reference(), "--study", "heading"], dir.path());
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(data_rows(&dir.path().join("sweep_heading.csv")), 10);
}

#[test]
fn empty_distance_list_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    for study in ["wave", "torque"] {
        let r = run(&["sweep", &reference(), "--study", study, "--distances", ""], dir.path());
        assert_eq!(r.status.code(), Some(1));
    }
    let r = run(&["aep", &reference(), "--jpd", data("sample_jpd.csv").to_str().unwrap(), "--distances", ","], dir.path());
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["sweep", &reference(), "--study", "tidal"], dir.path());
    assert_eq!(r.status.code(), Some(1));
    let r = run(&["sweep", &reference(), "--study", "wave", "--workers", "0"], dir.path());
    assert_eq!(r.status.code(), Some(1));
    let r = bin().arg("--help").output().unwrap();
    assert_eq!(r.status.code(), Some(0));
}

#[test]
fn aep_table_has_baseline_and_seven_distances() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["aep", &reference(), "--jpd", data("sample_jpd.csv").to_str().unwrap()], dir.path());
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let csv = dir.path().join("aep.csv");
    assert_eq!(data_rows(&csv), 8);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.lines().nth(2).unwrap().starts_with("single (doubled),"));
    let v = json(&dir.path().join("aep.json"));
    assert_eq!(v["table"].as_array().unwrap().len(), 8);
    assert!(v["single"]["model"]["coefficient_source"].is_string());
    for d in [10, 15, 33, 45, 55, 70, 86] {
        assert!(dir.path().join(format!("aep_cells_d{d}.csv")).exists());
    }
    assert!(dir.path().join("aep_cells_single.csv").exists());
}

#[test]
fn zero_coupling_aep_rows_double_the_single_flap() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 0.0, 0.0);
    let r = run(
        &["aep", &cfg, "--jpd", data("sample_jpd.csv").to_str().unwrap(), "--distances", "10,45,86"],
        dir.path(),
    );
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let v = json(&dir.path().join("aep.json"));
    for row in &v["table"].as_array().unwrap()[1..] {
        let ratio = row["relative_to_doubled_single"].as_f64().unwrap();
        assert!((ratio - 1.0).abs() < 1e-3, "{row}");
    }
}

#[test]
fn verify_passes_and_catches_injected_fault() {
    let r = bin().args(["verify"]).output().unwrap();
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stdout));
    let out = String::from_utf8(r.stdout).unwrap();
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 3, "{out}");

    let r = bin()
        .args(["verify", "--cases", "3", "--inject-fault", "flip-damping-sign"])
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(3));
    let out = String::from_utf8(r.stdout).unwrap();
    assert!(out.contains("FAIL energy-balance"), "{out}");
    let err = String::from_utf8(r.stderr).unwrap();
    assert!(err.contains("case 0: dof=1") && err.contains("energy-balance failed"), "{err}");
}

#[test]
fn reruns_overwrite_with_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", &reference(), "--study", "torque", "--distances", "10"];
    run(&args, dir.path());
    let first = fs::read(dir.path().join("sweep_torque.json")).unwrap();
    run(&args, dir.path());
    assert_eq!(first, fs::read(dir.path().join("sweep_torque.json")).unwrap());
}

#[test]
fn relative_paths_resolve_against_the_config() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(data("transfer_reference.csv"), dir.path().join("t.csv")).unwrap();
    let cfg = dir.path().join("rel.json");
    fs::write(
        &cfg,
        r#"{ "flap": { "inertia_dry_kg_m2": 1e7, "stiffness_Nm_per_rad": 4.375e6 },
             "coefficients": { "analytic": { "added_inertia_kg_m2": 0, "damping_Nms_per_rad": 1e6, "alpha": 0.05 } },
             "excitation": { "transfer_file": "t.csv" },
             "output_dir": "results" }"#,
    )
    .unwrap();
    let r = bin()
        .args(["simulate", cfg.to_str().unwrap(), "--wave", "--H", "1.75", "--Te", "9.5"])
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(dir.path().join("results/simulate.json").exists());
}
