//! End-to-end checks of the `kerrmag` binary against the shipped configs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kerrmag"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn params_reports_the_kerr_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "params",
        "--config",
        config("fig2.toml").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("params.json")).unwrap())
            .unwrap();
    let kerr = json["results"]["kerr"].as_f64().unwrap();
    assert!(kerr > 0.03e-9 && kerr < 0.13e-9, "kerr = {kerr}");
    assert_eq!(json["command"], "params");
    assert!(json["config"]["material"]["diameter_mm"].as_f64().unwrap() == 1.0);
}

#[test]
fn steady_at_zero_power_has_a_single_zero_root() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "steady",
        "--config",
        config("fig3a.toml").to_str().unwrap(),
        "--drive-power",
        "0",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("steady.json")).unwrap())
            .unwrap();
    let solutions = json["results"]["roots"]["solutions"].as_array().unwrap();
    assert_eq!(solutions.len(), 1);
    assert_eq!(solutions[0]["shift"].as_f64().unwrap(), 0.0);
    assert_eq!(solutions[0]["stable"], true);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = run(&[
            "sweep",
            "--config",
            config("fig4a.toml").to_str().unwrap(),
            "--out-dir",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    for name in ["sweep_up.csv", "sweep_down.csv", "sweep.json"] {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
}

#[test]
fn sweep_reports_switchings_at_high_power() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "sweep",
        "--config",
        config("fig4a.toml").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.json")).unwrap())
            .unwrap();
    assert_eq!(json["results"]["up"]["switchings"].as_array().unwrap().len(), 1);
    assert_eq!(json["results"]["down"]["switchings"].as_array().unwrap().len(), 1);
    assert!(json["results"]["hysteresis_area"].as_f64().unwrap() > 0.0);
    let csv = std::fs::read_to_string(dir.path().join("sweep_up.csv")).unwrap();
    assert!(csv.starts_with("# kerrmag sweep\n# config {"));
    assert!(csv.lines().any(|l| l.starts_with("omega_m_mhz,")));
}

#[test]
fn bistability_and_critical_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "bistability",
        "--config",
        config("fig3a.toml").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("bistable: true"));
    let out = run(&[
        "critical",
        "--config",
        config("fig5.toml").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("critical.csv")).unwrap();
    assert!(csv.lines().count() > 80);
}

#[test]
fn oracle_smoke_passes() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("traj.csv");
    let out = run(&[
        "oracle",
        "--config",
        config("fig3a.toml").to_str().unwrap(),
        "--samples",
        "6",
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--dump-trajectory",
        traj.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("oracle.json")).unwrap())
            .unwrap();
    assert_eq!(json["results"]["failures"].as_array().unwrap().len(), 0);
    let traj_text = std::fs::read_to_string(&traj).unwrap();
    assert!(traj_text.lines().any(|l| l.starts_with("time_s,")));
}

#[test]
fn exit_codes_distinguish_failure_classes() {
    // missing file -> config error (2)
    let out = run(&["steady", "--config", "/nonexistent.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("\"error\":\"config\""), "stderr: {err}");

    // invalid TOML -> 2
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "not toml [").unwrap();
    let out = run(&["steady", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // validation failure (negative power) -> 3
    let text = std::fs::read_to_string(config("fig3a.toml")).unwrap();
    let invalid = dir.path().join("invalid.toml");
    std::fs::write(&invalid, text.replace("power_mw = 69.5", "power_mw = -1.0")).unwrap();
    let out = run(&["steady", "--config", invalid.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("\"error\":\"validation\""), "stderr: {err}");
}
