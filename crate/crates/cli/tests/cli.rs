use std::fs;
use std::path::Path;
use std::process::Command;

use femtocell_cli::config::load_scenario;
use femtocell_core::engine::Scenario;

fn femtosim(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_femtosim")).args(args).output().unwrap()
}

fn scenario_file() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/default.json")
}

#[test]
fn shipped_scenario_equals_defaults() {
    let loaded = load_scenario(Some(&scenario_file()), &[]).unwrap();
    assert_eq!(loaded, Scenario::default());
}

#[test]
fn worst_case_sir_writes_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let status = femtosim(&["worst-case-sir", "--out", out]);
    assert_eq!(status.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("worst_case_sir.csv")).unwrap();
    assert!(csv.starts_with("label,cluster_size,reuse_ratio,formula_linear,formula_db,distances_linear,distances_db\n"));
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "worst-case-sir");
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn json_format_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let status = femtosim(&["simulate", "--trials", "500", "--format", "json", "--out", out]);
    assert_eq!(status.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["subcommand"], "simulate");
    assert!(report["tables"].is_object());
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let bad_value = femtosim(&["simulate", "--set", "n_femto=-1", "--out", out]);
    assert_eq!(bad_value.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_value.stderr).contains("layout.n_femto"));

    let bad_axis = femtosim(&["sweep", "--axis", "nope", "--out", out]);
    assert_eq!(bad_axis.status.code(), Some(2));

    let missing = femtosim(&["simulate", "--config", "/nonexistent/scenario.json", "--out", out]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let out = blocker.join("sub");
    let result = femtosim(&["worst-case-sir", "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(3));
}

#[test]
fn same_seed_gives_same_tables() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let status = femtosim(&["sweep", "--axis", "femto_count", "--values", "1,8", "--trials", "800", "--seed", "9", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(status.status.code(), Some(0));
    }
    assert_eq!(fs::read(a.path().join("sweep.csv")).unwrap(), fs::read(b.path().join("sweep.csv")).unwrap());
}
