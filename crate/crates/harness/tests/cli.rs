use std::process::Command;

use scissors_harness::record::{read_csv, SweepRecord};

fn scissors() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scissors"))
}

#[test]
fn small_sweep_writes_records_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        r#"
[sweep]
eta = [0.01, 0.1]
n = [1, 2]
mu = { values = [0.1, 0.5] }
kappa = { log = [0.01, 0.5], points = 3 }
"#,
    )
    .unwrap();
    let status = scissors()
        .args(["--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "sweep"])
        .status()
        .unwrap();
    assert!(status.success());
    let rows: Vec<SweepRecord> = read_csv(&dir.path().join("sweep.csv")).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 2 * 3);
    assert!(rows.iter().all(|r| r.rci_g.is_finite() && r.p_succ > 0.0 && r.p_succ <= 1.0));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["records"], 24);
}

#[test]
fn invalid_config_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[sweep]\neta = [1.5]\n").unwrap();
    let out = scissors()
        .args(["--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "sweep"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(&cfg, "[sweep]\ntypo = 1\n").unwrap();
    let out = scissors().args(["--config", cfg.to_str().unwrap(), "sweep"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_figure_is_rejected() {
    let out = scissors().args(["repro", "fig99"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("fig99"));
}
