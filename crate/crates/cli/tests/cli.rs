use std::fs;
use std::process::Command;

fn percolab() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_percolab"));
    c.env("PERCOLAB_WORKERS", "1");
    c
}

#[test]
fn speed_run_writes_summary_and_replica_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = percolab()
        .args(["--cmd", "speed", "--dim", "1", "--law", "dirac:r0=1", "--L", "60", "--T", "80"])
        .args(["--replicas", "2", "--seed", "7", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("replicas.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("replica,speed,boundary_touch_time"));
    assert_eq!(csv.lines().count(), 3);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["law"], "dirac:r0=1");
    assert_eq!(summary["aggregate"]["n"], 2);
    assert!(out.join("timing.json").exists());
}

#[test]
fn missing_law_exits_with_config_error() {
    let out = percolab().args(["--cmd", "speed"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("law"));
}

#[test]
fn nonpositive_law_parameter_exits_with_config_error() {
    let out = percolab().args(["--cmd", "speed", "--law", "pareto:beta=0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("classify.cfg");
    fs::write(&cfg, "cmd = classify\nlaw = pareto:beta=2.5,rmin=1\ndim = 1\n").unwrap();
    let out = percolab().arg("--config").arg(&cfg).args(["--dim", "2"]).output().unwrap();
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["config"]["dim"], 2);
    assert_eq!(summary["details"]["verdict"], "Superlinear");
}

#[test]
fn validate_exit_code_reflects_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let status = percolab()
        .args(["--cmd", "validate", "--suites", "classifier,d1-ceiling", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let verdicts = summary["verdicts"].as_array().unwrap();
    assert_eq!(verdicts.len(), 2);
    assert!(verdicts.iter().all(|v| v["passed"] == true && v["checks"].is_array()));
}
