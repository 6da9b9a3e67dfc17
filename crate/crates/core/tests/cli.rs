use std::fs;
use std::process::Command;

fn placement() -> Command {
    Command::new(env!("CARGO_BIN_EXE_placement"))
}

#[test]
fn run_writes_outputs_and_flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"nodes": 3, "classes": 2, "horizon": 500, "runs": 1}"#).unwrap();
    let out = dir.path().join("out");
    let status = placement()
        .args(["run", "--config"])
        .arg(&cfg)
        .args(["--horizon", "12", "--mode", "fast", "--rho", "1.5", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let metrics = fs::read_to_string(out.join("metrics_fast_rho1.5.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 13);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["nodes"], 3);
    assert_eq!(summary["config"]["horizon"], 12);
}

#[test]
fn oracle_prints_policy_and_dumps_the_program() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("lp.json");
    let output = placement()
        .args(["oracle", "--nodes", "2", "--classes", "2", "--resources", "1", "--dump-lp"])
        .arg(&dump)
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("f* = "));
    assert_eq!(text.lines().filter(|l| l.trim_start().starts_with("node")).count(), 3);
    let lp: serde_json::Value = serde_json::from_str(&fs::read_to_string(dump).unwrap()).unwrap();
    // 2 real nodes × 3 classes; 2 load rows + 3 class rows.
    assert_eq!(lp["variables"].as_array().unwrap().len(), 6);
    assert_eq!(lp["rhs"].as_array().unwrap().len(), 5);
}

#[test]
fn sweep_and_bench_run() {
    let dir = tempfile::tempdir().unwrap();
    let status = placement()
        .args(["sweep", "--rho", "1.05,1.5", "--runs", "1", "--horizon", "30", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("rho/metrics_fast_rho1.5.csv").exists());

    let output = placement()
        .args(["bench", "--runs", "1", "--horizon", "30", "--nodes", "3"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.starts_with("algo,tau_mean_ms"));
    assert!(text.contains("\nbase,") && text.contains("\nfast_rho1.05,"));
}

#[test]
fn bad_arguments_fail_cleanly() {
    let output = placement().args(["run", "--runs", "0"]).output().unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("runs"));
}
