//! The installed binary end to end: a tiny run must succeed and publish the
//! report files; bad inputs must exit nonzero with a diagnostic on stderr.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phc-divert"))
}

#[test]
fn tiny_run_publishes_the_report_files() {
    let dir = tempfile::tempdir().expect("temp dir");
    let out = dir.path().join("results");
    let output = bin()
        .args(["--policy", "est", "--reps", "2", "--warmup-days", "10"])
        .args(["--horizon-days", "30", "--seed", "7"])
        .args(["--out", out.to_str().unwrap()])
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("est"), "scenario line missing: {stdout}");
    for f in [
        "patients_est.csv",
        "decisions_est.csv",
        "summary.csv",
        "comparison.md",
        "effective_config.toml",
    ] {
        assert!(out.join(f).is_file(), "{f} missing from {}", out.display());
    }
}

#[test]
fn sweep_flag_reports_one_row_per_grid_value() {
    let dir = tempfile::tempdir().expect("temp dir");
    let out = dir.path().join("sweep");
    let output = bin()
        .args(["--policy", "none", "--reps", "1", "--warmup-days", "5"])
        .args(["--horizon-days", "20", "--sweep", "travel_time=0,60"])
        .args(["--out", out.to_str().unwrap()])
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("[travel_time=0]"), "{stdout}");
    assert!(stdout.contains("[travel_time=60]"), "{stdout}");
    assert!(out.join("summary.csv").is_file());
}

#[test]
fn missing_config_file_fails_with_a_diagnostic() {
    let output = bin()
        .args(["--config", "/nonexistent/run.toml"])
        .output()
        .expect("binary runs");
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.starts_with("error:"), "stderr: {stderr}");
}

#[test]
fn unknown_policy_name_is_rejected() {
    let output = bin()
        .args(["--policy", "psychic"])
        .output()
        .expect("binary runs");
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("psychic"),
        "diagnostic names the bad value: {stderr}"
    );
}
