//! End-to-end tests of the `vrnet` binary: exit codes, printed output and
//! generated files.

use std::fs;
use std::process::{Command, Output};

fn vrnet() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vrnet"))
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn eval_without_arguments_prints_the_baseline() {
    let output = vrnet().arg("eval").output().unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("1432"), "{text}");
    assert!(text.contains("733"), "{text}");
    assert!(text.contains("24.368"), "{text}");
    assert!(text.contains("0.4924"), "{text}");
}

#[test]
fn eval_set_overrides_a_single_key() {
    let output = vrnet()
        .args(["eval", "--set", "mtu=9000"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("8932"), "{}", stdout(&output));
}

#[test]
fn eval_rejects_malformed_overrides_as_config_errors() {
    let output = vrnet()
        .args(["eval", "--set", "mtu=banana"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("mtu"), "{}", stderr(&output));

    let output = vrnet().args(["eval", "--set", "nonsense"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn eval_reads_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("jumbo.conf");
    fs::write(&path, "# jumbo frames\nmtu = 9000\n").unwrap();
    let output = vrnet()
        .args(["eval", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("8932"));
}

#[test]
fn eval_honors_the_config_environment_variable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("env.conf");
    fs::write(&path, "mtu = 9000\n").unwrap();
    let output = vrnet()
        .arg("eval")
        .env("VRNET_CONFIG", &path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("8932"));
}

#[test]
fn missing_config_file_is_a_config_error() {
    let output = vrnet()
        .args(["eval", "--config", "/no/such/file.conf"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("/no/such/file.conf"));
}

#[test]
fn invalid_config_content_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    fs::write(&path, "mtu = banana\n").unwrap();
    let output = vrnet()
        .args(["eval", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("line 1"), "{}", stderr(&output));
}

#[test]
fn sweep_writes_the_expected_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cable.csv");
    let output = vrnet()
        .args([
            "sweep", "--param", "cable_m", "--from", "0", "--to", "1000", "--steps", "11", "--out",
        ])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 12);
    assert_eq!(
        lines[0],
        "param_name,param_value,total_latency_us,throughput_gbps,utilization,frames_per_vr_frame"
    );
    assert!(lines[1].starts_with("cable_m,0,"));
    assert!(lines[11].starts_with("cable_m,1000,"));
}

#[test]
fn sweep_rejects_unknown_parameters_as_usage_errors() {
    let output = vrnet()
        .args([
            "sweep", "--param", "bogus", "--from", "0", "--to", "1", "--steps", "3", "--out",
            "/tmp/x.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn sweep_rejects_degenerate_ranges_as_domain_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("never.csv");
    let output = vrnet()
        .args([
            "sweep", "--param", "ppr", "--from", "5", "--to", "5", "--steps", "3", "--out",
        ])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!path.exists());
}

#[test]
fn unknown_subcommands_are_usage_errors() {
    let output = vrnet().arg("frobnicate").output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    let output = vrnet().output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let output = vrnet().arg("--help").output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("eval"));
}

#[test]
fn sim_stop_and_wait_reports_overhead_and_validation() {
    let output = vrnet()
        .args(["sim", "--duration", "0.05"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("control_overhead"), "{text}");
    assert!(text.contains("model_validation      PASS"), "{text}");
    assert!(text.contains("stop_and_wait"), "{text}");
}

#[test]
fn sim_pipelined_skips_model_validation() {
    let output = vrnet()
        .args(["sim", "--mode", "pipelined", "--duration", "0.05"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("n/a"), "{text}");
    assert!(text.contains("pipelined"), "{text}");
}

#[test]
fn sim_rejects_nonpositive_durations() {
    let output = vrnet()
        .args(["sim", "--duration", "0"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("duration"), "{}", stderr(&output));
}

#[test]
fn sim_mode_comes_from_config_when_not_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pipe.conf");
    fs::write(&path, "mode = pipelined\nduration_s = 0.05\n").unwrap();
    let output = vrnet().args(["sim", "--config"]).arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert!(stdout(&output).contains("pipelined"));
}
