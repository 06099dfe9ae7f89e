//! The installed binary: exit codes, artifacts and byte-identical reruns.

use std::path::Path;
use std::process::{Command, Output};

use reparam_lab::config::DEFAULT_CONFIG;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reparam-lab")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path) -> String {
    let path = dir.join("lab.cfg");
    std::fs::write(&path, DEFAULT_CONFIG).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn passing_suite_exits_0_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = dir.path().join("out");
    let args = ["verify-cross-ratio", "--config", &cfg, "--out", out.to_str().unwrap()];
    let first = lab(&args);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stdout));
    let csv = std::fs::read(out.join("verify-cross-ratio.csv")).unwrap();
    assert!(lab(&args).status.success());
    assert_eq!(std::fs::read(out.join("verify-cross-ratio.csv")).unwrap(), csv);
}

#[test]
fn failing_check_exits_1_and_writes_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = dir.path().join("out");
    let run = lab(&["stokes", "--config", &cfg, "--out", out.to_str().unwrap(), "--plots", "on"]);
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert_eq!(run.status.code(), Some(1), "{stdout}");
    assert!(stdout.lines().any(|l| l.starts_with("FAIL stokes: residual order in delta_tile")));
    let svg = std::fs::read_to_string(out.join("stokes.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}

#[test]
fn usage_and_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lab(&["frobnicate", "--config", "x.cfg"]).status.code(), Some(2));
    assert_eq!(lab(&["mixing", "--config", dir.path().join("absent.cfg").to_str().unwrap()]).status.code(), Some(2));
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, DEFAULT_CONFIG.replacen("base = 1.0", "base = 0", 1)).unwrap();
    assert_eq!(lab(&["density", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}
