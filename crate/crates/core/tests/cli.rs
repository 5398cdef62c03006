//! The `modspace` binary: exit codes, report files and argument round trips.

use std::path::Path;
use std::process::{Command, Output};

use modspace::cli::{CommandKind, RunConfig};

fn modspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modspace")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn norm_writes_versioned_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("norm.json");
    let o = modspace(&["norm", "--function-ids", "gaussian:sigma=1", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("norm: gaussian:sigma=1"));
    let v = read_json(&out);
    assert_eq!(v["header"]["schema_version"], "1.0");
    assert!(v["header"]["timestamp"].is_string());
    assert_eq!(v["report"]["certified"], true);
    assert!(v["report"]["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn every_report_carries_schema_version() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["validate-weight", "--weight-spec", "loglog"],
        &["assoc-seq", "--p-max", "12"],
        &["find-s", "--bound", "40"],
        &["constants", "--variant", "sv", "--R", "2,4,8"],
        &["decay", "--L", "16", "--N", "16384"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let out = dir.path().join(format!("r{i}.json"));
        let mut full = args.to_vec();
        full.extend(["--output", out.to_str().unwrap()]);
        let o = modspace(&full);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(read_json(&out)["header"]["schema_version"], "1.0", "{args:?}");
    }
}

#[test]
fn parse_errors_exit_one_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.json");
    let o = out.to_str().unwrap();
    let bad: &[&[&str]] = &[
        &["algebra", "--p1", "1.5", "--p2", "1.5", "--output", o],
        &["norm", "--weight-spec", "gevrey:s=0.5", "--output", o],
        &["norm", "--weight-spec", "nonsense", "--output", o],
        &["norm", "--function-ids", "sinc", "--output", o],
        &["norm", "--k-max", "5000", "--output", o],
        &["frobnicate", "--output", o],
        &["constants", "--R", "1.5", "--output", o],
        &["report-all", "--checks", "15", "--output", o],
    ];
    for args in bad {
        let r = modspace(args);
        assert_eq!(r.status.code(), Some(1), "{args:?}");
        assert!(!out.exists(), "{args:?} wrote a report");
    }
    assert_eq!(modspace(&["--help"]).status.code(), Some(0));
}

#[test]
fn uncertified_norm_exits_two() {
    let o = modspace(&["norm", "--function-ids", "window", "--k-max", "8"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
}

#[test]
fn csv_output_has_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("seq.csv");
    let o = modspace(&["assoc-seq", "--p-max", "5", "--format", "csv", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().next(), Some("p,log_Mp,argmax_r"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn thread_count_comes_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_modspace"))
        .args(["norm", "--function-ids", "gaussian:sigma=1"])
        .env("MODSPACE_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stderr.is_empty());
}

#[test]
fn report_all_runs_selected_checks() {
    let o = modspace(&["report-all", "--checks", "1,2", "--weight-spec", "gevrey:s=4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("3 passed, 0 failed"));
}

#[test]
fn config_round_trips_through_canonical_args() {
    let cases: &[&[&str]] = &[
        &["norm", "--function", "gaussian:sigma=2,m=5", "--function", "window", "--p", "inf", "--q", "2"],
        &["algebra", "--p1", "3", "--p2", "6", "--tail-tol", "1e-9", "--output", "/tmp/x.json"],
        &["constants", "--variant", "rv-b", "--N", "5", "--R", "2,3.5"],
        &["superposition", "--lambdas", "0.5,1,2", "--deltas", "0.1,0.05", "--format", "csv"],
        &["find-s", "--weight", "family:s=3,r=1", "--bound", "50", "--h", "0.5"],
    ];
    for args in cases {
        let cfg = RunConfig::parse_args(args.iter()).unwrap();
        let again = RunConfig::parse_args(cfg.canonical_args()).unwrap();
        assert_eq!(cfg, again, "{args:?}");
    }
    let sv = RunConfig::parse_args(["constants", "--N", "7"]).unwrap();
    assert_eq!((sv.command, sv.order), (CommandKind::Constants, 7));
    let algebra = RunConfig::parse_args(["algebra", "--p1", "3", "--p2", "6"]).unwrap();
    assert!((algebra.p - 2.0).abs() < 1e-12);
}
