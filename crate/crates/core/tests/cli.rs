//! End-to-end tests of the `cqlab` binary: exit codes, CSV shape, and
//! run-to-run determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cqlab"))
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("cqlab-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

fn bsc_channel() -> PathBuf {
    write_temp(
        "bsc.json",
        r#"{
            "dim": 2,
            "alphabet": ["0", "1"],
            "states": {
                "0": [[[0.9,0],[0,0]],[[0,0],[0.1,0]]],
                "1": [[[0.1,0],[0,0]],[[0,0],[0.9,0]]]
            },
            "p": {"0": 0.5, "1": 0.5}
        }"#,
    )
}

fn noiseless_channel() -> PathBuf {
    write_temp(
        "noiseless.json",
        r#"{
            "dim": 2,
            "alphabet": ["0", "1"],
            "states": {
                "0": [[[1,0],[0,0]],[[0,0],[0,0]]],
                "1": [[[0,0],[0,0]],[[0,0],[1,0]]]
            }
        }"#,
    )
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn capacity_matches_closed_form() {
    let ch = bsc_channel();
    let out = bin().args(["capacity", "--channel"]).arg(&ch).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = stdout_of(&out);
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("capacity,gap_certificate,iterations"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let cap: f64 = row[0].parse().unwrap();
    let closed_form = 2f64.ln() - (0.1f64 * -(0.1f64.ln()) + 0.9 * -(0.9f64.ln()));
    assert!((cap - closed_form).abs() < 1e-6, "capacity {cap}");
}

#[test]
fn capacity_bits_flag_rescales() {
    let ch = bsc_channel();
    let nats = stdout_of(&bin().args(["capacity", "--channel"]).arg(&ch).output().unwrap());
    let bits = stdout_of(
        &bin()
            .args(["capacity", "--bits", "--channel"])
            .arg(&ch)
            .output()
            .unwrap(),
    );
    let parse = |csv: &str| -> f64 {
        csv.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap()
    };
    let ratio = parse(&nats) / parse(&bits);
    // both columns carry 12 significant digits, so allow for the rounding
    assert!((ratio - std::f64::consts::LN_2).abs() < 1e-10);
}

#[test]
fn hyptest_emits_bound_flags() {
    let ch = bsc_channel();
    let out = bin()
        .args([
            "hyptest",
            "--n-min",
            "1",
            "--n-max",
            "3",
            "--a",
            "linspace:0.05:0.2:3",
            "--channel",
        ])
        .arg(&ch)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = stdout_of(&out);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,a,alpha,beta,best_s,alpha_bound,beta_bound,alpha_bound_ok,beta_bound_ok"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 9);
    for row in rows {
        assert!(row.ends_with("true,true"), "bound violated in row: {row}");
    }
}

#[test]
fn build_code_perfect_classical_rows() {
    let ch = noiseless_channel();
    let out = bin()
        .args([
            "build-code",
            "--n-min",
            "1",
            "--n-max",
            "3",
            "--a",
            "0.3",
            "--gamma",
            "0.05",
            "--channel",
        ])
        .arg(&ch)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = stdout_of(&out);
    for row in csv.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        let pe: f64 = cols[7].parse().unwrap();
        assert!(pe.abs() < 1e-12, "nonzero Pe in row: {row}");
        assert_eq!(cols[8], "true");
        assert_eq!(cols[9], "true");
        assert_eq!(cols[12], "false", "vacuous flag set in row: {row}");
    }
}

#[test]
fn verify_is_deterministic_and_passes() {
    let run = || {
        let out = bin().args(["verify", "--seed", "42"]).output().unwrap();
        (out.status.code(), stdout_of(&out))
    };
    let (code_a, report_a) = run();
    let (code_b, report_b) = run();
    assert_eq!(code_a, Some(0), "{report_a}");
    assert_eq!(code_b, Some(0));
    assert_eq!(report_a, report_b, "reports differ between runs");
    assert!(report_a.contains("12/12 checks passed"), "{report_a}");
}

#[test]
fn verify_fault_injection_exits_one() {
    let out = bin()
        .args(["verify", "--seed", "42", "--inject-fault"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", stdout_of(&out));
    assert!(stdout_of(&out).contains("FAIL"));
}

#[test]
fn empty_channel_file_is_input_error() {
    let ch = write_temp("empty.json", "");
    let out = bin().args(["verify", "--channel"]).arg(&ch).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["capacity", "--channel"]).arg(&ch).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_channel_flag_is_input_error() {
    let out = bin().arg("capacity").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn enumeration_limit_exits_three() {
    let ch = noiseless_channel();
    let out = bin()
        .env("CQLAB_MAX_ENUM", "3")
        .args(["build-code", "--n-min", "2", "--n-max", "2", "--a", "0.3", "--channel"])
        .arg(&ch)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn limit_override_requires_acknowledgment() {
    let ch = noiseless_channel();
    let out = bin()
        .args([
            "build-code",
            "--n-min",
            "1",
            "--n-max",
            "1",
            "--a",
            "0.3",
            "--max-enum",
            "10",
            "--channel",
        ])
        .arg(&ch)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let ch = bsc_channel();
    let out_path = std::env::temp_dir().join(format!("cqlab-test-{}-cap.csv", std::process::id()));
    let out = bin()
        .args(["capacity", "--channel"])
        .arg(&ch)
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(&out_path).unwrap();
    assert!(written.starts_with("capacity,"));
}
