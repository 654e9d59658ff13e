use std::process::{Command, Output};

use serde_json::Value;

fn omega(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omega")).args(args).env_remove("OMEGA_OUT_DIR").output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = omega(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    stdout(&out)
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    serde_json::from_str(&ok(&all)).unwrap()
}

fn schemas() -> Value {
    serde_json::from_str(include_str!("../schemas.json")).unwrap()
}

#[test]
fn count_of_gaussian_ideals_up_to_ten() {
    assert_eq!(ok(&["count", "--field", "q-i", "--n", "10"]).trim(), "9");
}

#[test]
fn count_over_rationals_is_the_bound() {
    assert_eq!(ok(&["count", "--field", "q", "--n", "1000"]).trim(), "1000");
}

#[test]
fn density_of_the_unit_box() {
    assert_eq!(ok(&["density-d", "--n", "1"]).trim(), "1.0");
}

#[test]
fn quarter_disk_size() {
    assert_eq!(json(&["quarter-disk", "--n", "10"])["size"], 79);
}

#[test]
fn records_stream_lists_every_ideal() {
    let text = ok(&["count", "--field", "q-i", "--n", "10", "--records"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "norm,big_omega,small_omega");
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[1], "1,0,0");
}

#[test]
fn invalid_field_is_a_validation_error() {
    let out = omega(&["count", "--field", "quad:4"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "validation");
    assert!(!err["message"].as_str().unwrap().is_empty());
}

#[test]
fn unknown_flag_is_a_validation_error() {
    let out = omega(&["count", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "validation");
}

#[test]
fn ladder_on_unsupported_command_is_rejected() {
    assert_eq!(omega(&["histogram", "--ladder", "10,100"]).status.code(), Some(2));
    assert_eq!(omega(&["tv", "--ladder", "100,10"]).status.code(), Some(2));
    assert_eq!(omega(&["tv", "--records"]).status.code(), Some(2));
}

#[test]
fn oversized_bounds_overflow() {
    for args in [
        &["count", "--n", "3e9"][..],
        &["count", "--n", "99999999999999999999999"],
        &["lattice", "--n", "100000"],
        &["density-d", "--n", "1e30"],
    ] {
        let out = omega(args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        let err: Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(err["error"], "overflow");
    }
}

#[test]
fn help_exits_cleanly() {
    assert!(omega(&["--help"]).status.success());
}

#[test]
fn seeded_commands_are_deterministic() {
    for cmd in ["sandwich", "shift-gap"] {
        let args = [cmd, "--n", "2000", "--samples", "4", "--format", "json"];
        assert_eq!(ok(&args), ok(&args));
        let other = [cmd, "--n", "2000", "--samples", "4", "--seed", "9", "--format", "json"];
        assert_ne!(ok(&args), ok(&other));
    }
    let circle = ["sandwich", "--n", "2000", "--system", "circle:0.3", "--x", "0.25", "--samples", "3"];
    assert_eq!(ok(&circle), ok(&circle));
}

#[test]
fn default_seed_is_zero() {
    let a = ok(&["shift-gap", "--n", "1000", "--samples", "2"]);
    let b = ok(&["shift-gap", "--n", "1000", "--samples", "2", "--seed", "0"]);
    assert_eq!(a, b);
}

#[test]
fn sandwich_and_shift_checks_hold() {
    assert_eq!(json(&["sandwich", "--n", "10000", "--samples", "5"])["all_hold"], true);
    assert_eq!(
        json(&["sandwich", "--n", "10000", "--samples", "5", "--system", "circle:0.7071", "--x", "0.1"])["all_hold"],
        true
    );
    assert_eq!(json(&["shift-gap", "--n", "10000", "--samples", "20"])["all_hold"], true);
}

#[test]
fn csv_headers_match_the_schema_file() {
    let schema = schemas();
    let headers = schema["csv_headers"].as_object().unwrap();
    let cases: [(&str, &[&str]); 9] = [
        ("count --records", &["count", "--n", "100", "--records"]),
        ("histogram", &["histogram", "--n", "100"]),
        ("weights", &["weights", "--n", "100"]),
        ("residues", &["residues", "--n", "100"]),
        ("lattice", &["lattice", "--n", "5"]),
        ("quarter-disk", &["quarter-disk", "--n", "5", "--format", "csv"]),
        ("sandwich", &["sandwich", "--n", "100", "--samples", "1"]),
        ("shift-gap", &["shift-gap", "--n", "100", "--samples", "1"]),
        ("ladder", &["tv", "--ladder", "10,100"]),
    ];
    for (key, args) in cases {
        let text = ok(args);
        let expected = headers[key].as_str().unwrap().replace("<statistic>", "total_variation");
        assert_eq!(text.lines().next().unwrap(), expected, "{key}");
    }
}

#[test]
fn json_outputs_match_the_schema_file() {
    let schema = schemas();
    let outputs = schema["outputs"].as_object().unwrap();
    for (cmd, spec) in outputs {
        let args: Vec<&str> = match cmd.as_str() {
            "verify" | "error" => continue,
            "ladder" => vec!["liouville", "--ladder", "100,1000"],
            "lattice" | "quarter-disk" | "density-d" => vec![cmd.as_str(), "--n", "20"],
            other => vec![other, "--n", "500", "--samples", "2"],
        };
        let value = json(&args);
        let mut got: Vec<&str> = value.as_object().unwrap().keys().map(String::as_str).collect();
        let mut want: Vec<&str> = spec["required"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        got.sort_unstable();
        want.sort_unstable();
        assert_eq!(got, want, "{cmd}");
    }
}

#[test]
fn ladder_reports_decrease() {
    let v = json(&["tv", "--ladder", "1e3,1e4,1e5"]);
    assert_eq!(v["strictly_decreasing"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn out_dir_from_flag_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let out = omega(&["count", "--n", "10", "--out-dir", path]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(dir.path().join("count.txt")).unwrap().trim(), "9");

    let env_dir = dir.path().join("env");
    let out = Command::new(env!("CARGO_BIN_EXE_omega"))
        .args(["histogram", "--n", "10"])
        .env("OMEGA_OUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(env_dir.join("histogram.csv")).unwrap();
    assert!(csv.starts_with("k,count_omega,count_little_omega,w,gauss\n"));
}

#[test]
fn verify_passes_every_criterion() {
    let out = omega(&["verify"]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 13);
}
