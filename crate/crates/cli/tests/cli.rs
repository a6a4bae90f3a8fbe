use std::process::{Command, Output};

fn toroidal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toroidal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

#[test]
fn rank_below_family_minimum_is_a_config_error() {
    let out = toroidal(&["--family", "a-odd", "--n", "2"]);
    assert!(!out.status.success());
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("n >= 3"));
}

#[test]
fn bad_suite_and_energy_are_rejected_before_running() {
    for args in [
        &["--family", "d", "--n", "2", "--suites", "serre,bogus"][..],
        &["--family", "d", "--n", "2", "--fock-energy", "-1"][..],
        &["--family", "d", "--n", "2", "--fock-energy", "x"][..],
        &["--family", "d4-triality", "--n", "3"][..],
        &["--family", "d", "--n", "2", "--jobs", "0"][..],
    ] {
        let out = toroidal(args);
        assert!(!out.status.success(), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn d4_serre_run_contains_relation_12() {
    let out = toroidal(&["--family", "d4-triality", "--n", "2", "--suites", "serre"]);
    assert!(out.status.success());
    let v = json(&out);
    let suite = &v["suites"][0];
    assert_eq!(suite["name"], "serre");
    assert_eq!(suite["fail_count"], 0);
    let records = suite["records"].as_array().unwrap();
    assert!(records.iter().any(|r| r["id"] == "12"));
}

#[test]
fn reports_are_byte_identical_without_timings() {
    let args = [
        "--family",
        "a-even",
        "--n",
        "2",
        "--suites",
        "symbolic-mry,psi,axioms",
        "--mode-bound",
        "1",
        "--seed",
        "5",
        "--no-timings",
    ];
    let a = toroidal(&args);
    let b = toroidal(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["config"]["seed"], 5);
}

#[test]
fn text_format() {
    let out = toroidal(&[
        "--family",
        "d",
        "--n",
        "2",
        "--suites",
        "symbolic-mry",
        "--format",
        "text",
        "--jobs",
        "1",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("== symbolic-mry"));
    assert!(text.contains("all checks passed"));
}

#[test]
fn full_default_run_passes() {
    let out = toroidal(&["--family", "a-odd", "--n", "3", "--no-timings"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    let names: Vec<&str> = v["suites"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["symbolic-mry", "serre", "fock", "psi", "axioms"]);
}
