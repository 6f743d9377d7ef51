use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn ucs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ucs"))
        .args(args)
        .output()
        .unwrap()
}

fn ucs_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ucs"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn fixture(name: &str, body: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn enumerate_two_elements_streams_every_union_closed_family() {
    let o = ucs(&["enumerate", "--m", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 14);
    for l in lines {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        assert_eq!(v["universe_size"], 2);
    }
    assert_eq!(stdout(&ucs(&["enumerate", "--m", "2"])).lines().count(), 14);
}

#[test]
fn enumerate_over_capacity_is_a_precondition_error() {
    let o = ucs(&["enumerate", "--m", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("m <= 4"));
}

#[test]
fn verify_exhaustive_three_is_clean() {
    let o = ucs(&[
        "verify",
        "--source",
        "exhaustive",
        "--m",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["separating_count"], 78);
    assert_eq!(r["frankl_violations"].as_array().unwrap().len(), 0);
}

#[test]
fn verify_flags_rejected_input_with_exit_three() {
    let path = fixture("verify_bad.txt", "0\n1\n");
    let o = ucs(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("FAILURES FOUND"));
}

#[test]
fn random_is_byte_identical_across_runs() {
    let args = [
        "random", "--m", "16", "--seed", "42", "--count", "5", "--format", "json",
    ];
    let a = ucs(&args);
    let b = ucs(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 5);
    let c = ucs(&[
        "random", "--m", "16", "--seed", "43", "--count", "5", "--format", "json",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn bounds_at_thirteen() {
    let o = ucs(&["bounds", "--m", "13", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let t = json(&o)["closed_form_threshold"].as_f64().unwrap();
    assert!((t - 40.34).abs() < 0.01, "{t}");
    assert!(stdout(&ucs(&["bounds", "--m", "13"])).contains("closed-form threshold = 40.34"));
}

#[test]
fn bounds_verdict_for_theorem_regime() {
    let o = ucs(&["bounds", "--m", "100", "--n", "250", "--format", "json"]);
    assert_eq!(json(&o)["verdict"], "covered-by-theorem");
    let o = ucs(&["bounds", "--m", "100", "--n", "252", "--format", "json"]);
    assert_eq!(json(&o)["verdict"], "not-covered");
}

#[test]
fn bounds_rejects_m_one() {
    let o = ucs(&["bounds", "--m", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("domain error"));
}

#[test]
fn audit_on_pair_family() {
    let path = fixture("pair.txt", "0\n1\n0,1\n");
    let o = ucs(&[
        "witness",
        "--which",
        "audit",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let a = json(&o);
    assert_eq!(a["rhs"], 4);
    assert_eq!(a["n"], 3);
    assert_eq!(a["inequality_holds"], true);
    let text = stdout(&ucs(&[
        "witness",
        "--which",
        "audit",
        path.to_str().unwrap(),
    ]));
    assert!(text.contains("inequality holds"));
}

#[test]
fn chain_witness_on_chain_family() {
    let o = ucs_stdin(
        &["witness", "--which", "chain", "-", "--format", "json"],
        "0\n0 1\n0 1 2\n",
    );
    assert_eq!(o.status.code(), Some(0));
    let c = json(&o);
    assert_eq!(c["order"], serde_json::json!([2, 1, 0]));
    assert_eq!(c["chain"], serde_json::json!([[0, 1, 2], [0, 1], [0]]));
}

#[test]
fn analyze_chain_family_reports_full_frequency_witness() {
    let o = ucs_stdin(&["analyze", "-", "--format", "json"], "0\n0 1\n0 1 2\n");
    assert_eq!(o.status.code(), Some(0));
    let a = json(&o);
    assert_eq!(a["m"], 3);
    assert_eq!(a["n"], 3);
    assert_eq!(a["frequencies"], serde_json::json!([3, 2, 1]));
    assert_eq!(a["frankl_witnesses"], serde_json::json!([0, 1]));
    assert_eq!(a["verdict"], "covered-by-small-m");
}

#[test]
fn analyze_warns_on_duplicates() {
    let o = ucs_stdin(&["analyze", "-"], "0\n0 1\n0\n");
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning: line 3"));
    assert!(stdout(&o).contains("n = 2"));
}

#[test]
fn analyze_empty_input() {
    let o = ucs_stdin(&["analyze", "-"], "# nothing\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty family"));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let o = ucs_stdin(&["analyze", "-"], "0\n1 x\n");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"));
    let o = ucs(&["analyze", "/nonexistent/family.txt"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn witness_preconditions_name_the_problem() {
    let o = ucs_stdin(&["witness", "-"], "0 1\n0 1 2\n");
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("elements 0 and 1"), "{e}");
    assert!(e.contains("quotient"));
    let o = ucs_stdin(&["witness", "--which", "transversal", "-"], "0\n1\n");
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("{0} ∪ {1}"), "{e}");
    assert!(e.contains("closure"));
}

#[test]
fn closure_and_quotient_repair_inputs() {
    let o = ucs_stdin(&["closure", "-"], "0\n1\n");
    assert_eq!(stdout(&o), "0\n1\n0 1\n");
    let o = ucs_stdin(&["quotient", "-", "--format", "json"], "0 1\n0 1 2\n");
    assert_eq!(
        stdout(&o).trim(),
        r#"{"universe_size":2,"members":[[0],[0,1]]}"#
    );
    let repaired = ucs_stdin(&["witness", "-"], &stdout(&o));
    assert_eq!(repaired.status.code(), Some(0));
}

#[test]
fn json_family_input_round_trips() {
    let o = ucs_stdin(
        &["closure", "-", "--format", "json"],
        r#"{"universe_size":3,"members":[[0],[1,2]]}"#,
    );
    assert_eq!(
        stdout(&o).trim(),
        r#"{"universe_size":3,"members":[[0],[1,2],[0,1,2]]}"#
    );
}
