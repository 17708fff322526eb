//! End-to-end tests of the `dixie` binary: output formats, determinism,
//! and exit codes.

use std::process::{Command, Output};

fn dixie(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dixie"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

/// Strip the one run-dependent field from a JSON envelope.
fn strip_elapsed(s: &str) -> String {
    s.lines()
        .filter(|l| !l.trim_start().starts_with("\"elapsed_ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn moments_json_envelope() {
    let out = dixie(&["moments", "--n", "3", "--m", "2", "--uniform", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(v["command"], "moments");
    assert_eq!(v["parameters"]["n"], 3);
    assert_eq!(v["parameters"]["m"], 2);
    assert_eq!(v["parameters"]["model"], "uniform");
    assert_eq!(v["tool_version"], env!("CARGO_PKG_VERSION"));
    let mean = v["results"]["mean"].as_f64().expect("mean");
    assert!((mean - 9.638_888_888_888_89).abs() < 1e-12);
    let var_t = v["results"]["var_t"].as_f64().expect("var_t");
    let var_x = v["results"]["var_x"].as_f64().expect("var_x");
    assert!((var_x - mean - var_t).abs() < 1e-9);
    assert!(v["elapsed_ms"].is_number());
}

#[test]
fn reports_are_deterministic_modulo_elapsed() {
    let args = [
        "simulate", "--p", "0.6,0.4", "--m", "2", "--mode", "discrete", "--trials",
        "5000", "--seed", "42", "--json",
    ];
    let first = dixie(&args);
    let second = dixie(&args);
    assert!(first.status.success() && second.status.success());
    assert_eq!(
        strip_elapsed(&stdout(&first)),
        strip_elapsed(&stdout(&second)),
        "same command and seed must reproduce the report byte for byte"
    );
}

#[test]
fn thread_cap_does_not_change_results() {
    let base = [
        "simulate", "--n", "5", "--uniform", "--m", "2", "--mode", "poissonized",
        "--trials", "4000", "--seed", "9", "--json",
    ];
    let threaded: Vec<&str> = base
        .iter()
        .copied()
        .chain(["--threads", "1"])
        .collect();
    let a = dixie(&base);
    let b = dixie(&threaded);
    assert!(a.status.success() && b.status.success());
    assert_eq!(strip_elapsed(&stdout(&a)), strip_elapsed(&stdout(&b)));
}

#[test]
fn centering_text_table() {
    let out = dixie(&["centering", "--n", "1000", "--m", "1", "--count", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("n a^2 / b"));
    assert_eq!(text.lines().count(), 3, "header plus two decade rows");
    // b solves 1000 e^-b = 1, so b = ln 1000 and a = 1 for m = 1.
    assert!(text.contains("6.9077552789"));
}

#[test]
fn gumbel_csv_table() {
    let out = dixie(&[
        "gumbel", "--n", "1000", "--m", "1", "--x-min", "0", "--x-max", "1",
        "--x-step", "0.5", "--csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,exact,gumbel"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn radial_csv_table() {
    let out = dixie(&[
        "radial", "--h", "1,-1", "--m", "1", "--theta-max", "0.1", "--steps", "4",
        "--csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("theta,var_t,abs_err\n"));
    // Two equal coupons at theta = 0: Var T = 2 exactly.
    assert!(text.lines().nth(1).expect("first row").starts_with("0,2,"));
}

#[test]
fn csv_rejected_for_unsupported_commands() {
    let out = dixie(&["moments", "--n", "3", "--uniform", "--csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    // Unknown flag (handled by the argument parser).
    let out = dixie(&["moments", "--does-not-exist"]);
    assert_eq!(out.status.code(), Some(2));
    // Contradictory model specification.
    let out = dixie(&["moments", "--n", "3", "--uniform", "--p", "0.5,0.5"]);
    assert_eq!(out.status.code(), Some(2));
    // Probabilities failing the 1e-6 normalization gate.
    let out = dixie(&["moments", "--p", "0.5,0.3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_convergence_exits_3_with_payload() {
    let out = dixie(&[
        "case1", "--family", "linear", "--m", "1", "--bign-list", "20",
        "--truncation-j", "60",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).expect("utf-8 stderr");
    let payload_line = err
        .lines()
        .find(|l| l.trim_start().starts_with('{'))
        .expect("diagnostic JSON line");
    let v: serde_json::Value = serde_json::from_str(payload_line).expect("valid JSON");
    assert_eq!(v["kind"], "truncation-insufficient");
    assert!(v["bound"].as_f64().expect("bound") > 1e-10);
}

#[test]
fn verify_all_quick_reports_every_criterion() {
    let out = dixie(&["verify-all", "--quick"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("criterion "))
        .collect();
    assert_eq!(lines.len(), 12, "one line per criterion:\n{text}");
    let all_passed = lines.iter().all(|l| l.contains(" PASS "));
    let expected = if all_passed { Some(0) } else { Some(1) };
    assert_eq!(
        out.status.code(),
        expected,
        "exit code must reflect the printed verdicts"
    );
    assert!(text.contains("criteria passed"));
}
