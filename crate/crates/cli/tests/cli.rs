use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn trifill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trifill"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn file_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn measure_keeps_requested_order() {
    let out = trifill(&["measure", "--state", r#"{"named":"w3"}"#, "-m", "tangle", "fill", "g:BC", "--quiet"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let keys: Vec<usize> = ["\"tangle\"", "\"fill\"", "\"g:BC\""].iter().map(|k| text.find(k).unwrap()).collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
    let v = stdout_json(&out);
    assert!((v["fill"].as_f64().unwrap() - 8.0 / 9.0).abs() < 1e-12);
    assert!(out.stderr.is_empty());
}

#[test]
fn measure_reads_state_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("ghz.json");
    std::fs::write(&spec, r#"{"acin": {"l0": 0.7071067811865476, "l1": 0, "l2": 0, "l3": 0, "l4": 0.7071067811865476}}"#).unwrap();
    let out = trifill(&["measure", "--state", spec.to_str().unwrap(), "-m", "tangle", "--quiet"]);
    assert_eq!(code(&out), 0);
    assert!((stdout_json(&out)["tangle"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn malformed_inputs_exit_two() {
    let cases: [&[&str]; 6] = [
        &["measure", "--state", r#"{"amplitudes": [1.0, 0.0, 0.0]}"#, "-m", "fill"],
        &["measure", "--state", r#"{"named":"w3"}"#, "-m", "not_a_measure"],
        &["measure", "--state", "/nonexistent/state.json", "-m", "fill"],
        &["reproduce", "fill_everything"],
        &["search", "--measure", "fill", "--restarts", "0"],
        &["suite", "nonsense"],
    ];
    for args in cases {
        let out = trifill(args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn incomplete_povm_is_invalid_input() {
    let op = r#"[[1,0],[0,0],[0,0],[1,0]]"#;
    let povm = format!(r#"{{"operators": [{op}, {op}]}}"#);
    let out = trifill(&["gap", "--state", r#"{"named":"w3"}"#, "--povm", &povm, "--measure", "fill"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn tangle_gap_is_nonnegative_on_party_b() {
    let state = r#"{"acin": {"l1": 0, "l2": 0.1, "l3": 0.2, "l4": 0.6}}"#;
    let povm = r#"{"angles": {"varphi1": 0.3, "varphi2": 1.1, "psi1": 0.5, "psi2": -0.7}}"#;
    let out = trifill(&["gap", "--state", state, "--povm", povm, "--measure", "tangle", "--party", "B", "--quiet"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["party"], "B");
    assert_eq!(v["outcomes"].as_array().unwrap().len(), 2);
    assert!(v["gap"].as_f64().unwrap() >= -1e-12);
}

#[test]
fn reproduce_confirms_main_cases() {
    for case in ["fill_main", "g_bc"] {
        let out = trifill(&["reproduce", case, "--quiet"]);
        assert_eq!(code(&out), 0, "{case}");
        let v = stdout_json(&out);
        assert_eq!(v["confirmed"], true);
        let (lo, hi) = (v["window"][0].as_f64().unwrap(), v["window"][1].as_f64().unwrap());
        let gap = v["gap"].as_f64().unwrap();
        assert!(lo <= gap && gap <= hi, "{case}: {gap}");
    }
}

#[test]
fn reproduce_reports_unconfirmed_case_with_exit_one() {
    let out = trifill(&["reproduce", "fill_sqrt"]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["confirmed"], false);
    assert!(v["extended_gap"].as_f64().unwrap() > 0.0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("NOT confirmed"));
}

#[test]
fn search_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("fill.json");
    let out = trifill(&["search", "--measure", "fill", "--seed", "42", "--out", cert.to_str().unwrap(), "--quiet"]);
    assert_eq!(code(&out), 0);
    let c = file_json(&cert);
    assert_eq!(c["seed"], 42);
    assert!(c["claimed_gap"].as_f64().unwrap() < -1e-6);

    let out = trifill(&["verify", cert.to_str().unwrap(), "--quiet"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["accepted"], true);
    assert_eq!(v["claimed_gap"], c["claimed_gap"]);
    let extended = v["extended_gap"].as_f64().unwrap();
    assert!((extended - v["recomputed_gap"].as_f64().unwrap()).abs() < 1e-12);

    let tampered = dir.path().join("tampered.json");
    let mut t = c.clone();
    t["claimed_gap"] = serde_json::json!(c["claimed_gap"].as_f64().unwrap() - 1e-3);
    std::fs::write(&tampered, serde_json::to_string(&t).unwrap()).unwrap();
    let out = trifill(&["verify", tampered.to_str().unwrap(), "--quiet"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["accepted"], false);

    let truncated = dir.path().join("truncated.json");
    let text = std::fs::read_to_string(&cert).unwrap();
    std::fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&trifill(&["verify", truncated.to_str().unwrap()])), 2);
}

#[test]
fn search_without_violation_exits_one() {
    let out = trifill(&["search", "--measure", "tangle", "--restarts", "4", "--max-iters", "400", "--quiet"]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["violation"], false);
    assert_eq!(v["restarts"], 4);
}

#[test]
fn suite_runs_with_seed_and_sample_count() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("suite.json");
    let out = trifill(&["suite", "identities", "--samples", "300", "--seed", "7", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v = file_json(&path);
    assert_eq!(v["samples"], 300);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["passed"], true);
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&trifill(&["--help"])), 0);
    assert_eq!(code(&trifill(&[])), 2);
}
