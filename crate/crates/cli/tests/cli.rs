//! End-to-end exercises of the binary's contract: exit codes, report
//! content, and input validation.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn raylift(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_raylift"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_json(dir: &Path, name: &str, value: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

fn identity_file(dir: &Path, conjugate: bool) -> String {
    write_json(
        dir,
        if conjugate { "conj.json" } else { "id.json" },
        &json!({
            "kind": "matrix",
            "matrix": [[1,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[1,0]],
            "conjugate": conjugate,
        }),
    )
}

#[test]
fn identity_passes_everything() {
    let dir = tempfile::tempdir().unwrap();
    let input = identity_file(dir.path(), false);
    let out = raylift(&["check", &input], dir.path());
    assert_eq!(
        exit_code(&out),
        0,
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = stdout_json(&out);
    assert_eq!(report["verdict"], "pass");
    assert_eq!(report["command"], "check");

    let out = raylift(&["classify", &input], dir.path());
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_json(&out)["kind"], "unitary");
}

#[test]
fn conjugation_classifies_antiunitary() {
    let dir = tempfile::tempdir().unwrap();
    let input = identity_file(dir.path(), true);
    let out = raylift(&["classify", &input], dir.path());
    assert_eq!(exit_code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["kind"], "antiunitary");
    assert_eq!(report["sigma"], "conjugation");

    let out = raylift(&["lift", &input, "--mode", "wigner"], dir.path());
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_json(&out)["kind"], "antiunitary");
}

#[test]
fn diag_1_2_check_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_json(
        dir.path(),
        "diag.json",
        &json!({
            "kind": "matrix",
            "matrix": [[1,0],[0,0],[0,0],[2,0]],
        }),
    );
    let out = raylift(&["check", &input], dir.path());
    assert_eq!(exit_code(&out), 1);
    let report = stdout_json(&out);
    assert_eq!(report["verdict"], "fail");
    assert!(report["witness"].is_object(), "witness missing: {report}");
    assert!(report["worst_residual"].as_f64().unwrap() > 1e-8);
}

#[test]
fn non_square_matrix_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_json(
        dir.path(),
        "bad.json",
        &json!({"kind": "matrix", "matrix": [[1,0],[0,0],[0,0]]}),
    );
    let out = raylift(&["check", &input], dir.path());
    assert_eq!(exit_code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("matrix"), "stderr: {stderr}");
}

#[test]
fn non_finite_entry_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"kind":"matrix","matrix":[[1,0],[0,0],[0,0],[1e999,0]]}"#;
    let path = dir.path().join("inf.json");
    std::fs::write(&path, text).unwrap();
    let out = raylift(&["check", path.to_str().unwrap()], dir.path());
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn unknown_field_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_json(
        dir.path(),
        "extra.json",
        &json!({"kind": "matrix", "matrix": [[1,0],[0,0],[0,0],[1,0]], "bogus": 1}),
    );
    let out = raylift(&["check", &input], dir.path());
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn tabulated_missing_probe_names_it() {
    // Basis probes and the real-sum probe only: [e1+i*e2] is absent, so
    // classification cannot proceed and the message must say which probe.
    let dir = tempfile::tempdir().unwrap();
    let s = 0.5f64.sqrt();
    let input = write_json(
        dir.path(),
        "partial.json",
        &json!({
            "kind": "tabulated",
            "dim": 2,
            "pairs": [
                {"in": [[1,0],[0,0]], "out": [[1,0],[0,0]]},
                {"in": [[0,0],[1,0]], "out": [[0,0],[1,0]]},
                {"in": [[s,0],[s,0]], "out": [[s,0],[s,0]]},
            ],
        }),
    );
    let out = raylift(&["classify", &input], dir.path());
    assert_eq!(exit_code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("e1+i*e2"), "stderr: {stderr}");
}

#[test]
fn stdin_input_works() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"kind":"matrix","matrix":[[1,0],[0,0],[0,0],[1,0]]}"#;
    let mut child = Command::new(env!("CARGO_BIN_EXE_raylift"))
        .args(["check", "-"])
        .current_dir(dir.path())
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child
        .stdin
        .take()
        .unwrap()
        .write_all(text.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn unknown_flag_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = raylift(&["check", "x.json", "--frobnicate"], dir.path());
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn gen_output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["unitary", "antiunitary", "invertible"] {
        let a = raylift(
            &["gen", "--dim", "5", "--kind", kind, "--seed", "42"],
            dir.path(),
        );
        let b = raylift(
            &["gen", "--dim", "5", "--kind", kind, "--seed", "42"],
            dir.path(),
        );
        assert_eq!(exit_code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "kind {kind} not deterministic");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn verify_rejects_operator_without_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let input = identity_file(dir.path(), false);
    let operator = write_json(
        dir.path(),
        "op.json",
        &json!({
            "command": "lift", "verdict": "pass", "worst_residual": 0.0,
            "seed": 0, "tol": 1e-8, "trials": 0,
            "matrix": [[1,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[1,0]],
        }),
    );
    let out = raylift(&["verify", &input, &operator], dir.path());
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma"));
}

#[test]
fn verify_detects_wrong_operator() {
    // The identity map against a genuinely different unitary: compatibility
    // must fail with exit 1, not an input error.
    let dir = tempfile::tempdir().unwrap();
    let input = identity_file(dir.path(), false);
    let c = 0.6f64;
    let s = 0.8f64;
    let operator = write_json(
        dir.path(),
        "rot.json",
        &json!({
            "command": "lift", "verdict": "pass", "worst_residual": 0.0,
            "seed": 0, "tol": 1e-8, "trials": 0, "sigma": "identity",
            "matrix": [[c,0],[-s,0],[0,0],[s,0],[c,0],[0,0],[0,0],[0,0],[1,0]],
        }),
    );
    let out = raylift(&["verify", &input, &operator], dir.path());
    assert_eq!(exit_code(&out), 1);
    assert_eq!(stdout_json(&out)["verdict"], "fail");
}
