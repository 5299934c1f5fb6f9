//! Acceptance gate, tool-facing half: perturbation rejection through the
//! binary (criterion 8) and the deterministic pipeline (criterion 9). The
//! library-facing criteria live in the core crate's acceptance suite.

use std::path::Path;
use std::process::{Command, Output};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use raylift::testkit::gaussian_matrix;
use raylift::{haar_unitary, Seed};

fn raylift_cmd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_raylift"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn matrix_json(m: &DMatrix<Complex64>) -> Value {
    let entries: Vec<Value> = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| json!([m[(i, j)].re, m[(i, j)].im]))
        .collect();
    json!({"kind": "matrix", "matrix": entries})
}

#[test]
fn criterion_8_cli_rejects_perturbed_unitaries() {
    let dir = tempfile::tempdir().unwrap();
    let n = 4;
    let eps = 1e-2;
    let runs = 100;
    let mut rejected = 0;
    for run in 0..runs {
        let seed = Seed(8000 + run);
        let u = haar_unitary(n, seed);
        let noise = gaussian_matrix(n, &mut seed.rng());
        let m = &u + noise * Complex64::new(eps, 0.0);
        let path = dir.path().join(format!("perturbed_{run}.json"));
        std::fs::write(&path, serde_json::to_string(&matrix_json(&m)).unwrap()).unwrap();
        let out = raylift_cmd(
            &[
                "lift",
                path.to_str().unwrap(),
                "--mode",
                "wigner",
                "--seed",
                "1",
            ],
            dir.path(),
        );
        let code = exit_code(&out);
        assert_ne!(code, 2, "run {run}: unexpected input error");
        if code == 1 || code == 3 {
            rejected += 1;
        }
    }
    assert!(
        rejected >= 95,
        "only {rejected}/{runs} perturbed maps rejected"
    );
    println!(
        "PASS criterion 8: cli rejected {rejected}/{runs} eps={eps} perturbed unitaries \
         with exit code 1 or 3"
    );
}

#[test]
fn criterion_9_pipeline_deterministic_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let run_pipeline = |kind: &str, tag: &str| -> (i32, Vec<u8>, Vec<u8>) {
        let map = dir.join(format!("map_{tag}.json"));
        let op = dir.join(format!("op_{tag}.json"));
        let gen = raylift_cmd(
            &[
                "gen",
                "--dim",
                "4",
                "--kind",
                kind,
                "--seed",
                "11",
                "--out",
                map.to_str().unwrap(),
            ],
            dir,
        );
        assert_eq!(exit_code(&gen), 0);
        let check = raylift_cmd(&["check", map.to_str().unwrap(), "--seed", "12"], dir);
        let check_code = exit_code(&check);
        let lift = raylift_cmd(
            &[
                "lift",
                map.to_str().unwrap(),
                "--mode",
                "wigner",
                "--seed",
                "13",
                "--out",
                op.to_str().unwrap(),
            ],
            dir,
        );
        assert_eq!(
            exit_code(&lift),
            0,
            "{}",
            String::from_utf8_lossy(&lift.stderr)
        );
        let verify = raylift_cmd(
            &[
                "verify",
                map.to_str().unwrap(),
                op.to_str().unwrap(),
                "--seed",
                "14",
            ],
            dir,
        );
        assert_eq!(exit_code(&verify), 0);
        (
            check_code,
            std::fs::read(&map).unwrap(),
            std::fs::read(&op).unwrap(),
        )
    };

    for kind in ["unitary", "antiunitary"] {
        let (check_code, map_a, op_a) = run_pipeline(kind, &format!("{kind}_a"));
        assert_eq!(check_code, 0, "{kind}: check should pass");
        let (_, map_b, op_b) = run_pipeline(kind, &format!("{kind}_b"));
        assert_eq!(map_a, map_b, "{kind}: gen output not byte-identical");
        assert_eq!(op_a, op_b, "{kind}: lift report not byte-identical");
        let report: Value = serde_json::from_slice(&op_a).unwrap();
        let expected_kind = if kind == "unitary" {
            "unitary"
        } else {
            "antiunitary"
        };
        assert_eq!(report["kind"], expected_kind);
    }

    // A merely invertible map is flagged by check (exit 1) but still admits
    // the semi-linear lift.
    let map = dir.join("map_inv.json");
    let gen = raylift_cmd(
        &[
            "gen",
            "--dim",
            "4",
            "--kind",
            "invertible",
            "--seed",
            "11",
            "--out",
            map.to_str().unwrap(),
        ],
        dir,
    );
    assert_eq!(exit_code(&gen), 0);
    let check = raylift_cmd(&["check", map.to_str().unwrap(), "--seed", "12"], dir);
    assert_eq!(
        exit_code(&check),
        1,
        "invertible map should fail quasi-unitarity"
    );
    let wigner = raylift_cmd(&["lift", map.to_str().unwrap(), "--mode", "wigner"], dir);
    assert_eq!(exit_code(&wigner), 1);
    let artin = raylift_cmd(
        &[
            "lift",
            map.to_str().unwrap(),
            "--mode",
            "artin",
            "--seed",
            "13",
        ],
        dir,
    );
    assert_eq!(
        exit_code(&artin),
        0,
        "{}",
        String::from_utf8_lossy(&artin.stderr)
    );

    println!(
        "PASS criterion 9: gen/check/lift/verify pipeline deterministic for unitary and \
         antiunitary, invertible flagged at check and lifted by artin"
    );
}
