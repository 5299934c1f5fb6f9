//! Verification and lifting tool for projective ray maps.
//!
//! Exit codes: 0 success/pass, 1 mathematical hypothesis violated,
//! 2 input/usage error, 3 numeric indeterminacy. Never anything else.

mod format;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use num_complex::Complex64;

use format::{matrix_to_pairs, pairs_to_matrix, InputError, RayMapFile, ReportFile, WitnessFile};
use raylift::maps::condition_number;
use raylift::testkit::gaussian_matrix;
use raylift::{
    check_collineation, check_quasi_unitary, classify, haar_unitary, lift_collineation,
    lift_symmetry, verify_compatibility, Error, FieldTag, RayMap, Seed, SemiUnitary, Sigma,
    SymmetryKind, VerificationReport, Witness,
};

const EXIT_PASS: u8 = 0;
const EXIT_HYPOTHESIS: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "raylift",
    about = "Verify and lift projective ray maps: quasi-unitarity and collineation checks, \
             semi-linear and semi-unitary lifts, unitary/anti-unitary classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LiftMode {
    Wigner,
    Artin,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Unitary,
    Antiunitary,
    Invertible,
}

#[derive(Subcommand)]
enum Command {
    /// Check quasi-unitarity and (dim >= 3) the collineation property.
    Check {
        /// Ray-map file, or "-" for stdin.
        input: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lift a ray map to a compatible operator.
    Lift {
        input: String,
        #[arg(long)]
        mode: LiftMode,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a ray map as unitary or antiunitary from four probes.
    Classify {
        input: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a deterministic ray-map file.
    Gen {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        kind: GenKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify that a lifted operator is compatible with a ray map.
    Verify {
        input: String,
        /// Report file produced by `lift`, containing matrix and sigma.
        operator: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check {
            input,
            tol,
            trials,
            seed,
            out,
        } => cmd_check(&input, tol, trials, seed, out.as_deref()),
        Command::Lift {
            input,
            mode,
            tol,
            trials,
            seed,
            out,
        } => cmd_lift(&input, mode, tol, trials, seed, out.as_deref()),
        Command::Classify { input, tol, out } => cmd_classify(&input, tol, out.as_deref()),
        Command::Gen {
            dim,
            kind,
            seed,
            out,
        } => cmd_gen(dim, kind, seed, out.as_deref()),
        Command::Verify {
            input,
            operator,
            tol,
            trials,
            seed,
            out,
        } => cmd_verify(&input, &operator, tol, trials, seed, out.as_deref()),
    };
    ExitCode::from(code)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::NotQuasiUnitary { .. }
        | Error::NotACollineation { .. }
        | Error::ImageNotOrthonormal { .. }
        | Error::CoefficientMagnitudeViolation { .. }
        | Error::CompatibilityFailure { .. } => EXIT_HYPOTHESIS,
        Error::AutomorphismUndetermined { .. } | Error::IllConditioned { .. } => EXIT_NUMERIC,
        _ => EXIT_INPUT,
    }
}

fn error_witness(err: &Error) -> Option<WitnessFile> {
    let witness: &Witness = match err {
        Error::NotQuasiUnitary { witness }
        | Error::NotACollineation { witness }
        | Error::CoefficientMagnitudeViolation { witness }
        | Error::CompatibilityFailure { witness } => witness,
        _ => return None,
    };
    Some(witness.into())
}

fn read_document(path: &str) -> Result<String, InputError> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| InputError(format!("stdin: {e}")))?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|e| InputError(format!("{path}: {e}")))
    }
}

fn load_ray_map(path: &str) -> Result<(RayMap, FieldTag), InputError> {
    let text = read_document(path)?;
    let file: RayMapFile =
        serde_json::from_str(&text).map_err(|e| InputError(format!("{path}: {e}")))?;
    let field = file.field_tag()?;
    Ok((file.to_ray_map()?, field))
}

fn emit(report: &ReportFile, out: Option<&std::path::Path>) -> u8 {
    let text = serde_json::to_string_pretty(report).expect("report serialization cannot fail");
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_INPUT;
            }
            EXIT_PASS
        }
        None => {
            println!("{text}");
            EXIT_PASS
        }
    }
}

fn input_failure(err: &InputError) -> u8 {
    eprintln!("error: {err}");
    EXIT_INPUT
}

/// Emits a fail report for hypothesis/numeric errors, a bare message for
/// input errors, and returns the mapped exit code.
fn lift_failure(
    command: &str,
    err: &Error,
    tol: f64,
    trials: u64,
    seed: u64,
    out: Option<&std::path::Path>,
) -> u8 {
    let code = exit_code_for(err);
    if code == EXIT_INPUT {
        eprintln!("error: {err}");
        return code;
    }
    eprintln!("error: {err}");
    let witness = error_witness(err).unwrap_or_else(|| WitnessFile {
        context: err.to_string(),
        expected: 0.0,
        observed: 0.0,
    });
    let report = ReportFile {
        command: command.to_string(),
        verdict: "fail".to_string(),
        kind: None,
        worst_residual: (witness.observed - witness.expected).abs(),
        witness: Some(witness),
        seed,
        tol,
        trials,
        matrix: None,
        sigma: None,
    };
    let io_code = emit(&report, out);
    if io_code != EXIT_PASS {
        return io_code;
    }
    code
}

fn cmd_check(input: &str, tol: f64, trials: u64, seed: u64, out: Option<&std::path::Path>) -> u8 {
    let (map, _field) = match load_ray_map(input) {
        Ok(v) => v,
        Err(e) => return input_failure(&e),
    };
    let quasi = match check_quasi_unitary(&map, trials, tol, Seed(seed)) {
        Ok(r) => r,
        Err(e) => return lift_failure("check", &e, tol, trials, seed, out),
    };
    // Line preservation needs dim >= 3 and a samplable map.
    let line = if map.dim() >= 3 && !matches!(map, RayMap::Tabulated(_)) {
        match check_collineation(&map, trials, tol, Seed(seed)) {
            Ok(r) => Some(r),
            Err(e) => return lift_failure("check", &e, tol, trials, seed, out),
        }
    } else {
        None
    };

    let reports: Vec<&VerificationReport> = std::iter::once(&quasi).chain(line.as_ref()).collect();
    let pass = reports.iter().all(|r| r.pass);
    let worst = reports.iter().map(|r| r.worst_residual).fold(0.0, f64::max);
    let witness = reports
        .iter()
        .find(|r| !r.pass)
        .and_then(|r| r.witness.as_ref())
        .map(WitnessFile::from);
    let total_trials = reports.iter().map(|r| r.trials).sum();

    let report = ReportFile {
        command: "check".to_string(),
        verdict: if pass { "pass" } else { "fail" }.to_string(),
        kind: None,
        worst_residual: worst,
        witness,
        seed,
        tol,
        trials: total_trials,
        matrix: None,
        sigma: None,
    };
    let io_code = emit(&report, out);
    if io_code != EXIT_PASS {
        return io_code;
    }
    if pass {
        EXIT_PASS
    } else {
        EXIT_HYPOTHESIS
    }
}

fn sigma_name(sigma: Sigma) -> &'static str {
    match sigma {
        Sigma::Identity => "identity",
        Sigma::Conjugation => "conjugation",
    }
}

/// Canonical phase gauge for report matrices: the largest-magnitude entry
/// of the first column becomes real and nonnegative.
fn gauge_matrix(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut best = 0;
    let mut best_mag = m[(0, 0)].norm();
    for i in 1..m.nrows() {
        if m[(i, 0)].norm() > best_mag {
            best = i;
            best_mag = m[(i, 0)].norm();
        }
    }
    let pivot = m[(best, 0)];
    if pivot.norm() > 0.0 {
        m * (pivot / Complex64::new(pivot.norm(), 0.0)).conj()
    } else {
        m.clone()
    }
}

fn cmd_lift(
    input: &str,
    mode: LiftMode,
    tol: f64,
    trials: u64,
    seed: u64,
    out: Option<&std::path::Path>,
) -> u8 {
    let (map, field) = match load_ray_map(input) {
        Ok(v) => v,
        Err(e) => return input_failure(&e),
    };
    let report = match mode {
        LiftMode::Wigner => match lift_symmetry(&map, field, tol, trials, Seed(seed)) {
            Ok((operator, cert)) => ReportFile {
                command: "lift".to_string(),
                verdict: "pass".to_string(),
                kind: Some(cert.kind.to_string()),
                worst_residual: cert
                    .quasi_unitarity
                    .worst_residual
                    .max(cert.compatibility.worst_residual),
                witness: None,
                seed,
                tol,
                trials: cert.quasi_unitarity.trials + cert.compatibility.trials,
                matrix: Some(matrix_to_pairs(operator.matrix())),
                sigma: Some(sigma_name(cert.kind.sigma()).to_string()),
            },
            Err(e) => return lift_failure("lift", &e, tol, trials, seed, out),
        },
        LiftMode::Artin => match lift_collineation(&map, field, tol, trials, Seed(seed)) {
            Ok((semi_linear, diag)) => ReportFile {
                command: "lift".to_string(),
                verdict: "pass".to_string(),
                kind: None,
                worst_residual: diag.verification.worst_residual,
                witness: None,
                seed,
                tol,
                trials: diag.verification.trials,
                matrix: Some(matrix_to_pairs(&gauge_matrix(semi_linear.matrix()))),
                sigma: Some(sigma_name(semi_linear.sigma()).to_string()),
            },
            Err(e) => return lift_failure("lift", &e, tol, trials, seed, out),
        },
    };
    emit(&report, out)
}

fn cmd_classify(input: &str, tol: f64, out: Option<&std::path::Path>) -> u8 {
    let (map, field) = match load_ray_map(input) {
        Ok(v) => v,
        Err(e) => return input_failure(&e),
    };
    match classify(&map, field, tol) {
        Ok(kind) => {
            let report = ReportFile {
                command: "classify".to_string(),
                verdict: "pass".to_string(),
                kind: Some(kind.to_string()),
                worst_residual: 0.0,
                witness: None,
                seed: 0,
                tol,
                trials: 0,
                matrix: None,
                sigma: Some(sigma_name(kind.sigma()).to_string()),
            };
            emit(&report, out)
        }
        Err(e) => lift_failure("classify", &e, tol, 0, 0, out),
    }
}

fn cmd_gen(dim: usize, kind: GenKind, seed: u64, out: Option<&std::path::Path>) -> u8 {
    if dim < 2 {
        eprintln!("error: --dim must be >= 2, got {dim}");
        return EXIT_INPUT;
    }
    let file = match kind {
        GenKind::Unitary => RayMapFile::from_matrix(&haar_unitary(dim, Seed(seed)), false),
        GenKind::Antiunitary => RayMapFile::from_matrix(&haar_unitary(dim, Seed(seed)), true),
        GenKind::Invertible => {
            let mut rng = Seed(seed).rng();
            let m = loop {
                let candidate = gaussian_matrix(dim, &mut rng);
                if condition_number(&candidate) <= 1e12 {
                    break candidate;
                }
            };
            RayMapFile::from_matrix(&m, false)
        }
    };
    let text = serde_json::to_string_pretty(&file).expect("map serialization cannot fail");
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => println!("{text}"),
    }
    EXIT_PASS
}

fn load_operator(path: &str) -> Result<SemiUnitary, InputError> {
    let text = read_document(path)?;
    let report: ReportFile =
        serde_json::from_str(&text).map_err(|e| InputError(format!("{path}: {e}")))?;
    let pairs = report
        .matrix
        .ok_or_else(|| InputError(format!("{path}: field \"matrix\" is missing")))?;
    let matrix = pairs_to_matrix(&pairs)?;
    let kind = match report.sigma.as_deref() {
        Some("identity") => SymmetryKind::Unitary,
        Some("conjugation") => SymmetryKind::Antiunitary,
        Some(other) => {
            return Err(InputError(format!(
                "{path}: field \"sigma\" must be \"identity\" or \"conjugation\", got \"{other}\""
            )))
        }
        None => {
            return Err(InputError(format!("{path}: field \"sigma\" is missing")));
        }
    };
    SemiUnitary::new(matrix, kind).map_err(|e| InputError(format!("{path}: field \"matrix\": {e}")))
}

fn cmd_verify(
    input: &str,
    operator: &str,
    tol: f64,
    trials: u64,
    seed: u64,
    out: Option<&std::path::Path>,
) -> u8 {
    let (map, _field) = match load_ray_map(input) {
        Ok(v) => v,
        Err(e) => return input_failure(&e),
    };
    let semi_unitary = match load_operator(operator) {
        Ok(u) => u,
        Err(e) => return input_failure(&e),
    };
    let report = match verify_compatibility(&map, &semi_unitary, trials, tol, Seed(seed)) {
        Ok(r) => r,
        Err(e) => return lift_failure("verify", &e, tol, trials, seed, out),
    };
    let file = ReportFile {
        command: "verify".to_string(),
        verdict: if report.pass { "pass" } else { "fail" }.to_string(),
        kind: Some(semi_unitary.kind().to_string()),
        worst_residual: report.worst_residual,
        witness: report.witness.as_ref().map(WitnessFile::from),
        seed,
        tol,
        trials: report.trials,
        matrix: None,
        sigma: Some(sigma_name(semi_unitary.kind().sigma()).to_string()),
    };
    let io_code = emit(&file, out);
    if io_code != EXIT_PASS {
        return io_code;
    }
    if report.pass {
        EXIT_PASS
    } else {
        EXIT_HYPOTHESIS
    }
}
