use num_complex::Complex64;
use thiserror::Error;

/// Witness for a failed numerical check: what was probed, what the
/// hypothesis demanded, and what was observed.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub context: String,
    pub expected: f64,
    pub observed: f64,
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: expected {:.17e}, observed {:.17e}",
            self.context, self.expected, self.observed
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("vector is numerically zero")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("join of equal rays is degenerate")]
    DegenerateJoin,

    #[error("at least {min} rays required, got {got}")]
    TooFewRays { min: usize, got: usize },

    #[error("projective frame in dimension {dim} must hold {expected} rays, got {got}")]
    WrongFrameSize {
        dim: usize,
        expected: usize,
        got: usize,
    },

    #[error("probes not tabulated: {}", missing.join(", "))]
    ProbeNotTabulated { missing: Vec<String> },

    #[error("two tabulated pairs share the input ray at indices {first} and {second}")]
    DuplicateTabulatedInput { first: usize, second: usize },

    #[error("dimension {got} too small, need at least {min}")]
    DimensionTooSmall { min: usize, got: usize },

    #[error("matrix condition number {cond:.3e} exceeds invertibility bound {limit:.1e}")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("map is not a collineation ({witness})")]
    NotACollineation { witness: Witness },

    #[error("field automorphism undetermined: mu = {mu} is near neither i nor -i")]
    AutomorphismUndetermined { mu: Complex64 },

    #[error("semi-linear maps carry different field automorphisms")]
    SigmaMismatch,

    #[error("map is not quasi-unitary ({witness})")]
    NotQuasiUnitary { witness: Witness },

    #[error("basis images are not orthonormal (worst overlap {residual:.3e})")]
    ImageNotOrthonormal { residual: f64 },

    #[error("superposition image coefficients violate the magnitude law ({witness})")]
    CoefficientMagnitudeViolation { witness: Witness },

    #[error("lifted operator is not compatible with the ray map ({witness})")]
    CompatibilityFailure { witness: Witness },

    #[error("operators have different kinds (unitary vs anti-unitary)")]
    KindMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
