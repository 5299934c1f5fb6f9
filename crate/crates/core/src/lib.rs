//! Finite-dimensional projective geometry over ℝ/ℂ with constructive
//! lifts: rays, transition probabilities and collineation checks, the
//! semi-linear lift of a collineation, and the semi-unitary lift and
//! classification of a transition-probability-preserving ray map.

pub mod artin;
pub mod error;
pub mod maps;
pub mod projective;
pub mod testkit;
pub mod wigner;

pub use artin::{
    apply_semilinear, lift_collineation, scalar_align, LiftDiagnostics, SemiLinearMap, Sigma,
};
pub use error::{Error, Result, Witness};
pub use maps::{
    check_collineation, check_quasi_unitary, probe_images, MatrixMap, OracleMap, ProbeSet, RayMap,
    TabulatedMap, VerificationReport,
};
pub use projective::{
    collinear, contains, is_projective_frame, join, projectively_independent, rays_equal,
    transition_probability, FieldTag, ProjectiveFrame, ProjectiveSubspace, Ray, StateVector, C64,
};
pub use testkit::{gram_probabilities, haar_unitary, perturb_ray_map, random_ray, Seed};
pub use wigner::{
    classify, lift_symmetry, phase_align, verify_compatibility, SemiUnitary, SymmetryCertificate,
    SymmetryKind,
};
