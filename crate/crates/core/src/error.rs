use num_complex::Complex64;
use thiserror::Error;

/// Errors surfaced by the solver pipeline.
#[derive(Debug, Error)]
pub enum UtmError {
    #[error("degenerate eigenvalue at k = {k}: |{omega_a} - {omega_b}| below collision tolerance")]
    DegenerateEigenvalue {
        k: Complex64,
        omega_a: Complex64,
        omega_b: Complex64,
    },

    #[error("root finder failed to converge after {iterations} iterations")]
    RootFinderDiverged { iterations: usize },

    #[error("discriminant is identically zero: dispersion branches coincide everywhere")]
    DegenerateDiscriminant,

    #[error("symmetry tracking ambiguity near k = {k}: two root candidates collide")]
    SymmetryTrackingAmbiguity { k: Complex64 },

    #[error("branch continuation ambiguity near k = {k}")]
    ContinuationAmbiguity { k: Complex64 },

    #[error("asymptotic branch behaviors are indistinct along the given direction (branches {a} and {b})")]
    IndistinctAsymptotics { a: usize, b: usize },

    #[error("half-line transform diverges: Im k = {im_k} exceeds the decay rate {decay}")]
    TransformDivergent { im_k: f64, decay: f64 },

    #[error("integrand fails the decay test at truncation radius {radius}")]
    NonDecayingTail { radius: f64 },

    #[error("contour topology detection failed: {0}")]
    ContourTopology(String),

    #[error("detour radius must be positive (got {0})")]
    InvalidDetourRadius(f64),

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("singular elimination system at k = {k}")]
    SingularElimination { k: Complex64 },

    #[error("boundary specification mismatch: problem requires {required} condition(s), got {supplied}")]
    BoundaryCountMismatch { required: usize, supplied: usize },

    #[error("finite-difference solver instability: norm grew to {norm:.3e} at step {step}")]
    FdInstability { norm: f64, step: usize },

    #[error("grid too coarse: need at least {needed} points per axis, got {got}")]
    GridTooCoarse { needed: usize, got: usize },

    #[error("invalid problem data: {0}")]
    InvalidData(String),
}

pub type Result<T> = std::result::Result<T, UtmError>;
