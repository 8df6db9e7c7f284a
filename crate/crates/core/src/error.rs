use thiserror::Error;

use crate::basis::BasisKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("basis mismatch: expected {expected}, found {found}")]
    BasisMismatch { expected: BasisKind, found: BasisKind },

    #[error("{operation} is not defined on a {kind} basis")]
    UnsupportedBasis {
        operation: &'static str,
        kind: BasisKind,
    },

    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("inverse temperature must be finite and non-negative, got {0}")]
    InvalidBeta(f64),

    #[error("expectation value has imaginary part {0:.3e}; state or operator is corrupted")]
    ComplexExpectation(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("state vector is not normalized (norm {0})")]
    Unnormalized(f64),

    #[error("coherence {magnitude:.3e} between particle-number sectors; block negativity requires a direct-sum state")]
    InterSectorCoherence { magnitude: f64 },

    #[error("negativity {value} outside the admissible range [0, {max}]")]
    NegativityOutOfRange { value: f64, max: f64 },

    #[error("initial ground state is degenerate (gap {gap:.3e}); pass an explicit override to quench from it")]
    DegenerateGroundState { gap: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Liouvillian dimension {dim} exceeds the dense limit of {limit}")]
    LiouvillianTooLarge { dim: usize, limit: usize },

    #[error("RK4 trace drift {drift:.3e} still above tolerance after {halvings} step halvings")]
    StepControlFailed { halvings: u32, drift: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}
