//! Accurate nullvector computation for defective eigenvalue problems.
//!
//! A matrix with a defective zero eigenvalue has orthogonal left and right
//! nullvectors, which makes direct eigenvector computation ill-conditioned.
//! This crate embeds such an `N x N` matrix into an `(N+1) x (N+1)`
//! rank-one-perturbed extension whose zero eigenvalue is simple, computes the
//! nullpair of the extension with a dense eigensolver, and projects the result
//! back to the original space. The projection recovers the original
//! nullvector to near machine precision where a direct solve loses half the
//! digits or more.
//!
//! The crate also ships the test-problem generators and the sweep harness
//! used to measure lifting error, `|lambda_0|`, and nullpair condition
//! numbers over grids of the near-defectiveness parameter `epsilon` and the
//! lifting parameter `beta`.

pub mod csv;
pub mod eig;
pub mod experiment;
pub mod lift;
pub mod matgen;
pub mod mm;

use nalgebra::{DMatrix, DVector};

/// Complex scalar used throughout: IEEE-754 double precision parts.
pub type Complex64 = nalgebra::Complex<f64>;
/// Dense square complex matrix, the universal matrix carrier.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = DVector<Complex64>;

/// Errors shared by all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("matrix is empty")]
    EmptyMatrix,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("eigendecomposition backend failed to converge")]
    BackendFailure,
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    #[error("degenerate lift: |xi| = {xi_abs:.3e}, |zeta| = {zeta_abs:.3e}")]
    DegenerateLift { xi_abs: f64, zeta_abs: f64 },
    #[error("ratio denominator is numerically zero")]
    DivisionDegenerate,
    #[error("spectral collision: embedded block has an eigenvalue within {min_gap:.3e} of the shift")]
    SpectralCollision { min_gap: f64 },
    #[error("invalid argument: {context}")]
    InvalidArgument { context: &'static str },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use eig::{
    eig_all, left_nullpair, nearest_eigenpair, phase_normalize, random_orthogonal, EigenPairSet,
};
pub use experiment::{
    aggregate, baseline_no_lift, condition_s0, error_2x2, error_large, run_trials, sweep,
    trial_seed, Problem, ProblemFamily, SweepGrid, SweepRecord, TrialOutcome, TrialResult,
};
pub use lift::{
    build_lift, build_lift_with_nullvectors, check_conditions, gram_nondefect_check,
    solve_nullpair, solve_nullpair_aligned, verify_alpha, ConditionReport, LiftStrategy,
    LiftVectors, LiftedSystem, NullPair,
};
pub use matgen::{
    adjoint_lift_vectors, make_2x2, make_large, poisson_block, random_lift_vectors,
    LargeTestMatrix, TwoByTwoFamily,
};
