//! Blind gain and phase calibration (BGPC) solvers.
//!
//! Recovers unknown per-sensor complex gains `lambda` and an unknown signal
//! matrix `X` from measurements `Y = diag(lambda) * A * X + W`, where `A` is a
//! known measurement matrix. The bilinear problem is lifted to a linear one in
//! `(gamma, X)` with `gamma = 1 ./ lambda`, whose solution is the minor
//! eigenvector of a structured positive semidefinite operator `B`. That
//! eigenvector is computed by power iteration on `G = beta*I - B` (subspace
//! case) or by truncated power iteration with hard sparsity projections
//! (sparsity and joint-sparsity cases).
//!
//! The crate provides:
//!
//! * [`operators`] - matrix-free application of `B` and `G` in `O(m*n*N)`.
//! * [`solvers`] - power iteration and truncated power iteration.
//! * [`initializer`] - spectral support estimation and rank-1 initialization.
//! * [`baselines`] - constrained least squares and ADMM l1 / l2,1 solvers.
//! * [`synth`] - seeded, reproducible synthetic problem generators.
//! * [`harness`] - parallel Monte-Carlo success-rate and phase-transition runs.
//! * [`sh`] - real spherical-harmonic lighting basis for inverse rendering.
//!
//! See the `examples/` directory for one runnable program per capability; the
//! thin `bgpc` binary exposes the same functionality on files.

pub mod baselines;
pub mod cli;
pub mod error;
pub mod harness;
pub mod initializer;
mod linalg;
pub mod matrix;
pub mod metrics;
pub mod model;
pub mod operators;
pub mod projections;
pub mod sh;
pub mod solvers;
pub mod synth;

pub use error::Error;
pub use linalg::real_madd_count;
pub use matrix::ComplexMatrix;
pub use metrics::{distance, msnr, rsnr};
pub use model::{pack_eta, unpack_eta, Dims, EtaVector, GroundTruth, ProblemInstance};
pub use operators::CalibrationOperator;
pub use projections::SparsityMode;
pub use solvers::{
    phase_informed_eta0, power_iteration, truncated_power_iteration, SolveResult, SolverConfig,
};

/// Shorthand used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
