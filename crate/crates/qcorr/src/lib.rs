//! Quantum correlation and entanglement measures for small finite-dimensional
//! systems.
//!
//! The crate computes entropic and correlation quantities of bipartite and
//! tripartite states — von Neumann entropies, coherent information, quantum
//! discord and classical correlation, entanglement of formation, relative
//! entropy of entanglement — and assembles them into verdicts about
//! entanglement irreversibility for one-way maximally correlated states.
//!
//! Layout:
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigendecomposition, tensor
//!   products, partial trace / partial transpose over labeled subsystems.
//! - [`states`]: state constructors (Bell pairs, pseudo-pure mixtures, 1-MC
//!   states, the two-angle example family), purification, Schmidt
//!   decomposition, seeded random states, PPT test.
//! - [`entropy`]: binary and von Neumann entropies, conditional entropy,
//!   mutual information, coherent information.
//! - [`correlations`]: measurement-optimized classical correlation and
//!   discord, plus the structural zero-discord test.
//! - [`entanglement`]: concurrence, EOF (closed form and ensemble oracle),
//!   the Koashi–Winter cross-check, relative entropy of entanglement, and
//!   irreversibility reports.
//! - [`campaigns`]: seeded verification campaigns and parameter sweeps.
//! - [`io`]: JSON state-file schema shared with the CLI.
//!
//! All numeric results are in bits (base-2 logarithms). Everything is
//! deterministic for a fixed seed.

use thiserror::Error;

pub mod campaigns;
pub mod correlations;
pub mod entanglement;
pub mod entropy;
pub mod io;
pub mod linalg;
pub mod optim;
pub mod states;

pub use linalg::{ComplexMatrix, DimSignature};
pub use states::{DensityMatrix, PureState};

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |M - M'| = {max_dev:.3e} exceeds 1e-12")]
    NotHermitian { max_dev: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("signature product {product} does not match operator side {side}")]
    SignatureMismatch { side: usize, product: usize },

    #[error("unknown subsystem label: {label}")]
    UnknownLabel { label: String },

    #[error("duplicate subsystem label: {label}")]
    DuplicateLabel { label: String },

    #[error("invalid signature: dims and labels must be non-empty and match")]
    InvalidSignature,

    #[error("bipartition is trivial: one side is empty")]
    TrivialBipartition,

    #[error("operation requires a bipartite signature, got {subsystems} subsystems")]
    NotBipartite { subsystems: usize },

    #[error("operation requires a tripartite signature, got {subsystems} subsystems")]
    NotTripartite { subsystems: usize },

    #[error("state vector norm {norm} deviates from 1 by more than 1e-12")]
    NotNormalized { norm: f64 },

    #[error("trace {trace} deviates from 1 by more than 1e-10")]
    TraceNotOne { trace: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e} < -1e-10")]
    NotPositive { min_eigenvalue: f64 },

    #[error("probabilities must be positive and sum to 1 within 1e-10 (sum = {sum})")]
    InvalidProbabilities { sum: f64 },

    #[error("flag dimension {flag_dim} is smaller than the number of pairs {pairs}")]
    FlagDimTooSmall { flag_dim: usize, pairs: usize },

    #[error("rank {rank} out of range [1, {max}]")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("ensemble size {m} out of range [{min}, {max}]")]
    EnsembleSizeOutOfRange { m: usize, min: usize, max: usize },

    #[error("unsupported dimension {dim} for {what}: limit is {limit}")]
    UnsupportedDimension {
        what: &'static str,
        dim: usize,
        limit: usize,
    },

    #[error("unsupported signature for {what}: {detail}")]
    UnsupportedSignature {
        what: &'static str,
        detail: String,
    },

    #[error("{what} = {value} outside admissible range [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("witness support does not contain the state support")]
    SupportViolation,

    #[error("failed to parse state document: {detail}")]
    Parse { detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
