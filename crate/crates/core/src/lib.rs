//! Learning time-varying graphs from signals that vary smoothly over them.
//!
//! The problem: given per-slot signal matrices X_1..X_T, recover one weighted
//! undirected graph per slot. Each slot is scored by a smoothness term, a log
//! barrier on vertex degrees and an l2 regularizer; pairs of slots named by a
//! *temporal graph* are tied together by a weighted edge penalty. The solver
//! is consensus ADMM: per-slot projected-gradient updates, per-temporal-edge
//! closed-form prox updates, and dual ascent, each phase running in parallel
//! between barriers.
//!
//! Modules follow the data flow: [`graph`] holds the vectorized graph types,
//! [`objective`] the per-slot model and its PGD solver, [`temporal`] the slot
//! coupling structure, [`prox`] the edge-penalty operators, [`admm`] the outer
//! solver, [`synthetic`] the data generator and [`metrics`] the evaluation.

pub mod admm;
pub mod graph;
pub mod linalg;
pub mod metrics;
pub mod objective;
pub mod prox;
pub mod synthetic;
pub mod temporal;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("matrix has a nonzero diagonal entry")]
    NonzeroDiagonal,

    #[error("negative or non-finite entry at index {0}")]
    BadEntry(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vertex {0} has zero degree; the log barrier is undefined there")]
    ZeroDegree(usize),

    #[error("temporal structure: {0}")]
    TemporalStructure(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("synthetic generation: {0}")]
    Synthetic(String),
}

pub type Result<T> = std::result::Result<T, Error>;
