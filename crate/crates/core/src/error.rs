//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside its documented domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Matrix or vector dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A file could not be parsed; `line` is 1-based.
    #[error("parse error in {path} at line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// Data violates a representation invariant (negative weight,
    /// asymmetric matrix without `symmetrize`, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A numerical routine failed; the message carries diagnostics.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An iterate became non-finite. `trace` holds the most recent
    /// (primal, dual) residual pairs before the blow-up.
    #[error("solver diverged at iteration {iteration} (primal {p_res:.3e}, dual {d_res:.3e})")]
    Divergence {
        iteration: usize,
        p_res: f64,
        d_res: f64,
        trace: Vec<(f64, f64)>,
    },

    /// rSpecT has no feasible point at the requested radius.
    #[error("rSpecT infeasible at delta = {delta:.6e}: smallest feasible radius is {delta_min:.6e}")]
    Infeasible { delta: f64, delta_min: f64 },

    /// Explicit operator assembly was refused to bound memory use.
    #[error("refusing explicit assembly at m = {m} nodes (limit {limit})")]
    MemoryGuard { m: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
