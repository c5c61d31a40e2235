use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid covariance: {0}")]
    InvalidCovariance(String),

    #[error("invalid qubit state: {0}")]
    InvalidQubit(String),

    #[error("truncation leak: top-level population {population:.3e} exceeds {limit:.1e} at dim {dim}; try dim >= {suggested}")]
    TruncationLeak {
        dim: usize,
        population: f64,
        limit: f64,
        suggested: usize,
    },

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("time grids do not align: {0}")]
    Alignment(String),

    #[error("fit did not converge after {iterations} iterations (gradient norm {gradient_norm:.3e}); best parameters {best:?}")]
    NoConvergence {
        iterations: usize,
        gradient_norm: f64,
        best: Vec<f64>,
    },

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("parse error in {source_name}: {message}")]
    Parse {
        source_name: String,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
