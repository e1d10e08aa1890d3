use thiserror::Error;

/// Errors produced by the bound computations and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid alphabet size {0}: at least two symbols are required")]
    InvalidAlphabet(usize),

    #[error("invalid probability data: {0}")]
    InvalidProbability(String),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("q-function mismatch: expected {expected}, got {got}")]
    QMismatch { expected: String, got: String },

    #[error("search budget exceeded: S({k},{m}) = {count} partitions, budget is {budget}")]
    BudgetExceeded {
        k: usize,
        m: usize,
        count: u128,
        budget: u64,
    },

    #[error("solver did not converge: {what} (residual {residual:e})")]
    NonConvergence { what: String, residual: f64 },

    #[error("alphabet too large for WZ RD: K = {k} exceeds the cap of {cap}")]
    AlphabetTooLarge { k: usize, cap: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = core::result::Result<T, Error>;
