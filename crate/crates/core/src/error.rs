//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the library. Each variant names the contract that was
/// violated so CLI diagnostics can point at the offending module.
#[derive(Debug, Error)]
pub enum Error {
    /// A CSV schema mapping referenced a column that is absent from the file.
    #[error("dataio: schema error: missing column {0:?}")]
    MissingColumn(String),

    /// A channel cell could not be parsed as a number.
    #[error("dataio: parse error at row {row}: {msg}")]
    Parse { row: usize, msg: String },

    /// Fewer than one full window could be cut from the input.
    #[error("dataio: empty dataset: {0}")]
    EmptyDataset(String),

    /// A synthetic-data spec violated its invariants.
    #[error("dataio: invalid synthetic spec: {0}")]
    InvalidSpec(String),

    /// Stratified k-fold cannot be built from the given label distribution.
    #[error("dataio: stratification error: class {class:?} has {count} windows, need at least {k}")]
    Stratification { class: String, count: usize, k: usize },

    /// Training produced a non-finite loss.
    #[error("{module}: divergence at {at}: loss is not finite")]
    Divergence { module: &'static str, at: String },

    /// An index or timestep was outside its valid range.
    #[error("{module}: range error: {msg}")]
    Range { module: &'static str, msg: String },

    /// The whitening matrix is singular and no ridge was supplied.
    #[error("infometric: covariance is singular (smallest eigenvalue {eig:.3e}); pass a positive ridge")]
    Singular { eig: f64 },

    /// A tensor became non-finite during sampling.
    #[error("diffusion: numerical error at {0}")]
    NonFinite(String),

    /// A label required by an evaluation target is missing.
    #[error("eval: label error: {0}")]
    MissingLabel(String),

    /// A configuration value violated an operation's precondition.
    #[error("{module}: invalid parameter: {msg}")]
    Parameter { module: &'static str, msg: String },

    /// A checkpoint or dataset file did not match the expected container format.
    #[error("format error in {path}: {msg}")]
    Format { path: String, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn range(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Range { module, msg: msg.into() }
    }

    pub(crate) fn parameter(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Parameter { module, msg: msg.into() }
    }
}
