use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is singular: pivot {index} has magnitude {magnitude:e}")]
    Singular { index: usize, magnitude: f64 },

    #[error("generalized Sylvester equation is ill-posed at column {column}: coefficient {magnitude:e} below {threshold:e}")]
    IllPosed {
        column: usize,
        magnitude: f64,
        threshold: f64,
    },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("inconsistent scale set: {0}")]
    ScaleConsistency(String),

    #[error("incompatible mesh resolution: {0}")]
    Resolution(String),

    #[error("subregion has no {0} interface")]
    InvalidSide(&'static str),

    #[error("subregion has no electrode contact face; Dirichlet lift unavailable")]
    MissingContact,

    #[error("non-finite entry produced in {0}")]
    NonFinite(&'static str),

    #[error("{method} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("{what} inner solve failed at iteration {iteration}: {source}")]
    IterationSingular {
        what: &'static str,
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("problem size {size} exceeds cap {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
