use thiserror::Error;

/// Errors raised across the analysis engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("negative value {value} at index {index}")]
    NegativeValue { index: usize, value: f64 },

    #[error("cannot normalize `{label}`: series total is zero")]
    Normalization { label: String },

    #[error("ingest error at row {row}, column `{column}`: {message}")]
    Ingest {
        /// 1-based line number in the source file (header is line 1).
        row: usize,
        column: String,
        message: String,
    },

    #[error("x_g = {x_g} is below the domain lower bound {x_g_min}")]
    Domain { x_g: f64, x_g_min: f64 },

    #[error("infeasible: {reason}")]
    Infeasible {
        reason: String,
        /// Smallest generation capacity for which a finite storage exists, when known.
        min_generation: Option<f64>,
    },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
