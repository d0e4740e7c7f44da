use thiserror::Error;

/// Errors raised across the estimation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("normalization error: max |P| = {max_modulus} exceeds 1 beyond tolerance")]
    Normalization { max_modulus: f64 },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error("infeasible: best achieved error {best_error:e} exceeds target {target:e}")]
    Infeasible {
        best_error: f64,
        target: f64,
        best: Box<crate::physest::PhysicalEstimate>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }
}
