use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{message}: no convergence (partial estimate {partial:e}, error estimate {error_estimate:e})")]
    NonConvergence {
        message: String,
        partial: f64,
        error_estimate: f64,
    },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("model inconsistency: {0}")]
    Model(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("identifiability error: {0}")]
    Identifiability(String),

    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("file not found: {0}")]
    FileNotFound(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// Short machine-readable tag used in diagnostic output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Numeric(_) => "numeric",
            Error::Bracket { .. } => "bracket",
            Error::Model(_) => "model",
            Error::Config(_) => "config",
            Error::Identifiability(_) => "identifiability",
            Error::Parse { .. } => "parse",
            Error::FileNotFound(_) => "file_not_found",
            Error::Io(_) => "io",
        }
    }
}
