use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what} = {value} is outside the valid domain: {reason}")]
    Domain {
        what: &'static str,
        value: f64,
        reason: String,
    },

    #[error("root solver stalled after {iterations} iterations with bracket [{lo}, {hi}]")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },

    #[error(
        "quadrature missed tolerance after {panels} panels \
         (partial log-estimate {ln_estimate}, relative error {rel_error:e})"
    )]
    Quadrature {
        ln_estimate: f64,
        rel_error: f64,
        panels: usize,
    },

    #[error("rank-deficient fit: {0}")]
    RankDeficient(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
