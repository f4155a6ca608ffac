use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{what} needs {needed}, budget is {limit}")]
    Budget {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("integer overflow computing {0}")]
    Overflow(&'static str),

    #[error(
        "tolerance {requested:e} unreachable: best certified tail {achieved:e} at Q = {q_used}"
    )]
    ToleranceUnreachable {
        requested: f64,
        achieved: f64,
        q_used: usize,
    },

    #[error("series acceleration did not converge: {message}")]
    NotConverged { message: String, tableau: Vec<f64> },

    #[error("covariance factorization failed: {0}")]
    Factorization(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
