use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-domain input (bad triple, bad bound, bad flag).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what}: {numerator} is not divisible by {denominator}")]
    NotDivisible {
        what: &'static str,
        numerator: String,
        denominator: String,
    },

    #[error("negative radicand for (a, f) = ({a}, {f})")]
    NegativeRadicand { a: String, f: String },

    /// An exceptional triple did not produce two solutions under the bound.
    #[error("verification failed for ({a}, {b}, {c}) with H = {height}: {found} solution(s) found")]
    VerificationFailed {
        a: String,
        b: String,
        c: String,
        height: String,
        found: usize,
    },

    /// A check inside a proof replay or oracle comparison did not hold.
    #[error("assertion failed: {0}")]
    Assertion(String),

    #[error("cannot merge reports: {0}")]
    Merge(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Exit status the command line maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Merge(_) => 2,
            _ => 1,
        }
    }
}
