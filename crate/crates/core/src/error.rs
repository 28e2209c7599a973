use thiserror::Error;

use crate::model::RegimeViolation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid regime: {}", join_violations(.0))]
    InvalidRegime(Vec<RegimeViolation>),

    /// The user channel Gram matrix `H Hᴴ` is not positive definite.
    #[error("singular user channel: H does not have full row rank")]
    SingularChannel,

    /// The eavesdropper interference-plus-distortion covariance cannot be inverted.
    #[error("X singular at phi={phi}, rho={rho}")]
    SingularCovariance { phi: f64, rho: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("no admissible solution: {0}")]
    NoSolution(String),

    #[error("no sign change of the secrecy-rate derivative was found")]
    NoSignChange,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown key '{0}'")]
    UnknownKey(String),

    #[error("missing required key '{0}'")]
    MissingKey(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by the caller's parameters rather than by a failure of the library.
    pub fn is_user_error(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::NoConvergence { .. })
    }
}

fn join_violations(v: &[RegimeViolation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
