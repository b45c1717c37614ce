use thiserror::Error;

/// Errors raised by the numerical routines and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular angle θ = {theta}: |sin θ| < 1e-8")]
    SingularAngle { theta: f64 },

    #[error("quadrature order {0} outside [1, 4096]")]
    OrderOutOfRange(usize),

    #[error("matrix is not symmetric (max |A_ij - A_ji| = {0:e})")]
    NotSymmetric(f64),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("eigensolver did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("zero vector")]
    ZeroVector,

    #[error("no sign change of {what} on [{lo}, {hi}]")]
    Bracket {
        what: &'static str,
        lo: f64,
        hi: f64,
    },

    #[error(
        "eigenvalue {value} moved by {shift:e} under n -> 2n refinement (allowed {allowed:e})"
    )]
    Unstable {
        value: f64,
        shift: f64,
        allowed: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 2 for usage/configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Domain(_)
            | Error::SingularAngle { .. }
            | Error::OrderOutOfRange(_)
            | Error::Bracket { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
