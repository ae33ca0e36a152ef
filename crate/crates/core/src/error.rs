use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

/// Coarse classification used by front ends to map failures onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad parameters or malformed data.
    Input,
    /// A numerical routine could not produce a trustworthy answer.
    Numerical,
    /// Data that mixes signs where a single sign is required.
    Sign,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("option strike {strike} is not at the money (spot {spot})")]
    NotAtTheMoney { spot: f64, strike: f64 },

    #[error("need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("price {price} is outside the invertible range (0, {cap})")]
    Domain { price: f64, cap: f64 },

    #[error("root is not bracketed: f({lo}) and f({hi}) have the same sign")]
    NoBracket { lo: f64, hi: f64 },

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    #[error("covariance factorization failed at pivot {index} (value {pivot:e})")]
    Factorization { index: usize, pivot: f64 },

    #[error("vega {0:e} is too small to divide by")]
    DegenerateVega(f64),

    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),

    #[error("skew values must be nonzero and share one sign")]
    Sign,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidInput(_)
            | Error::Validation(_)
            | Error::NotAtTheMoney { .. }
            | Error::InsufficientData { .. } => ErrorKind::Input,
            Error::Sign => ErrorKind::Sign,
            Error::Domain { .. }
            | Error::NoBracket { .. }
            | Error::NoConvergence(_)
            | Error::Factorization { .. }
            | Error::DegenerateVega(_)
            | Error::DivisionByZero(_) => ErrorKind::Numerical,
        }
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
