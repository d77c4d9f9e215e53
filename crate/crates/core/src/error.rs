use thiserror::Error;

/// Errors produced by the numerical routines and the command-line front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument {re}{im:+}i lies outside the analyticity half-plane Re > {lower}")]
    Domain { re: f64, im: f64, lower: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("price {price} outside the no-arbitrage band ({lower}, {upper})")]
    Arbitrage { price: f64, lower: f64, upper: f64 },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Process exit code used by the command-line tool for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) | Error::Domain { .. } | Error::Arbitrage { .. } => 2,
            Error::Numerical(_) | Error::Internal(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
