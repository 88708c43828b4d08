use thiserror::Error;

/// Errors produced by the chain model, the propagator engine and the oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QstError {
    #[error("channel length must be odd (a zero-energy mode exists only then), got {0}")]
    EvenChannelLength(usize),

    #[error("register size must be at least 1")]
    EmptyRegister,

    #[error("{name} must be positive and finite, got {value}")]
    InvalidCoupling { name: &'static str, value: f64 },

    #[error("tridiagonal eigensolver did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("{sites} sites exceed the many-body cap of {cap}")]
    TooManySites { sites: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = QstError> = std::result::Result<T, E>;
