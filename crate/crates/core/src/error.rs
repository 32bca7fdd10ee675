use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A point that does not belong to the space or map family.
    #[error("domain error: {0}")]
    Domain(String),
    /// A parametric family was asked for a parameter beyond its capacity.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("parse error: {0}")]
    Parse(String),
    /// A space definition that violates the metric axioms it must satisfy by
    /// construction (symmetry, zero diagonal, positivity).
    #[error("invalid space: {0}")]
    InvalidSpace(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
