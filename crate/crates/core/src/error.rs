use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested Riesz energy has a pole at this exponent.
    #[error("pole at s = {s} (sphere dimension {d})")]
    Pole { d: usize, s: f64 },

    /// The expected energy is infinite for `s >= d + 2`.
    #[error("expected energy diverges for s = {s} >= d + 2 = {limit}")]
    DivergentEnergy { s: f64, limit: f64 },

    /// Exact integer arithmetic overflowed `u128`.
    #[error("integer overflow computing {0}")]
    Overflow(&'static str),

    /// An iterative numerical routine did not converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Two points of a configuration coincide.
    #[error("configuration is singular: points {i} and {j} coincide")]
    SingularConfiguration { i: usize, j: usize },

    /// The rejection sampler exceeded its proposal budget.
    #[error("sampler stalled after {proposals} consecutive rejections at point {index}")]
    SamplerStall { index: usize, proposals: usize },

    /// The conditional Gram factor lost positive definiteness.
    #[error("numerical degeneracy in conditional kernel at point {index}: {detail}")]
    Degeneracy { index: usize, detail: String },

    /// Too many projection kernels to enumerate.
    #[error("enumeration aborted: {count} kernels exceed the limit of {limit}")]
    EnumerationLimit { count: u128, limit: u128 },

    /// Two kernels cannot be compared.
    #[error("kernels are not comparable: {0}")]
    Incomparable(String),

    /// Nested quadrature did not stabilise.
    #[error("accuracy check failed: {0}")]
    Accuracy(String),

    /// Malformed input file or JSON.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
