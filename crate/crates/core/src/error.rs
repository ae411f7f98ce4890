use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A side condition required by an M-term or lemma region does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown function id `{id}` (registered: {})", known.join(", "))]
    UnknownFunction { id: String, known: Vec<String> },

    /// A scan could not produce a truncation certificate.
    #[error("evaluation could not be certified: {0}")]
    NotCertified(String),

    /// Theorem hypotheses are not satisfied for the requested point.
    #[error("hypotheses not satisfied: {0}")]
    Hypothesis(String),

    /// The function carries no certified modulus upper bound.
    #[error("function `{0}` has no certified modulus upper bound")]
    NoCertificate(String),

    /// A bound check was requested for a function outside its hypotheses.
    #[error("function `{0}` is unbounded; bound verification requires a bounded function")]
    Unbounded(String),

    #[error("function `{0}` is not registered as a member of the rho0-weighted space")]
    NotWeighted(String),

    /// Input data cannot support the requested fit.
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
