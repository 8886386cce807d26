use thiserror::Error;

/// Errors raised by structure construction and queries.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The structure itself is malformed (unknown ids, empty evidence, ...).
    #[error("structural error: {0}")]
    Structure(String),

    /// One of the normality axioms fails; the message names the offending worlds.
    #[error("axiom violated: {0}")]
    Axiom(String),

    #[error("false discovery: actual state {state} is not in the learned proposition")]
    FalseDiscovery { state: String },

    #[error("inexpressible evidence: {0} is not a possible body of evidence")]
    InexpressibleEvidence(String),

    /// Evidence (or a reference set) with zero probability mass.
    #[error("cannot condition on {0}: zero probability mass")]
    Conditioning(String),

    #[error("invalid threshold {0}: must lie in (0, 1]")]
    Threshold(String),

    #[error("evidence cell {0} is not totally preordered")]
    NonTotal(String),

    /// A truncated infinite model cannot decide the query at the configured depth.
    #[error("undecided at depth {depth}: {detail}")]
    Undecided { depth: u32, detail: String },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
