use alloc::string::String;

/// Errors reported by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FringeError {
    #[error("syntax error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("tree is not a full binary tree")]
    NotFull,

    #[error("shape has {leaves} leaves but the census cutoff is {cutoff}")]
    OutOfCensusRange { leaves: u64, cutoff: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("size guard exceeded: {what} = {value} > {limit}")]
    Guard { what: &'static str, value: u64, limit: u64 },

    #[error("gamma function pole at {0}")]
    Pole(f64),

    #[error("series did not converge within {0} terms")]
    NoConvergence(usize),
}

pub type Result<T> = core::result::Result<T, FringeError>;
