use crate::model::Vertex;
use thiserror::Error;

/// Unified error type for the whole library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("invalid cycle: {0}")]
    InvalidCycle(String),
    #[error("invalid packing: {0}")]
    InvalidPacking(String),
    #[error("leave has odd degree at {0}")]
    OddDegree(Vertex),
    #[error("host neighbourhoods of {0} and {1} differ")]
    NeighborhoodMismatch(Vertex, Vertex),
    #[error("origin {0} is not a valid switch origin")]
    InvalidOrigin(Vertex),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("infeasible cycle counts: {0}")]
    InfeasibleCounts(String),
    #[error("infeasible parameters: {0}")]
    InfeasibleParameters(String),
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("hypotheses violated: {0}")]
    HypothesesViolated(String),
    #[error("internal transform failure: {0}")]
    InternalTransformFailure(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("triple is not good: {0}")]
    NotGood(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("empty input")]
    EmptyInput,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
