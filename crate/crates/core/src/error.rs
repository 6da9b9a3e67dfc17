use thiserror::Error;

use crate::model::Policy;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),

    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("horizon of {horizon} slots exhausted")]
    HorizonExhausted { horizon: u64 },

    #[error("slot {slot} still awaits a placement")]
    PlacementPending { slot: u64 },

    #[error("no pending arrival to place")]
    NoPendingArrival,

    #[error("placement for slot {slot} was already submitted")]
    DoubleSubmission { slot: u64 },

    #[error("node index {node} out of range for {n_nodes} nodes")]
    NodeOutOfRange { node: usize, n_nodes: usize },

    #[error("expected observation for slot {expected}, got slot {got}")]
    SlotOrder { expected: u64, got: u64 },

    /// The simplex hit its iteration cap; `best` is the last feasible vertex visited.
    #[error("simplex did not converge within {iterations} pivots")]
    LpNotConverged { iterations: usize, best: Box<Policy> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
