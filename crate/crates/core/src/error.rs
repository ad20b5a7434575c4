use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by model construction and the samplers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {context} (expected {expected}, got {got})")]
    ShapeMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("parameter dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("site index {index} out of range for {len} sites")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is not connected")]
    Disconnected,

    #[error("edge list is not a spanning tree: {0}")]
    NotATree(String),

    #[error("state space too large for enumeration: {node_count} variables exceeds limit {limit}")]
    EnumerationTooLarge { node_count: usize, limit: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("all particle weights vanished ({context})")]
    WeightCollapse { context: String },

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no particles alive at tolerance {epsilon} (iteration {iteration})")]
    AbcNoAlive { epsilon: f64, iteration: usize },

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
