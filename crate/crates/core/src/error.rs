use thiserror::Error;

use crate::graph::Vertex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid k: {0} (k must be a positive integer)")]
    InvalidK(i64),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("instance too large for oracle: order {order} exceeds cap {cap}")]
    TooLarge { order: usize, cap: usize },

    #[error("path index {j} out of range 1..={k}")]
    IndexOutOfRange { j: usize, k: usize },

    #[error("degenerate layout: {0}")]
    DegenerateLayout(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid tour: {0}")]
    InvalidTour(String),

    #[error("subgraph {0}: P_j uniqueness not guaranteed (not a canonical in-out graph)")]
    NonCanonicalSubgraph(usize),

    #[error("missing value for variable x_{0}_{1}")]
    MissingVariable(Vertex, Vertex),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
