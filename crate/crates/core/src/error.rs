use thiserror::Error;

/// Errors surfaced by graph construction, persistence, and planning.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown stop id: {0}")]
    UnknownVertex(String),

    #[error("unknown bus id: {0}")]
    UnknownBus(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("ingestion failed: {0}")]
    Ingest(String),

    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),

    #[error("reachable component has only {achievable} vertices, {requested} requested")]
    SubgraphTooSmall { requested: usize, achievable: usize },

    #[error("graph file error: {0}")]
    Format(String),

    #[error("no feasible route: {0}")]
    NoRoute(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
