//! Shared error type for the domain crates.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("room packing failed: {0}")]
    PackingFailure(String),

    #[error("pedestrian spawn failed after {retries} retries")]
    SpawnFailure { retries: usize },

    #[error("grid is disconnected: {0}")]
    Disconnected(String),

    #[error("no path from start to goal on the inflated grid")]
    NoPath,

    #[error("global plan is empty")]
    EmptyPlan,

    #[error("no waypoint candidates")]
    NoCandidates,

    #[error("variable missing from delta map: {0}")]
    MissingVariable(String),

    #[error("budget too small: {0}")]
    BudgetTooSmall(String),

    #[error("empty performance trace")]
    EmptyTrace,

    #[error("inconsistent configuration: {0}")]
    Config(String),

    #[error("training diverged: {0}")]
    Divergence(String),

    #[error("policy parameters contain non-finite values")]
    NonFiniteParams,

    #[error("malformed grid file: {0}")]
    GridFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
