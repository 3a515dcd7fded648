use crate::dyadic::DyadicIndex;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// `delta(I, J)` is only defined when `J` is strictly inside `I` or disjoint from it.
    #[error("delta({outer}, {inner}) is undefined: {inner} is not strictly inside or disjoint from {outer}")]
    UndefinedDelta {
        outer: DyadicIndex,
        inner: DyadicIndex,
    },

    #[error("h_{haar} is not constant on {interval}")]
    NotConstant {
        haar: DyadicIndex,
        interval: DyadicIndex,
    },

    #[error("grid resolution mismatch: expected {expected} cells, found {found}")]
    ResolutionMismatch { expected: usize, found: usize },

    #[error("depth mismatch: {left} vs {right}")]
    DepthMismatch { left: u32, right: u32 },

    #[error("node {node} lies outside the tree of depth {depth}")]
    NodeOutsideTree { node: DyadicIndex, depth: u32 },

    #[error("duplicate node {0}")]
    DuplicateNode(DyadicIndex),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("degenerate nu at {0}: a child carries no mass")]
    DegenerateNu(DyadicIndex),

    #[error("nu({0}) = 0")]
    ZeroNu(DyadicIndex),

    #[error("power iteration did not converge after {iterations} iterations (last relative change {last_change:e})")]
    NoConvergence { iterations: usize, last_change: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
