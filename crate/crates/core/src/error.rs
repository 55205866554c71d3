use thiserror::Error;

use crate::tree::TreeKind;

#[derive(Debug, Error)]
pub enum Error {
    #[error("tree kind mismatch: {left:?} vs {right:?}")]
    KindMismatch { left: TreeKind, right: TreeKind },

    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    Budget {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("invalid tail policy: {0}")]
    InvalidPolicy(String),

    #[error("invalid symbol {symbol} at position {index} for {kind:?} tree")]
    InvalidSymbol {
        kind: TreeKind,
        index: usize,
        symbol: u32,
    },

    #[error("cannot parse literal {literal:?}: {reason}")]
    InvalidLiteral { literal: String, reason: String },

    #[error("threshold {index} is never reached")]
    ThresholdUnreached { index: usize },

    #[error("{count} exceptional entries exceed the cap of {cap}")]
    ExceptionalCapExceeded { count: usize, cap: usize },

    #[error("malformed lifting candidate: {0}")]
    MalformedCandidate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sampling collisions exceeded the retry budget ({0} retries)")]
    SamplingCollisions(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
