use thiserror::Error;

use crate::mask::{show, Mask};

/// Everything that can go wrong while building or analysing a family.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element id {0} does not fit in a 64-element universe")]
    ElementCapacity(u64),

    #[error("{what} supports m <= {cap}, got m = {m}")]
    Capacity {
        what: &'static str,
        cap: usize,
        m: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("empty family")]
    EmptyFamily,

    #[error("family is not union-closed: {} ∪ {} = {} is not a member", show(*.left), show(*.right), show(*.left | *.right))]
    NotUnionClosed { left: Mask, right: Mask },

    #[error("family is not separating: elements {0} and {1} lie in exactly the same member sets")]
    Unseparated(u32, u32),

    #[error("universe of size {universe_size} is not covered by the members (missing {})", show(*.missing))]
    NotValidated { universe_size: usize, missing: Mask },

    #[error("internal contradiction: {0}")]
    Contradiction(String),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
