use thiserror::Error;

use crate::baire::VertexPath;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("meet is undefined for equal points {0}")]
    UndefinedMeet(VertexPath),

    #[error("vertex {0} is not named by the finite oracle")]
    UnknownVertex(VertexPath),

    #[error("prefix lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("depth must be at least 1")]
    ZeroDepth,

    #[error("vertices {0} and {1} are adjacent; no separating depth exists")]
    AdjacentPair(VertexPath, VertexPath),

    #[error("no separating depth found for {0} and {1} up to {2}")]
    NoSeparatingDepth(VertexPath, VertexPath, usize),

    #[error("no nontrivial truncation found up to depth {bound}; the edge oracle is inexact")]
    NormBoundExceeded { bound: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid order {0}: must be a prime power or inf")]
    InvalidOrder(String),

    #[error("word needs {needed} letters but max_len is {max_len}")]
    BoundTooSmall { needed: usize, max_len: usize },

    #[error("validation failed: {}", .0.join("; "))]
    Invalid(Vec<String>),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Errors caused by an edge oracle that cannot answer a query.
    pub fn is_oracle_resolution(&self) -> bool {
        matches!(
            self,
            Error::UnknownVertex(_)
                | Error::NoSeparatingDepth(..)
                | Error::NormBoundExceeded { .. }
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
