use thiserror::Error;

use crate::model::JointId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite coordinate")]
    NonFinite,

    #[error("invalid frame dimensions {width}x{height}")]
    InvalidDims { width: u32, height: u32 },

    #[error("clip too short: {total} frames available, {requested} requested")]
    ClipTooShort { total: usize, requested: usize },

    #[error("degenerate mirror axis: head coincides with hip midpoint")]
    DegenerateAxis,

    #[error("degenerate interpolation nodes")]
    DegenerateNodes,

    #[error("goal frame must be ≥ 1 and ≤ {max}, got {got}")]
    InvalidGoalIndex { got: usize, max: usize },

    #[error("frame {frame} has fewer than two usable neighbors with goal {goal}")]
    NoNeighbors { frame: usize, goal: usize },

    #[error("invalid skeleton: {0}")]
    InvalidSkeleton(String),

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("sequence length mismatch: {left} vs {right} frames")]
    LengthMismatch { left: usize, right: usize },

    #[error("joint {0} not found")]
    UnknownJoint(String),

    #[error("corrected motion leaves the normalized frame at frame {frame}, joint {joint}")]
    OutOfFrame { frame: usize, joint: JointId },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
