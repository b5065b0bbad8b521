use thiserror::Error;

use crate::lattice::{Point, Segment};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unsupported line length {0} (expected 3..=6)")]
    UnsupportedAlpha(u8),
    #[error("unknown variant {0:?} (expected e.g. 5D or 5T)")]
    UnknownVariant(String),
    #[error("unknown direction {0:?} (expected E, N, NE or SE)")]
    UnknownDirection(String),
}

/// Why a move was rejected. Variants follow the order in which the rules are
/// checked, so the first violated rule is the one reported.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IllegalMove {
    #[error("cross {0} is already occupied")]
    Occupied(Point),
    #[error("line has length {found}, expected {expected}")]
    WrongLength { found: u8, expected: u8 },
    #[error("line does not cover the new cross {0}")]
    LineMissesCross(Point),
    #[error("point {0} on the line has no cross")]
    MissingCross(Point),
    #[error("line overlaps an existing {} line at {at}", .at_dir)]
    Overlaps { at: Point, at_dir: crate::lattice::Direction },
    #[error("line touches an existing {} line at {at}", .at_dir)]
    Touches { at: Point, at_dir: crate::lattice::Direction },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("illegal move: {0}")]
    Illegal(#[from] IllegalMove),
    #[error("nothing to undo")]
    EmptyHistory,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("move {index} is illegal: {reason}")]
pub struct ReplayError {
    /// 1-based move index.
    pub index: usize,
    pub reason: IllegalMove,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PotentialError {
    #[error("potential monitors are defined for 5D only, got {0}")]
    WrongVariant(String),
    #[error("board still has legal moves")]
    NotTerminal,
    #[error("need at least {needed} moves of history, got {found}")]
    ShortHistory { needed: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("segment {0:?} has length {1}, layout expects {2}")]
    WrongLength(Segment, u8, u8),
    #[error("same-direction segments {0:?} and {1:?} share a point")]
    SameDirectionConflict(Segment, Segment),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error("too large for exact search: node budget of {budget} exhausted")]
    BudgetExceeded { budget: u64 },
    #[error("window {window} cannot hold a line of length {alpha}")]
    WindowTooSmall { window: u32, alpha: u8 },
    #[error("empty parameter range: {0}")]
    EmptyRange(&'static str),
    #[error("the requested lines do not fit in a {window}x{window} window")]
    NoLayout { window: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported format version {0:?}")]
    UnsupportedVersion(String),
}

impl ParseError {
    pub(crate) fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax { line, column, message: message.into() }
    }
}
