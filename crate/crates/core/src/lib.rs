//! Morpion Solitaire: rules engine, potential and line-covering bound
//! calculators, search harnesses, and record/layout I/O.

pub mod board;
pub mod engine;
pub mod error;
pub mod lattice;
pub mod linecover;
pub mod potential;
pub mod recordio;
pub mod solver;

pub use board::Board;
pub use engine::{legal_moves, replay, GameRecord, Move};
pub use error::{ConfigError, EngineError, IllegalMove, ReplayError};
pub use lattice::{segment_relation, Direction, Point, Segment, SegmentRelation, Variant};
