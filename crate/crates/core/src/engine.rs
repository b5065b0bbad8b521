//! Move legality, move generation, apply/undo and replay.

use std::collections::BTreeMap;

use crate::board::Board;
use crate::error::{EngineError, IllegalMove, ReplayError};
use crate::lattice::{Direction, Point, Segment, Variant};

/// Place `cross`, then draw `line` through it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub cross: Point,
    pub line: Segment,
}

impl Move {
    pub fn new(cross: Point, line: Segment) -> Self {
        Move { cross, line }
    }
}

/// A replayable game: the variant, the moves in order, and free-form
/// annotations such as the seed or solver that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameRecord {
    pub variant: Variant,
    pub moves: Vec<Move>,
    pub metadata: BTreeMap<String, String>,
}

impl GameRecord {
    pub fn new(variant: Variant) -> Self {
        GameRecord { variant, moves: Vec::new(), metadata: BTreeMap::new() }
    }

    pub fn from_board(board: &Board) -> Self {
        GameRecord {
            variant: board.variant(),
            moves: board.history().to_vec(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn score(&self) -> usize {
        self.moves.len()
    }
}

/// Checks the move rules in order and reports the first one violated:
/// the cross must go on an empty point, the line must have the variant's
/// length and cover that cross, every other point of the line must already
/// bear a cross, and the line may not overlap (or, under the D rule, touch)
/// an existing line in the same direction.
///
/// Crosses lying just beyond the ends of the line are irrelevant.
pub fn check_move(board: &Board, mv: &Move) -> Result<(), IllegalMove> {
    if board.has_cross(mv.cross) {
        return Err(IllegalMove::Occupied(mv.cross));
    }
    let alpha = board.alpha();
    if mv.line.length != alpha {
        return Err(IllegalMove::WrongLength { found: mv.line.length, expected: alpha });
    }
    if !mv.line.contains(mv.cross) {
        return Err(IllegalMove::LineMissesCross(mv.cross));
    }
    if let Some(p) = mv.line.points().find(|&p| p != mv.cross && !board.has_cross(p)) {
        return Err(IllegalMove::MissingCross(p));
    }
    line_fits(board, &mv.line)
}

pub fn is_legal(board: &Board, mv: &Move) -> bool {
    check_move(board, mv).is_ok()
}

/// Same-direction compatibility of a new line with the lines on `board`.
fn line_fits(board: &Board, line: &Segment) -> Result<(), IllegalMove> {
    let dir = line.dir;
    let last = line.length as i32 - 1;
    for i in 0..last {
        let p = line.anchor.offset(dir, i);
        if board.is_linked(p, dir) {
            return Err(IllegalMove::Overlaps { at: p, at_dir: dir });
        }
    }
    if !board.variant().touching_allowed() {
        if let Some(p) = line.points().find(|&p| board.is_covered(p, dir)) {
            return Err(IllegalMove::Touches { at: p, at_dir: dir });
        }
    }
    Ok(())
}

/// If `seg` has exactly one empty point and fits among existing lines,
/// that point plus `seg` is a legal move.
#[inline]
fn move_on_segment(board: &Board, seg: Segment) -> Option<Move> {
    let mut empty = None;
    for p in seg.points() {
        if !board.has_cross(p) {
            if empty.is_some() {
                return None;
            }
            empty = Some(p);
        }
    }
    let cross = empty?;
    line_fits(board, &seg).ok()?;
    Some(Move { cross, line: seg })
}

/// Moves whose line passes through `p`, in no particular order.
fn moves_through(board: &Board, p: Point, out: &mut Vec<Move>) {
    let alpha = board.alpha();
    for dir in Direction::ALL {
        for i in 0..alpha {
            if let Some(mv) = move_on_segment(board, Segment::through(p, dir, i, alpha)) {
                out.push(mv);
            }
        }
    }
}

fn canonicalize(moves: &mut Vec<Move>) {
    moves.sort_unstable();
    moves.dedup();
}

/// Every legal move, sorted by `(cross, dir, anchor)`.
///
/// A legal line covers `alpha - 1` existing crosses, so only segments through
/// an existing cross are examined; the new cross therefore always lies within
/// `alpha - 1` steps of an existing one.
pub fn legal_moves(board: &Board) -> Vec<Move> {
    let mut out = Vec::new();
    for &p in board.crosses() {
        moves_through(board, p, &mut out);
    }
    canonicalize(&mut out);
    out
}

/// Incremental form of [`legal_moves`]: given the sorted legal moves before
/// `last` was applied, returns the sorted legal moves of `board` (which
/// already includes `last`).
///
/// Old moves survive unless they place a cross on `last.cross` or conflict
/// with `last.line`; new moves must use the new cross.
pub fn legal_moves_after(board: &Board, previous: &[Move], last: &Move) -> Vec<Move> {
    let touching = board.variant().touching_allowed();
    let new_line = last.line;
    let mut out: Vec<Move> = previous
        .iter()
        .filter(|m| {
            m.cross != last.cross
                && (m.line.dir != new_line.dir || {
                    let shared = m.line.shared_points(&new_line);
                    shared == 0 || (touching && shared == 1)
                })
        })
        .copied()
        .collect();
    moves_through(board, last.cross, &mut out);
    canonicalize(&mut out);
    out
}

impl Board {
    /// Plays `mv` if legal; otherwise leaves the board untouched.
    pub fn apply(&mut self, mv: Move) -> Result<(), IllegalMove> {
        check_move(self, &mv)?;
        self.apply_unchecked(mv);
        Ok(())
    }

    /// Takes back the last move.
    pub fn undo(&mut self) -> Result<Move, EngineError> {
        self.pop_move().ok_or(EngineError::EmptyHistory)
    }

    pub fn is_terminal(&self) -> bool {
        legal_moves(self).is_empty()
    }
}

/// Plays `record` from the standard start. Fails with the 1-based index of
/// the first illegal move.
pub fn replay(record: &GameRecord) -> Result<Board, ReplayError> {
    let mut board = Board::initial(record.variant)
        .expect("Variant construction already validated alpha");
    for (i, mv) in record.moves.iter().enumerate() {
        board
            .apply(*mv)
            .map_err(|reason| ReplayError { index: i + 1, reason })?;
    }
    Ok(board)
}
