//! Cross potentials, the potential-based score bounds, and monitors that
//! check the potential facts along a game trace.
//!
//! The potential of a cross is `4 - (number of lines covering it)`: how many
//! more lines could still pass through it. In 5D each move adds a cross worth
//! 4 and takes one unit from each of the five crosses its line covers, so the
//! total drops by exactly one per move.

use std::collections::BTreeMap;
use std::fmt;

use crate::board::Board;
use crate::engine::{legal_moves, GameRecord, Move};
use crate::error::{PotentialError, ReplayError};
use crate::lattice::Point;

/// Potentials of every cross on a board.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialReport {
    pub per_cross: BTreeMap<Point, i32>,
    pub total: i64,
    /// Potentials of the crosses placed by each move, in move order.
    by_move: Vec<i32>,
}

impl PotentialReport {
    /// Sum of the potentials of the crosses placed in the last `k` moves.
    pub fn last_k_sum(&self, k: usize) -> i64 {
        self.by_move.iter().rev().take(k).map(|&p| p as i64).sum()
    }

    /// Potential of the cross placed by move `index` (1-based).
    pub fn of_move(&self, index: usize) -> Option<i32> {
        index.checked_sub(1).and_then(|i| self.by_move.get(i)).copied()
    }
}

/// Counts lines per cross rather than reading direction flags, so boards
/// assembled with [`Board::apply_unchecked`] are measured faithfully.
pub fn potential_report(board: &Board) -> PotentialReport {
    let mut per_cross: BTreeMap<Point, i32> = board.crosses().iter().map(|&p| (p, 4)).collect();
    for line in board.all_lines() {
        for p in line.points() {
            if let Some(v) = per_cross.get_mut(&p) {
                *v -= 1;
            }
        }
    }
    let total = per_cross.values().map(|&v| v as i64).sum();
    let by_move = board.history().iter().map(|m| per_cross[&m.cross]).collect();
    PotentialReport { per_cross, total, by_move }
}

pub fn total_potential(board: &Board) -> i64 {
    let covered: usize = board.all_lines().map(|l| l.length as usize).sum();
    4 * board.cross_count() as i64 - covered as i64
}

/// Potential-based bound: with initial potential `p0`, a floor `t` that the
/// potential cannot fall below `lookback` moves before the end, the score
/// `M` satisfies `p0 - (M - lookback) >= t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundDerivation {
    pub initial_potential: i64,
    pub terminal_floor: i64,
    pub lookback: i64,
    pub bound: i64,
}

impl BoundDerivation {
    pub fn new(initial_potential: i64, terminal_floor: i64, lookback: i64) -> Self {
        BoundDerivation {
            initial_potential,
            terminal_floor,
            lookback,
            bound: potential_bound(initial_potential, terminal_floor, lookback),
        }
    }
}

pub fn potential_bound(p0: i64, terminal_floor: i64, lookback: i64) -> i64 {
    p0 - terminal_floor + lookback
}

/// A named row of the 5D potential bound table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NamedBound {
    pub name: &'static str,
    pub argument: &'static str,
    pub derivation: BoundDerivation,
}

/// The four potential-based 5D bounds, weakest first.
pub fn published_bounds() -> [NamedBound; 4] {
    [
        NamedBound {
            name: "next-move",
            argument: "next move needs total potential >= 4",
            derivation: BoundDerivation::new(144, 4, 1),
        },
        NamedBound {
            name: "last-three",
            argument: "last three crosses keep potentials 3, >=2, >=1",
            derivation: BoundDerivation::new(144, 6, 0),
        },
        NamedBound {
            name: "last-three-sum",
            argument: "last three crosses sum to >= 7",
            derivation: BoundDerivation::new(144, 7, 0),
        },
        NamedBound {
            name: "last-four",
            argument: "board before the last move holds >= 9",
            derivation: BoundDerivation::new(144, 9, 1),
        },
    ]
}

impl fmt::Display for NamedBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.derivation;
        write!(
            f,
            "{:<14} {:>4} {:>6} {:>9} {:>6}  {}",
            self.name, d.initial_potential, d.terminal_floor, d.lookback, d.bound, self.argument
        )
    }
}

/// The bound table as printed by the `bounds` command.
pub fn bounds_table() -> String {
    let mut out = format!(
        "{:<14} {:>4} {:>6} {:>9} {:>6}  {}\n",
        "name", "p0", "floor", "lookback", "bound", "argument"
    );
    for row in published_bounds() {
        out.push_str(&row.to_string());
        out.push('\n');
    }
    out
}

/// Potentials of the last three placed crosses on the final board.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LemmaWitness {
    /// `[p(C_M), p(C_{M-1}), p(C_{M-2})]`
    pub potentials: [i32; 3],
}

impl LemmaWitness {
    pub fn sum(&self) -> i32 {
        self.potentials.iter().sum()
    }

    pub fn holds(&self) -> bool {
        self.sum() >= 7
    }
}

fn require_5d(board: &Board) -> Result<(), PotentialError> {
    if board.variant().is_5d() {
        Ok(())
    } else {
        Err(PotentialError::WrongVariant(board.variant().to_string()))
    }
}

/// Potentials of the last three placed crosses, without the terminal
/// precondition. The inequality `>= 7` holds on any 5D board with three or
/// more moves.
pub fn last_three_witness(board: &Board) -> Result<LemmaWitness, PotentialError> {
    let m = board.score();
    if m < 3 {
        return Err(PotentialError::ShortHistory { needed: 3, found: m });
    }
    let report = potential_report(board);
    let p = |i| report.of_move(i).expect("index within history");
    Ok(LemmaWitness { potentials: [p(m), p(m - 1), p(m - 2)] })
}

/// End-of-game check: on a finished 5D game the last three crosses carry a
/// total potential of at least 7. A failure means the board could not have
/// come from legal play.
pub fn check_terminal_lemma(board: &Board) -> Result<LemmaWitness, PotentialError> {
    require_5d(board)?;
    if board.score() < 3 {
        return Err(PotentialError::ShortHistory { needed: 3, found: board.score() });
    }
    if !legal_moves(board).is_empty() {
        return Err(PotentialError::NotTerminal);
    }
    last_three_witness(board)
}

/// A move is only possible with total potential at least 4. Vacuously true
/// on terminal boards.
pub fn check_pre_move_floor(board: &Board) -> Result<bool, PotentialError> {
    require_5d(board)?;
    Ok(legal_moves(board).is_empty() || total_potential(board) >= 4)
}

/// First invariant broken along a 5D trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceViolation {
    WrongVariant(String),
    Replay(ReplayError),
    /// Cross or line count disagrees with `36 + N` / `N`.
    Counts { moves: usize, crosses: usize, lines: usize },
    PotentialLaw { moves: usize, total: i64 },
    CrossPotentialRange { moves: usize, cross: Point, potential: i32 },
    PreMoveFloor { moves: usize, total: i64 },
    TerminalLemma(LemmaWitness),
    FinalCross(i32),
}

impl fmt::Display for TraceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceViolation::WrongVariant(v) => write!(f, "trace monitors need a 5D record, got {v}"),
            TraceViolation::Replay(e) => write!(f, "replay failed: {e}"),
            TraceViolation::Counts { moves, crosses, lines } => write!(
                f,
                "after {moves} moves: {crosses} crosses and {lines} lines (expected {} and {moves})",
                moves + 36
            ),
            TraceViolation::PotentialLaw { moves, total } => write!(
                f,
                "after {moves} moves total potential is {total}, expected {}",
                144 - *moves as i64
            ),
            TraceViolation::CrossPotentialRange { moves, cross, potential } => {
                write!(f, "after {moves} moves cross {cross} has potential {potential}")
            }
            TraceViolation::PreMoveFloor { moves, total } => {
                write!(f, "after {moves} moves a move exists with total potential {total} < 4")
            }
            TraceViolation::TerminalLemma(w) => {
                write!(f, "last three crosses have potentials {:?}, sum < 7", w.potentials)
            }
            TraceViolation::FinalCross(p) => write!(f, "final cross has potential {p}, expected 3"),
        }
    }
}

impl std::error::Error for TraceViolation {}

/// What a clean 5D trace looked like.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceSummary {
    pub moves: usize,
    pub final_total: i64,
    pub terminal: bool,
    /// Present when the game ended with at least three moves.
    pub lemma: Option<LemmaWitness>,
}

/// Replays a 5D record and checks after every move: the cross/line counts,
/// total potential `144 - N`, per-cross potentials in `[0, 4]` and the
/// pre-move floor. If the final board is terminal, the last-three lemma and
/// `p(C_M) = 3` are checked as well.
pub fn verify_trace(record: &GameRecord) -> Result<TraceSummary, TraceViolation> {
    if !record.variant.is_5d() {
        return Err(TraceViolation::WrongVariant(record.variant.to_string()));
    }
    let mut board = Board::initial(record.variant).expect("5D is supported");
    let mut moves_now = legal_moves(&board);
    check_step(&board, &moves_now)?;
    for (i, mv) in record.moves.iter().enumerate() {
        board
            .apply(*mv)
            .map_err(|reason| TraceViolation::Replay(ReplayError { index: i + 1, reason }))?;
        moves_now = crate::engine::legal_moves_after(&board, &moves_now, mv);
        check_step(&board, &moves_now)?;
    }
    let terminal = moves_now.is_empty();
    let mut lemma = None;
    if terminal && board.score() >= 3 {
        let w = check_terminal_lemma(&board).expect("preconditions checked above");
        if !w.holds() {
            return Err(TraceViolation::TerminalLemma(w));
        }
        if w.potentials[0] != 3 {
            return Err(TraceViolation::FinalCross(w.potentials[0]));
        }
        lemma = Some(w);
    }
    Ok(TraceSummary { moves: board.score(), final_total: total_potential(&board), terminal, lemma })
}

fn check_step(board: &Board, legal: &[Move]) -> Result<(), TraceViolation> {
    let n = board.score();
    if board.cross_count() != n + 36 || board.line_count() != n {
        return Err(TraceViolation::Counts {
            moves: n,
            crosses: board.cross_count(),
            lines: board.line_count(),
        });
    }
    let report = potential_report(board);
    if report.total != 144 - n as i64 {
        return Err(TraceViolation::PotentialLaw { moves: n, total: report.total });
    }
    if let Some((&cross, &potential)) = report.per_cross.iter().find(|(_, &v)| !(0..=4).contains(&v)) {
        return Err(TraceViolation::CrossPotentialRange { moves: n, cross, potential });
    }
    if !legal.is_empty() && report.total < 4 {
        return Err(TraceViolation::PreMoveFloor { moves: n, total: report.total });
    }
    Ok(())
}
