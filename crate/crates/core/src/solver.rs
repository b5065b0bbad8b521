//! Game-playing search: exhaustive solving for small variants, seeded random
//! playouts, beam search and nested Monte-Carlo search.
//!
//! Every random choice comes from a ChaCha8 stream selected by a fixed
//! function of the seed and the position in the search tree, never by the
//! worker that happens to run it, so results do not depend on thread count.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::board::Board;
use crate::engine::{legal_moves, legal_moves_after, replay, GameRecord, Move};
use crate::lattice::{Segment, Variant};
use crate::potential::total_potential;

/// Line-based 5D bound; no legal 5D game is longer.
pub const LINE_BOUND_5D: usize = 121;
/// Potential-based 5D bound.
pub const POTENTIAL_BOUND_5D: usize = 136;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Random,
    Greedy,
    Beam,
    Nmcs,
    Exhaustive,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "random" => Strategy::Random,
            "greedy" => Strategy::Greedy,
            "beam" => Strategy::Beam,
            "nmcs" => Strategy::Nmcs,
            "exhaustive" => Strategy::Exhaustive,
            other => return Err(format!("unknown strategy {other:?}")),
        })
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Random => "random",
            Strategy::Greedy => "greedy",
            Strategy::Beam => "beam",
            Strategy::Nmcs => "nmcs",
            Strategy::Exhaustive => "exhaustive",
        })
    }
}

/// Board score used to rank beam candidates; higher is better.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Heuristic {
    /// Total potential.
    #[default]
    Potential,
    /// Number of legal moves.
    Mobility,
}

impl Heuristic {
    fn score(self, board: &Board, moves: &[Move]) -> i64 {
        match self {
            Heuristic::Potential => total_potential(board),
            Heuristic::Mobility => moves.len() as i64,
        }
    }
}

impl FromStr for Heuristic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "potential" => Ok(Heuristic::Potential),
            "mobility" => Ok(Heuristic::Mobility),
            other => Err(format!("unknown heuristic {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub seed: u64,
    pub strategy: Strategy,
    pub beam_width: usize,
    pub nmcs_level: u32,
    /// Number of playouts for the random strategy.
    pub playouts: usize,
    pub heuristic: Heuristic,
    pub time_budget: Option<Duration>,
    pub node_budget: Option<u64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seed: 0,
            strategy: Strategy::Nmcs,
            beam_width: 64,
            nmcs_level: 1,
            playouts: 1,
            heuristic: Heuristic::Potential,
            time_budget: None,
            node_budget: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub best_record: GameRecord,
    pub best_score: usize,
    /// Moves applied during the search.
    pub nodes_expanded: u64,
    pub wall_time: Duration,
    /// Set when a time or node budget cut the search short.
    pub truncated: bool,
}

impl SearchResult {
    pub fn summary_line(&self) -> String {
        format!(
            "score={} nodes={} time={}",
            self.best_score,
            self.nodes_expanded,
            self.wall_time.as_millis()
        )
    }
}

/// A solver output that breaks a rule or a proven bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GuardViolation {
    Replay(crate::error::ReplayError),
    Counts { moves: usize, crosses: usize, lines: usize },
    ExceedsBound { moves: usize, bound: usize },
}

impl fmt::Display for GuardViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GuardViolation::Replay(e) => write!(f, "{e}"),
            GuardViolation::Counts { moves, crosses, lines } => {
                write!(f, "{moves} moves left {crosses} crosses and {lines} lines")
            }
            GuardViolation::ExceedsBound { moves, bound } => {
                write!(f, "{moves} moves exceeds the proven bound {bound}")
            }
        }
    }
}

impl std::error::Error for GuardViolation {}

/// Replays `record` and checks that the final board has one cross per move
/// on top of the start and one line per move, and, for 5D, that the length
/// respects both published upper bounds.
pub fn guard_record(record: &GameRecord) -> Result<Board, GuardViolation> {
    let board = replay(record).map_err(GuardViolation::Replay)?;
    let n = record.moves.len();
    if board.cross_count() != record.variant.initial_cross_count() + n || board.line_count() != n {
        return Err(GuardViolation::Counts {
            moves: n,
            crosses: board.cross_count(),
            lines: board.line_count(),
        });
    }
    if record.variant.is_5d() {
        for bound in [POTENTIAL_BOUND_5D, LINE_BOUND_5D] {
            if n > bound {
                return Err(GuardViolation::ExceedsBound { moves: n, bound });
            }
        }
    }
    Ok(board)
}

fn guarded(record: GameRecord) -> GameRecord {
    if let Err(v) = guard_record(&record) {
        panic!("solver produced an invalid record: {v}");
    }
    record
}

/// SplitMix64 finaliser, used to derive stream ids.
fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(a << 6).wrapping_add(a >> 2);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The generator for `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Lexicographically smaller move list wins ties between equal scores.
fn better(a: &[Move], b: &[Move]) -> bool {
    a.len() > b.len() || (a.len() == b.len() && a < b)
}

struct Budget {
    deadline: Option<Instant>,
    node_limit: Option<u64>,
    nodes: AtomicU64,
    hit: AtomicBool,
}

impl Budget {
    fn new(cfg: &SearchConfig, start: Instant) -> Self {
        Budget {
            deadline: cfg.time_budget.map(|d| start + d),
            node_limit: cfg.node_budget,
            nodes: AtomicU64::new(0),
            hit: AtomicBool::new(false),
        }
    }

    fn count(&self, n: u64) {
        self.nodes.fetch_add(n, Ordering::Relaxed);
    }

    fn exhausted(&self) -> bool {
        if self.hit.load(Ordering::Relaxed) {
            return true;
        }
        let over = self.node_limit.is_some_and(|l| self.nodes.load(Ordering::Relaxed) >= l)
            || self.deadline.is_some_and(|d| Instant::now() >= d);
        if over {
            self.hit.store(true, Ordering::Relaxed);
        }
        over
    }

    fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }
}

/// Plays uniformly random legal moves on `board` until none is left and
/// returns the moves played.
fn playout<R: Rng>(board: &mut Board, mut moves: Vec<Move>, rng: &mut R) -> Vec<Move> {
    let mut played = Vec::new();
    while !moves.is_empty() {
        let mv = moves[rng.gen_range(0..moves.len())];
        board.apply_unchecked(mv);
        moves = legal_moves_after(board, &moves, &mv);
        played.push(mv);
    }
    played
}

/// One uniformly random game from the standard start.
pub fn random_playout(variant: Variant, seed: u64) -> GameRecord {
    let mut board = Board::initial(variant).expect("variant is valid");
    let moves = legal_moves(&board);
    let mut rng = stream_rng(seed, 0);
    playout(&mut board, moves, &mut rng);
    guarded(
        GameRecord::from_board(&board)
            .with_meta("seed", seed)
            .with_meta("solver", "random"),
    )
}

/// Best of `count` random games; game `i` uses stream `i` of `seed`.
pub fn best_of_playouts(variant: Variant, seed: u64, count: usize) -> SearchResult {
    let start = Instant::now();
    let root = Board::initial(variant).expect("variant is valid");
    let root_moves = legal_moves(&root);
    let nodes = AtomicU64::new(0);
    let best = (0..count.max(1) as u64)
        .into_par_iter()
        .map(|i| {
            let mut b = root.clone();
            let played = playout(&mut b, root_moves.clone(), &mut stream_rng(seed, i));
            nodes.fetch_add(played.len() as u64, Ordering::Relaxed);
            played
        })
        .reduce(Vec::new, |a, b| if better(&b, &a) { b } else { a });
    let mut record = GameRecord::new(variant).with_meta("seed", seed).with_meta("solver", "random");
    record.moves = best;
    let record = guarded(record);
    SearchResult {
        best_score: record.score(),
        best_record: record,
        nodes_expanded: nodes.into_inner(),
        wall_time: start.elapsed(),
        truncated: false,
    }
}

/// Nested Monte-Carlo search from `board`: at level 0 a random playout; at
/// level L, every legal move is scored by a level L-1 search and the best
/// sequence found so far is followed one move at a time. Returns the moves
/// played after `board`.
fn nested(
    board: &mut Board,
    mut moves: Vec<Move>,
    level: u32,
    stream: u64,
    seed: u64,
    budget: &Budget,
) -> Vec<Move> {
    if level == 0 {
        let played = playout(board, moves, &mut stream_rng(seed, stream));
        budget.count(played.len() as u64);
        return played;
    }
    let mut best: Vec<Move> = Vec::new();
    let mut played: Vec<Move> = Vec::new();
    let mut step = 0u64;
    while !moves.is_empty() {
        if budget.exhausted() {
            // Finish with the best known line, or randomly if none yet.
            if best.len() > played.len() {
                for mv in &best[played.len()..] {
                    board.apply_unchecked(*mv);
                }
                return best;
            }
            played.extend(playout(board, moves, &mut stream_rng(seed, mix(stream, u64::MAX))));
            return played;
        }
        let step_stream = mix(stream, step);
        let current = &moves;
        let shared: &Board = board;
        let results: Vec<Vec<Move>> = current
            .par_iter()
            .enumerate()
            .map(|(i, mv)| {
                let mut child = shared.clone();
                child.apply_unchecked(*mv);
                budget.count(1);
                let child_moves = legal_moves_after(&child, current, mv);
                let mut seq = vec![*mv];
                seq.extend(nested(
                    &mut child,
                    child_moves,
                    level - 1,
                    mix(step_stream, i as u64),
                    seed,
                    budget,
                ));
                seq
            })
            .collect();
        for seq in results {
            let mut candidate = played.clone();
            candidate.extend(seq);
            if better(&candidate, &best) {
                best = candidate;
            }
        }
        let next = best[played.len()];
        board.apply_unchecked(next);
        moves = legal_moves_after(board, &moves, &next);
        played.push(next);
        step += 1;
    }
    played
}

/// Nested Monte-Carlo search of the given level from the standard start.
pub fn nmcs(variant: Variant, level: u32, seed: u64, cfg: &SearchConfig) -> SearchResult {
    let start = Instant::now();
    let budget = Budget::new(cfg, start);
    let mut board = Board::initial(variant).expect("variant is valid");
    let moves = legal_moves(&board);
    let played = nested(&mut board, moves, level.max(1), mix(0x6e6d_6373, level as u64), seed, &budget);
    let mut record = GameRecord::new(variant)
        .with_meta("level", level)
        .with_meta("seed", seed)
        .with_meta("solver", "nmcs");
    record.moves = played;
    let record = guarded(record);
    SearchResult {
        best_score: record.score(),
        best_record: record,
        nodes_expanded: budget.nodes(),
        wall_time: start.elapsed(),
        truncated: budget.hit.load(Ordering::Relaxed),
    }
}

/// Level-synchronous beam search. All children of the current beam are
/// generated, transpositions merged, and the `width` best by `heuristic`
/// kept; ties are broken by a seeded random key. Width 1 is greedy play.
pub fn beam_search(variant: Variant, width: usize, heuristic: Heuristic, seed: u64) -> SearchResult {
    beam_search_with(variant, width, heuristic, seed, &SearchConfig::default())
}

fn beam_search_with(
    variant: Variant,
    width: usize,
    heuristic: Heuristic,
    seed: u64,
    cfg: &SearchConfig,
) -> SearchResult {
    let start = Instant::now();
    let budget = Budget::new(cfg, start);
    let width = width.max(1);
    let mut rng = stream_rng(seed, mix(0x6265_616d, width as u64));
    let root = Board::initial(variant).expect("variant is valid");
    let root_moves = legal_moves(&root);
    let mut best: Vec<Move> = Vec::new();
    let mut beam = vec![(root, root_moves)];
    while !beam.is_empty() && !budget.exhausted() {
        let mut seen: HashSet<Vec<Segment>> = HashSet::new();
        let mut children = Vec::new();
        for (board, moves) in &beam {
            if moves.is_empty() && better(board.history(), &best) {
                best = board.history().to_vec();
            }
            for mv in moves {
                let mut child = board.clone();
                child.apply_unchecked(*mv);
                budget.count(1);
                if !seen.insert(child.canonical_lines()) {
                    continue;
                }
                let child_moves = legal_moves_after(&child, moves, mv);
                let key = (heuristic.score(&child, &child_moves), rng.gen::<u64>());
                children.push((key, child, child_moves));
            }
        }
        children.sort_by(|a, b| b.0 .0.cmp(&a.0 .0).then(a.0 .1.cmp(&b.0 .1)));
        children.truncate(width);
        beam = children.into_iter().map(|(_, b, m)| (b, m)).collect();
    }
    // A truncated search still reports the deepest board it reached.
    for (board, _) in &beam {
        if better(board.history(), &best) {
            best = board.history().to_vec();
        }
    }
    let mut record = GameRecord::new(variant)
        .with_meta("seed", seed)
        .with_meta("solver", if width == 1 { "greedy" } else { "beam" })
        .with_meta("width", width);
    record.moves = best;
    let record = guarded(record);
    SearchResult {
        best_score: record.score(),
        best_record: record,
        nodes_expanded: budget.nodes(),
        wall_time: start.elapsed(),
        truncated: budget.hit.load(Ordering::Relaxed),
    }
}

/// Result of an exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustiveResult {
    /// Exact maximum when `exact`, otherwise the longest game seen.
    pub score: usize,
    /// Moves from the searched board achieving `score`.
    pub moves: Vec<Move>,
    pub exact: bool,
    pub nodes: u64,
    pub transpositions: usize,
}

/// Exact maximum score from the standard start of `variant`.
pub fn exhaustive_solve(variant: Variant, node_budget: u64) -> ExhaustiveResult {
    let board = Board::initial(variant).expect("variant is valid");
    let result = exhaustive_from(board, node_budget);
    let mut record = GameRecord::new(variant);
    record.moves = result.moves.clone();
    guarded(record);
    result
}

/// Exact maximum number of further moves from `board`, by depth-first
/// search with a transposition table keyed on the sorted set of drawn lines
/// (the lines fix the crosses, so the key is exact).
pub fn exhaustive_from(mut board: Board, node_budget: u64) -> ExhaustiveResult {
    struct Dfs {
        memo: HashMap<Vec<Segment>, u32>,
        nodes: u64,
        budget: u64,
        deepest: Vec<Move>,
        base: usize,
    }

    impl Dfs {
        fn value(&mut self, board: &mut Board, moves: &[Move]) -> Option<u32> {
            if moves.is_empty() {
                let line = &board.history()[self.base..];
                if better(line, &self.deepest) {
                    self.deepest = line.to_vec();
                }
                return Some(0);
            }
            let key = board.canonical_lines();
            if let Some(&v) = self.memo.get(&key) {
                return Some(v);
            }
            let mut best = 0;
            for mv in moves {
                self.nodes += 1;
                if self.nodes > self.budget {
                    return None;
                }
                board.apply_unchecked(*mv);
                let next = legal_moves_after(board, moves, mv);
                let v = self.value(board, &next);
                board.undo().expect("just applied");
                best = best.max(1 + v?);
            }
            self.memo.insert(key, best);
            Some(best)
        }
    }

    let base = board.score();
    let mut dfs = Dfs { memo: HashMap::new(), nodes: 0, budget: node_budget, deepest: Vec::new(), base };
    let moves = legal_moves(&board);
    let Some(total) = dfs.value(&mut board, &moves) else {
        return ExhaustiveResult {
            score: dfs.deepest.len(),
            moves: dfs.deepest,
            exact: false,
            nodes: dfs.nodes,
            transpositions: dfs.memo.len(),
        };
    };

    // Walk down the memoised values to recover one optimal line.
    let mut line = Vec::new();
    let mut moves = moves;
    let mut remaining = total;
    while remaining > 0 {
        let mut chosen = None;
        for mv in &moves {
            board.apply_unchecked(*mv);
            let next = legal_moves_after(&board, &moves, mv);
            let v = dfs.value(&mut board, &next).expect("memoised");
            if v + 1 == remaining {
                chosen = Some((*mv, next));
                break;
            }
            board.undo().expect("just applied");
        }
        let (mv, next) = chosen.expect("an optimal child exists");
        line.push(mv);
        moves = next;
        remaining -= 1;
    }
    ExhaustiveResult {
        score: total as usize,
        moves: line,
        exact: true,
        nodes: dfs.nodes,
        transpositions: dfs.memo.len(),
    }
}

/// Runs the strategy selected in `cfg`.
pub fn solve(variant: Variant, cfg: &SearchConfig) -> SearchResult {
    let start = Instant::now();
    match cfg.strategy {
        Strategy::Random => {
            let mut r = best_of_playouts(variant, cfg.seed, cfg.playouts.max(1));
            r.wall_time = start.elapsed();
            r
        }
        Strategy::Greedy => beam_search_with(variant, 1, cfg.heuristic, cfg.seed, cfg),
        Strategy::Beam => beam_search_with(variant, cfg.beam_width, cfg.heuristic, cfg.seed, cfg),
        Strategy::Nmcs => nmcs(variant, cfg.nmcs_level.max(1), cfg.seed, cfg),
        Strategy::Exhaustive => {
            let r = exhaustive_solve(variant, cfg.node_budget.unwrap_or(u64::MAX));
            let mut record = GameRecord::new(variant)
                .with_meta("exact", r.exact)
                .with_meta("solver", "exhaustive");
            record.moves = r.moves;
            SearchResult {
                best_score: r.score,
                best_record: record,
                nodes_expanded: r.nodes,
                wall_time: start.elapsed(),
                truncated: !r.exact,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn playouts_are_deterministic() {
        let a = random_playout(Variant::FIVE_D, 42);
        let b = random_playout(Variant::FIVE_D, 42);
        assert_eq!(a, b);
        assert!(a.score() > 0);
        assert_eq!(a.metadata["seed"], "42");
    }

    #[test]
    fn incremental_moves_match_full_generation() {
        for seed in 0..20 {
            for variant in [Variant::FIVE_D, Variant::FIVE_T] {
                let mut board = Board::initial(variant).unwrap();
                let mut moves = legal_moves(&board);
                let mut rng = stream_rng(seed, 0);
                while !moves.is_empty() {
                    let mv = moves[rng.gen_range(0..moves.len())];
                    board.apply(mv).unwrap();
                    moves = legal_moves_after(&board, &moves, &mv);
                    assert_eq!(moves, legal_moves(&board), "seed {seed} {variant}");
                }
            }
        }
    }

    #[test]
    fn exhaustive_on_dead_board() {
        let b = Board::from_crosses(Variant::FIVE_D, [crate::lattice::Point::new(0, 0)]);
        let r = exhaustive_from(b, 10);
        assert_eq!((r.score, r.exact), (0, true));
    }

    #[test]
    fn exhaustive_budget_is_flagged() {
        let r = exhaustive_solve(Variant::FIVE_D, 50);
        assert!(!r.exact);
        assert!(r.nodes <= 51);
    }

    #[test]
    fn greedy_is_width_one() {
        let g = solve(
            Variant::FIVE_D,
            &SearchConfig { strategy: Strategy::Greedy, seed: 3, ..SearchConfig::default() },
        );
        let b = beam_search(Variant::FIVE_D, 1, Heuristic::Potential, 3);
        assert_eq!(g.best_record.moves, b.best_record.moves);
    }

    #[test]
    fn nmcs_budget_returns_legal_game() {
        let cfg = SearchConfig { node_budget: Some(2_000), ..SearchConfig::default() };
        let r = nmcs(Variant::FIVE_D, 2, 1, &cfg);
        assert!(r.truncated);
        assert!(guard_record(&r.best_record).is_ok());
        let board = replay(&r.best_record).unwrap();
        assert!(board.is_terminal());
    }

    #[test]
    fn strategy_names() {
        for s in ["random", "greedy", "beam", "nmcs", "exhaustive"] {
            assert_eq!(s.parse::<Strategy>().unwrap().to_string(), s);
        }
        assert!("dfs".parse::<Strategy>().is_err());
    }
}
