//! Board state: crosses, drawn lines and the move history.

use std::collections::HashMap;

use crate::engine::Move;
use crate::error::ConfigError;
use crate::lattice::{initial_crosses, Direction, Point, Segment, Variant};

const SIDE: i32 = 64;
const ORIGIN: i32 = 27;

const CROSS: u16 = 1;
const fn cover_bit(d: Direction) -> u16 {
    1 << (1 + d.index())
}
const fn link_bit(d: Direction) -> u16 {
    1 << (5 + d.index())
}

/// Per-point flags: a cross bit, one "covered by a line in direction d" bit
/// per direction, and one "the unit link from here to here+step(d) is drawn"
/// bit per direction. Two same-direction lines overlap iff they share a link.
///
/// Points inside a fixed window around the starting layout live in a dense
/// array; anything outside spills into a map.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Cells {
    dense: Vec<u16>,
    overflow: HashMap<Point, u16>,
}

impl Cells {
    fn new() -> Self {
        Cells { dense: vec![0; (SIDE * SIDE) as usize], overflow: HashMap::new() }
    }

    #[inline]
    fn slot(p: Point) -> Option<usize> {
        let (x, y) = (p.x + ORIGIN, p.y + ORIGIN);
        if (0..SIDE).contains(&x) && (0..SIDE).contains(&y) {
            Some((y * SIDE + x) as usize)
        } else {
            None
        }
    }

    #[inline]
    fn get(&self, p: Point) -> u16 {
        match Self::slot(p) {
            Some(i) => self.dense[i],
            None => self.overflow.get(&p).copied().unwrap_or(0),
        }
    }

    fn update(&mut self, p: Point, f: impl FnOnce(u16) -> u16) {
        match Self::slot(p) {
            Some(i) => self.dense[i] = f(self.dense[i]),
            None => {
                let v = f(self.overflow.get(&p).copied().unwrap_or(0));
                if v == 0 {
                    self.overflow.remove(&p);
                } else {
                    self.overflow.insert(p, v);
                }
            }
        }
    }
}

/// A game in progress.
///
/// Invariants maintained by the engine: every drawn line covers only
/// crosses, no two same-direction lines overlap (or touch, under the D
/// rule), and `cross_count() == base_cross_count() + history().len()` with
/// one line per move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Board {
    variant: Variant,
    cells: Cells,
    crosses: Vec<Point>,
    base_count: usize,
    lines: [Vec<Segment>; 4],
    history: Vec<Move>,
}

impl Board {
    /// The standard starting position for `variant`.
    pub fn initial(variant: Variant) -> Result<Board, ConfigError> {
        let pts = initial_crosses(variant.alpha())?;
        Ok(Board::from_crosses(variant, pts))
    }

    /// A board holding an arbitrary set of starting crosses and no lines.
    pub fn from_crosses(variant: Variant, crosses: impl IntoIterator<Item = Point>) -> Board {
        let mut cells = Cells::new();
        let mut list: Vec<Point> = crosses.into_iter().collect();
        list.sort();
        list.dedup();
        for &p in &list {
            cells.update(p, |v| v | CROSS);
        }
        Board {
            variant,
            cells,
            base_count: list.len(),
            crosses: list,
            lines: Default::default(),
            history: Vec::new(),
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn alpha(&self) -> u8 {
        self.variant.alpha()
    }

    #[inline]
    pub fn has_cross(&self, p: Point) -> bool {
        self.cells.get(p) & CROSS != 0
    }

    /// Whether some line in direction `dir` covers `p`.
    #[inline]
    pub fn is_covered(&self, p: Point, dir: Direction) -> bool {
        self.cells.get(p) & cover_bit(dir) != 0
    }

    /// Whether a `dir` line contains both `p` and `p + step(dir)`.
    #[inline]
    pub fn is_linked(&self, p: Point, dir: Direction) -> bool {
        self.cells.get(p) & link_bit(dir) != 0
    }

    /// All crosses: the starting ones in sorted order, then one per move.
    pub fn crosses(&self) -> &[Point] {
        &self.crosses
    }

    pub fn cross_count(&self) -> usize {
        self.crosses.len()
    }

    pub fn base_cross_count(&self) -> usize {
        self.base_count
    }

    pub fn lines(&self, dir: Direction) -> &[Segment] {
        &self.lines[dir.index()]
    }

    pub fn all_lines(&self) -> impl Iterator<Item = &Segment> {
        self.lines.iter().flatten()
    }

    pub fn line_count(&self) -> usize {
        self.lines.iter().map(Vec::len).sum()
    }

    pub fn history(&self) -> &[Move] {
        &self.history
    }

    /// Number of moves played so far.
    pub fn score(&self) -> usize {
        self.history.len()
    }

    /// Lines in canonical order; equal for boards reached by any ordering
    /// of the same moves from the same start.
    pub fn canonical_lines(&self) -> Vec<Segment> {
        let mut v: Vec<Segment> = self.all_lines().copied().collect();
        v.sort();
        v
    }

    /// Bounding box `(min, max)` of all crosses, if any.
    pub fn bounds(&self) -> Option<(Point, Point)> {
        let first = *self.crosses.first()?;
        Some(self.crosses.iter().fold((first, first), |(lo, hi), p| {
            (Point::new(lo.x.min(p.x), lo.y.min(p.y)), Point::new(hi.x.max(p.x), hi.y.max(p.y)))
        }))
    }

    /// Records `mv` without any legality check.
    ///
    /// Used by the engine after validation, and by tests that need boards the
    /// rules would never produce.
    pub fn apply_unchecked(&mut self, mv: Move) {
        self.cells.update(mv.cross, |v| v | CROSS);
        self.crosses.push(mv.cross);
        self.mark_line(&mv.line);
        self.lines[mv.line.dir.index()].push(mv.line);
        self.history.push(mv);
    }

    /// Removes the last move. Returns `None` on an empty history.
    pub(crate) fn pop_move(&mut self) -> Option<Move> {
        let mv = self.history.pop()?;
        let popped = self.lines[mv.line.dir.index()].pop();
        debug_assert_eq!(popped, Some(mv.line));
        self.unmark_line(&mv.line);
        let p = self.crosses.pop();
        debug_assert_eq!(p, Some(mv.cross));
        self.cells.update(mv.cross, |v| v & !CROSS);
        Some(mv)
    }

    fn mark_line(&mut self, seg: &Segment) {
        let dir = seg.dir;
        let last = seg.length as usize - 1;
        for (i, p) in seg.points().enumerate() {
            let link = if i < last { link_bit(dir) } else { 0 };
            self.cells.update(p, |v| v | cover_bit(dir) | link);
        }
    }

    fn unmark_line(&mut self, seg: &Segment) {
        let dir = seg.dir;
        for p in seg.points() {
            self.cells.update(p, |v| v & !(cover_bit(dir) | link_bit(dir)));
        }
        // Only relevant for boards built with `apply_unchecked`, where a
        // remaining line may share points with the removed one.
        let remaining = self.lines[dir.index()]
            .iter()
            .filter(|other| other.shared_points(seg) > 0)
            .copied()
            .collect::<Vec<_>>();
        for other in remaining {
            self.mark_line(&other);
        }
    }
}
