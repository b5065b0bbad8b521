//! Exhaustive minimum coverage for small line counts.

use std::collections::BTreeMap;

use super::{certified_floor, Layout};
use crate::error::CoverError;
use crate::lattice::{Direction, Point, Segment};

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

const ALPHA: u8 = 5;

/// An optimal layout found by [`min_cover_exact_with_budget`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactCover {
    pub coverage: usize,
    /// One optimal layout, translated into `[0, window)²`.
    pub layout: Layout,
    pub nodes: u64,
}

/// Minimum number of points covered by `counts[d]` pairwise disjoint lines
/// per direction when every covered point fits in a `window × window`
/// square. Uses [`DEFAULT_NODE_BUDGET`].
pub fn min_cover_exact(counts: &BTreeMap<Direction, usize>, window: u32) -> Result<usize, CoverError> {
    let mut arr = [0usize; 4];
    for (d, &c) in counts {
        arr[d.index()] += c;
    }
    min_cover_exact_with_budget(arr, window, DEFAULT_NODE_BUDGET).map(|r| r.coverage)
}

/// As [`min_cover_exact`], with counts indexed by [`Direction::index`] and
/// an explicit budget on line placements. Running out of budget is an
/// error, never an approximate answer.
///
/// The search swaps the axis pair and the diagonal pair into a canonical
/// order (the square's symmetries permute directions within each pair),
/// pins the first line of the first direction at the origin, places
/// same-direction lines in increasing anchor order, and prunes on the
/// bounding box and on the best coverage found so far.
pub fn min_cover_exact_with_budget(
    counts: [usize; 4],
    window: u32,
    budget: u64,
) -> Result<ExactCover, CoverError> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Ok(ExactCover { coverage: 0, layout: Layout::new(ALPHA), nodes: 0 });
    }
    if window < ALPHA as u32 {
        return Err(CoverError::WindowTooSmall { window, alpha: ALPHA });
    }

    let swap_axes = counts[1] > counts[0];
    let swap_diagonals = counts[3] > counts[2];
    let mut canon = counts;
    if swap_axes {
        canon.swap(0, 1);
    }
    if swap_diagonals {
        canon.swap(2, 3);
    }

    let mut search = Search::new(canon, window as i32, budget);
    search.run()?;
    let best = search.best_lines.ok_or(CoverError::NoLayout { window })?;
    let coverage = search.best;

    // Undo the symmetry: swapping E/N is the reflection (x, y) -> (y, x),
    // swapping NE/SE is (x, y) -> (x, -y).
    let points: Vec<Vec<Point>> = best
        .iter()
        .map(|s| {
            s.points()
                .map(|p| {
                    let p = if swap_axes { Point::new(p.y, p.x) } else { p };
                    if swap_diagonals {
                        Point::new(p.x, -p.y)
                    } else {
                        p
                    }
                })
                .collect()
        })
        .collect();
    let min_x = points.iter().flatten().map(|p| p.x).min().unwrap_or(0);
    let min_y = points.iter().flatten().map(|p| p.y).min().unwrap_or(0);
    let segments = points.iter().map(|pts| {
        let a = pts.iter().min().expect("nonempty");
        let b = pts.iter().max().expect("nonempty");
        let dir = match (b.x - a.x, b.y - a.y) {
            (0, _) => Direction::N,
            (_, 0) => Direction::E,
            (_, dy) if dy > 0 => Direction::NE,
            _ => Direction::SE,
        };
        Segment::new(Point::new(a.x - min_x, a.y - min_y), dir, ALPHA)
    });
    let layout = Layout::from_segments(ALPHA, segments).expect("search only places disjoint lines");
    debug_assert_eq!(layout.counts(), counts);

    assert!(
        coverage as u64 >= certified_floor(counts),
        "exact search returned {coverage}, below the certified floor for {counts:?}"
    );
    Ok(ExactCover { coverage, layout, nodes: search.nodes })
}

struct Search {
    counts: [usize; 4],
    order: Vec<Direction>,
    window: i32,
    budget: u64,
    nodes: u64,
    /// Candidate segments per direction, sorted by anchor.
    candidates: [Vec<Segment>; 4],
    /// How many lines cover each point, over a square around the origin.
    cover: Vec<u8>,
    /// Whether a line of direction d covers each point.
    occupied: [Vec<bool>; 4],
    side: i32,
    offset: i32,
    covered: usize,
    placed: Vec<Segment>,
    best: usize,
    best_lines: Option<Vec<Segment>>,
}

#[derive(Clone, Copy)]
struct BBox {
    lo: Point,
    hi: Point,
}

impl BBox {
    const EMPTY: BBox = BBox { lo: Point::new(i32::MAX, i32::MAX), hi: Point::new(i32::MIN, i32::MIN) };

    fn with(self, seg: &Segment) -> BBox {
        let (a, b) = (seg.anchor, seg.end());
        BBox {
            lo: Point::new(self.lo.x.min(a.x).min(b.x), self.lo.y.min(a.y).min(b.y)),
            hi: Point::new(self.hi.x.max(a.x).max(b.x), self.hi.y.max(a.y).max(b.y)),
        }
    }

    fn fits(&self, window: i32) -> bool {
        self.hi.x - self.lo.x < window && self.hi.y - self.lo.y < window
    }
}

impl Search {
    fn new(counts: [usize; 4], window: i32, budget: u64) -> Self {
        let mut order: Vec<Direction> =
            Direction::ALL.into_iter().filter(|d| counts[d.index()] > 0).collect();
        order.sort_by_key(|d| std::cmp::Reverse(counts[d.index()]));

        // Every covered point lies within `window` of the pinned origin line.
        let reach = window + ALPHA as i32;
        let candidates = Direction::ALL.map(|dir| {
            let mut v: Vec<Segment> = (-reach..=reach)
                .flat_map(|x| (-reach..=reach).map(move |y| Segment::new(Point::new(x, y), dir, ALPHA)))
                .filter(|s| {
                    let e = s.end();
                    [s.anchor, e].iter().all(|p| p.x.abs() < reach && p.y.abs() < reach)
                })
                .collect();
            v.sort();
            v
        });
        let side = 2 * reach + 1;
        let cells = (side * side) as usize;
        Search {
            counts,
            order,
            window,
            budget,
            nodes: 0,
            candidates,
            cover: vec![0; cells],
            occupied: [vec![false; cells], vec![false; cells], vec![false; cells], vec![false; cells]],
            side,
            offset: reach,
            covered: 0,
            placed: Vec::new(),
            best: usize::MAX,
            best_lines: None,
        }
    }

    fn idx(&self, p: Point) -> usize {
        ((p.y + self.offset) * self.side + (p.x + self.offset)) as usize
    }

    fn fits_direction(&self, seg: &Segment) -> bool {
        let occ = &self.occupied[seg.dir.index()];
        seg.points().all(|p| !occ[self.idx(p)])
    }

    fn place(&mut self, seg: Segment) {
        for p in seg.points() {
            let i = self.idx(p);
            if self.cover[i] == 0 {
                self.covered += 1;
            }
            self.cover[i] += 1;
            self.occupied[seg.dir.index()][i] = true;
        }
        self.placed.push(seg);
    }

    fn unplace(&mut self) {
        let seg = self.placed.pop().expect("placed line");
        for p in seg.points() {
            let i = self.idx(p);
            self.cover[i] -= 1;
            if self.cover[i] == 0 {
                self.covered -= 1;
            }
            self.occupied[seg.dir.index()][i] = false;
        }
    }

    fn lower_bound(&self) -> usize {
        let single = self.counts.iter().map(|&c| 5 * c).max().unwrap_or(0);
        self.covered.max(single)
    }

    fn run(&mut self) -> Result<(), CoverError> {
        let first_dir = self.order[0];
        let origin = Segment::new(Point::new(0, 0), first_dir, ALPHA);
        let start = self.candidates[first_dir.index()]
            .binary_search(&origin)
            .expect("origin segment is a candidate");
        self.nodes += 1;
        self.place(origin);
        let bbox = BBox::EMPTY.with(&origin);
        self.descend(0, 1, start + 1, bbox)?;
        self.unplace();
        Ok(())
    }

    /// Place the `placed_in_dir`-th line of `order[dir_pos]`, choosing among
    /// candidates from index `from` on.
    fn descend(
        &mut self,
        dir_pos: usize,
        placed_in_dir: usize,
        from: usize,
        bbox: BBox,
    ) -> Result<(), CoverError> {
        if self.lower_bound() >= self.best {
            return Ok(());
        }
        let Some(&dir) = self.order.get(dir_pos) else {
            self.best = self.covered;
            self.best_lines = Some(self.placed.clone());
            return Ok(());
        };
        if placed_in_dir == self.counts[dir.index()] {
            return self.descend(dir_pos + 1, 0, 0, bbox);
        }
        let d = dir.index();
        for i in from..self.candidates[d].len() {
            let seg = self.candidates[d][i];
            let next_box = bbox.with(&seg);
            if !next_box.fits(self.window) || !self.fits_direction(&seg) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(CoverError::BudgetExceeded { budget: self.budget });
            }
            self.place(seg);
            let r = self.descend(dir_pos, placed_in_dir + 1, i + 1, next_box);
            self.unplace();
            r?;
        }
        Ok(())
    }
}
