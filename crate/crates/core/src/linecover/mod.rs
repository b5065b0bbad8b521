//! Line-based bounds.
//!
//! After `N` moves of 5D there are `N + 36` crosses and `N` lines, and all
//! lines cover crosses. If even the best arrangement of `N` lines covers
//! more than `N + 36` points, move `N` is unreachable and `N - 1` bounds the
//! score. This module computes certified lower bounds on that minimum
//! coverage, scans for the first infeasible `N`, brute-forces the minimum on
//! small configurations, and builds packings that show how far the method
//! can go.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::LayoutError;
use crate::lattice::{Direction, Point, Segment};

mod exact;
mod packing;

pub use exact::{min_cover_exact, min_cover_exact_with_budget, ExactCover, DEFAULT_NODE_BUDGET};
pub use packing::{
    grid_packing, pack_shape, packing_search, PackingParams, PackingResult, Shape, ShapeSpec,
};

/// Lines of one length with no crosses and no move order. Each direction's
/// lines are kept sorted by anchor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Layout {
    alpha: u8,
    lines: [Vec<Segment>; 4],
}

impl Layout {
    pub fn new(alpha: u8) -> Self {
        Layout { alpha, lines: Default::default() }
    }

    /// Builds a layout and validates it.
    pub fn from_segments(
        alpha: u8,
        segments: impl IntoIterator<Item = Segment>,
    ) -> Result<Self, LayoutError> {
        let layout = Layout::from_segments_unchecked(alpha, segments);
        verify_layout(&layout)?;
        Ok(layout)
    }

    /// Builds a layout without checking the disjointness rule.
    pub fn from_segments_unchecked(alpha: u8, segments: impl IntoIterator<Item = Segment>) -> Self {
        let mut layout = Layout::new(alpha);
        for s in segments {
            layout.lines[s.dir.index()].push(s);
        }
        for v in &mut layout.lines {
            v.sort();
        }
        layout
    }

    pub fn alpha(&self) -> u8 {
        self.alpha
    }

    /// Adds `seg` if it is disjoint from every same-direction line.
    pub fn insert(&mut self, seg: Segment) -> Result<(), LayoutError> {
        if seg.length != self.alpha {
            return Err(LayoutError::WrongLength(seg, seg.length, self.alpha));
        }
        let list = &mut self.lines[seg.dir.index()];
        if let Some(other) = list.iter().find(|o| o.shared_points(&seg) > 0) {
            return Err(LayoutError::SameDirectionConflict(*other, seg));
        }
        let at = list.partition_point(|o| o < &seg);
        list.insert(at, seg);
        Ok(())
    }

    pub fn remove(&mut self, seg: &Segment) -> bool {
        let list = &mut self.lines[seg.dir.index()];
        match list.binary_search(seg) {
            Ok(i) => {
                list.remove(i);
                true
            }
            Err(_) => false,
        }
    }

    pub fn lines(&self, dir: Direction) -> &[Segment] {
        &self.lines[dir.index()]
    }

    /// All segments in canonical `(dir, anchor)` order.
    pub fn segments(&self) -> impl Iterator<Item = &Segment> {
        self.lines.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.lines.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Line count per direction, indexed by [`Direction::index`].
    pub fn counts(&self) -> [usize; 4] {
        [0, 1, 2, 3].map(|i| self.lines[i].len())
    }

    pub fn covered_points(&self) -> HashSet<Point> {
        self.segments().flat_map(|s| s.points()).collect()
    }

    /// Shifts every line by `delta`.
    pub fn translated(&self, delta: Point) -> Layout {
        Layout::from_segments_unchecked(
            self.alpha,
            self.segments().map(|s| Segment::new(s.anchor + delta, s.dir, s.length)),
        )
    }
}

/// Checks line lengths and that same-direction lines share no point.
pub fn verify_layout(layout: &Layout) -> Result<(), LayoutError> {
    for seg in layout.segments() {
        if seg.length != layout.alpha {
            return Err(LayoutError::WrongLength(*seg, seg.length, layout.alpha));
        }
    }
    for dir in Direction::ALL {
        let mut seen: HashSet<Point> = HashSet::new();
        let mut owner: Vec<(Point, Segment)> = Vec::new();
        for seg in layout.lines(dir) {
            for p in seg.points() {
                if !seen.insert(p) {
                    let (_, first) = owner.iter().find(|(q, _)| *q == p).expect("seen point");
                    return Err(LayoutError::SameDirectionConflict(*first, *seg));
                }
                owner.push((p, *seg));
            }
        }
    }
    Ok(())
}

/// Number of distinct lattice points covered by a valid layout.
pub fn coverage(layout: &Layout) -> Result<usize, LayoutError> {
    verify_layout(layout)?;
    Ok(layout.covered_points().len())
}

/// Some direction holds at least `⌈n/4⌉` lines, which alone cover
/// `5⌈n/4⌉` points.
pub fn claim_a_lower(n: u64) -> u64 {
    n.div_ceil(4) * 5
}

/// Minimum coverage of `5k + 1` lines in each of two directions.
pub fn lemma_min_cover_bound(k: u64) -> u64 {
    (5 * k + 1) * 5 + 4
}

/// Lower bound on the points covered by `rainbow` disjoint lines in one
/// direction together with `mono` disjoint lines in another.
///
/// Colour lattice points mod 5 so that lines of the second direction are
/// monochrome and lines of the first hit every colour once. The first set
/// then covers exactly `rainbow` points of each colour; a colour holding
/// `l` lines of the second set has `5l` points, at least `5l - rainbow` of
/// them outside the first set. Spreading the `mono` lines evenly over the
/// colours minimises that excess.
pub fn two_direction_floor(rainbow: u64, mono: u64) -> u64 {
    let (q, r) = (mono / 5, mono % 5);
    let excess = |l: u64| (5 * l).saturating_sub(rainbow);
    5 * rainbow + r * excess(q + 1) + (5 - r) * excess(q)
}

/// Best certified lower bound for a given number of lines per direction:
/// one direction alone, or any ordered pair under [`two_direction_floor`].
pub fn certified_floor(counts: [usize; 4]) -> u64 {
    let c = counts.map(|x| x as u64);
    let mut best = c.iter().map(|&x| 5 * x).max().unwrap_or(0);
    for i in 0..4 {
        for j in 0..4 {
            if i != j && c[i] > 0 && c[j] > 0 {
                best = best.max(two_direction_floor(c[i], c[j]));
            }
        }
    }
    best
}

/// Which argument produced a coverage lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundRule {
    /// `⌈N/4⌉·5`
    ClaimA,
    /// `+4` when `N ≢ 1 (mod 4)` and `⌈N/4⌉ ≡ 1 (mod 5)`
    ClaimB,
    /// `+5` when `N ≢ 1 (mod 4)` and `⌈N/4⌉ ≡ 2, 3 (mod 5)`
    RemarkPlus5,
    /// Exhaustive search
    Exact,
    /// No rule enabled
    Trivial,
}

impl BoundRule {
    pub fn label(self) -> &'static str {
        match self {
            BoundRule::ClaimA => "A",
            BoundRule::ClaimB => "B",
            BoundRule::RemarkPlus5 => "remark",
            BoundRule::Exact => "exact",
            BoundRule::Trivial => "-",
        }
    }
}

impl fmt::Display for BoundRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Certified lower bound on the minimum coverage of `n` lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverBound {
    pub n: u64,
    pub bound: u64,
    pub rule: BoundRule,
}

/// Which line-count rules a scan may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct RuleSet {
    pub a: bool,
    pub b: bool,
    pub remark: bool,
}

impl RuleSet {
    pub const ALL: RuleSet = RuleSet { a: true, b: true, remark: true };
    pub const A: RuleSet = RuleSet { a: true, b: false, remark: false };
    pub const AB: RuleSet = RuleSet { a: true, b: true, remark: false };
    pub const A_REMARK: RuleSet = RuleSet { a: true, b: false, remark: true };

    /// Is `self` a subset of `other`?
    pub fn is_subset(self, other: RuleSet) -> bool {
        (!self.a || other.a) && (!self.b || other.b) && (!self.remark || other.remark)
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [(self.a, "A"), (self.b, "B"), (self.remark, "remark")]
            .iter()
            .filter(|(on, _)| *on)
            .map(|&(_, n)| n)
            .collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for RuleSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut set = RuleSet::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "A" | "a" => set.a = true,
                "B" | "b" => set.b = true,
                "remark" | "R" => set.remark = true,
                other => return Err(format!("unknown rule {other:?} (expected A, B or remark)")),
            }
        }
        Ok(set)
    }
}

/// Best bound from the enabled rules. The add-on rules are applied only
/// when their congruence hypotheses hold.
pub fn lower_bound_with(n: u64, rules: RuleSet) -> CoverBound {
    let base = claim_a_lower(n);
    let m = n.div_ceil(4);
    let not_one_mod_four = n % 4 != 1;
    let mut best = CoverBound { n, bound: 0, rule: BoundRule::Trivial };
    let mut consider = |bound: u64, rule: BoundRule| {
        if bound > best.bound || best.rule == BoundRule::Trivial {
            best = CoverBound { n, bound, rule };
        }
    };
    if rules.a {
        consider(base, BoundRule::ClaimA);
    }
    if rules.b && not_one_mod_four && m % 5 == 1 {
        consider(base + 4, BoundRule::ClaimB);
    }
    if rules.remark && not_one_mod_four && matches!(m % 5, 2 | 3) {
        consider(base + 5, BoundRule::RemarkPlus5);
    }
    best
}

/// All three rules.
pub fn combined_lower(n: u64) -> CoverBound {
    lower_bound_with(n, RuleSet::ALL)
}

/// First `N` whose certified coverage exceeds the `N + 36` crosses available.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanOutcome {
    pub first_infeasible: u64,
    pub upper_bound: u64,
    pub witness: CoverBound,
}

pub fn infeasibility_scan(rules: RuleSet, n_max: u64) -> Option<ScanOutcome> {
    (1..=n_max).map(|n| lower_bound_with(n, rules)).find(|b| b.bound > b.n + 36).map(|witness| {
        ScanOutcome { first_infeasible: witness.n, upper_bound: witness.n - 1, witness }
    })
}

/// The fixed-format table printed by the `scan` command, one row per `N`,
/// followed by the outcome line.
pub fn scan_table(rules: RuleSet, n_max: u64) -> String {
    let mut out = format!("{:>5} {:>7} {:>7} {:>6} {:>9}\n", "N", "rule", "lower", "N+36", "feasible");
    for n in 1..=n_max {
        let b = lower_bound_with(n, rules);
        let feasible = if b.bound > n + 36 { "no" } else { "yes" };
        out.push_str(&format!(
            "{:>5} {:>7} {:>7} {:>6} {:>9}\n",
            n,
            b.rule.label(),
            b.bound,
            n + 36,
            feasible
        ));
    }
    match infeasibility_scan(rules, n_max) {
        Some(o) => out.push_str(&format!(
            "first infeasible N={}; upper bound {}\n",
            o.first_infeasible, o.upper_bound
        )),
        None => out.push_str(&format!("no infeasible N up to {n_max}\n")),
    }
    out
}

/// Colour of `p` under the mod-5 colouring that is constant along lines in
/// direction `mono`.
pub fn mono_color(p: Point, mono: Direction) -> usize {
    let (sx, sy) = mono.step();
    // cross product with the step vector: constant along `mono` lines
    (p.x * sy - p.y * sx).rem_euclid(5) as usize
}

/// The colouring argument replayed on a concrete two-direction layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColoringReplay {
    /// Lines per direction (both equal `5k + 1` for the lemma).
    pub lines_per_direction: usize,
    /// Points covered by `rainbow` lines, per colour.
    pub rainbow_by_color: [usize; 5],
    /// Points covered by `mono` lines, per colour.
    pub mono_by_color: [usize; 5],
    /// Points of the fullest `mono` colour not covered by `rainbow` lines.
    pub uncovered_in_top_color: usize,
    /// Distinct points covered by the two directions.
    pub coverage: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColoringViolation {
    Layout(LayoutError),
    UnequalCounts { rainbow: usize, mono: usize },
    NotFivePlusOne(usize),
    /// First observation: each colour holds exactly `5k + 1` rainbow points.
    RainbowNotBalanced([usize; 5]),
    /// Second observation: some colour holds at least `5k + 5` mono points.
    NoHeavyColor([usize; 5]),
    CoverageBelowBound { coverage: usize, bound: usize },
}

/// Replays the colouring count on the `rainbow` and `mono` lines of
/// `layout`, which must have the same number `5k + 1` of lines in each.
/// Lines in other directions are ignored.
pub fn replay_coloring_argument(
    layout: &Layout,
    rainbow: Direction,
    mono: Direction,
) -> Result<ColoringReplay, ColoringViolation> {
    verify_layout(layout).map_err(ColoringViolation::Layout)?;
    let (r_lines, m_lines) = (layout.lines(rainbow), layout.lines(mono));
    if r_lines.len() != m_lines.len() || rainbow == mono {
        return Err(ColoringViolation::UnequalCounts { rainbow: r_lines.len(), mono: m_lines.len() });
    }
    let count = r_lines.len();
    let k = count / 5;

    let r_points: HashSet<Point> = r_lines.iter().flat_map(|s| s.points()).collect();
    let m_points: HashSet<Point> = m_lines.iter().flat_map(|s| s.points()).collect();
    let mut rainbow_by_color = [0usize; 5];
    for &p in &r_points {
        rainbow_by_color[mono_color(p, mono)] += 1;
    }
    let mut mono_by_color = [0usize; 5];
    for &p in &m_points {
        mono_by_color[mono_color(p, mono)] += 1;
    }
    let coverage = r_points.union(&m_points).count();

    if count % 5 != 1 {
        return Err(ColoringViolation::NotFivePlusOne(count));
    }
    if rainbow_by_color.iter().any(|&c| c != count) {
        return Err(ColoringViolation::RainbowNotBalanced(rainbow_by_color));
    }
    let top = (0..5).max_by_key(|&c| (mono_by_color[c], std::cmp::Reverse(c))).expect("five colours");
    if mono_by_color[top] < 5 * k + 5 {
        return Err(ColoringViolation::NoHeavyColor(mono_by_color));
    }
    let uncovered_in_top_color = m_points
        .iter()
        .filter(|&&p| mono_color(p, mono) == top && !r_points.contains(&p))
        .count();
    let bound = lemma_min_cover_bound(k as u64) as usize;
    if uncovered_in_top_color < 4 || coverage < bound {
        return Err(ColoringViolation::CoverageBelowBound { coverage, bound });
    }
    Ok(ColoringReplay {
        lines_per_direction: count,
        rainbow_by_color,
        mono_by_color,
        uncovered_in_top_color,
        coverage,
    })
}

/// Random valid layout with `counts[d]` lines in direction `d`, every
/// covered point inside `[0, window)²`. Returns `None` if rejection
/// sampling cannot place all lines.
pub fn random_layout<R: Rng + ?Sized>(
    rng: &mut R,
    counts: [usize; 4],
    window: i32,
    alpha: u8,
) -> Option<Layout> {
    let span = alpha as i32 - 1;
    if window <= span {
        return if counts.iter().all(|&c| c == 0) { Some(Layout::new(alpha)) } else { None };
    }
    let mut layout = Layout::new(alpha);
    for dir in Direction::ALL {
        let (_, sy) = dir.step();
        let (x_hi, y_lo, y_hi) = match dir {
            Direction::E => (window - span, 0, window),
            Direction::N => (window, 0, window - span),
            Direction::NE => (window - span, 0, window - span),
            Direction::SE => (window - span, span, window),
        };
        debug_assert!(sy >= -1);
        for _ in 0..counts[dir.index()] {
            let mut placed = false;
            for _ in 0..10_000 {
                let anchor = Point::new(rng.gen_range(0..x_hi), rng.gen_range(y_lo..y_hi));
                if layout.insert(Segment::new(anchor, dir, alpha)).is_ok() {
                    placed = true;
                    break;
                }
            }
            if !placed {
                return None;
            }
        }
    }
    Some(layout)
}
