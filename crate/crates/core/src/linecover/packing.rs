//! Dense line packings: layouts whose coverage stays within `n + 36`,
//! showing where the line-count argument stops giving bounds.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{verify_layout, Layout};
use crate::error::CoverError;
use crate::lattice::{Direction, Point, Segment};
use crate::recordio::emit_layout;

const ALPHA: u8 = 5;

/// A member of the searched shape family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShapeSpec {
    Rectangle { width: u32, height: u32 },
    /// Rectangle with a staircase triangle of `cuts[i]` diagonals removed at
    /// each corner, listed bottom-left, bottom-right, top-right, top-left.
    Octagon { width: u32, height: u32, cuts: [u32; 4] },
}

impl fmt::Display for ShapeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeSpec::Rectangle { width, height } => write!(f, "rectangle {width}x{height}"),
            ShapeSpec::Octagon { width, height, cuts } => {
                write!(f, "octagon {width}x{height} cuts={},{},{},{}", cuts[0], cuts[1], cuts[2], cuts[3])
            }
        }
    }
}

/// A finite set of lattice points inside `[0, width) x [0, height)`.
#[derive(Clone, Debug)]
pub struct Shape {
    pub spec: ShapeSpec,
    points: HashSet<Point>,
}

impl Shape {
    pub fn rectangle(width: u32, height: u32) -> Shape {
        Shape::build(ShapeSpec::Rectangle { width, height }, width, height, [0; 4])
    }

    pub fn octagon(width: u32, height: u32, cuts: [u32; 4]) -> Shape {
        Shape::build(ShapeSpec::Octagon { width, height, cuts }, width, height, cuts)
    }

    fn build(spec: ShapeSpec, width: u32, height: u32, cuts: [u32; 4]) -> Shape {
        let (w, h) = (width as i32, height as i32);
        let c = cuts.map(|t| t as i32);
        let points = (0..w)
            .flat_map(|x| (0..h).map(move |y| Point::new(x, y)))
            .filter(|p| {
                let (l, r, b, t) = (p.x, w - 1 - p.x, p.y, h - 1 - p.y);
                l + b >= c[0] && r + b >= c[1] && r + t >= c[2] && l + t >= c[3]
            })
            .collect();
        Shape { spec, points }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.points.contains(&p)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Packs each maximal run of the shape, in every direction, with
/// `⌊run / 5⌋` disjoint lines laid end to end from the run's start.
pub fn pack_shape(shape: &Shape) -> Layout {
    let mut starts: Vec<&Point> = shape.points.iter().collect();
    starts.sort();
    let mut segments = Vec::new();
    for dir in Direction::ALL {
        for &&p in &starts {
            if shape.contains(p.offset(dir, -1)) {
                continue;
            }
            let run = (0..).take_while(|&i| shape.contains(p.offset(dir, i))).count() as i32;
            for k in 0..run / ALPHA as i32 {
                segments.push(Segment::new(p.offset(dir, k * ALPHA as i32), dir, ALPHA));
            }
        }
    }
    Layout::from_segments(ALPHA, segments).expect("runs are packed without overlap")
}

/// Run packing of the `n x n` point grid.
pub fn grid_packing(n: u32) -> Layout {
    pack_shape(&Shape::rectangle(n, n))
}

/// Search ranges and effort for [`packing_search`].
#[derive(Clone, Debug)]
pub struct PackingParams {
    pub widths: RangeInclusive<u32>,
    pub heights: RangeInclusive<u32>,
    /// Corner cut sizes; ignored unless `octagons` is set.
    pub cuts: RangeInclusive<u32>,
    pub octagons: bool,
    /// How many of the best raw packings get the local-improvement pass.
    pub refine_top: usize,
    /// Perturbation rounds per refined shape; 0 disables them.
    pub perturb_rounds: usize,
    pub seed: u64,
    /// Allowed excess of coverage over line count (36 for the standard start).
    pub slack: usize,
}

impl Default for PackingParams {
    fn default() -> Self {
        PackingParams {
            widths: 5..=16,
            heights: 5..=16,
            cuts: 0..=5,
            octagons: true,
            refine_top: 24,
            perturb_rounds: 300,
            seed: 0,
            slack: 36,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingResult {
    pub layout: Layout,
    pub n: usize,
    pub coverage: usize,
    pub shape: ShapeSpec,
    pub shapes_evaluated: usize,
}

/// Searches the rectangle/octagon family for the layout with the most lines
/// whose coverage is at most `n + slack`.
///
/// Every shape is run-packed; the most promising packings are then trimmed
/// until they satisfy the coverage budget, topped up greedily with the
/// cheapest extra lines, and perturbed (drop or shift a few lines, repair,
/// refill). Ties go to the smaller coverage, then the smaller serialized
/// layout.
pub fn packing_search(params: &PackingParams) -> Result<PackingResult, CoverError> {
    if params.widths.is_empty() {
        return Err(CoverError::EmptyRange("widths"));
    }
    if params.heights.is_empty() {
        return Err(CoverError::EmptyRange("heights"));
    }
    if params.octagons && params.cuts.is_empty() {
        return Err(CoverError::EmptyRange("cuts"));
    }
    let specs = enumerate_shapes(params);
    if specs.is_empty() {
        return Err(CoverError::EmptyRange("shapes"));
    }
    let slack = params.slack;

    let mut raw: Vec<(i64, ShapeSpec, Layout, usize)> = specs
        .par_iter()
        .map(|&spec| {
            let shape = shape_of(spec);
            let layout = pack_shape(&shape);
            let cov = layout.covered_points().len();
            let n = layout.len();
            let excess = (cov - n).saturating_sub(slack) as i64;
            (n as i64 - excess, spec, layout, cov)
        })
        .collect();
    raw.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let refined: Vec<Candidate> = raw
        .par_iter()
        .take(params.refine_top.max(1))
        .enumerate()
        .filter_map(|(i, (_, spec, layout, _))| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(i as u64);
            improve(layout, slack, params.perturb_rounds, &mut rng)
                .map(|l| Candidate::new(l, *spec))
        })
        .collect();

    // Raw packings that already meet the budget compete too.
    let plain = raw
        .iter()
        .filter(|(_, _, l, cov)| cov - l.len() <= slack)
        .map(|(_, spec, l, _)| Candidate::new(normalized(l), *spec));

    let best = refined
        .into_iter()
        .chain(plain)
        .min_by(|a, b| a.key().cmp(&b.key()))
        .ok_or(CoverError::EmptyRange("no shape meets the coverage budget"))?;
    verify_layout(&best.layout)?;
    Ok(PackingResult {
        n: best.layout.len(),
        coverage: best.coverage,
        layout: best.layout,
        shape: best.spec,
        shapes_evaluated: specs.len(),
    })
}

struct Candidate {
    layout: Layout,
    coverage: usize,
    spec: ShapeSpec,
    text: String,
}

impl Candidate {
    fn new(layout: Layout, spec: ShapeSpec) -> Self {
        let coverage = layout.covered_points().len();
        let text = emit_layout(&layout);
        Candidate { layout, coverage, spec, text }
    }

    fn key(&self) -> (std::cmp::Reverse<usize>, usize, &str) {
        (std::cmp::Reverse(self.layout.len()), self.coverage, &self.text)
    }
}

fn shape_of(spec: ShapeSpec) -> Shape {
    match spec {
        ShapeSpec::Rectangle { width, height } => Shape::rectangle(width, height),
        ShapeSpec::Octagon { width, height, cuts } => Shape::octagon(width, height, cuts),
    }
}

/// Cut tuples equivalent under the rectangle's symmetries.
fn cut_images(cuts: [u32; 4], square: bool) -> Vec<[u32; 4]> {
    let [bl, br, tr, tl] = cuts;
    let mut v = vec![cuts, [br, bl, tl, tr], [tl, tr, br, bl], [tr, tl, bl, br]];
    if square {
        let t: Vec<[u32; 4]> = v.iter().map(|&[a, b, c, d]| [a, d, c, b]).collect();
        v.extend(t);
    }
    v
}

fn enumerate_shapes(params: &PackingParams) -> Vec<ShapeSpec> {
    let mut out = Vec::new();
    for width in params.widths.clone() {
        for height in params.heights.clone() {
            if width > height && params.heights.contains(&width) && params.widths.contains(&height) {
                continue;
            }
            out.push(ShapeSpec::Rectangle { width, height });
            if !params.octagons {
                continue;
            }
            let cut_values: Vec<u32> = params.cuts.clone().collect();
            for &a in &cut_values {
                for &b in &cut_values {
                    for &c in &cut_values {
                        for &d in &cut_values {
                            let cuts = [a, b, c, d];
                            if cuts == [0; 4] {
                                continue;
                            }
                            let canonical =
                                cut_images(cuts, width == height).into_iter().min().expect("nonempty");
                            if canonical == cuts {
                                out.push(ShapeSpec::Octagon { width, height, cuts });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Mutable layout with per-point cover counts for cheap marginal queries.
#[derive(Clone)]
struct Packer {
    lines: BTreeSet<Segment>,
    count: HashMap<Point, u32>,
    occupied: [HashSet<Point>; 4],
}

impl Packer {
    fn from_layout(layout: &Layout) -> Self {
        let mut p = Packer { lines: BTreeSet::new(), count: HashMap::new(), occupied: Default::default() };
        for s in layout.segments() {
            p.add(*s);
        }
        p
    }

    fn n(&self) -> usize {
        self.lines.len()
    }

    fn coverage(&self) -> usize {
        self.count.len()
    }

    fn excess(&self) -> usize {
        self.coverage().saturating_sub(self.n())
    }

    fn fits(&self, s: &Segment) -> bool {
        let occ = &self.occupied[s.dir.index()];
        s.points().all(|p| !occ.contains(&p))
    }

    fn new_points(&self, s: &Segment) -> usize {
        s.points().filter(|p| !self.count.contains_key(p)).count()
    }

    fn unique_points(&self, s: &Segment) -> usize {
        s.points().filter(|p| self.count.get(p) == Some(&1)).count()
    }

    fn add(&mut self, s: Segment) {
        for p in s.points() {
            *self.count.entry(p).or_insert(0) += 1;
            self.occupied[s.dir.index()].insert(p);
        }
        self.lines.insert(s);
    }

    fn remove(&mut self, s: &Segment) {
        if !self.lines.remove(s) {
            return;
        }
        for p in s.points() {
            let c = self.count.get_mut(&p).expect("covered point");
            *c -= 1;
            if *c == 0 {
                self.count.remove(&p);
            }
            self.occupied[s.dir.index()].remove(&p);
        }
    }

    /// Drops the lines with the most privately covered points until the
    /// excess is within budget. Fails if no removal can help.
    fn repair(&mut self, slack: usize) -> bool {
        while self.excess() > slack {
            let worst = self
                .lines
                .iter()
                .map(|s| (self.unique_points(s), std::cmp::Reverse(*s)))
                .max()
                .map(|(u, s)| (u, s.0));
            match worst {
                Some((u, s)) if u >= 2 => self.remove(&s),
                _ => return false,
            }
        }
        true
    }

    /// Adds the line covering the fewest new points while the budget allows.
    fn fill(&mut self, slack: usize) {
        loop {
            let Some((lo, hi)) = self.bounds() else { return };
            let reach = ALPHA as i32 - 1;
            let mut best: Option<(usize, Segment)> = None;
            for x in lo.x - reach..=hi.x + reach {
                for y in lo.y - reach..=hi.y + reach {
                    for dir in Direction::ALL {
                        let s = Segment::new(Point::new(x, y), dir, ALPHA);
                        if !self.fits(&s) {
                            continue;
                        }
                        let u = self.new_points(&s);
                        if u == ALPHA as usize || self.coverage() + u > self.n() + 1 + slack {
                            continue;
                        }
                        if best.is_none_or(|(bu, bs)| (u, s) < (bu, bs)) {
                            best = Some((u, s));
                        }
                    }
                }
            }
            match best {
                Some((_, s)) => self.add(s),
                None => return,
            }
        }
    }

    fn bounds(&self) -> Option<(Point, Point)> {
        let mut it = self.count.keys();
        let first = *it.next()?;
        Some(it.fold((first, first), |(lo, hi), p| {
            (Point::new(lo.x.min(p.x), lo.y.min(p.y)), Point::new(hi.x.max(p.x), hi.y.max(p.y)))
        }))
    }

    fn better_than(&self, other: &Packer) -> bool {
        (self.n(), std::cmp::Reverse(self.coverage())) > (other.n(), std::cmp::Reverse(other.coverage()))
    }

    fn to_layout(&self) -> Layout {
        Layout::from_segments_unchecked(ALPHA, self.lines.iter().copied())
    }
}

fn normalized(layout: &Layout) -> Layout {
    let pts = layout.covered_points();
    let min_x = pts.iter().map(|p| p.x).min().unwrap_or(0);
    let min_y = pts.iter().map(|p| p.y).min().unwrap_or(0);
    layout.translated(Point::new(-min_x, -min_y))
}

fn improve<R: Rng>(layout: &Layout, slack: usize, rounds: usize, rng: &mut R) -> Option<Layout> {
    let mut best = Packer::from_layout(layout);
    if !best.repair(slack) {
        return None;
    }
    best.fill(slack);
    for _ in 0..rounds {
        let mut trial = best.clone();
        let lines: Vec<Segment> = trial.lines.iter().copied().collect();
        if lines.is_empty() {
            break;
        }
        if rng.gen_bool(0.5) {
            let k = rng.gen_range(1..=3usize).min(lines.len());
            for s in lines.choose_multiple(rng, k) {
                trial.remove(s);
            }
        } else {
            let s = *lines.choose(rng).expect("nonempty");
            trial.remove(&s);
            let shift = *[-2, -1, 1, 2].choose(rng).expect("nonempty");
            let moved = Segment::new(s.anchor.offset(s.dir, shift), s.dir, ALPHA);
            if trial.fits(&moved) {
                trial.add(moved);
            } else {
                trial.add(s);
            }
        }
        if !trial.repair(slack) {
            continue;
        }
        trial.fill(slack);
        if trial.better_than(&best) {
            best = trial;
        }
    }
    Some(normalized(&best.to_layout()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_examples() {
        let ten = grid_packing(10);
        assert_eq!(ten.len(), 64);
        assert_eq!(ten.counts(), [20, 20, 12, 12]);
        assert_eq!(ten.covered_points().len(), 100);
        let five = grid_packing(5);
        assert_eq!(five.len(), 12);
        assert_eq!(five.covered_points().len(), 25);
        let four = grid_packing(4);
        assert!(four.is_empty());
        assert_eq!(four.covered_points().len(), 0);
    }

    #[test]
    fn octagon_cuts_remove_triangles() {
        let o = Shape::octagon(10, 10, [2, 0, 0, 0]);
        assert_eq!(o.len(), 100 - 3);
        let o = Shape::octagon(10, 10, [3, 3, 3, 3]);
        assert_eq!(o.len(), 100 - 4 * 6);
        assert!(!o.contains(Point::new(0, 0)));
        assert!(o.contains(Point::new(3, 0)));
        assert!(!o.contains(Point::new(9, 9)));
    }

    #[test]
    fn cut_canonicalization() {
        let imgs = cut_images([1, 0, 0, 0], false);
        assert!(imgs.contains(&[0, 1, 0, 0]));
        assert!(imgs.contains(&[0, 0, 1, 0]));
        assert!(imgs.contains(&[0, 0, 0, 1]));
        let params = PackingParams { widths: 8..=8, heights: 8..=8, cuts: 0..=1, ..Default::default() };
        // square: one-corner, two adjacent, two opposite, three, four
        assert_eq!(enumerate_shapes(&params).len(), 1 + 5);
    }

    #[test]
    fn small_search_contains_grid() {
        let params = PackingParams {
            widths: 9..=10,
            heights: 9..=10,
            cuts: 0..=1,
            refine_top: 2,
            perturb_rounds: 5,
            ..Default::default()
        };
        let r = packing_search(&params).unwrap();
        assert!(r.n >= 64);
        assert!(r.coverage <= r.n + 36);
        verify_layout(&r.layout).unwrap();
        assert_eq!(r.layout.covered_points().len(), r.coverage);
    }

    #[test]
    fn empty_ranges_rejected() {
        #[allow(clippy::reversed_empty_ranges)]
        let params = PackingParams { widths: 5..=4, ..Default::default() };
        assert_eq!(packing_search(&params).unwrap_err(), CoverError::EmptyRange("widths"));
    }
}
