//! Lattice geometry: points, the four line directions, fixed-length
//! segments and game variants.

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use crate::error::ConfigError;

/// A lattice point. `y` grows upward. Ordered lexicographically by `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: i32,
    pub y: i32,
}

impl Point {
    pub const fn new(x: i32, y: i32) -> Self {
        Point { x, y }
    }

    /// `self + k * dir.step()`
    pub fn offset(self, dir: Direction, k: i32) -> Point {
        let (dx, dy) = dir.step();
        Point::new(self.x + k * dx, self.y + k * dy)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

/// One of the four line directions a segment can be drawn in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    E,
    N,
    NE,
    SE,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::E, Direction::N, Direction::NE, Direction::SE];

    /// Unit step. Never `(0, 0)`; `dx` is never negative.
    pub const fn step(self) -> (i32, i32) {
        match self {
            Direction::E => (1, 0),
            Direction::N => (0, 1),
            Direction::NE => (1, 1),
            Direction::SE => (1, -1),
        }
    }

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn name(self) -> &'static str {
        match self {
            Direction::E => "E",
            Direction::N => "N",
            Direction::NE => "NE",
            Direction::SE => "SE",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Direction {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "E" => Ok(Direction::E),
            "N" => Ok(Direction::N),
            "NE" => Ok(Direction::NE),
            "SE" => Ok(Direction::SE),
            other => Err(ConfigError::UnknownDirection(other.to_string())),
        }
    }
}

/// A straight run of `length` lattice points starting at `anchor` and
/// walking along `dir`.
///
/// The anchor is the end in the negative step direction, which is also the
/// lexicographically smallest covered point, so `(dir, anchor, length)`
/// identifies a segment uniquely.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Segment {
    pub anchor: Point,
    pub dir: Direction,
    pub length: u8,
}

impl Segment {
    pub const fn new(anchor: Point, dir: Direction, length: u8) -> Self {
        Segment { anchor, dir, length }
    }

    /// The segment of `length` points along `dir` whose `index`-th point is `p`.
    pub fn through(p: Point, dir: Direction, index: u8, length: u8) -> Self {
        Segment::new(p.offset(dir, -(index as i32)), dir, length)
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        let (anchor, dir) = (self.anchor, self.dir);
        (0..self.length as i32).map(move |i| anchor.offset(dir, i))
    }

    pub fn end(&self) -> Point {
        self.anchor.offset(self.dir, self.length as i32 - 1)
    }

    /// Position of `p` along the segment, if covered.
    pub fn index_of(&self, p: Point) -> Option<u8> {
        let d = p - self.anchor;
        let i = match self.dir {
            Direction::E if d.y == 0 => d.x,
            Direction::N if d.x == 0 => d.y,
            Direction::NE if d.x == d.y => d.x,
            Direction::SE if d.y == -d.x => d.x,
            _ => return None,
        };
        (0..self.length as i32).contains(&i).then_some(i as u8)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.index_of(p).is_some()
    }

    pub fn shared_points(&self, other: &Segment) -> usize {
        if self.dir != other.dir {
            return self.points().filter(|&p| other.contains(p)).count();
        }
        other.points().filter(|&p| self.contains(p)).count()
    }

    /// Key used for canonical ordering of segments: `(dir, anchor)`.
    pub fn sort_key(&self) -> (Direction, Point, u8) {
        (self.dir, self.anchor, self.length)
    }
}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentRelation {
    DistinctDirection,
    Disjoint,
    Touching,
    Overlapping,
}

/// Classifies a pair of segments. Segments in different directions impose no
/// constraint on each other.
pub fn segment_relation(a: &Segment, b: &Segment) -> SegmentRelation {
    if a.dir != b.dir {
        return SegmentRelation::DistinctDirection;
    }
    match a.shared_points(b) {
        0 => SegmentRelation::Disjoint,
        1 => SegmentRelation::Touching,
        _ => SegmentRelation::Overlapping,
    }
}

/// Line length plus the touching rule: `αT` lets same-direction lines share
/// one point, `αD` requires them to be disjoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Variant {
    alpha: u8,
    touching_allowed: bool,
}

impl Variant {
    pub const FIVE_D: Variant = Variant { alpha: 5, touching_allowed: false };
    pub const FIVE_T: Variant = Variant { alpha: 5, touching_allowed: true };

    pub fn new(alpha: u8, touching_allowed: bool) -> Result<Self, ConfigError> {
        if !(3..=6).contains(&alpha) {
            return Err(ConfigError::UnsupportedAlpha(alpha));
        }
        Ok(Variant { alpha, touching_allowed })
    }

    pub const fn alpha(self) -> u8 {
        self.alpha
    }

    pub const fn touching_allowed(self) -> bool {
        self.touching_allowed
    }

    pub const fn is_5d(self) -> bool {
        self.alpha == 5 && !self.touching_allowed
    }

    /// Number of crosses on the starting board: `12 * (alpha - 2)`.
    pub const fn initial_cross_count(self) -> usize {
        12 * (self.alpha as usize - 2)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.alpha, if self.touching_allowed { 'T' } else { 'D' })
    }
}

impl FromStr for Variant {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConfigError::UnknownVariant(s.to_string());
        let (digits, rule) = s.split_at(s.len().saturating_sub(1));
        let alpha: u8 = digits.parse().map_err(|_| bad())?;
        let touching = match rule {
            "T" => true,
            "D" => false,
            _ => return Err(bad()),
        };
        Variant::new(alpha, touching)
    }
}

/// Starting crosses: the outline of a plus shape with twelve edges of
/// `alpha - 1` points each (shared corners counted once). For `alpha = 5`
/// this is the familiar 36-cross layout on `[0, 9] x [0, 9]`. Sorted.
pub fn initial_crosses(alpha: u8) -> Result<Vec<Point>, ConfigError> {
    if !(3..=6).contains(&alpha) {
        return Err(ConfigError::UnsupportedAlpha(alpha));
    }
    let s = alpha as i32 - 2;
    let corners = [
        (s, 0),
        (2 * s, 0),
        (2 * s, s),
        (3 * s, s),
        (3 * s, 2 * s),
        (2 * s, 2 * s),
        (2 * s, 3 * s),
        (s, 3 * s),
        (s, 2 * s),
        (0, 2 * s),
        (0, s),
        (s, s),
    ];
    let mut points = Vec::with_capacity(12 * s as usize);
    for (i, &(x0, y0)) in corners.iter().enumerate() {
        let (x1, y1) = corners[(i + 1) % corners.len()];
        let (dx, dy) = ((x1 - x0).signum(), (y1 - y0).signum());
        for k in 0..s {
            points.push(Point::new(x0 + k * dx, y0 + k * dy));
        }
    }
    points.sort();
    Ok(points)
}
