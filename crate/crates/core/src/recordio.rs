//! Text formats for game records and line layouts, plus ASCII and SVG
//! rendering.
//!
//! Record:
//!
//! ```text
//! morpion-record v1 variant=5D
//! 1 cross=2,0 dir=E anchor=2,0
//! ```
//!
//! Annotations, if any, follow `variant=` on the header as sorted
//! `key=value` tokens. Layout:
//!
//! ```text
//! morpion-layout v1 alpha=5
//! dir=E anchor=0,0
//! ```
//!
//! Segments are written in canonical `(dir, anchor)` order. Both formats are
//! UTF-8 with LF line endings, a final newline and no trailing whitespace.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::board::Board;
use crate::engine::{replay, GameRecord, Move};
use crate::error::{ParseError, ReplayError};
use crate::lattice::{Direction, Point, Segment, Variant};
use crate::linecover::Layout;

pub const RECORD_MAGIC: &str = "morpion-record";
pub const LAYOUT_MAGIC: &str = "morpion-layout";
pub const FORMAT_VERSION: &str = "v1";

pub fn emit_record(record: &GameRecord) -> String {
    let mut out = format!("{RECORD_MAGIC} {FORMAT_VERSION} variant={}", record.variant);
    for (k, v) in &record.metadata {
        let _ = write!(out, " {}={}", sanitize(k), sanitize(v));
    }
    out.push('\n');
    for (i, mv) in record.moves.iter().enumerate() {
        let _ = writeln!(
            out,
            "{} cross={} dir={} anchor={}",
            i + 1,
            mv.cross,
            mv.line.dir,
            mv.line.anchor
        );
    }
    out
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_whitespace() || c == '=' { '_' } else { c }).collect()
}

/// Splits `text` into lines, rejecting CR, a missing final newline and
/// trailing whitespace.
fn strict_lines(text: &str) -> Result<Vec<&str>, ParseError> {
    if text.is_empty() {
        return Err(ParseError::at(1, 1, "empty input"));
    }
    let body = text
        .strip_suffix('\n')
        .ok_or_else(|| ParseError::at(text.lines().count(), 1, "missing final newline"))?;
    let lines: Vec<&str> = body.split('\n').collect();
    for (i, line) in lines.iter().enumerate() {
        if let Some(col) = line.find('\r') {
            return Err(ParseError::at(i + 1, col + 1, "carriage return"));
        }
        if line.ends_with(char::is_whitespace) {
            return Err(ParseError::at(i + 1, line.len(), "trailing whitespace"));
        }
    }
    Ok(lines)
}

/// Tokens of a line with their 1-based start columns. Tokens are separated
/// by exactly one space.
fn tokens(line: &str, line_no: usize) -> Result<Vec<(usize, &str)>, ParseError> {
    let mut out = Vec::new();
    let mut col = 1;
    for tok in line.split(' ') {
        if tok.is_empty() {
            return Err(ParseError::at(line_no, col, "expected a single space between fields"));
        }
        out.push((col, tok));
        col += tok.len() + 1;
    }
    Ok(out)
}

fn field<'a>(
    tok: Option<&(usize, &'a str)>,
    key: &str,
    line_no: usize,
    end_col: usize,
) -> Result<(usize, &'a str), ParseError> {
    let &(col, t) = tok.ok_or_else(|| ParseError::at(line_no, end_col, format!("missing {key}=")))?;
    let value = t
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| ParseError::at(line_no, col, format!("expected {key}=")))?;
    Ok((col + key.len() + 1, value))
}

fn parse_point(s: &str, line_no: usize, col: usize) -> Result<Point, ParseError> {
    let bad = || ParseError::at(line_no, col, format!("bad coordinates {s:?}"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    let canonical = |v: &str| v.parse::<i32>().ok().filter(|n| n.to_string() == v);
    Ok(Point::new(canonical(x).ok_or_else(bad)?, canonical(y).ok_or_else(bad)?))
}

fn parse_dir(s: &str, line_no: usize, col: usize) -> Result<Direction, ParseError> {
    s.parse().map_err(|_| ParseError::at(line_no, col, format!("unknown direction {s:?}")))
}

fn check_header(
    toks: &[(usize, &str)],
    magic: &str,
) -> Result<(), ParseError> {
    match toks.first() {
        Some(&(_, m)) if m == magic => {}
        _ => return Err(ParseError::at(1, 1, format!("expected {magic:?} header"))),
    }
    match toks.get(1) {
        Some(&(_, v)) if v == FORMAT_VERSION => Ok(()),
        Some(&(_, v)) => Err(ParseError::UnsupportedVersion(v.to_string())),
        None => Err(ParseError::at(1, magic.len() + 2, "missing version")),
    }
}

pub fn parse_record(text: &str) -> Result<GameRecord, ParseError> {
    let lines = strict_lines(text)?;
    let head = tokens(lines[0], 1)?;
    check_header(&head, RECORD_MAGIC)?;
    let (vcol, vtext) = field(head.get(2), "variant", 1, lines[0].len() + 1)?;
    let variant: Variant = vtext
        .parse()
        .map_err(|_| ParseError::at(1, vcol, format!("unknown variant {vtext:?}")))?;
    let mut metadata = BTreeMap::new();
    let mut last_key: Option<&str> = None;
    for &(col, tok) in &head[3..] {
        let (k, v) = tok
            .split_once('=')
            .filter(|(k, v)| !k.is_empty() && !v.is_empty())
            .ok_or_else(|| ParseError::at(1, col, "expected key=value annotation"))?;
        if last_key.is_some_and(|prev| prev >= k) || k == "variant" {
            return Err(ParseError::at(1, col, "annotations must be unique and sorted by key"));
        }
        last_key = Some(k);
        metadata.insert(k.to_string(), v.to_string());
    }

    let mut moves = Vec::with_capacity(lines.len() - 1);
    for (i, line) in lines.iter().enumerate().skip(1) {
        let line_no = i + 1;
        let toks = tokens(line, line_no)?;
        let (icol, itext) = toks[0];
        if itext != i.to_string() {
            return Err(ParseError::at(line_no, icol, format!("expected move index {i}")));
        }
        let end = line.len() + 1;
        let (ccol, c) = field(toks.get(1), "cross", line_no, end)?;
        let cross = parse_point(c, line_no, ccol)?;
        let (dcol, d) = field(toks.get(2), "dir", line_no, end)?;
        let dir = parse_dir(d, line_no, dcol)?;
        let (acol, a) = field(toks.get(3), "anchor", line_no, end)?;
        let anchor = parse_point(a, line_no, acol)?;
        if let Some(&(col, _)) = toks.get(4) {
            return Err(ParseError::at(line_no, col, "unexpected trailing field"));
        }
        let line_seg = Segment::new(anchor, dir, variant.alpha());
        if !line_seg.contains(cross) {
            return Err(ParseError::at(line_no, ccol, "line does not cover the cross"));
        }
        moves.push(Move::new(cross, line_seg));
    }
    Ok(GameRecord { variant, moves, metadata })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Replay(#[from] ReplayError),
}

/// Parses and replays a record, rejecting any illegal move.
pub fn load_record(text: &str) -> Result<(GameRecord, Board), LoadError> {
    let record = parse_record(text)?;
    let board = replay(&record)?;
    Ok((record, board))
}

pub fn emit_layout(layout: &Layout) -> String {
    let mut out = format!("{LAYOUT_MAGIC} {FORMAT_VERSION} alpha={}\n", layout.alpha());
    for s in layout.segments() {
        let _ = writeln!(out, "dir={} anchor={}", s.dir, s.anchor);
    }
    out
}

/// Parses a layout; segments may appear in any order but must be valid
/// (same-direction lines disjoint).
pub fn parse_layout(text: &str) -> Result<Layout, ParseError> {
    let lines = strict_lines(text)?;
    let head = tokens(lines[0], 1)?;
    check_header(&head, LAYOUT_MAGIC)?;
    let (acol, a) = field(head.get(2), "alpha", 1, lines[0].len() + 1)?;
    let alpha: u8 = a
        .parse()
        .ok()
        .filter(|v| (3..=6).contains(v))
        .ok_or_else(|| ParseError::at(1, acol, format!("bad alpha {a:?}")))?;
    if let Some(&(col, _)) = head.get(3) {
        return Err(ParseError::at(1, col, "unexpected trailing field"));
    }
    let mut layout = Layout::new(alpha);
    for (i, line) in lines.iter().enumerate().skip(1) {
        let line_no = i + 1;
        let toks = tokens(line, line_no)?;
        let end = line.len() + 1;
        let (dcol, d) = field(toks.first(), "dir", line_no, end)?;
        let dir = parse_dir(d, line_no, dcol)?;
        let (pcol, p) = field(toks.get(1), "anchor", line_no, end)?;
        let anchor = parse_point(p, line_no, pcol)?;
        if let Some(&(col, _)) = toks.get(2) {
            return Err(ParseError::at(line_no, col, "unexpected trailing field"));
        }
        layout
            .insert(Segment::new(anchor, dir, alpha))
            .map_err(|e| ParseError::at(line_no, 1, e.to_string()))?;
    }
    Ok(layout)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Ascii,
    Svg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RenderSpec {
    pub format: RenderFormat,
    /// SVG pixels per lattice unit.
    pub cell_size: u32,
    /// Label crosses with the number of the move that placed them.
    pub annotate_moves: bool,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec { format: RenderFormat::Ascii, cell_size: 24, annotate_moves: true }
    }
}

struct Scene {
    /// Marked points with an optional move number.
    marks: BTreeMap<Point, Option<usize>>,
    segments: Vec<Segment>,
}

impl Scene {
    fn of_board(board: &Board, annotate: bool) -> Scene {
        let mut marks: BTreeMap<Point, Option<usize>> =
            board.crosses().iter().map(|&p| (p, None)).collect();
        if annotate {
            for (i, mv) in board.history().iter().enumerate() {
                marks.insert(mv.cross, Some(i + 1));
            }
        }
        Scene { marks, segments: board.canonical_lines() }
    }

    fn of_layout(layout: &Layout) -> Scene {
        let marks = layout.segments().flat_map(|s| s.points()).map(|p| (p, None)).collect();
        Scene { marks, segments: layout.segments().copied().collect() }
    }

    fn bounds(&self) -> (Point, Point) {
        let pts = self.marks.keys().copied().chain(self.segments.iter().flat_map(|s| s.points()));
        let mut lo = Point::new(i32::MAX, i32::MAX);
        let mut hi = Point::new(i32::MIN, i32::MIN);
        for p in pts {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        if lo.x > hi.x {
            (Point::new(0, 0), Point::new(0, 0))
        } else {
            (lo, hi)
        }
    }

    fn links(&self) -> BTreeSet<(Point, Direction)> {
        self.segments
            .iter()
            .flat_map(|s| (0..s.length as i32 - 1).map(move |i| (s.anchor.offset(s.dir, i), s.dir)))
            .collect()
    }

    fn ascii(&self) -> String {
        let (lo, hi) = self.bounds();
        let links = self.links();
        let linked = |x: i32, y: i32, d: Direction| links.contains(&(Point::new(x, y), d));
        let mut rows = Vec::new();
        for y in (lo.y..=hi.y).rev() {
            let mut row = String::new();
            for x in lo.x..=hi.x {
                match self.marks.get(&Point::new(x, y)) {
                    Some(Some(n)) => {
                        let _ = write!(row, "{n:>3}");
                    }
                    Some(None) => row.push_str(" o "),
                    None => row.push_str(" . "),
                }
                if x < hi.x {
                    row.push(if linked(x, y, Direction::E) { '-' } else { ' ' });
                }
            }
            rows.push(row.trim_end().to_string());
            if y == lo.y {
                break;
            }
            let mut between = String::new();
            for x in lo.x..=hi.x {
                between.push_str(if linked(x, y - 1, Direction::N) { " | " } else { "   " });
                if x < hi.x {
                    let ne = linked(x, y - 1, Direction::NE);
                    let se = linked(x, y, Direction::SE);
                    between.push(match (ne, se) {
                        (true, true) => 'X',
                        (true, false) => '/',
                        (false, true) => '\\',
                        (false, false) => ' ',
                    });
                }
            }
            rows.push(between.trim_end().to_string());
        }
        let mut out = rows.join("\n");
        out.push('\n');
        out
    }

    fn svg(&self, cell: u32) -> String {
        let (lo, hi) = self.bounds();
        let cell = cell.max(4) as i64;
        let px = |x: i32| (x - lo.x + 1) as i64 * cell;
        let py = |y: i32| (hi.y - y + 1) as i64 * cell;
        let width = (hi.x - lo.x + 2) as i64 * cell;
        let height = (hi.y - lo.y + 2) as i64 * cell;
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
        );
        for s in &self.segments {
            let (a, b) = (s.anchor, s.end());
            let _ = writeln!(
                out,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" stroke-width=\"2\"/>",
                px(a.x),
                py(a.y),
                px(b.x),
                py(b.y)
            );
        }
        let r = cell / 3;
        for (p, label) in &self.marks {
            let fill = if label.is_some() { "white" } else { "none" };
            let _ = writeln!(
                out,
                "<circle cx=\"{}\" cy=\"{}\" r=\"{r}\" fill=\"{fill}\" stroke=\"black\"/>",
                px(p.x),
                py(p.y)
            );
        }
        let mut numbered: Vec<(usize, Point)> =
            self.marks.iter().filter_map(|(&p, n)| n.map(|n| (n, p))).collect();
        numbered.sort();
        for (n, p) in numbered {
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" font-size=\"{}\" text-anchor=\"middle\" dominant-baseline=\"central\">{n}</text>",
                px(p.x),
                py(p.y),
                (cell / 2).max(6)
            );
        }
        out.push_str("</svg>\n");
        out
    }

    fn render(&self, spec: &RenderSpec) -> Vec<u8> {
        match spec.format {
            RenderFormat::Ascii => self.ascii().into_bytes(),
            RenderFormat::Svg => self.svg(spec.cell_size).into_bytes(),
        }
    }
}

pub fn render_board(board: &Board, spec: &RenderSpec) -> Vec<u8> {
    Scene::of_board(board, spec.annotate_moves).render(spec)
}

pub fn render_layout(layout: &Layout, spec: &RenderSpec) -> Vec<u8> {
    Scene::of_layout(layout).render(spec)
}
