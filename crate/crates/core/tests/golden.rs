use std::collections::HashSet;

use morpion::lattice::initial_crosses;
use morpion::linecover::grid_packing;
use morpion::recordio::{
    emit_layout, emit_record, load_record, parse_layout, parse_record, render_board, render_layout,
    RenderFormat, RenderSpec,
};
use morpion::{Board, GameRecord, Point, Variant};

const INITIAL: &str = include_str!("golden/initial_5d.txt");
const RECORD: &str = include_str!("golden/record_nmcs_l1_seed7.txt");
const LAYOUT: &str = include_str!("golden/layout_grid10.txt");

#[test]
fn initial_render_matches_golden() {
    let board = Board::initial(Variant::FIVE_D).unwrap();
    let out = render_board(&board, &RenderSpec::default());
    assert_eq!(String::from_utf8(out).unwrap(), INITIAL);
}

#[test]
fn record_roundtrips_byte_identically() {
    let rec = parse_record(RECORD).unwrap();
    assert_eq!(emit_record(&rec), RECORD);
    let (_, board) = load_record(RECORD).unwrap();
    assert!(board.is_terminal());
}

#[test]
fn layout_roundtrips_byte_identically() {
    let layout = parse_layout(LAYOUT).unwrap();
    assert_eq!(emit_layout(&layout), LAYOUT);
    assert_eq!(layout, grid_packing(10));
}

#[test]
fn renders_are_repeatable() {
    let (_, board) = load_record(RECORD).unwrap();
    let layout = parse_layout(LAYOUT).unwrap();
    for format in [RenderFormat::Ascii, RenderFormat::Svg] {
        let spec = RenderSpec { format, ..RenderSpec::default() };
        assert_eq!(render_board(&board, &spec), render_board(&board, &spec));
        assert_eq!(render_layout(&layout, &spec), render_layout(&layout, &spec));
    }
}

#[test]
fn grid_svg_has_one_line_element_per_segment() {
    let spec = RenderSpec { format: RenderFormat::Svg, ..RenderSpec::default() };
    let svg = String::from_utf8(render_layout(&grid_packing(10), &spec)).unwrap();
    assert_eq!(svg.matches("<line ").count(), 64);
    assert_eq!(svg.matches("<circle ").count(), 100);
}

/// Straightforward legality check over point sets, kept apart from the
/// engine's bit-packed board.
fn oracle_legal(rec: &GameRecord) -> bool {
    let mut crosses: HashSet<Point> = initial_crosses(rec.variant.alpha()).unwrap().into_iter().collect();
    let mut drawn = Vec::new();
    for mv in &rec.moves {
        if crosses.contains(&mv.cross) || !mv.line.contains(mv.cross) {
            return false;
        }
        crosses.insert(mv.cross);
        if !mv.line.points().all(|p| crosses.contains(&p)) {
            return false;
        }
        for other in &drawn {
            let other: &morpion::Segment = other;
            if other.dir != mv.line.dir {
                continue;
            }
            let shared = other.points().filter(|p| mv.line.contains(*p)).count();
            let limit = if rec.variant.touching_allowed() { 1 } else { 0 };
            if shared > limit {
                return false;
            }
        }
        drawn.push(mv.line);
    }
    true
}

/// Each coordinate of each move, nudged by one in either direction.
fn coordinate_mutations(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let start_of_number = (bytes[i].is_ascii_digit() || bytes[i] == b'-')
            && i > 0
            && (bytes[i - 1] == b'=' || bytes[i - 1] == b',');
        if !start_of_number {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        let header = !text[..i].contains('\n');
        if !header {
            let v: i64 = text[i..j].parse().unwrap();
            for d in [-1, 1] {
                out.push(format!("{}{}{}", &text[..i], v + d, &text[j..]));
            }
        }
        i = j;
    }
    out
}

#[test]
fn coordinate_mutations_are_judged_like_the_oracle() {
    let mutations = coordinate_mutations(RECORD);
    assert!(mutations.len() > 400);
    let mut rejected = 0;
    for m in &mutations {
        let engine_ok = load_record(m).is_ok();
        let oracle_ok = parse_record(m).map(|r| oracle_legal(&r)).unwrap_or(false);
        assert_eq!(engine_ok, oracle_ok, "{m}");
        rejected += usize::from(!engine_ok);
    }
    assert!(rejected * 10 > mutations.len() * 9);
}

#[test]
fn layout_mutations_never_yield_invalid_layouts() {
    for m in coordinate_mutations(LAYOUT) {
        if let Ok(layout) = parse_layout(&m) {
            morpion::linecover::verify_layout(&layout).unwrap();
        }
    }
}
