use std::collections::HashSet;

use proptest::prelude::*;
use rand::Rng;

use morpion::engine::{legal_moves_after, Move};
use morpion::lattice::initial_crosses;
use morpion::linecover::{
    combined_lower, infeasibility_scan, lower_bound_with, random_layout, verify_layout, RuleSet,
};
use morpion::potential::{check_terminal_lemma, total_potential};
use morpion::recordio::{emit_record, parse_record};
use morpion::solver::{guard_record, random_playout, stream_rng};
use morpion::{legal_moves, segment_relation, Board, Direction, Point, Segment, SegmentRelation, Variant};

fn direction() -> impl Strategy<Value = Direction> {
    prop::sample::select(Direction::ALL.to_vec())
}

fn segment(span: i32) -> impl Strategy<Value = Segment> {
    (-span..=span, -span..=span, direction()).prop_map(|(x, y, d)| Segment::new(Point::new(x, y), d, 5))
}

fn variant() -> impl Strategy<Value = Variant> {
    prop::sample::select(vec![Variant::FIVE_D, Variant::FIVE_T])
}

/// Plays `steps` random moves from the start and returns the board.
fn random_board(variant: Variant, seed: u64, steps: usize) -> Board {
    let mut board = Board::initial(variant).unwrap();
    let mut moves = legal_moves(&board);
    let mut rng = stream_rng(seed, 99);
    for _ in 0..steps {
        if moves.is_empty() {
            break;
        }
        let mv = moves[rng.gen_range(0..moves.len())];
        board.apply(mv).unwrap();
        moves = legal_moves_after(&board, &moves, &mv);
    }
    board
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn segment_covers_length_points(s in segment(20)) {
        let pts: HashSet<Point> = s.points().collect();
        prop_assert_eq!(pts.len(), 5);
    }

    #[test]
    fn relation_is_symmetric(a in segment(6), b in segment(6)) {
        prop_assert_eq!(segment_relation(&a, &b), segment_relation(&b, &a));
    }

    #[test]
    fn touching_means_one_shared_endpoint(a in segment(6), b in segment(6)) {
        let shared: Vec<Point> = a.points().filter(|p| b.contains(*p)).collect();
        let touching = segment_relation(&a, &b) == SegmentRelation::Touching;
        if a.dir == b.dir {
            prop_assert_eq!(touching, shared.len() == 1);
            if touching {
                let ends = |s: &Segment| [s.anchor, s.end()];
                prop_assert!(ends(&a).contains(&shared[0]) && ends(&b).contains(&shared[0]));
            }
        } else {
            prop_assert!(!touching);
        }
    }
}

#[test]
fn initial_cross_counts() {
    for alpha in 3..=6u8 {
        assert_eq!(initial_crosses(alpha).unwrap().len(), 12 * (alpha as usize - 2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn apply_then_undo_restores(v in variant(), seed in any::<u64>(), steps in 0usize..40) {
        let mut board = random_board(v, seed, steps);
        let before = board.clone();
        let moves = legal_moves(&board);
        for mv in moves {
            board.apply(mv).unwrap();
            board.undo().unwrap();
            prop_assert_eq!(board.crosses(), before.crosses());
            prop_assert_eq!(board.canonical_lines(), before.canonical_lines());
            prop_assert_eq!(legal_moves(&board), legal_moves(&before));
        }
    }

    #[test]
    fn incremental_generation_matches_full(v in variant(), seed in any::<u64>()) {
        let mut board = Board::initial(v).unwrap();
        let mut moves = legal_moves(&board);
        let mut rng = stream_rng(seed, 5);
        while !moves.is_empty() {
            let mv: Move = moves[rng.gen_range(0..moves.len())];
            board.apply(mv).unwrap();
            moves = legal_moves_after(&board, &moves, &mv);
            prop_assert_eq!(&moves, &legal_moves(&board));
        }
        prop_assert!(board.is_terminal());
    }

    #[test]
    fn reachable_boards_keep_line_rules(v in variant(), seed in any::<u64>()) {
        let board = random_board(v, seed, 200);
        for dir in Direction::ALL {
            let lines = board.lines(dir);
            for (i, a) in lines.iter().enumerate() {
                prop_assert!(a.points().all(|p| board.has_cross(p)));
                for b in &lines[i + 1..] {
                    let shared = a.points().filter(|p| b.contains(*p)).count();
                    let limit = if v.is_5d() { 0 } else { 1 };
                    prop_assert!(shared <= limit);
                }
            }
        }
    }

    #[test]
    fn potential_law_and_record_roundtrip(seed in any::<u64>()) {
        let rec = random_playout(Variant::FIVE_D, seed);
        let board = guard_record(&rec).unwrap();
        prop_assert_eq!(total_potential(&board), 144 - rec.moves.len() as i64);
        if rec.moves.len() >= 3 {
            prop_assert!(check_terminal_lemma(&board).unwrap().holds());
        }
        prop_assert_eq!(parse_record(&emit_record(&rec)).unwrap(), rec);
    }

    #[test]
    fn more_rules_never_raise_the_bound(n in 1u64..400) {
        let a = lower_bound_with(n, RuleSet::A).bound;
        prop_assert!(a <= lower_bound_with(n, RuleSet::AB).bound);
        prop_assert!(a <= lower_bound_with(n, RuleSet::A_REMARK).bound);
        prop_assert!(lower_bound_with(n, RuleSet::AB).bound <= combined_lower(n).bound);
    }
}

#[test]
fn scan_monotone_in_rules() {
    let sets = [RuleSet::A, RuleSet::AB, RuleSet::A_REMARK, RuleSet::ALL];
    for small in sets {
        for big in sets {
            if small.is_subset(big) {
                let s = infeasibility_scan(small, 300).unwrap().upper_bound;
                let b = infeasibility_scan(big, 300).unwrap().upper_bound;
                assert!(b <= s, "{small} -> {s}, {big} -> {b}");
            }
        }
    }
}

/// Ten thousand random valid layouts; every one must cover at least the
/// combined certified lower bound for its line count.
#[test]
fn random_layouts_respect_lower_bounds() {
    let mut rng = stream_rng(2024, 0);
    let mut checked = 0;
    while checked < 10_000 {
        let counts = [0; 4].map(|_| rng.gen_range(0..6usize));
        let window = rng.gen_range(5..16);
        let Some(layout) = random_layout(&mut rng, counts, window, 5) else { continue };
        verify_layout(&layout).unwrap();
        let pts: HashSet<Point> = layout.segments().flat_map(|s| s.points()).collect();
        assert_eq!(layout.covered_points(), pts);
        let n = layout.len() as u64;
        assert!(
            pts.len() as u64 >= combined_lower(n).bound,
            "{} lines cover {} points: {layout:?}",
            n,
            pts.len()
        );
        checked += 1;
    }
}
