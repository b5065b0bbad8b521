use morpion::recordio::emit_record;
use morpion::solver::{
    beam_search, best_of_playouts, exhaustive_solve, guard_record, nmcs, solve, Heuristic, SearchConfig,
    Strategy,
};
use morpion::Variant;

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

// Scores observed on the first calibration run, frozen so that any change
// in move generation, RNG streams or tie-breaking shows up here.
#[test]
fn calibrated_pins() {
    assert_eq!(best_of_playouts(Variant::FIVE_D, 0, 10_000).best_score, 62);
    assert_eq!(nmcs(Variant::FIVE_D, 2, 0, &SearchConfig::default()).best_score, 66);
}

#[test]
fn golden_record_is_reproduced() {
    let r = nmcs(Variant::FIVE_D, 1, 7, &SearchConfig::default());
    assert_eq!(emit_record(&r.best_record), include_str!("golden/record_nmcs_l1_seed7.txt"));
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let run = || {
        (
            nmcs(Variant::FIVE_D, 1, 11, &SearchConfig::default()).best_record,
            best_of_playouts(Variant::FIVE_T, 4, 300).best_record,
        )
    };
    let one = in_pool(1, run);
    let four = in_pool(4, run);
    assert_eq!(one, four);
}

#[test]
fn every_strategy_emits_guarded_records() {
    for strategy in ["random", "greedy", "beam", "nmcs"] {
        for variant in [Variant::FIVE_D, Variant::FIVE_T] {
            let cfg = SearchConfig {
                strategy: strategy.parse::<Strategy>().unwrap(),
                seed: 5,
                beam_width: 8,
                playouts: 50,
                ..SearchConfig::default()
            };
            let r = solve(variant, &cfg);
            let board = guard_record(&r.best_record).unwrap();
            assert!(board.is_terminal(), "{strategy} {variant}");
            assert_eq!(r.best_score, r.best_record.moves.len());
            if variant.is_5d() {
                assert!(r.best_score <= 121);
            }
        }
    }
}

#[test]
fn beam_heuristics_and_widths() {
    let narrow = beam_search(Variant::FIVE_D, 16, Heuristic::Mobility, 1);
    let again = beam_search(Variant::FIVE_D, 16, Heuristic::Mobility, 1);
    // Wall time differs between runs; everything else must not.
    assert_eq!(narrow.best_record, again.best_record);
    assert_eq!(narrow.nodes_expanded, again.nodes_expanded);
    assert!(narrow.best_score >= 40);
}

#[test]
fn exhaustive_budget_is_not_exact() {
    let r = exhaustive_solve("6D".parse().unwrap(), 1_000);
    assert!(!r.exact);
    let mut rec = morpion::GameRecord::new("6D".parse().unwrap());
    rec.moves = r.moves;
    guard_record(&rec).unwrap();
}
