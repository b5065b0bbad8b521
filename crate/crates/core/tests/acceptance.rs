//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use morpion::linecover::{
    grid_packing, infeasibility_scan, lemma_min_cover_bound, lower_bound_with, min_cover_exact,
    packing_search, random_layout, replay_coloring_argument, PackingParams, RuleSet,
};
use morpion::potential::{potential_bound, total_potential, verify_trace};
use morpion::recordio::{
    emit_layout, emit_record, parse_layout, parse_record, render_board, render_layout, RenderFormat,
    RenderSpec,
};
use morpion::solver::{
    best_of_playouts, exhaustive_solve, guard_record, nmcs, random_playout, stream_rng, SearchConfig,
};
use morpion::{Board, Direction, GameRecord, Variant};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("{what} took {t:?}, limit {limit:?}"))
}

fn initial_state() -> Outcome {
    let start = Instant::now();
    let b = Board::initial(Variant::FIVE_D).map_err(|e| e.to_string())?;
    let (crosses, pot) = (b.cross_count(), total_potential(&b));
    ensure(crosses == 36 && pot == 144, || format!("{crosses} crosses, potential {pot}"))?;
    within(start, Duration::from_secs(1), "initial board")?;
    Ok("36 crosses, total potential 144".into())
}

fn potential_law(records: &mut Vec<GameRecord>) -> Outcome {
    let start = Instant::now();
    let mut lengths = Vec::new();
    for seed in 0..1000u64 {
        let rec = random_playout(Variant::FIVE_D, seed);
        let summary = verify_trace(&rec).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(summary.terminal, || format!("seed {seed}: playout did not end on a terminal board"))?;
        let lemma = summary.lemma.ok_or_else(|| format!("seed {seed}: fewer than three moves"))?;
        ensure(lemma.holds() && lemma.potentials[0] == 3, || {
            format!("seed {seed}: last three potentials {:?}", lemma.potentials)
        })?;
        lengths.push(rec.moves.len());
        records.push(rec);
    }
    within(start, Duration::from_secs(60), "1000 playouts")?;
    let (lo, hi) = (lengths.iter().min().unwrap(), lengths.iter().max().unwrap());
    Ok(format!("1000 playouts, lengths {lo}..={hi}, zero violations"))
}

fn bound_table() -> Outcome {
    let got: Vec<i64> = [(144, 4, 1), (144, 6, 0), (144, 7, 0), (144, 9, 1)]
        .iter()
        .map(|&(p0, f, l)| potential_bound(p0, f, l))
        .collect();
    ensure(got == [141, 138, 137, 136], || format!("got {got:?}"))?;
    Ok("141 138 137 136".into())
}

fn line_scan() -> Outcome {
    let start = Instant::now();
    let scan = |r| infeasibility_scan(r, 400).map(|s| s.upper_bound);
    let got = [scan(RuleSet::A), scan(RuleSet::AB), scan(RuleSet::A_REMARK)];
    ensure(got == [Some(132), Some(121), Some(125)], || format!("got {got:?}"))?;
    let c122 = lower_bound_with(122, RuleSet::AB).bound;
    ensure(c122 == 159, || format!("c'(122) = {c122}"))?;
    within(start, Duration::from_secs(1), "scan")?;
    Ok("{A} 132, {A,B} 121 (c'(122)=159 > 158), {A,remark} 125".into())
}

fn min_cover_oracle() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for (i, &d1) in Direction::ALL.iter().enumerate() {
        for &d2 in &Direction::ALL[i + 1..] {
            for window in 5..=10u32 {
                let counts: BTreeMap<Direction, usize> = [(d1, 1), (d2, 1)].into_iter().collect();
                let c = min_cover_exact(&counts, window).map_err(|e| e.to_string())?;
                ensure(c == 9, || format!("{d1}+{d2} in window {window}: {c}"))?;
                checked += 1;
            }
        }
    }
    let (b0, b1) = (lemma_min_cover_bound(0), lemma_min_cover_bound(1));
    ensure(b0 == 9 && b1 == 34, || format!("lemma bounds {b0}, {b1}"))?;
    within(start, Duration::from_secs(30), "min-cover oracle")?;
    Ok(format!("{checked} pair/window cases give 9; lemma bounds 9 and 34"))
}

fn lemma_replay() -> Outcome {
    let start = Instant::now();
    let mut rng = stream_rng(0x6c65_6d6d, 0);
    let mut checked = [0usize; 3];
    let mut attempts = 0;
    while checked.iter().sum::<usize>() < 1200 {
        attempts += 1;
        ensure(attempts < 200_000, || "could not sample enough layouts".into())?;
        let k = rng.gen_range(0..3usize);
        let rainbow = Direction::ALL[rng.gen_range(0..4)];
        let mono = Direction::ALL[rng.gen_range(0..4)];
        if rainbow == mono {
            continue;
        }
        let mut counts = [0usize; 4];
        counts[rainbow.index()] = 5 * k + 1;
        counts[mono.index()] = 5 * k + 1;
        let window = rng.gen_range(5 * k as i32 + 6..5 * k as i32 + 14);
        let Some(layout) = random_layout(&mut rng, counts, window, 5) else { continue };
        let r = replay_coloring_argument(&layout, rainbow, mono)
            .map_err(|e| format!("{e:?} on {}", emit_layout(&layout)))?;
        let bound = (5 * k + 1) * 5 + 4;
        ensure(r.coverage >= bound, || format!("coverage {} < {bound}", r.coverage))?;
        checked[k] += 1;
    }
    within(start, Duration::from_secs(120), "lemma replay")?;
    Ok(format!("k=0,1,2 layouts: {checked:?}, zero violations"))
}

fn packing_frontier() -> Outcome {
    let start = Instant::now();
    let grid = grid_packing(10);
    let cov = grid.covered_points().len();
    ensure(grid.len() == 64 && cov == 100, || format!("grid 10: {} lines, {cov} points", grid.len()))?;
    let r = packing_search(&PackingParams::default()).map_err(|e| e.to_string())?;
    ensure(r.n >= 64 && r.coverage <= r.n + 36, || format!("search: n={} coverage={}", r.n, r.coverage))?;
    within(start, Duration::from_secs(600), "packing search")?;
    let stretch = if r.n >= 102 { "reached" } else { "not reached" };
    Ok(format!(
        "grid 64/100; search n={} coverage={} over {} shapes; 102/138 stretch {stretch}",
        r.n, r.coverage, r.shapes_evaluated
    ))
}

fn exhaustive_small(records: &mut Vec<GameRecord>) -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    for v in ["6D", "6T"] {
        let variant: Variant = v.parse().map_err(|e: morpion::ConfigError| e.to_string())?;
        let r = exhaustive_solve(variant, 1_000_000_000);
        ensure(r.exact, || format!("{v}: node budget exceeded after {} nodes", r.nodes))?;
        ensure(r.score == 12, || format!("{v}: maximum {}", r.score))?;
        let mut rec = GameRecord::new(variant);
        rec.moves = r.moves;
        records.push(rec);
        notes.push(format!("{v}=12 ({} nodes)", r.nodes));
    }
    within(start, Duration::from_secs(600), "exhaustive search")?;
    Ok(notes.join(", "))
}

fn search_floors(records: &mut Vec<GameRecord>) -> Outcome {
    let start = Instant::now();
    let playouts = best_of_playouts(Variant::FIVE_D, 0, 10_000);
    ensure(playouts.best_score >= 40, || format!("best of 10000 playouts: {}", playouts.best_score))?;
    records.push(playouts.best_record.clone());
    let t = Instant::now();
    let n2 = nmcs(Variant::FIVE_D, 2, 0, &SearchConfig::default());
    ensure(n2.best_score >= 60, || format!("NMCS level 2: {}", n2.best_score))?;
    within(t, Duration::from_secs(600), "NMCS level 2")?;
    records.push(n2.best_record);
    Ok(format!(
        "best of 10000 playouts {}, NMCS level 2 {} in {:?}",
        playouts.best_score,
        n2.best_score,
        start.elapsed()
    ))
}

fn bound_guard(records: &[GameRecord]) -> Outcome {
    for (i, rec) in records.iter().enumerate() {
        guard_record(rec).map_err(|e| format!("record {i}: {e}"))?;
        if rec.variant.is_5d() {
            ensure(rec.moves.len() <= 121, || format!("record {i}: {} moves", rec.moves.len()))?;
        }
    }
    Ok(format!("{} solver records replay legally within bounds", records.len()))
}

fn serialization() -> Outcome {
    let record = include_str!("golden/record_nmcs_l1_seed7.txt");
    let layout = include_str!("golden/layout_grid10.txt");
    let initial = include_str!("golden/initial_5d.txt");
    let rec = parse_record(record).map_err(|e| e.to_string())?;
    ensure(emit_record(&rec) == record, || "record roundtrip differs".into())?;
    let lay = parse_layout(layout).map_err(|e| e.to_string())?;
    ensure(emit_layout(&lay) == layout, || "layout roundtrip differs".into())?;
    let board = Board::initial(Variant::FIVE_D).map_err(|e| e.to_string())?;
    ensure(render_board(&board, &RenderSpec::default()) == initial.as_bytes(), || {
        "initial render differs from golden".into()
    })?;
    for format in [RenderFormat::Ascii, RenderFormat::Svg] {
        let spec = RenderSpec { format, ..RenderSpec::default() };
        ensure(render_board(&board, &spec) == render_board(&board, &spec), || "board render".into())?;
        ensure(render_layout(&lay, &spec) == render_layout(&lay, &spec), || "layout render".into())?;
    }
    Ok("record and layout roundtrip byte-identically; renders repeat".into())
}

fn main() -> ExitCode {
    let mut records = Vec::new();
    let results = [
        ("initial state", initial_state()),
        ("potential law", potential_law(&mut records)),
        ("bound table", bound_table()),
        ("line-based scan", line_scan()),
        ("min-cover oracle", min_cover_oracle()),
        ("lemma replay", lemma_replay()),
        ("packing frontier", packing_frontier()),
        ("exhaustive small variant", exhaustive_small(&mut records)),
        ("search floors", search_floors(&mut records)),
        ("global bound guard", bound_guard(&records)),
        ("serialization", serialization()),
    ];
    let mut failed = 0;
    for (i, (name, result)) in results.iter().enumerate() {
        match result {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
