use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use morpion::engine::legal_moves;
use morpion::linecover::{packing_search, scan_table, PackingParams, RuleSet};
use morpion::potential::{bounds_table, verify_trace};
use morpion::recordio::{
    emit_layout, emit_record, load_record, parse_layout, render_board, render_layout, RenderFormat,
    RenderSpec,
};
use morpion::solver::{guard_record, solve, Heuristic, SearchConfig, Strategy};
use morpion::Variant;

#[derive(Parser)]
#[command(name = "morpion", version, about = "Morpion Solitaire engine, bounds and solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a record and check the move-count facts and, for 5D, the potential monitors.
    Verify { record: PathBuf },
    /// Print the potential-based upper bounds for 5D.
    Bounds,
    /// Print the line-based infeasibility scan.
    Scan {
        /// Comma-separated rules among A, B, remark.
        #[arg(long, default_value = "A,B,remark")]
        rules: RuleSet,
        #[arg(long, default_value_t = 200)]
        max: u64,
    },
    /// Search the shape family for a dense line layout.
    Pack {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Play a game with the chosen search strategy.
    Solve(SolveArgs),
    /// Replay a record and describe the final board.
    Replay { record: PathBuf },
    /// Draw a record or layout as ASCII or SVG.
    Render {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Output {
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, default_value = "5D")]
    variant: Variant,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// random, greedy, beam, nmcs or exhaustive.
    #[arg(long, default_value = "nmcs")]
    strategy: Strategy,
    /// Nesting level for nmcs.
    #[arg(long, default_value_t = 1)]
    level: u32,
    /// Beam width.
    #[arg(long, default_value_t = 64)]
    width: usize,
    /// Number of games for the random strategy.
    #[arg(long, default_value_t = 1)]
    playouts: usize,
    /// Beam ranking: potential or mobility.
    #[arg(long, default_value = "potential")]
    heuristic: Heuristic,
    /// Wall-clock budget in milliseconds.
    #[arg(long)]
    time_budget: Option<u64>,
    #[arg(long)]
    node_budget: Option<u64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Ascii,
    Svg,
}

enum Failure {
    /// Bad input files or arguments; exit 2.
    Usage(String),
    /// The input was read but failed a check; exit 1.
    Check(String),
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: &Output, bytes: &[u8]) -> Result<(), Failure> {
    match &out.out {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::Usage(format!("cannot write stdout: {e}"))),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Verify { record } => {
            let text = read(&record)?;
            let (rec, board) = load_record(&text).map_err(|e| Failure::Check(e.to_string()))?;
            guard_record(&rec).map_err(|e| Failure::Check(e.to_string()))?;
            if rec.variant.is_5d() {
                let s = verify_trace(&rec).map_err(|e| Failure::Check(e.to_string()))?;
                let lemma = s
                    .lemma
                    .map(|w| format!(" last_three={}", w.sum()))
                    .unwrap_or_default();
                println!(
                    "ok variant=5D moves={} potential={} terminal={}{lemma}",
                    s.moves, s.final_total, s.terminal
                );
            } else {
                println!(
                    "ok variant={} moves={} terminal={}",
                    rec.variant,
                    rec.moves.len(),
                    board.is_terminal()
                );
            }
        }
        Command::Bounds => print!("{}", bounds_table()),
        Command::Scan { rules, max } => print!("{}", scan_table(rules, max)),
        Command::Pack { seed, out } => {
            let params = PackingParams { seed, ..PackingParams::default() };
            let r = packing_search(&params).map_err(|e| Failure::Check(e.to_string()))?;
            emit(&out, emit_layout(&r.layout).as_bytes())?;
            eprintln!("n={} coverage={} shapes={}", r.n, r.coverage, r.shapes_evaluated);
        }
        Command::Solve(args) => {
            let cfg = SearchConfig {
                seed: args.seed,
                strategy: args.strategy,
                beam_width: args.width,
                nmcs_level: args.level,
                playouts: args.playouts,
                heuristic: args.heuristic,
                time_budget: args.time_budget.map(Duration::from_millis),
                node_budget: args.node_budget,
            };
            let r = solve(args.variant, &cfg);
            emit(&args.out, emit_record(&r.best_record).as_bytes())?;
            eprintln!("{}", r.summary_line());
        }
        Command::Replay { record } => {
            let text = read(&record)?;
            let (rec, board) = load_record(&text).map_err(|e| Failure::Check(e.to_string()))?;
            println!(
                "variant={} moves={} crosses={} lines={} legal_moves={}",
                rec.variant,
                rec.moves.len(),
                board.cross_count(),
                board.line_count(),
                legal_moves(&board).len()
            );
        }
        Command::Render { input, format, out } => {
            let text = read(&input)?;
            let spec = RenderSpec {
                format: match format {
                    Format::Ascii => RenderFormat::Ascii,
                    Format::Svg => RenderFormat::Svg,
                },
                ..RenderSpec::default()
            };
            let bytes = if text.starts_with("morpion-layout ") {
                let layout = parse_layout(&text).map_err(|e| Failure::Check(e.to_string()))?;
                render_layout(&layout, &spec)
            } else {
                let (_, board) = load_record(&text).map_err(|e| Failure::Check(e.to_string()))?;
                render_board(&board, &spec)
            };
            emit(&out, &bytes)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nusage: morpion <verify|bounds|scan|pack|solve|replay|render> [flags]; see --help");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}
