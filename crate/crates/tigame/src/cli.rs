//! Command-line front end: exact solving, strategy simulation, the
//! verification campaigns, instance enumeration and an interactive mode.
//!
//! Exit codes: 0 success, 1 failed verification or aborted game, 2 bad
//! invocation, 3 a size cap was exceeded.

use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::game::{GameState, GameVariant, Player};
use crate::generate::{all_forests, all_trees, cubic_graphs, cycle, k_copies_p3, path, star, GenerateError};
use crate::graph::{EdgeId, PartiallyPlayedGraph};
use crate::harness::{self, to_csv, HarnessConfig, VerificationReport};
use crate::solver::{Solver, SolverError};
use crate::strategy::{by_name, Strategy, StrategyError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "tigame",
    version,
    about = "Exact values, guaranteed strategies and verification sweeps for the Toucher-Isolator edge-claiming game"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the exact game value of a board.
    Solve(SolveArgs),
    /// Play two move policies against each other and print the transcript.
    Simulate(SimulateArgs),
    /// Run verification campaigns and report pass/fail per instance.
    Verify(VerifyArgs),
    /// List small instances: all trees of an order, all forests up to a
    /// size, or the built-in set of 3-regular boards.
    Enumerate(EnumerateArgs),
    /// Play a game interactively against a policy (or watch two policies).
    Play(PlayArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    /// Toucher moves first; every untouched vertex scores.
    Ti,
    /// Isolator moves first; untouched leaves of the starting board don't
    /// score.
    Nlit,
}

impl From<VariantArg> for GameVariant {
    fn from(v: VariantArg) -> GameVariant {
        match v {
            VariantArg::Ti => GameVariant::ToucherIsolator,
            VariantArg::Nlit => GameVariant::NonLeafIsolatorToucher,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    /// Path on n vertices.
    Path,
    /// Cycle on n vertices (n >= 3).
    Cycle,
    /// Star with n-1 rays.
    Star,
    /// n disjoint paths on three vertices each.
    Triples,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Plain,
    Json,
    Csv,
}

/// Where the board comes from: a file (`-` for stdin) or a named family.
#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["graph", "family"])))]
pub struct GraphSource {
    /// Read the board from this file; `-` reads standard input.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
    /// Generate the board from a family instead.
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Size parameter for --family.
    #[arg(long, short = 'n')]
    pub n: Option<u32>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: GraphSource,
    #[arg(long, value_enum, default_value = "ti")]
    pub variant: VariantArg,
    /// Also print one optimal line of play.
    #[arg(long)]
    pub pv: bool,
    /// Maximum number of edges the solver will accept.
    #[arg(long, default_value_t = 16)]
    pub cap: usize,
    #[arg(long, value_enum, default_value = "plain")]
    pub format: FormatArg,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: GraphSource,
    #[arg(long, value_enum, default_value = "ti")]
    pub variant: VariantArg,
    /// Policy for Toucher: optimal, greedy, theorem, lemma, random[:seed].
    #[arg(long, default_value = "optimal")]
    pub toucher: String,
    /// Policy for Isolator: optimal, greedy, theorem, lemma, random[:seed].
    #[arg(long, default_value = "optimal")]
    pub isolator: String,
    /// Seed used when a policy is named `random` without its own seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 16)]
    pub cap: usize,
    #[arg(long, value_enum, default_value = "plain")]
    pub format: FormatArg,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Campaign to run: all, paths, trees, spots, forests, surgery,
    /// equivalence, strategies, solver or controls.
    #[arg(default_value = "all")]
    pub experiment: String,
    /// Largest vertex count for path/cycle/tree sweeps.
    #[arg(long)]
    pub max_n: Option<u32>,
    /// Largest edge count for forest sweeps.
    #[arg(long)]
    pub max_m: Option<u32>,
    /// Sampled positions per property and size.
    #[arg(long)]
    pub samples: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: one per core).
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, default_value_t = 16)]
    pub cap: usize,
    #[arg(long, value_enum, default_value = "plain")]
    pub format: FormatArg,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum EnumerateFamily {
    /// Trees, one per isomorphism class; --n for one order, --max-n for all
    /// orders up to a bound.
    #[value(alias = "all-trees")]
    Trees,
    /// Every forest with 1..=m edges and no isolated vertices.
    #[value(alias = "all-forests")]
    Forests,
    /// The built-in 3-regular boards.
    #[value(alias = "cubic")]
    Cubics,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[arg(long, value_enum)]
    pub family: EnumerateFamily,
    /// Exact vertex count (trees).
    #[arg(long, short = 'n', conflicts_with = "max_n")]
    pub n: Option<u32>,
    /// Largest vertex count (trees).
    #[arg(long)]
    pub max_n: Option<u32>,
    /// Largest edge count (forests).
    #[arg(long)]
    pub max_m: Option<u32>,
    #[arg(long, value_enum, default_value = "plain")]
    pub format: FormatArg,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PlayArgs {
    #[command(flatten)]
    pub source: GraphSource,
    #[arg(long, value_enum, default_value = "ti")]
    pub variant: VariantArg,
    /// `human` or a policy name.
    #[arg(long, default_value = "human")]
    pub toucher: String,
    /// `human` or a policy name.
    #[arg(long, default_value = "optimal")]
    pub isolator: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// A failure with the exit code it maps to; the message goes to stderr.
#[derive(Debug)]
pub struct CliFailure {
    pub code: i32,
    pub message: String,
}

type CliResult<T> = Result<T, CliFailure>;

fn usage(message: impl Into<String>) -> CliFailure {
    CliFailure { code: EXIT_USAGE, message: message.into() }
}

fn failed(message: impl Into<String>) -> CliFailure {
    CliFailure { code: EXIT_FAILED, message: message.into() }
}

fn capped(message: impl Into<String>) -> CliFailure {
    CliFailure { code: EXIT_CAP, message: message.into() }
}

fn from_solver(e: SolverError) -> CliFailure {
    match e {
        SolverError::CapExceeded { .. } => capped(e.to_string()),
        SolverError::InvalidCap(_) => usage(e.to_string()),
        SolverError::Game(_) => failed(e.to_string()),
    }
}

fn from_generate(e: GenerateError) -> CliFailure {
    match e {
        GenerateError::SizeCap { .. } => capped(e.to_string()),
        _ => usage(e.to_string()),
    }
}

fn from_strategy(e: StrategyError) -> CliFailure {
    match e {
        StrategyError::UnknownName(_)
        | StrategyError::WrongSide { .. }
        | StrategyError::UnsupportedPosition { .. } => usage(e.to_string()),
        other => failed(other.to_string()),
    }
}

fn load_graph<R: BufRead>(source: &GraphSource, stdin: &mut R) -> CliResult<PartiallyPlayedGraph> {
    if let Some(file) = &source.graph {
        let text = if file.as_os_str() == "-" {
            let mut buf = String::new();
            stdin
                .read_to_string(&mut buf)
                .map_err(|e| usage(format!("reading standard input: {e}")))?;
            buf
        } else {
            fs::read_to_string(file)
                .map_err(|e| usage(format!("reading {}: {e}", file.display())))?
        };
        return PartiallyPlayedGraph::from_text(&text).map_err(|e| usage(e.to_string()));
    }
    let family = source.family.expect("clap guarantees a source");
    let n = source
        .n
        .ok_or_else(|| usage("--family requires --n"))?;
    match family {
        FamilyArg::Path => {
            if n < 1 {
                return Err(usage("--family path requires --n >= 1"));
            }
            Ok(path(n))
        }
        FamilyArg::Cycle => cycle(n).map_err(from_generate),
        FamilyArg::Star => {
            if n < 2 {
                return Err(usage("--family star requires --n >= 2"));
            }
            Ok(star(n))
        }
        FamilyArg::Triples => {
            if n < 1 {
                return Err(usage("--family triples requires --n >= 1"));
            }
            Ok(k_copies_p3(n))
        }
    }
}

fn resolve_policy(name: &str, fallback_seed: u64) -> CliResult<Box<dyn Strategy>> {
    if name == "random" {
        return by_name(&format!("random:{fallback_seed}")).map_err(from_strategy);
    }
    by_name(name).map_err(from_strategy)
}

fn emit<W: Write>(out: Option<&Path>, stdout: &mut W, content: &str) -> CliResult<()> {
    match out {
        Some(file) => fs::write(file, content)
            .map_err(|e| failed(format!("writing {}: {e}", file.display()))),
        None => stdout
            .write_all(content.as_bytes())
            .map_err(|e| failed(format!("writing output: {e}"))),
    }
}

fn run_solve<R: BufRead, W: Write>(args: &SolveArgs, stdin: &mut R, stdout: &mut W) -> CliResult<()> {
    let graph = load_graph(&args.source, stdin)?;
    let solver = Solver::new(args.cap).map_err(from_solver)?;
    let variant: GameVariant = args.variant.into();
    let state = GameState::new(variant, graph.clone()).map_err(|e| usage(e.to_string()))?;
    let value = solver.solve_state(&state).map_err(from_solver)?;
    let pv = if args.pv {
        Some(solver.principal_variation(&state).map_err(from_solver)?)
    } else {
        None
    };
    let stats = graph.stats();
    match args.format {
        FormatArg::Json => {
            let line = serde_json::json!({
                "variant": variant.to_string(),
                "vertices": stats.n,
                "edges": stats.m,
                "value": value,
                "line": pv.as_ref().map(|(moves, _)| moves
                    .iter()
                    .map(|(p, e)| format!("{} {}", p.letter(), e))
                    .collect::<Vec<_>>()),
            });
            emit(None, stdout, &format!("{line}\n"))
        }
        _ => {
            let mut text = format!("{value}\n");
            if let Some((moves, realised)) = pv {
                for (p, e) in moves {
                    text.push_str(&format!("{} {e}\n", p.letter()));
                }
                text.push_str(&format!("line-score {realised}\n"));
            }
            emit(None, stdout, &text)
        }
    }
}

fn run_simulate<R: BufRead, W: Write>(
    args: &SimulateArgs,
    stdin: &mut R,
    stdout: &mut W,
) -> CliResult<()> {
    let graph = load_graph(&args.source, stdin)?;
    let variant: GameVariant = args.variant.into();
    let state = GameState::new(variant, graph).map_err(|e| usage(e.to_string()))?;
    let mut toucher = resolve_policy(&args.toucher, args.seed)?;
    let mut isolator = resolve_policy(&args.isolator, args.seed.wrapping_add(1))?;
    let final_state =
        crate::strategy::play_game(&state, toucher.as_mut(), isolator.as_mut())
            .map_err(from_strategy)?;
    let score = final_state.final_score().map_err(|e| failed(e.to_string()))?;
    match args.format {
        FormatArg::Json => {
            let line = serde_json::json!({
                "variant": variant.to_string(),
                "toucher": args.toucher,
                "isolator": args.isolator,
                "moves": final_state
                    .history()
                    .iter()
                    .map(|(p, e)| format!("{} {}", p.letter(), e))
                    .collect::<Vec<_>>(),
                "score": score,
            });
            emit(None, stdout, &format!("{line}\n"))
        }
        _ => {
            let mut text = final_state.transcript();
            text.push_str(&format!("score {score}\n"));
            emit(None, stdout, &text)
        }
    }
}

fn campaign_by_name(name: &str, cfg: &HarnessConfig) -> CliResult<Vec<VerificationReport>> {
    let report = match name {
        "all" => return Ok(harness::run_all(cfg)),
        // `surgery` covers both halves of the pruning story: the bookkeeping
        // tables and the sampled value-preservation checks.
        "surgery" => {
            return Ok(vec![
                harness::verify_surgery_accounting(cfg),
                harness::verify_position_equivalence(cfg),
            ])
        }
        "paths" | "path-cycle-values" => harness::verify_path_cycle_values(cfg),
        "trees" | "tree-value-bounds" => harness::verify_tree_value_bounds(cfg),
        "spots" | "spot-values" => harness::verify_spot_values(cfg),
        "forests" | "forest-score-floor" => harness::verify_forest_score_floor(cfg),
        "surgery-accounting" => harness::verify_surgery_accounting(cfg),
        "equivalence" | "position-equivalence" => harness::verify_position_equivalence(cfg),
        "strategies" | "strategy-guarantees" => harness::verify_strategy_guarantees(cfg),
        "solver" | "solver-agreement" => harness::verify_solver_agreement(cfg),
        "controls" | "negative-controls" => harness::verify_negative_controls(cfg),
        other => {
            return Err(usage(format!(
                "unknown experiment {other:?}; expected all, paths, trees, spots, forests, \
                 surgery, equivalence, strategies, solver or controls"
            )))
        }
    };
    Ok(vec![report])
}

fn render_reports_plain(reports: &[VerificationReport]) -> String {
    let mut text = String::new();
    for report in reports {
        let failures: Vec<_> = report.failures().collect();
        if report.pass {
            text.push_str(&format!(
                "PASS {} ({} rows, {} ms)\n",
                report.experiment,
                report.rows.len(),
                report.wall_ms
            ));
        } else {
            text.push_str(&format!(
                "FAIL {} ({} of {} rows failed, {} ms)\n",
                report.experiment,
                failures.len(),
                report.rows.len(),
                report.wall_ms
            ));
            for row in failures.iter().take(10) {
                text.push_str(&format!(
                    "  {}: expected {}, actual {}{}\n",
                    row.instance,
                    row.expected,
                    row.actual,
                    if row.note.is_empty() {
                        String::new()
                    } else {
                        format!(" ({})", row.note)
                    }
                ));
            }
            if failures.len() > 10 {
                text.push_str(&format!("  ... and {} more\n", failures.len() - 10));
            }
        }
        if let Some(w) = &report.warning {
            text.push_str(&format!("  warning: {w}\n"));
        }
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    text.push_str(&format!("{passed}/{} experiments passed\n", reports.len()));
    text
}

fn run_verify<W: Write>(args: &VerifyArgs, stdout: &mut W) -> CliResult<i32> {
    let mut cfg = HarnessConfig::default();
    if let Some(n) = args.max_n {
        cfg.max_path_cycle_n = n;
        cfg.max_tree_n = n;
        cfg.max_strategy_tree_n = n;
    }
    if let Some(m) = args.max_m {
        cfg.max_forest_edges = m;
        cfg.max_strategy_forest_edges = m;
        cfg.max_surgery_edges = m;
        cfg.max_equivalence_edges = m;
    }
    if let Some(s) = args.samples {
        cfg.equivalence_samples = s;
        cfg.agreement_samples = s;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.jobs = args.jobs;
    cfg.solver_cap = args.cap;
    let reports = campaign_by_name(&args.experiment, &cfg)?;
    let content = match args.format {
        FormatArg::Plain => render_reports_plain(&reports),
        FormatArg::Json => {
            let mut s = serde_json::to_string_pretty(&reports)
                .map_err(|e| failed(e.to_string()))?;
            s.push('\n');
            s
        }
        FormatArg::Csv => to_csv(&reports),
    };
    emit(args.out.as_deref(), stdout, &content)?;
    Ok(if reports.iter().all(|r| r.pass) {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn run_enumerate<W: Write>(args: &EnumerateArgs, stdout: &mut W) -> CliResult<()> {
    let mut items: Vec<(String, PartiallyPlayedGraph)> = Vec::new();
    match args.family {
        EnumerateFamily::Trees => {
            let orders: Vec<u32> = match (args.n, args.max_n) {
                (Some(n), None) => vec![n],
                (None, Some(max)) => (1..=max).collect(),
                _ => return Err(usage("--family trees requires --n or --max-n")),
            };
            for n in orders {
                for (i, t) in all_trees(n).map_err(from_generate)?.into_iter().enumerate() {
                    items.push((format!("tree n={n} #{i}"), t));
                }
            }
        }
        EnumerateFamily::Forests => {
            let max_m = args
                .max_m
                .ok_or_else(|| usage("--family forests requires --max-m"))?;
            for m in 1..=max_m {
                for (i, f) in all_forests(m).map_err(from_generate)?.into_iter().enumerate() {
                    items.push((format!("forest m={m} #{i}"), f));
                }
            }
        }
        EnumerateFamily::Cubics => {
            for (name, g) in cubic_graphs() {
                items.push((name, g));
            }
        }
    }
    let content = match args.format {
        FormatArg::Plain => {
            let mut text = String::new();
            for (name, g) in &items {
                text.push_str(&format!("# {name}\n{}\n", g.to_text()));
            }
            text.push_str(&format!("# total {}\n", items.len()));
            text
        }
        FormatArg::Json => {
            let rows: Vec<_> = items
                .iter()
                .map(|(name, g)| {
                    let stats = g.stats();
                    serde_json::json!({
                        "name": name,
                        "vertices": stats.n,
                        "edges": stats.m,
                        "text": g.to_text(),
                    })
                })
                .collect();
            let mut s =
                serde_json::to_string_pretty(&rows).map_err(|e| failed(e.to_string()))?;
            s.push('\n');
            s
        }
        FormatArg::Csv => {
            let mut text = String::from("name,vertices,edges\n");
            for (name, g) in &items {
                let stats = g.stats();
                text.push_str(&format!("{name},{},{}\n", stats.n, stats.m));
            }
            text
        }
    };
    emit(args.out.as_deref(), stdout, &content)
}

fn render_board(state: &GameState) -> String {
    let mut text = String::new();
    for (id, e) in state.graph().edges() {
        text.push_str(&format!("  {id}: {}-{} [{}]\n", e.u, e.v, e.claim.letter()));
    }
    text.push_str(&format!("score so far: {}\n", state.score_now()));
    text
}

fn parse_human_move(line: &str) -> Option<EdgeId> {
    let tok = line.trim().trim_start_matches('e');
    tok.parse::<u32>().ok().map(EdgeId)
}

fn run_play<R: BufRead, W: Write>(args: &PlayArgs, stdin: &mut R, stdout: &mut W) -> CliResult<i32> {
    let graph = load_graph(&args.source, stdin)?;
    let variant: GameVariant = args.variant.into();
    let mut state = GameState::new(variant, graph).map_err(|e| usage(e.to_string()))?;
    let mut policies: [Option<Box<dyn Strategy>>; 2] = [
        if args.toucher == "human" { None } else { Some(resolve_policy(&args.toucher, args.seed)?) },
        if args.isolator == "human" { None } else { Some(resolve_policy(&args.isolator, args.seed.wrapping_add(1))?) },
    ];
    let say = |stdout: &mut W, s: &str| -> CliResult<()> {
        stdout
            .write_all(s.as_bytes())
            .map_err(|e| failed(format!("writing output: {e}")))
    };
    say(stdout, &format!("{} game; {} to move\n", variant, state.to_move()))?;
    while !state.is_terminal() {
        let mover = state.to_move();
        let slot = match mover {
            Player::Toucher => &mut policies[0],
            Player::Isolator => &mut policies[1],
        };
        let mv = match slot {
            Some(policy) => {
                let mv = policy.choose_move(&state).map_err(from_strategy)?;
                say(stdout, &format!("{} plays {}\n", mover, mv))?;
                mv
            }
            None => {
                say(stdout, &render_board(&state))?;
                let unclaimed = state
                    .legal_moves()
                    .iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                say(stdout, &format!("{mover} to move; unclaimed: {unclaimed}\n> "))?;
                stdout.flush().ok();
                let mut line = String::new();
                let read = stdin
                    .read_line(&mut line)
                    .map_err(|e| failed(format!("reading input: {e}")))?;
                if read == 0 || line.trim() == "quit" || line.trim() == "q" {
                    say(stdout, "aborted; transcript so far:\n")?;
                    say(stdout, &state.transcript())?;
                    return Ok(EXIT_FAILED);
                }
                match parse_human_move(&line) {
                    Some(mv) if state.legal_moves().contains(&mv) => mv,
                    _ => {
                        say(stdout, "not a legal move; enter an unclaimed edge id like e3, or quit\n")?;
                        continue;
                    }
                }
            }
        };
        state = state.apply_move(mv).map_err(|e| failed(e.to_string()))?;
    }
    say(stdout, &render_board(&state))?;
    let score = state.final_score().map_err(|e| failed(e.to_string()))?;
    say(stdout, &format!("final score {score}\n"))?;
    say(stdout, &state.transcript())?;
    Ok(EXIT_OK)
}

/// Dispatches a parsed invocation. Returns the process exit code; error
/// messages go to `stderr`.
pub fn run<R: BufRead, W: Write>(cli: Cli, stdin: &mut R, stdout: &mut W) -> i32 {
    let outcome: CliResult<i32> = match &cli.command {
        Command::Solve(args) => run_solve(args, stdin, stdout).map(|()| EXIT_OK),
        Command::Simulate(args) => run_simulate(args, stdin, stdout).map(|()| EXIT_OK),
        Command::Verify(args) => run_verify(args, stdout),
        Command::Enumerate(args) => run_enumerate(args, stdout).map(|()| EXIT_OK),
        Command::Play(args) => run_play(args, stdin, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(CliFailure { code, message }) => {
            eprintln!("error: {message}");
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn invoke(args: &[&str], input: &str) -> (i32, String) {
        let cli = Cli::try_parse_from(args).expect("arguments parse");
        let mut stdin = input.as_bytes();
        let mut stdout = Vec::new();
        let code = run(cli, &mut stdin, &mut stdout);
        (code, String::from_utf8(stdout).unwrap())
    }

    #[test]
    fn solve_reports_known_values() {
        let (code, out) = invoke(&["tigame", "solve", "--family", "path", "-n", "6"], "");
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "1\n");
        let (code, out) = invoke(&["tigame", "solve", "--family", "cycle", "-n", "5"], "");
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "1\n");
    }

    #[test]
    fn solve_reads_stdin_and_prints_line() {
        let board = "3 2\n0 1\n1 2\n";
        let (code, out) = invoke(
            &["tigame", "solve", "--graph", "-", "--pv", "--variant", "nlit"],
            board,
        );
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("0\n"), "{out}");
        assert!(out.contains("line-score 0\n"), "{out}");
    }

    #[test]
    fn solve_json_has_value_field() {
        let (code, out) = invoke(
            &["tigame", "solve", "--family", "star", "-n", "7", "--format", "json"],
            "",
        );
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["value"], 3);
        assert_eq!(v["edges"], 6);
    }

    #[test]
    fn conflicting_sources_are_a_parse_error() {
        assert!(Cli::try_parse_from([
            "tigame", "solve", "--family", "path", "-n", "4", "--graph", "x"
        ])
        .is_err());
        assert!(Cli::try_parse_from(["tigame", "solve"]).is_err());
    }

    #[test]
    fn missing_n_is_usage() {
        let (code, _) = invoke(&["tigame", "solve", "--family", "path"], "");
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn cap_exceeded_is_exit_3() {
        let (code, _) = invoke(
            &["tigame", "solve", "--family", "star", "-n", "20", "--cap", "16"],
            "",
        );
        assert_eq!(code, EXIT_CAP);
    }

    #[test]
    fn short_cycles_are_usage() {
        let (code, _) = invoke(&["tigame", "solve", "--family", "cycle", "-n", "2"], "");
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn simulate_is_deterministic() {
        let args = [
            "tigame", "simulate", "--family", "path", "-n", "8", "--variant", "nlit",
            "--toucher", "greedy", "--isolator", "lemma",
        ];
        let (code, first) = invoke(&args, "");
        let (_, second) = invoke(&args, "");
        assert_eq!(code, EXIT_OK);
        assert_eq!(first, second);
        assert!(first.ends_with("score 1\n") || first.ends_with("score 2\n"), "{first}");
    }

    #[test]
    fn simulate_optimal_pair_realises_the_exact_value() {
        let (code, out) = invoke(&["tigame", "simulate", "--family", "cycle", "-n", "5"], "");
        assert_eq!(code, EXIT_OK);
        assert!(out.ends_with("score 1\n"), "{out}");
    }

    #[test]
    fn simulate_rejects_unknown_policy() {
        let (code, _) = invoke(
            &["tigame", "simulate", "--family", "path", "-n", "4", "--toucher", "nonsense"],
            "",
        );
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn enumerate_counts_trees() {
        let (code, out) = invoke(&["tigame", "enumerate", "--family", "trees", "-n", "7"], "");
        assert_eq!(code, EXIT_OK);
        assert!(out.ends_with("# total 11\n"), "{out}");
    }

    #[test]
    fn enumerated_text_round_trips() {
        let (_, out) = invoke(&["tigame", "enumerate", "--family", "cubics"], "");
        // The whole listing parses as a sequence of boards when split on
        // blank lines.
        let blocks: Vec<&str> = out
            .split("\n\n")
            .filter(|b| b.lines().any(|l| !l.starts_with('#') && !l.trim().is_empty()))
            .collect();
        assert_eq!(blocks.len(), 5);
        for block in blocks {
            PartiallyPlayedGraph::from_text(block).unwrap();
        }
    }

    #[test]
    fn verify_single_campaign_passes() {
        let (code, out) = invoke(
            &["tigame", "verify", "paths", "--max-n", "7", "--jobs", "2"],
            "",
        );
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("PASS path-cycle-values"), "{out}");
        assert!(out.ends_with("1/1 experiments passed\n"), "{out}");
    }

    #[test]
    fn verify_surgery_covers_both_campaigns() {
        let (code, out) = invoke(
            &[
                "tigame", "verify", "surgery", "--max-m", "4", "--samples", "20", "--jobs",
                "2",
            ],
            "",
        );
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("PASS surgery-accounting"), "{out}");
        assert!(out.contains("PASS position-equivalence"), "{out}");
        assert!(out.ends_with("2/2 experiments passed\n"), "{out}");
    }

    #[test]
    fn verify_unknown_experiment_is_usage() {
        let (code, _) = invoke(&["tigame", "verify", "bogus"], "");
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn play_scripted_game_finishes() {
        // Toucher human on a 3-edge path; isolator optimal. Feed two moves.
        let (code, out) = invoke(
            &[
                "tigame", "play", "--family", "path", "-n", "4", "--toucher", "human",
                "--isolator", "optimal",
            ],
            "e1\ne9\ne2\n",
        );
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.contains("not a legal move"), "{out}");
        assert!(out.contains("final score"), "{out}");
    }

    #[test]
    fn play_quit_aborts_with_transcript() {
        let (code, out) = invoke(
            &["tigame", "play", "--family", "path", "-n", "5", "--toucher", "human"],
            "e0\nquit\n",
        );
        assert_eq!(code, EXIT_FAILED);
        assert!(out.contains("aborted; transcript so far:"), "{out}");
        assert!(out.contains("T e0"), "{out}");
    }

    #[test]
    fn play_eof_counts_as_quit() {
        let (code, out) = invoke(
            &["tigame", "play", "--family", "path", "-n", "5", "--toucher", "human"],
            "",
        );
        assert_eq!(code, EXIT_FAILED);
        assert!(out.contains("aborted"), "{out}");
    }
}
