//! Command-line front end. Exit status 0 on success, 1 when a check finds a
//! violation, 2 on usage or input errors.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracgame::format::{
    parse_graph, parse_hypergraph, parse_move, parse_preload, parse_values, render_move, render_values, HypergraphFile,
    ParseError,
};
use fracgame::harness::{
    check_bounds, check_conjectures_on, check_continuation, enumerate_hypergraphs, sort_reports, CheckReport, Status,
    Summary,
};
use fracgame::moves::{
    explain_violation, is_transposable, make_transposable, normalize_move, MoveContext, RewriteStatus,
};
use fracgame::{
    domination_game_value, format_rational, solve, tau_g, tau_star, CoverFunction, DominationVariant, GameSpec,
    Hypergraph, Player,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fracgame", version, about = "Exact values of the fractional transversal game")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fractional transversal number and its lexicographically smallest optimal certificate.
    TauStar { file: PathBuf },
    /// Integer game value and the principal line of chosen vertices.
    TauG {
        file: PathBuf,
        #[arg(long)]
        staller_start: bool,
    },
    /// Exact value of the fractional game with weights on the 1/D grid.
    TauGFrac {
        file: PathBuf,
        #[arg(long)]
        staller_start: bool,
        #[arg(long, default_value_t = 4)]
        grid: u32,
        /// File with one initial load `p/q` per edge.
        #[arg(long)]
        preload: Option<PathBuf>,
        /// Also print the optimal line, one move per line.
        #[arg(long)]
        transcript: bool,
    },
    /// Move normalization and transposability.
    Move {
        #[command(subcommand)]
        action: MoveAction,
    },
    /// Fractional (total) domination game value of a graph.
    DomGame {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = DomVariant::Dom)]
        variant: DomVariant,
        #[arg(long)]
        staller_start: bool,
        #[arg(long, default_value_t = 2)]
        grid: u32,
    },
    /// Property harness over enumerated or given hypergraphs.
    Check {
        #[command(subcommand)]
        suite: CheckSuite,
    },
    /// HTTP session service for interactive play.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory receiving one move-format history file per session.
        #[arg(long)]
        replay_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DomVariant {
    Dom,
    Total,
}

#[derive(Debug, Args)]
struct MoveArgs {
    hypergraph: PathBuf,
    #[arg(value_name = "MOVE")]
    mv: PathBuf,
    /// File with the prior cover function, one `p/q` per vertex.
    #[arg(long)]
    prior: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum MoveAction {
    /// Drops zero weights and merges repeated vertices.
    Normalize(MoveArgs),
    /// Reports whether every ordering of the move is legal.
    CheckTransposable(MoveArgs),
    /// Rewrites the move into a transposable one.
    MakeTransposable(MoveArgs),
}

#[derive(Debug, Args)]
struct Corpus {
    #[arg(long, default_value_t = 4)]
    max_n: usize,
    #[arg(long, default_value_t = 4)]
    max_m: usize,
    #[arg(long, default_value_t = 2)]
    grid: u32,
    /// Check these hypergraph files instead of the enumerated corpus.
    #[arg(long = "file")]
    files: Vec<PathBuf>,
    /// Print only the summary table.
    #[arg(long)]
    summary_only: bool,
}

#[derive(Debug, Subcommand)]
enum CheckSuite {
    /// Finite inequalities between the game values and the LP.
    Bounds(#[command(flatten)] Corpus),
    /// Monotonicity of the value under seeded preloads.
    Continuation {
        #[command(flatten)]
        corpus: Corpus,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Conjectured relations, reported as approximate violations when they fail.
    Conjectures {
        #[command(flatten)]
        corpus: Corpus,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A failure that maps to exit status 2.
#[derive(Debug)]
struct InputError(String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn input(e: impl fmt::Display) -> InputError {
    InputError(e.to_string())
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn parsed<T>(path: &Path, result: Result<T, ParseError>) -> Result<T, InputError> {
    result.map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_hypergraph(path: &Path) -> Result<HypergraphFile, InputError> {
    parsed(path, parse_hypergraph(&read(path)?))
}

fn starter(staller_start: bool) -> Player {
    if staller_start {
        Player::Staller
    } else {
        Player::EdgeHitter
    }
}

/// Parses `args` and runs the command, writing results to `out` and
/// diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_INPUT
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, InputError> {
    match command {
        Command::TauStar { file } => {
            let f = load_hypergraph(&file)?;
            let r = tau_star(&f.h);
            writeln!(out, "{}", format_rational(&r.value)).map_err(input)?;
            writeln!(out, "certificate {}", render_values(r.certificate.values())).map_err(input)?;
        }
        Command::TauG { file, staller_start } => {
            let f = load_hypergraph(&file)?;
            let r = tau_g(&f.h, starter(staller_start));
            let line: Vec<String> = r.principal_line.iter().map(|&v| f.label(v)).collect();
            writeln!(out, "{}", r.value).map_err(input)?;
            writeln!(out, "line {}", line.join(" ")).map_err(input)?;
        }
        Command::TauGFrac { file, staller_start, grid, preload, transcript } => {
            let f = load_hypergraph(&file)?;
            let mut spec = GameSpec::new(f.h.clone(), starter(staller_start), grid);
            if let Some(path) = preload {
                spec = spec.with_preload(parsed(&path, parse_preload(&read(&path)?, &f.h))?);
            }
            let r = solve(&spec).map_err(input)?;
            writeln!(out, "{}", format_rational(&r.value)).map_err(input)?;
            if transcript {
                let mut mover = spec.starter;
                for (k, mv) in r.transcript.iter().enumerate() {
                    let parts: Vec<String> = mv
                        .submoves
                        .iter()
                        .map(|s| format!("{} {}", f.label(s.vertex), format_rational(&s.weight)))
                        .collect();
                    writeln!(out, "move {} {mover}: {}", k + 1, parts.join(", ")).map_err(input)?;
                    mover = mover.other();
                }
            }
        }
        Command::Move { action } => return move_command(action, out),
        Command::DomGame { file, variant, staller_start, grid } => {
            let g = parsed(&file, parse_graph(&read(&file)?))?;
            let variant = match variant {
                DomVariant::Dom => DominationVariant::Domination,
                DomVariant::Total => DominationVariant::TotalDomination,
            };
            let v = domination_game_value(&g, variant, starter(staller_start), grid).map_err(input)?;
            writeln!(out, "{}", format_rational(&v)).map_err(input)?;
        }
        Command::Check { suite } => return check_command(suite, out, err),
        Command::Serve { port, replay_dir } => {
            if let Some(dir) = &replay_dir {
                std::fs::create_dir_all(dir).map_err(|e| InputError(format!("{}: {e}", dir.display())))?;
            }
            let runtime = tokio::runtime::Runtime::new().map_err(input)?;
            runtime.block_on(crate::service::serve(port, replay_dir)).map_err(input)?;
        }
    }
    Ok(EXIT_OK)
}

fn move_command(action: MoveAction, out: &mut dyn Write) -> Result<i32, InputError> {
    let args = match &action {
        MoveAction::Normalize(a) | MoveAction::CheckTransposable(a) | MoveAction::MakeTransposable(a) => a,
    };
    let f = load_hypergraph(&args.hypergraph)?;
    let mv = parsed(&args.mv, parse_move(&read(&args.mv)?, &f))?;
    let ctx = match &args.prior {
        None => MoveContext::fresh(f.h.clone()),
        Some(path) => {
            let values = parsed(path, parse_values(&read(path)?, f.h.n()))?;
            let prior = CoverFunction::new(values).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
            MoveContext::new(f.h.clone(), prior).map_err(input)?
        }
    };
    if let Some((index, violation)) = explain_violation(&ctx, &mv) {
        return Err(InputError(format!(
            "{}: submove {} is illegal: {violation:?}",
            args.mv.display(),
            index + 1
        )));
    }
    match action {
        MoveAction::Normalize(_) => {
            let norm = normalize_move(&ctx, &mv).map_err(input)?;
            write!(out, "{}", render_move(&norm)).map_err(input)?;
        }
        MoveAction::CheckTransposable(_) => {
            let norm = normalize_move(&ctx, &mv).map_err(input)?;
            let yes = is_transposable(&ctx, &norm).map_err(input)?;
            writeln!(out, "{}", if yes { "transposable" } else { "not transposable" }).map_err(input)?;
        }
        MoveAction::MakeTransposable(_) => {
            let r = make_transposable(&ctx, &mv).map_err(input)?;
            write!(out, "{}", render_move(&r.mv)).map_err(input)?;
            let status = match r.status {
                RewriteStatus::Complete => "complete",
                RewriteStatus::Incomplete => "incomplete",
            };
            writeln!(out, "# {status} after {} iterations", r.iterations).map_err(input)?;
        }
    }
    Ok(EXIT_OK)
}

fn corpus(c: &Corpus) -> Result<Vec<Hypergraph>, InputError> {
    if c.files.is_empty() {
        return Ok(enumerate_hypergraphs(c.max_n, c.max_m).map_err(input)?.collect());
    }
    c.files.iter().map(|p| load_hypergraph(p).map(|f| f.h)).collect()
}

fn check_command(suite: CheckSuite, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, InputError> {
    let (c, mut rows) = match &suite {
        CheckSuite::Bounds(c) => {
            let mut rows = Vec::new();
            for h in corpus(c)? {
                rows.extend(check_bounds(&h, c.grid).map_err(input)?);
            }
            (c, rows)
        }
        CheckSuite::Continuation { corpus: c, trials, seed } => {
            let mut rows = Vec::new();
            for h in corpus(c)? {
                rows.extend(check_continuation(&h, c.grid, *trials, *seed).map_err(input)?);
            }
            (c, rows)
        }
        CheckSuite::Conjectures { corpus: c, samples, seed } => {
            let mut rows = Vec::new();
            for h in corpus(c)? {
                rows.extend(check_conjectures_on(&h, c.grid, *samples, *seed).map_err(input)?);
            }
            (c, rows)
        }
    };
    sort_reports(&mut rows);
    if !c.summary_only {
        for row in &rows {
            writeln!(out, "{}", report_line(row)).map_err(input)?;
        }
    }
    let summary = Summary::of(&rows);
    write!(err, "{summary}").map_err(input)?;
    Ok(exit_status(&rows))
}

/// Exit 1 when any row is a violation. Approximate violations of
/// conjectures are reported but do not fail the run.
fn exit_status(rows: &[CheckReport]) -> i32 {
    if rows.iter().any(|r| r.status == Status::Violation) {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    }
}

fn report_line(row: &CheckReport) -> String {
    serde_json::to_string(row).expect("reports serialize")
}
