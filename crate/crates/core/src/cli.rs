//! `nimsierp` command-line interface.
//!
//! Exit status: 0 on success, 1 on a failed verification or runtime error,
//! 2 on usage errors (reported by clap).

use std::fs::File;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use crate::api::{self, ServerConfig};
use crate::engine::{simulate, GameSession, Opponent, Player, SessionId, Status};
use crate::error::{Error, Result};
use crate::export::{write_pointset, write_reports_jsonl, write_reports_text, write_shadow, ExportFormat};
use crate::fractal::{generate_filtered, generate_streamed, iterate_recursive, Budget, IterationSpec, PointSet};
use crate::geometry::shadow;
use crate::nim::{all_winning_moves, nim_sum, optimal_move, parse_coordinate, Move, Position};
use crate::verify::{sweep, DEFAULT_SWEEP_EXPONENT};

#[derive(Debug, Parser)]
#[command(name = "nimsierp", version, about = "Nim P-positions and the discrete Sierpinski demihypercube")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Recursive,
    Filtered,
    Stream,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the nim-sum of the given piles.
    Nimsum {
        #[arg(value_name = "PILES", value_parser = parse_pile_list)]
        piles: Vec<Vec<u64>>,
    },
    /// Print P or N.
    Classify {
        #[arg(value_name = "PILES", required = true, value_parser = parse_pile_list)]
        piles: Vec<Vec<u64>>,
    },
    /// Print the optimal move, or "none (P-position)".
    Move {
        #[arg(value_name = "PILES", required = true, value_parser = parse_pile_list)]
        piles: Vec<Vec<u64>>,
    },
    /// Write the points of iteration n in dimension d.
    Generate {
        #[arg(long, value_parser = parse_dimension)]
        d: usize,
        #[arg(long, value_parser = parse_iteration)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Method::Recursive)]
        method: Method,
        #[arg(long, default_value = "csv")]
        format: ExportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest number of points to materialize, as a power of two.
        #[arg(long, default_value_t = Budget::DEFAULT_EXPONENT)]
        budget: u32,
    },
    /// Compare the recursive and nim-sum constructions over a grid of (d, n).
    Verify {
        #[arg(long, default_value_t = 5, value_parser = parse_dimension)]
        max_d: usize,
        #[arg(long, default_value_t = 4, value_parser = parse_iteration)]
        max_n: u32,
        /// Skip cells with n (d - 1) above this exponent.
        #[arg(long, default_value_t = DEFAULT_SWEEP_EXPONENT)]
        budget: u32,
        /// Emit one JSON record per cell instead of a table.
        #[arg(long)]
        jsonl: bool,
    },
    /// Write the shadow of iteration n along one axis.
    Shadow {
        #[arg(long, value_parser = parse_dimension)]
        d: usize,
        #[arg(long, value_parser = parse_iteration)]
        n: u32,
        #[arg(long)]
        axis: usize,
        #[arg(long, default_value = "csv")]
        format: ExportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = Budget::DEFAULT_EXPONENT)]
        budget: u32,
    },
    /// Play Nim against the engine in the terminal.
    Play {
        #[arg(long, value_parser = parse_position)]
        piles: Position,
        #[arg(long)]
        engine_first: bool,
    },
    /// Pit the engine (moving first) against an opponent.
    Simulate {
        #[arg(long, value_parser = parse_position)]
        piles: Position,
        #[arg(long, default_value = "random")]
        opponent: Opponent,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Start the HTTP API.
    Serve {
        #[arg(long, default_value_t = api::DEFAULT_PORT)]
        port: u16,
        /// Also serve the built web UI from this directory.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
        #[arg(long, default_value_t = Budget::DEFAULT_EXPONENT)]
        budget: u32,
        /// Idle sessions are dropped after this many seconds.
        #[arg(long, default_value_t = api::DEFAULT_SESSION_TTL.as_secs())]
        session_ttl: u64,
    },
}

fn parse_pile_list(s: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse_coordinate(t).map_err(|e| e.to_string()))
        .collect()
}

fn parse_position(s: &str) -> Result<Position, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_dimension(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("dimension must be at least 1".into()),
        Ok(d) => Ok(d),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_iteration(s: &str) -> Result<u32, String> {
    match s.parse::<u32>() {
        Ok(0) => Err("n must be at least 1: iterations start at D^1".into()),
        Ok(n) if n > crate::fractal::MAX_EXPONENT => Err("n must be at most 63".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn flatten(piles: Vec<Vec<u64>>) -> Vec<u64> {
    piles.into_iter().flatten().collect()
}

fn open_output<'a>(path: Option<&PathBuf>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    })
}

pub fn generate(spec: IterationSpec, method: Method, budget: Budget) -> Result<PointSet> {
    match method {
        Method::Recursive => iterate_recursive(spec, budget),
        Method::Filtered => generate_filtered(spec, budget),
        Method::Stream => generate_streamed(spec, budget),
    }
}

/// Runs one command; returns the process exit status.
pub fn run<R: BufRead>(cli: Cli, input: R, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cli.command, input, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn execute<R: BufRead>(command: Command, input: R, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Nimsum { piles } => {
            writeln!(out, "{}", nim_sum(&flatten(piles)))?;
        }
        Command::Classify { piles } => {
            writeln!(out, "{}", Position::new(flatten(piles))?.classify())?;
        }
        Command::Move { piles } => match optimal_move(&Position::new(flatten(piles))?) {
            Some(m) => writeln!(out, "{m}")?,
            None => writeln!(out, "none (P-position)")?,
        },
        Command::Generate {
            d,
            n,
            method,
            format,
            out: path,
            budget,
        } => {
            let ps = generate(IterationSpec::new(d, n)?, method, Budget::new(budget))?;
            let mut sink = open_output(path.as_ref(), out)?;
            write_pointset(&ps, format, &mut sink)?;
            sink.flush()?;
        }
        Command::Verify {
            max_d,
            max_n,
            budget,
            jsonl,
        } => {
            let reports = sweep(max_d, max_n, budget)?;
            if jsonl {
                write_reports_jsonl(&reports, out)?;
            } else {
                write_reports_text(&reports, out)?;
            }
            if !reports.iter().all(|r| r.passed()) {
                return Ok(1);
            }
        }
        Command::Shadow {
            d,
            n,
            axis,
            format,
            out: path,
            budget,
        } => {
            let grid = shadow(IterationSpec::new(d, n)?, axis, Budget::new(budget))?;
            let mut sink = open_output(path.as_ref(), out)?;
            write_shadow(&grid, format, &mut sink)?;
            sink.flush()?;
        }
        Command::Play {
            piles,
            engine_first,
        } => play(piles, engine_first, input, out)?,
        Command::Simulate {
            piles,
            opponent,
            trials,
            seed,
        } => {
            let tally = simulate(&piles, opponent, trials, seed)?;
            writeln!(out, "engine wins: {}", tally.engine_wins)?;
            writeln!(out, "engine losses: {}", tally.engine_losses)?;
        }
        Command::Serve {
            port,
            ui_dir,
            budget,
            session_ttl,
        } => {
            let config = ServerConfig {
                port,
                ui_dir,
                budget: Budget::new(budget),
                session_ttl: Duration::from_secs(session_ttl),
                id_seed: None,
            };
            tokio::runtime::Runtime::new()?.block_on(api::serve(config))?;
        }
    }
    Ok(0)
}

fn parse_move_line(line: &str) -> Option<Move> {
    let mut parts = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty());
    let pile = parts.next()?.parse().ok()?;
    let size = parse_coordinate(parts.next()?).ok()?;
    parts.next().is_none().then_some(Move::new(pile, size))
}

/// Interactive game over arbitrary streams. Illegal or unparsable input
/// reprompts; `hint` lists the winning moves; end of input abandons the game.
pub fn play<R: BufRead>(piles: Position, engine_first: bool, mut input: R, out: &mut dyn Write) -> Result<()> {
    let mut game = GameSession::new_game(SessionId::new("terminal"), piles, !engine_first)?;
    writeln!(out, "piles: {}  [{}]", game.position(), game.classification())?;
    loop {
        if game.to_move() == Player::Engine && !game.status().is_terminal() {
            let m = game.engine_move()?;
            writeln!(out, "engine plays {m}: {}", game.position())?;
        }
        match game.status() {
            Status::HumanWon => {
                writeln!(out, "you took the last stone. you win!")?;
                return Ok(());
            }
            Status::EngineWon => {
                writeln!(out, "the engine took the last stone. engine wins.")?;
                return Ok(());
            }
            Status::InProgress => {}
        }
        loop {
            write!(out, "your move (pile new_size, or 'hint'): ")?;
            out.flush()?;
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 {
                writeln!(out)?;
                writeln!(out, "game abandoned.")?;
                return Ok(());
            }
            let line = line.trim();
            if line == "hint" {
                let moves = all_winning_moves(game.position());
                if moves.is_empty() {
                    writeln!(out, "no winning move exists (P-position)")?;
                } else {
                    let list: Vec<String> = moves.iter().map(Move::to_string).collect();
                    writeln!(out, "winning moves: {}", list.join("; "))?;
                }
                continue;
            }
            let Some(m) = parse_move_line(line) else {
                writeln!(out, "enter a 0-based pile index and the new pile size, e.g. '2 1'")?;
                continue;
            };
            match game.apply_human_move(m) {
                Ok(()) => {
                    writeln!(out, "you play {m}: {}", game.position())?;
                    break;
                }
                Err(e) => writeln!(out, "illegal move: {e}")?,
            }
        }
    }
}

/// Parses arguments and runs against the real process streams.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdin = io::stdin();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut err = io::stderr();
    let code = run(cli, stdin.lock(), &mut out, &mut err);
    let _ = out.flush();
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str], input: &str) -> (i32, String, String) {
        let mut argv = vec!["nimsierp"];
        argv.extend_from_slice(args);
        let cli = match Cli::try_parse_from(argv) {
            Ok(cli) => cli,
            Err(e) => return (e.exit_code(), String::new(), e.to_string()),
        };
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(cli, input.as_bytes(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn arithmetic_commands() {
        assert_eq!(run_args(&["nimsum", "4", "6", "2"], ""), (0, "0\n".into(), String::new()));
        assert_eq!(run_args(&["nimsum", "4,6,9"], "").1, "11\n");
        assert_eq!(run_args(&["nimsum"], "").1, "0\n");
        assert_eq!(run_args(&["classify", "7", "3", "5"], "").1, "N\n");
        assert_eq!(run_args(&["classify", "4,6", "2"], "").1, "P\n");
        assert_eq!(run_args(&["move", "5", "5"], "").1, "none (P-position)\n");
        assert_eq!(run_args(&["move", "4", "6", "9"], "").1, "pile 2 -> 2\n");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_args(&["nimsum", "18446744073709551616"], "").0, 2);
        assert_eq!(run_args(&["classify"], "").0, 2);
        assert_eq!(run_args(&["generate", "--d", "3", "--n", "0"], "").0, 2);
        assert!(run_args(&["generate", "--d", "3", "--n", "0"], "").2.contains("n must be at least 1"));
        assert_eq!(run_args(&["generate", "--d", "0", "--n", "1"], "").0, 2);
        assert_eq!(run_args(&["generate", "--d", "3", "--n", "1", "--format", "png"], "").0, 2);
        assert_eq!(run_args(&["simulate", "--piles", "1,x"], "").0, 2);
        assert_eq!(run_args(&["bogus"], "").0, 2);
    }

    #[test]
    fn runtime_errors_exit_1() {
        let (code, _, err) = run_args(&["generate", "--d", "3", "--n", "9", "--budget", "10"], "");
        assert_eq!(code, 1);
        assert!(err.starts_with("error: enumeration needs 2^18 points"));
        assert_eq!(run_args(&["generate", "--d", "3", "--n", "1", "--format", "svg"], "").0, 1);
        assert_eq!(run_args(&["shadow", "--d", "3", "--n", "1", "--axis", "3"], "").0, 1);
    }

    #[test]
    fn generate_methods_are_byte_identical() {
        let outputs: Vec<String> = ["recursive", "filtered", "stream"]
            .iter()
            .map(|m| run_args(&["generate", "--d", "3", "--n", "3", "--method", m], "").1)
            .collect();
        assert_eq!(outputs[0], outputs[1]);
        assert_eq!(outputs[0], outputs[2]);
        assert_eq!(outputs[0].lines().count(), 65);
    }

    #[test]
    fn verify_table() {
        let (code, out, _) = run_args(&["verify", "--max-d", "4", "--max-n", "3"], "");
        assert_eq!(code, 0);
        let rows: Vec<&str> = out.lines().skip(1).collect();
        assert_eq!(rows.len(), 12);
        assert!(rows.iter().all(|r| r.contains("equal")));
        let (_, out, _) = run_args(&["verify", "--max-d", "2", "--max-n", "2", "--jsonl"], "");
        assert_eq!(out.lines().count(), 4);
        assert!(out.lines().all(|l| l.contains("\"equal\":true")));
    }

    #[test]
    fn shadow_command() {
        let (code, out, _) = run_args(&["shadow", "--d", "3", "--n", "2", "--axis", "2"], "");
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 17);
    }

    #[test]
    fn simulate_command() {
        let (code, out, _) = run_args(
            &["simulate", "--piles", "1,2,3", "--opponent", "perfect", "--trials", "10", "--seed", "5"],
            "",
        );
        assert_eq!(code, 0);
        assert_eq!(out, "engine wins: 0\nengine losses: 10\n");
    }

    #[test]
    fn play_reprompts_and_finishes() {
        let (code, out, _) = run_args(&["play", "--piles", "1,2"], "garbage\n0 5\nhint\n1 1\n");
        assert_eq!(code, 0);
        assert!(out.contains("enter a 0-based pile index"));
        assert!(out.contains("illegal move"));
        assert!(out.contains("winning moves: pile 1 -> 1"));
        // (1,1) is balanced: the engine falls back, the human finishes
        assert!(out.contains("engine plays pile 0 -> 0: (0, 1)"));
        assert!(out.ends_with("game abandoned.\n"));
    }

    #[test]
    fn play_engine_first_wins() {
        let (code, out, _) = run_args(&["play", "--piles", "3", "--engine-first"], "");
        assert_eq!(code, 0);
        assert!(out.contains("engine plays pile 0 -> 0"));
        assert!(out.contains("engine wins"));
    }
}
