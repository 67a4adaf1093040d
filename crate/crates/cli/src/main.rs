//! `secrecast` command-line front end.
//!
//! Exit codes: 0 success, 1 usage, configuration or infeasibility errors,
//! 2 protocol budget exceeded, 3 reproduction mismatch.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_BUDGET: u8 = 2;
pub const EXIT_MISMATCH: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "secrecast", version, about = "Keyed GF(2) broadcast coding simulator and secrecy auditor")]
pub struct Cli {
    /// Master seed; overrides the config file's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory, or `-` for standard output where a command has a
    /// single artifact.
    #[arg(long, global = true, default_value = "secrecast-out")]
    pub out: PathBuf,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    pub force: bool,
    /// Suppress progress and summary messages.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a full session from a JSON config and write its report.
    Simulate(SimulateArgs),
    /// Measure leakage, coefficient laws or packet uniformity.
    Audit(AuditArgs),
    /// Generate a validated key set file.
    Keygen(KeygenArgs),
    /// Rebuild the seven-message worked example and check it.
    #[command(name = "demo-table1")]
    DemoTable1(DemoArgs),
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    pub config: PathBuf,
    /// Key set file to install out of band instead of drawing keys.
    #[arg(long)]
    pub keys: Option<PathBuf>,
    /// Message file: `.json` message set, anything else raw bytes.
    #[arg(long)]
    pub messages: Option<PathBuf>,
    /// Also write the broadcast packets as `trace.bin`.
    #[arg(long)]
    pub trace: bool,
    /// Run one session per seed in `a..b` (or `a..=b`).
    #[arg(long, value_parser = parse_seed_range)]
    pub seeds: Option<(u64, u64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    Idealized,
    KeyDerived,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    #[arg(long)]
    pub n: usize,
    /// Exhaustive enumeration instead of Monte Carlo.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    /// One-based message whose leakage is measured.
    #[arg(long, default_value_t = 1)]
    pub target: usize,
    /// One-based messages known to the observer, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub known: Vec<usize>,
    #[arg(long, value_enum, default_value_t = SourceArg::Idealized)]
    pub source: SourceArg,
    /// Leakage for every target and every known set not containing it.
    #[arg(long, conflicts_with_all = ["lemma2", "packets", "law"])]
    pub all: bool,
    /// Coefficient law of the last unknown.
    #[arg(long, conflicts_with_all = ["packets", "law"])]
    pub lemma2: bool,
    /// Distribution of the coded vector.
    #[arg(long, conflicts_with = "law")]
    pub packets: bool,
    /// Distance between the key-derived and uniform matrix laws.
    #[arg(long)]
    pub law: bool,
}

#[derive(Args, Debug)]
pub struct KeygenArgs {
    #[arg(long)]
    pub n: usize,
    /// Whole-set redraws allowed before giving up.
    #[arg(long, default_value_t = 64)]
    pub attempts: usize,
}

#[derive(Args, Debug)]
pub struct DemoArgs {
    /// Reference matrix to compare against, one row of 0/1 per line.
    #[arg(long)]
    pub expected: Option<PathBuf>,
}

fn parse_seed_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b, inclusive) = if let Some((a, b)) = s.split_once("..=") {
        (a, b, true)
    } else if let Some((a, b)) = s.split_once("..") {
        (a, b, false)
    } else {
        return Err(format!("expected a..b or a..=b, got `{s}`"));
    };
    let a: u64 = a.trim().parse().map_err(|e| format!("start `{a}`: {e}"))?;
    let b: u64 = b.trim().parse().map_err(|e| format!("end `{b}`: {e}"))?;
    let end = if inclusive { b.checked_add(1).ok_or("range end overflows")? } else { b };
    if end <= a {
        return Err(format!("empty seed range `{s}`"));
    }
    Ok((a, end))
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("SECRECAST_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("SECRECAST_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    ExitCode::from(commands::run(&cli))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seed_range("3..7"), Ok((3, 7)));
        assert_eq!(parse_seed_range("3..=7"), Ok((3, 8)));
        assert!(parse_seed_range("7..3").is_err());
        assert!(parse_seed_range("5").is_err());
        assert!(parse_seed_range("a..b").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
