mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use opst::input::Column;

#[derive(Parser)]
#[command(name = "opst", version, about = "Order-preserving suffix tree indexing and frequent pattern mining")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Maximal,
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    /// Suffix-tree miners
    Opst,
    /// Levelwise Apriori baselines
    Apriori,
    /// Definitional miner over all fragments (small inputs only)
    BruteForce,
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Series file, or `-` for standard input
    #[arg(long)]
    input: Option<PathBuf>,
    /// Input format; defaults to csv for `.csv` files and plain otherwise
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// CSV column, by zero-based index or header name
    #[arg(long, default_value = "0", value_parser = parse_column)]
    column: Column,
}

fn parse_column(s: &str) -> Result<Column, String> {
    Ok(s.parse().unwrap_or_else(|never| match never {}))
}

fn parse_tau(s: &str) -> Result<usize, String> {
    let tau: usize = s.parse().map_err(|_| format!("{s:?} is not a whole number"))?;
    if tau <= 1 {
        return Err("tau must be at least 2".into());
    }
    Ok(tau)
}

#[derive(Subcommand)]
enum Command {
    /// Build and save the index of a series
    Build {
        #[command(flatten)]
        input: InputArgs,
        /// Where to write the index
        #[arg(long)]
        index: PathBuf,
        /// Write the statistics here instead of standard output
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Mine maximal or closed frequent patterns as JSON Lines
    Mine {
        #[command(flatten)]
        input: InputArgs,
        /// Previously built index (used instead of --input)
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "maximal")]
        mode: Mode,
        /// Minimum number of occurrences, at least 2
        #[arg(long, value_parser = parse_tau)]
        tau: usize,
        #[arg(long, value_enum, default_value = "opst")]
        engine: Engine,
        /// Length cap for the brute-force engine
        #[arg(long, default_value_t = opst::baseline::DEFAULT_BRUTE_FORCE_CAP)]
        max_n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Cross-check the tree miners against both baselines on random series
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        /// Longest random series
        #[arg(long, default_value_t = 40)]
        max_n: usize,
        /// Largest random alphabet
        #[arg(long, default_value_t = 6)]
        max_sigma: u32,
        /// Thresholds to draw from
        #[arg(long, value_delimiter = ',', default_value = "2,3,5", value_parser = parse_tau)]
        taus: Vec<usize>,
        #[arg(long, hide = true)]
        inject_fault: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Pattern-frequency feature matrix for a directory of series
    Features {
        /// Directory of series files, one series per file
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, default_value = "0", value_parser = parse_column)]
        column: Column,
        /// File of patterns, one canonical code per line; mined when absent
        #[arg(long)]
        patterns: Option<PathBuf>,
        /// Threshold for mining the patterns
        #[arg(long, value_parser = parse_tau)]
        tau: Option<usize>,
        #[arg(long, value_enum, default_value = "maximal")]
        mode: Mode,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Time construction and mining on random series, as CSV
    Bench {
        /// Series lengths
        #[arg(long, value_delimiter = ',', default_value = "65536,131072,262144,524288,1048576")]
        sizes: Vec<usize>,
        /// Alphabet sizes
        #[arg(long, value_delimiter = ',', default_value = "256")]
        sigmas: Vec<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "2", value_parser = parse_tau)]
        tau: usize,
        #[arg(long, value_enum, default_value = "maximal")]
        mode: Mode,
        /// Repetitions per configuration; the fastest is reported
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build { input, index, output } => commands::build(&input, &index, output.as_deref()),
        Command::Mine {
            input,
            index,
            mode,
            tau,
            engine,
            max_n,
            output,
        } => commands::mine(&input, index.as_deref(), mode, tau, engine, max_n, output.as_deref()),
        Command::Check {
            seed,
            instances,
            max_n,
            max_sigma,
            taus,
            inject_fault,
            output,
        } => {
            let cfg = opst::check::CheckConfig {
                seed,
                instances,
                max_n,
                max_sigma,
                taus,
                fault: inject_fault.then_some(opst::check::Fault::SkipLeftMaximality),
                ..Default::default()
            };
            commands::check(&cfg, output.as_deref())
        }
        Command::Features {
            input,
            format,
            column,
            patterns,
            tau,
            mode,
            output,
        } => commands::features(&input, format, &column, patterns.as_deref(), tau, mode, output.as_deref()),
        Command::Bench {
            sizes,
            sigmas,
            seed,
            tau,
            mode,
            reps,
            output,
        } => commands::bench(&sizes, &sigmas, seed, tau, mode, reps, output.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
