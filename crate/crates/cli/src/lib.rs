//! Command-line front end for `gsmon-core`.
//!
//! Exit codes: 0 when every check passes (vacuous passes included), 1 when
//! some property is violated, 2 on usage, configuration or input errors.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{Format, ModeChoice, RunConfig};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] gsmon_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed input {path}: {reason}")]
    MalformedInput { path: String, reason: String },
}

/// One comma-separated `--sizes` group, e.g. `2,2,2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeGroup(pub Vec<usize>);

fn parse_sizes(s: &str) -> Result<SizeGroup, String> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("bad size `{p}`: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(SizeGroup)
}

#[derive(Debug, Parser)]
#[command(name = "gsmon", version, about = "Check Kleisli categories of commutative monads on finite sets")]
pub struct Cli {
    #[command(flatten)]
    pub globals: Globals,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Globals {
    #[arg(long, global = true, value_enum, default_value_t = ModeChoice::Auto)]
    pub mode: ModeChoice,
    /// Sampled cases per randomized check.
    #[arg(long, global = true, default_value_t = 500)]
    pub trials: u64,
    #[arg(long, global = true, env = "GSMON_SEED", default_value_t = 42)]
    pub seed: u64,
    /// Object sizes, comma separated; repeat the flag for several groups.
    #[arg(long, global = true, value_parser = parse_sizes)]
    pub sizes: Vec<SizeGroup>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Multiplicity bound for `F`.
    #[arg(long, global = true)]
    pub bound: Option<i64>,
    #[arg(long, global = true, default_value_t = 9)]
    pub max_numerator: u32,
    #[arg(long, global = true, default_value_t = 4)]
    pub max_denominator: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Affine / weakly affine / neither, with witnesses.
    Classify {
        #[arg(long)]
        monad: Vec<String>,
        #[arg(long, conflicts_with = "monad")]
        all: bool,
    },
    #[command(subcommand)]
    Check(CheckCommand),
    /// Merge earlier reports or check lists into one document.
    Report { inputs: Vec<PathBuf> },
    /// Print a structural kernel (id, copy, discard, swap) as JSON.
    Structural {
        #[arg(long)]
        monad: String,
        #[arg(long, value_parser = ["id", "copy", "discard", "del", "swap"])]
        kind: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SquareKind {
    Assoc,
    StrongAffine,
    Positivity,
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Monad laws and copy/discard laws.
    Laws {
        #[arg(long, required = true)]
        monad: Vec<String>,
    },
    /// Group, effect-inverse and associativity-pullback conditions side by side.
    Theorem {
        #[arg(long, required = true)]
        monad: Vec<String>,
    },
    Pullback {
        #[arg(long, value_enum)]
        square: SquareKind,
        #[arg(long, required = true)]
        monad: Vec<String>,
    },
    /// Conditional independence of a kernel's outputs.
    Ci {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        partition: String,
        #[arg(long, default_value = "auto")]
        method: String,
    },
    LocalIndependence {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        partition: String,
        #[arg(long, default_value = "auto")]
        method: String,
    },
    /// Group test against the associativity pullback on finite monoids.
    #[command(name = "monoid-pullback", alias = "prop21")]
    MonoidPullback {
        /// Library monoid names; defaults to the whole library.
        #[arg(long)]
        monoid: Vec<String>,
        #[arg(long)]
        monoid_file: Vec<PathBuf>,
    },
}

/// Parses `args`, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match commands::execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
