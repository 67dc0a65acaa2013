mod commands;
mod ranges;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Status;

/// Quandle coloring counts, coloring quivers and verification sweeps for braid-closure links.
#[derive(Debug, Parser)]
#[command(name = "qquiver", version)]
struct Cli {
    #[command(flatten)]
    caps: Caps,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Caps {
    /// Largest coloring set to list explicitly.
    #[arg(long, global = true, env = "QQ_ENUM_CAP", default_value_t = 1_000_000, value_parser = positive_u128)]
    pub enum_cap: u128,

    /// Largest number of top assignments the brute-force oracle may try.
    #[arg(long, global = true, env = "QQ_ORACLE_CAP", default_value_t = 10_000_000, value_parser = positive_u128)]
    pub oracle_cap: u128,

    /// Search-node budget for brute-force endomorphism enumeration.
    #[arg(long, global = true, env = "QQ_ENDO_CAP", default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub endo_cap: u64,

    /// Search-node budget for quiver isomorphism.
    #[arg(long, global = true, env = "QQ_ISO_BUDGET", default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub iso_budget: u64,
}

fn positive_u128(s: &str) -> Result<u128, String> {
    match s.parse::<u128>() {
        Ok(0) => Err("cap must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count colorings of a link by R_n.
    Count(CountArgs),
    /// Build the coloring quiver of a link over R_n, compare and export it.
    Quiver(QuiverArgs),
    /// Sweep torus links T(p,q) over R_n and check every count.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Oracle,
    Linear,
    Formula,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EndoSource {
    Affine,
    Brute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Dot,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// `torus:p,q` or a braid word such as `s1 -s2 s1 -s2`.
    #[arg(long)]
    pub link: String,

    /// Strand count for a braid word (default: one more than its largest generator).
    #[arg(long)]
    pub strands: Option<usize>,

    /// Modulus, list or inclusive range: `6`, `3,5`, `2..9`.
    #[arg(long = "n")]
    pub n: String,

    #[arg(long, value_enum, default_value_t = Backend::Linear)]
    pub backend: Backend,

    /// Write the results as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QuiverArgs {
    #[arg(long)]
    pub link: String,

    #[arg(long)]
    pub strands: Option<usize>,

    #[arg(long = "n")]
    pub n: usize,

    /// Compare against the closed-form quiver for the computed count.
    #[arg(long)]
    pub compare: bool,

    /// Export format; without it only a summary is printed.
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Draw one node per block (DOT only).
    #[arg(long)]
    pub collapse: bool,

    /// Emit loop edges in the full DOT view.
    #[arg(long, action = clap::ArgAction::Set, default_value_t = true, num_args = 0..=1, default_missing_value = "true")]
    pub include_loops: bool,

    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = EndoSource::Affine)]
    pub endos: EndoSource,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Odd primes: list or range.
    #[arg(long = "p")]
    pub p: String,

    #[arg(long = "q")]
    pub q: String,

    #[arg(long = "n")]
    pub n: String,

    #[arg(long, value_enum, default_value_t = Backend::All)]
    pub backend: Backend,

    /// Skip cells with n^p above this many assignments.
    #[arg(long)]
    pub max_np: Option<u128>,

    /// Report file; the format follows the extension unless `--format` is given.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Count(args) => commands::count(args, &cli.caps),
        Command::Quiver(args) => commands::quiver(args, &cli.caps),
        Command::Verify(args) => commands::verify(args, &cli.caps),
    };
    match result {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            if commands::is_cap_error(&e) {
                Status::CapExceeded.exit_code()
            } else {
                ExitCode::from(1)
            }
        }
    }
}
