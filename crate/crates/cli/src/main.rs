//! `paircode`: command-line front end for function-correcting symbol-pair
//! codes.
//!
//! Exit status: 0 on success, 1 when a check finds a counterexample, 2 on
//! usage or input errors.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "paircode", version, about = "Function-correcting symbol-pair codes")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hamming and pair distance of two words, or the pair weight of one.
    Metric(MetricArgs),
    /// Pair-ball volume from the closed formula, optionally by enumeration.
    Ball(BallArgs),
    /// Bounds on the shortest code meeting a distance matrix.
    Bounds(BoundsArgs),
    /// Encoder construction, verification and redundancy reports.
    Fcspc {
        #[command(subcommand)]
        command: FcspcCommand,
    },
    /// Classical symbol-pair redundancy next to the FCSPC upper bounds.
    Compare(CompareArgs),
    /// Channel round trips through an encoder.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
pub struct MetricArgs {
    #[arg(long, requires = "y", conflicts_with = "weight")]
    pub x: Option<String>,
    #[arg(long, requires = "x")]
    pub y: Option<String>,
    #[arg(long)]
    pub weight: Option<String>,
}

#[derive(Args, Debug)]
pub struct BallArgs {
    #[arg(short = 'n', long)]
    pub n: u64,
    #[arg(short = 't', long)]
    pub t: u64,
    /// Also count the ball by scanning every word.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["matrix", "uniform"])))]
pub struct BoundsArgs {
    /// Matrix file, JSON (`{"m":..,"rows":[..]}`) or CSV rows.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Uniform matrix of size M with all off-diagonal entries D.
    #[arg(long, num_args = 2, value_names = ["M", "D"])]
    pub uniform: Option<Vec<u32>>,
    /// Run the exhaustive search for the exact minimum length.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value = "pair")]
    pub metric: String,
    #[arg(long, default_value_t = 22)]
    pub r_max: usize,
    /// Seed for the greedy construction's starting offset.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum FcspcCommand {
    /// Build an encoder and write it as JSON.
    Construct(ConstructArgs),
    /// Check an encoder against a function.
    Verify(VerifyArgs),
    /// Collect the redundancy bounds for a function.
    Report(ReportArgs),
    /// Print a requirement matrix of a function.
    Matrix(MatrixArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Weight,
    Dist,
    Locally,
    Class,
    Exact,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub t: u32,
    /// Period of the pair weight distribution.
    #[arg(long = "T", id = "period")]
    pub period: Option<u64>,
    /// Base code file for the pair weight family, one word per line.
    #[arg(long)]
    pub base: Option<PathBuf>,
    /// Function for the locally, class and exact families: `weight`,
    /// `dist:T`, `indicator:w1,w2,..` or `table:PATH`.
    #[arg(long)]
    pub function: Option<String>,
    /// Use exhaustive searches where the guards allow.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub r_max: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub enc: PathBuf,
    /// Function to check against; defaults to the encoder's own.
    #[arg(long)]
    pub function: Option<String>,
    /// Error budget; defaults to the encoder's design value.
    #[arg(long)]
    pub t: Option<u32>,
    /// Check this many random pairs instead of all of them.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub t: u32,
    #[arg(long = "T", id = "period")]
    pub period: Option<u64>,
    #[arg(long)]
    pub function: Option<String>,
    /// Message subset file for the lower-bound matrix.
    #[arg(long)]
    pub subset: Option<PathBuf>,
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = 16)]
    pub r_max: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct MatrixArgs {
    #[arg(long, default_value = "weight")]
    pub function: String,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub t: u32,
    /// 1 for the lower-bound matrix, 2 for the upper-bound one.
    #[arg(long, default_value = "2")]
    pub kind: String,
    /// Messages file; without it the matrix is taken over function values.
    #[arg(long, conflicts_with_all = ["chain", "closed_form"])]
    pub messages: Option<PathBuf>,
    /// Use the messages `1^i 0^(k-i)`.
    #[arg(long, conflicts_with = "closed_form")]
    pub chain: bool,
    /// Closed-form pair weight matrix instead of the exact one.
    #[arg(long)]
    pub closed_form: bool,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub t: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exactly,
    UpTo,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("run").required(true).args(["trials", "exhaustive"])))]
pub struct SimulateArgs {
    #[arg(long)]
    pub enc: PathBuf,
    #[arg(long)]
    pub function: Option<String>,
    /// Number of channel errors; defaults to the encoder's design value.
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long, requires = "seed")]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = ModeArg::UpTo)]
    pub mode: ModeArg,
    /// Every message against every error pattern of weight at most t.
    #[arg(long)]
    pub exhaustive: bool,
}

fn configure_threads() {
    if let Some(n) = std::env::var("PAIRCODE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // a second initialisation can only fail if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let fmt = cli.format;
    let result = match cli.command {
        Command::Metric(a) => commands::metric(&a, fmt),
        Command::Ball(a) => commands::ball(&a, fmt),
        Command::Bounds(a) => commands::bounds(&a, fmt),
        Command::Fcspc { command } => match command {
            FcspcCommand::Construct(a) => commands::construct(&a, fmt),
            FcspcCommand::Verify(a) => commands::verify(&a, fmt),
            FcspcCommand::Report(a) => commands::report(&a, fmt),
            FcspcCommand::Matrix(a) => commands::matrix(&a, fmt),
        },
        Command::Compare(a) => commands::compare(&a, fmt),
        Command::Simulate(a) => commands::simulate(&a, fmt),
    };
    match result {
        Ok(status) => status.into(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// How a command that ran to completion ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// The computation found a counterexample or a failed round trip.
    Negative,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        match s {
            Status::Success => ExitCode::SUCCESS,
            Status::Negative => ExitCode::from(1),
        }
    }
}
