//! `bcregions`: ordering certificates, rate regions and reproduction tables
//! for broadcast channels with receiver-side state.

mod models;
mod output;
mod region;
mod repro;

use std::path::PathBuf;
use std::process::ExitCode;

use bcregions::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "bcregions", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Channel ordering certificates.
    Order {
        #[command(subcommand)]
        action: OrderAction,
    },
    /// Compute one rate region.
    Region(RegionArgs),
    /// Regenerate reference tables and regions.
    Repro(ReproArgs),
}

#[derive(Debug, Subcommand)]
enum OrderAction {
    /// Certify the component pair and the lifted pair of a discrete model.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Tdcs,
    Uv,
    Superposition,
    MartonRtd,
    Bec,
    Bsc3,
    Blackwell,
    FiniteField,
    Gaussian,
    Dpc,
    Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Direction sweep as `count:min:max` over the weight of rate 2.
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coarse grid resolution of the input searches.
    #[arg(long, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(10..))]
    pub resolution: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Target {
    Fig4,
    Fig5,
    #[value(alias = "bsc4-table")]
    Bsc4,
    Example3Atlas,
    DpcGap,
    All,
}

#[derive(Debug, Args)]
pub struct ReproArgs {
    #[arg(value_enum, required = true)]
    pub targets: Vec<Target>,
    /// State probabilities for the finite-field and dirty-paper targets.
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    /// Field size of the finite-field target.
    #[arg(long, default_value_t = 2)]
    pub field: u64,
    /// Output directory.
    #[arg(long, default_value = "repro")]
    pub out: PathBuf,
    #[command(flatten)]
    pub options: Options,
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("BCREGIONS_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::InvalidModel(format!("BCREGIONS_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvariantBreach(e.to_string()))
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Order {
            action: OrderAction::Check { model, out },
        } => {
            let report = models::order_check(&model)?;
            output::emit(out.as_deref(), &report)
        }
        Command::Region(args) => region::run(&args),
        Command::Repro(args) => repro::run(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bcregions: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
