use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use qwalk_core::targets::{DEFAULT_RETURN_BINS, DEFAULT_TRUNCATION_SIGMAS};
use qwalk_core::walk::{DtqwCoin, InitialCoinState};

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about)]
pub struct Cli {
    /// Directory that receives the artifacts; created if missing.
    #[arg(short, long, global = true, default_value = "qwalk-out")]
    pub out: PathBuf,

    /// Master seed for the restart streams.
    #[arg(long, global = true, env = "QWALK_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for the restarts (default: all cores). Results do not
    /// depend on this.
    #[arg(long, global = true)]
    pub parallel: Option<usize>,

    /// Also draw the plots as text on stdout.
    #[arg(long, global = true)]
    pub ascii: bool,

    /// Log more (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    #[command(flatten)]
    Run(RunCommand),
    /// Re-run the command recorded in a manifest.json.
    Replay(ReplayArgs),
}

/// Everything a manifest can record and replay.
#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum RunCommand {
    /// Fit the histogram of daily returns from an OHLC CSV export.
    FitReturns(FitReturnsArgs),
    /// Fit a binomial distribution B(n, p).
    FitBinomial(FitBinomialArgs),
    /// Fit the terminal log-normal price law and price a European call on it.
    FitLognormal(FitLognormalArgs),
    /// Price a European call on the discretized log-normal law.
    PriceCall(PriceCallArgs),
    /// Plain discrete-time quantum walk with a Z, X or H coin.
    DtqwDemo(DtqwArgs),
}

impl RunCommand {
    pub fn name(&self) -> &'static str {
        match self {
            RunCommand::FitReturns(_) => "fit-returns",
            RunCommand::FitBinomial(_) => "fit-binomial",
            RunCommand::FitLognormal(_) => "fit-lognormal",
            RunCommand::PriceCall(_) => "price-call",
            RunCommand::DtqwDemo(_) => "dtqw-demo",
        }
    }
}

/// Circuit shape and optimizer settings shared by the fit subcommands.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FitArgs {
    /// Number of walkers per step.
    #[arg(long)]
    pub num: usize,

    /// Number of steps.
    #[arg(long)]
    pub step: usize,

    /// Independent optimizer restarts.
    #[arg(long, default_value_t = 100)]
    pub restarts: usize,

    /// Starting position index (default: the target's mode).
    #[arg(long)]
    pub initial_position: Option<usize>,

    /// Weight of the KL term in the loss.
    #[arg(long, default_value_t = 1.0)]
    pub kl_weight: f64,

    /// Objective evaluations per restart.
    #[arg(long, default_value_t = 1000)]
    pub max_evaluations: usize,

    /// Initial trust-region radius.
    #[arg(long, default_value_t = 0.5)]
    pub rho_begin: f64,

    /// Final trust-region radius.
    #[arg(long, default_value_t = 1e-6)]
    pub rho_end: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FitReturnsArgs {
    /// CSV with Date and Close columns.
    pub csv: PathBuf,

    /// Histogram bins (a power of two).
    #[arg(long, default_value_t = DEFAULT_RETURN_BINS)]
    pub bins: usize,

    /// Use log returns instead of simple returns.
    #[arg(long)]
    pub log_returns: bool,

    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FitBinomialArgs {
    /// Number of trials; the register holds the next power of two >= n + 1.
    #[arg(long)]
    pub n: usize,

    /// Success probability.
    #[arg(long)]
    pub p: f64,

    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct MarketArgs {
    #[arg(long)]
    pub spot: f64,

    #[arg(long)]
    pub strike: f64,

    /// Annual risk-free rate, continuously compounded.
    #[arg(long)]
    pub rate: f64,

    /// Annual volatility.
    #[arg(long)]
    pub vol: f64,

    /// Days to maturity (365-day year).
    #[arg(long)]
    pub maturity_days: f64,

    /// Position qubits of the price grid.
    #[arg(long, default_value_t = 5)]
    pub qubits: usize,

    /// Half-width of the price grid in standard deviations.
    #[arg(long, default_value_t = DEFAULT_TRUNCATION_SIGMAS)]
    pub truncation: f64,

    /// Discount payoffs to today.
    #[arg(long)]
    pub discount: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FitLognormalArgs {
    #[command(flatten)]
    pub market: MarketArgs,

    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PriceCallArgs {
    #[command(flatten)]
    pub market: MarketArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DtqwArgs {
    #[arg(long, value_enum)]
    pub coin: CoinChoice,

    #[arg(long, value_enum, default_value_t = InitChoice::Up)]
    pub init: InitChoice,

    #[arg(long)]
    pub steps: usize,

    /// Position qubits (default: smallest register that avoids wrap-around).
    #[arg(long)]
    pub qubits: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum CoinChoice {
    #[value(name = "Z", alias = "z")]
    Z,
    #[value(name = "X", alias = "x")]
    X,
    #[value(name = "H", alias = "h")]
    H,
}

impl From<CoinChoice> for DtqwCoin {
    fn from(c: CoinChoice) -> Self {
        match c {
            CoinChoice::Z => DtqwCoin::Z,
            CoinChoice::X => DtqwCoin::X,
            CoinChoice::H => DtqwCoin::H,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitChoice {
    Up,
    Down,
    Symmetric,
}

impl From<InitChoice> for InitialCoinState {
    fn from(c: InitChoice) -> Self {
        match c {
            InitChoice::Up => InitialCoinState::Up,
            InitChoice::Down => InitialCoinState::Down,
            InitChoice::Symmetric => InitialCoinState::Symmetric,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Path to a manifest.json written by an earlier run.
    pub manifest: PathBuf,

    /// Fail unless the regenerated JSON artifacts match the ones stored next
    /// to the manifest byte for byte.
    #[arg(long)]
    pub verify: bool,
}
