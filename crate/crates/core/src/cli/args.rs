use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Pricing, simulation and calibration of dividend and interest-rate
/// term structures under polynomial jump-diffusion factors.
#[derive(Debug, Parser)]
#[command(name = "polydiv", version)]
pub struct Cli {
    /// Worker threads for simulation and calibration.
    #[arg(long, global = true, env = "POLYDIV_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price one instrument, or a strike ladder of options.
    Price(PriceArgs),
    /// Fit a maximum-entropy density to a moments file.
    FitMaxent(FitArgs),
    /// Monte-Carlo estimate of an instrument next to its closed form.
    Simulate(SimulateArgs),
    /// Fit the four-factor model to a quote file.
    Calibrate(CalibrateArgs),
    /// Option price against the number of matched moments, with a Monte-Carlo band.
    Convergence(ConvergenceArgs),
    /// Maximum-smoothness seasonal dividend futures curve.
    Bootstrap(BootstrapArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Kind {
    /// Zero-coupon bond maturing at --T.
    Bond,
    /// Short rate now.
    ShortRate,
    /// Dividend futures on [--T1, --T2].
    DivFuture,
    /// Dividend forward on [--T1, --T2], paid at --T2.
    DivForward,
    /// Par rate of a swap starting at --T (default 0) with --tenor.
    SwapRate,
    /// Annuity of a swap starting at --T with --tenor.
    Annuity,
    /// Fundamental stock price.
    Stock,
    /// Stock duration in years.
    Duration,
    /// Payer swaption expiring at --T on a swap of --tenor.
    Swaption,
    /// Call on the dividends paid over [--T1, --T2].
    DivOption,
    /// Call on the fundamental stock expiring at --T.
    StockOption,
}

impl Kind {
    pub fn is_option(self) -> bool {
        matches!(self, Kind::Swaption | Kind::DivOption | Kind::StockOption)
    }
}

#[derive(Debug, Clone, Args)]
pub struct InstrumentArgs {
    /// Instrument to price.
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Maturity, option expiry or swap start, in years.
    #[arg(long = "T")]
    pub maturity: Option<f64>,
    /// Start of the dividend period.
    #[arg(long = "T1")]
    pub t1: Option<f64>,
    /// End of the dividend period.
    #[arg(long = "T2")]
    pub t2: Option<f64>,
    /// Swap tenor in years.
    #[arg(long)]
    pub tenor: Option<f64>,
    /// Fixed-leg payment period in years.
    #[arg(long, default_value_t = 1.0)]
    pub period: f64,
    /// Option strikes, comma separated; `atm` is the forward. Several strikes
    /// print a ladder.
    #[arg(long, value_delimiter = ',', default_value = "atm")]
    pub strike: Vec<String>,
    /// Price the put (receiver swaption) instead of the call.
    #[arg(long)]
    pub put: bool,
    /// Horizon of the stock price truncation in Monte-Carlo runs.
    #[arg(long, default_value_t = 200.0)]
    pub truncation: f64,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    /// Monte-Carlo paths.
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    /// Euler step in years.
    #[arg(long, default_value_t = 1.0 / 52.0)]
    pub step: f64,
    /// Random seed.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Disable the control variate for options.
    #[arg(long)]
    pub no_control_variate: bool,
}

#[derive(Debug, Args)]
pub struct PriceArgs {
    /// Model file.
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub instrument: InstrumentArgs,
    /// Moments matched for options.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Cross-check options with a Monte-Carlo run.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub mc: McArgs,
    /// Also write the result table to this CSV file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Moments file.
    #[arg(long)]
    pub moments: PathBuf,
    /// Write the multipliers here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Model file.
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub instrument: InstrumentArgs,
    #[command(flatten)]
    pub mc: McArgs,
    /// Simulation horizon; defaults to the instrument's last date.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Dump every path on the grid to this CSV file (t,path,x1..xd).
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Quote file (kind,expiry,tenor_or_T2,strike,value,weight).
    #[arg(long)]
    pub quotes: PathBuf,
    /// Initial four-factor model file.
    #[arg(long, required_unless_present = "warm_start")]
    pub initial: Option<PathBuf>,
    /// Previous calibrated model file; used as the starting point.
    #[arg(long)]
    pub warm_start: Option<PathBuf>,
    /// Directory for model.txt and errors.csv.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Moments matched for options.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Objective evaluation budget.
    #[arg(long, default_value_t = 5000)]
    pub max_evals: usize,
    /// Simplex diameter tolerance in scaled parameters.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Simplex restarts around the best point.
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    /// Model file.
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub instrument: InstrumentArgs,
    /// Smallest number of moments.
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    /// Largest number of moments.
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    /// Futures targets CSV (year,futures).
    #[arg(long)]
    pub targets: PathBuf,
    /// Bucket weights CSV (bucket,weight).
    #[arg(long)]
    pub weights: PathBuf,
    /// Grid intervals per year.
    #[arg(long, default_value_t = 52)]
    pub points_per_year: usize,
    /// Constrain the curve to be non-negative.
    #[arg(long)]
    pub nonnegative: bool,
    /// Write the curve here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
