//! `nlsd`: NLSD and GCov tests, model fitting and Monte Carlo tables.
//!
//! Exit codes: 0 no rejection, 1 rejection, 2 usage or runtime error.

mod commands;
mod model;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "nlsd", version, about = "Nonlinear serial dependence and GCov specification tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a test on a CSV series.
    Test(TestArgs),
    /// Estimate a MAR(r,s) model.
    Fit(FitArgs),
    /// Reproduce a Monte Carlo table from a preset or config file.
    Mc(McArgs),
    /// Simulate a MAR series to CSV.
    Simulate(SimulateArgs),
}

#[derive(Args, Serialize, Clone)]
pub struct Input {
    /// CSV file, one column per component; a header row is optional.
    #[arg(long)]
    pub data: PathBuf,
    /// Remove a polynomial trend first.
    #[arg(long)]
    pub detrend: bool,
    /// Degree of the trend polynomial.
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Nlsd,
    GcovSpec,
    Bootstrap,
    ManyTransform,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorArg {
    Gcov,
    Aml,
    Ols,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum RebuildArg {
    BurnIn,
    OriginalBoundary,
}

#[derive(Args, Serialize)]
pub struct TestArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_enum, default_value = "nlsd")]
    pub mode: Mode,
    /// Comma-separated transforms, e.g. `identity,power:2` or `identity,log-square`.
    #[arg(long, default_value = "identity,power:2")]
    pub transforms: String,
    /// Maximum lag H.
    #[arg(long = "h", default_value_t = 1)]
    pub h: usize,
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Null model for gcov-spec, bootstrap and many-transform modes.
    #[arg(long, default_value = "MAR(0,1)")]
    pub model: String,
    /// Estimator of the null model in bootstrap mode.
    #[arg(long, value_enum, default_value = "gcov")]
    pub estimator: EstimatorArg,
    #[arg(long, default_value_t = 100)]
    pub replicates: usize,
    #[arg(long)]
    pub without_replacement: bool,
    #[arg(long, value_enum, default_value = "burn-in")]
    pub rebuild: RebuildArg,
    /// Largest generator power in many-transform mode (default from T).
    #[arg(long)]
    pub k: Option<u32>,
    /// Exponential weight of the many-transform generators.
    #[arg(long, default_value_t = 0.01)]
    pub weight: f64,
    /// Selection threshold of the many-transform basis (default K/T).
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also report the Kolmogorov-Smirnov normality distance of the series.
    #[arg(long)]
    pub ks: bool,
    /// Directory for results.json and manifest.json.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value = "MAR(1,1)")]
    pub model: String,
    #[arg(long, value_enum, default_value = "gcov")]
    pub estimator: EstimatorArg,
    #[arg(long, default_value = "identity,power:2")]
    pub transforms: String,
    #[arg(long = "h", default_value_t = 3)]
    pub h: usize,
    /// Run the GCov specification test at the estimate (gcov estimator).
    #[arg(long)]
    pub spec_test: bool,
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Directory for results.json, table.csv (residuals and components) and manifest.json.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct McArgs {
    /// TOML config; `preset = "table2"` loads a preset and overrides its keys.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub config: Option<PathBuf>,
    /// table1, table2, table3b, table5, table9, table11, figure2 or figure3.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    pub t: Option<Vec<usize>>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bootstrap replicates per sample.
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// JSONL file of finished cells, reused when the run is resumed.
    #[arg(long)]
    #[serde(skip)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct SimulateArgs {
    /// Causal coefficients, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phi: Vec<f64>,
    /// Noncausal coefficients, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub psi: Vec<f64>,
    /// uniform, laplace, gaussian, cauchy or t:nu.
    #[arg(long, default_value = "t:5")]
    pub dist: String,
    #[arg(long = "t", default_value_t = 500)]
    pub t: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub burn: Option<usize>,
    /// Output CSV (stdout when absent).
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let outcome = match cli.command {
        Command::Test(a) => commands::test(&a),
        Command::Fit(a) => commands::fit(&a),
        Command::Mc(a) => commands::mc(&a),
        Command::Simulate(a) => commands::simulate(&a),
    };
    match outcome {
        Ok(true) => ExitCode::from(1),
        Ok(false) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
