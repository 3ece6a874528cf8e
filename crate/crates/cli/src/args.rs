use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hfts_core::fpca::DEFAULT_VAR_THRESHOLD;
use hfts_core::median_forecast::DEFAULT_WINDOW;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "hfts", version, about = "Forecast hierarchical functional time series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Parse a hierarchy config and its station files and report problems
    Validate(ValidateArgs),
    /// Write rolling one-step forecasts for every node
    Forecast(ForecastArgs),
    /// Backtest methods and tabulate MAD of integrated errors per node
    Evaluate(EvaluateArgs),
    /// Export functional boxplot or scale-curve data
    Diagnose(DiagnoseArgs),
    /// Generate a seeded synthetic hierarchy with its config
    Synthesize(SynthesizeArgs),
    /// Rerun the command recorded in a manifest
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DepthArg {
    Mbd,
    Fm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightsArg {
    Population,
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseArg {
    Fpca,
    MovingMedian,
    MovingMean,
    Naive,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ModelArgs {
    /// Moving window length in days
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: usize,
    #[arg(long, value_enum, default_value_t = DepthArg::Mbd)]
    pub depth: DepthArg,
    /// Child weights in the upper medians of the double-median method
    #[arg(long, value_enum, default_value_t = WeightsArg::Population)]
    pub weights: WeightsArg,
    /// Share of variance the FPCA components must explain
    #[arg(long, default_value_t = DEFAULT_VAR_THRESHOLD)]
    pub var_threshold: f64,
    /// Base forecaster for bottom-up, top-down and gls
    #[arg(long, value_enum, default_value_t = BaseArg::Fpca)]
    pub base: BaseArg,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ValidateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Also write the findings as JSON
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ForecastArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// double-median, moving-mean, naive, bottom-up, top-down or gls;
    /// reconciling methods also accept a base prefix such as fpca-gls
    #[arg(long, default_value = "double-median")]
    pub method: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Only forecast the day after the data instead of the rolling backtest
    #[arg(long)]
    pub next_only: bool,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Comma-separated methods, e.g. double-median,fpca-gls
    #[arg(long, value_delimiter = ',', default_value = "double-median,fpca-gls")]
    pub method: Vec<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnoseWhat {
    Boxplot,
    ScaleCurve,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DiagnoseArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Node whose observed curves are summarized
    #[arg(long, conflicts_with = "pooled", required_unless_present = "pooled")]
    pub node: Option<String>,
    /// Pool the curves of all leaves
    #[arg(long)]
    pub pooled: bool,
    #[arg(long, value_enum, default_value_t = DiagnoseWhat::Boxplot)]
    pub what: DiagnoseWhat,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75,1.0")]
    pub alphas: Vec<f64>,
    #[arg(long, default_value_t = hfts_core::diagnostics::DEFAULT_FENCE_FACTOR)]
    pub fence_factor: f64,
    #[arg(long, value_enum, default_value_t = DepthArg::Mbd)]
    pub depth: DepthArg,
    /// Output CSV file
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternArg {
    Diurnal,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutlierArg {
    Amplitude,
    Shape,
    Covariance,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SynthesizeArgs {
    #[arg(long, default_value_t = 5)]
    pub leaves: usize,
    #[arg(long, default_value_t = 181)]
    pub days: usize,
    #[arg(long, default_value_t = 24)]
    pub points: usize,
    #[arg(long, default_value_t = 0.0)]
    pub grid_start: f64,
    #[arg(long, default_value_t = 24.0)]
    pub grid_end: f64,
    /// First date, ISO-8601
    #[arg(long, default_value = "2016-09-01")]
    pub start_date: chrono::NaiveDate,
    #[arg(long, value_enum, default_value_t = PatternArg::Diurnal)]
    pub pattern: PatternArg,
    /// Base level (diurnal) or the constant value
    #[arg(long, default_value_t = 50.0)]
    pub level: f64,
    /// Relative amplitude of the daily cycle
    #[arg(long, default_value_t = 0.3)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 10.0)]
    pub noise_sd: f64,
    #[arg(long, default_value_t = 0.7)]
    pub persistence: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fraction of days per leaf replaced by outliers
    #[arg(long, default_value_t = 0.0)]
    pub contamination: f64,
    #[arg(long, value_enum, default_value_t = OutlierArg::Amplitude)]
    pub outlier_kind: OutlierArg,
    /// Outlier magnitude; defaults to ten times the mean level of the data
    #[arg(long)]
    pub outlier_magnitude: Option<f64>,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write to this directory (or file, for diagnose) instead
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Read this config instead of the recorded one
    #[arg(long)]
    pub config: Option<PathBuf>,
}
