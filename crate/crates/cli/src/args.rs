use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hzlab::quad_field::Sign;
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "hzlab", version, about = "Desk experiments on the value distribution of ζ(s, α) for quadratic irrational α")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
    #[command(flatten)]
    pub globals: Globals,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct Globals {
    /// Seed for every Monte Carlo stream.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (defaults to all cores); results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Exit with status 1 when a checked bound fails.
    #[arg(long, global = true)]
    pub assert: bool,
    /// JSON file with parameters; flags given on the command line win.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Field invariants: unit, class number, prime decomposition table.
    Field(FieldArgs),
    /// Cassels decomposition statistics and the private-prime density report.
    Cassels(CasselsArgs),
    /// Random model checks: J0 law, moments, window probabilities.
    Model(ModelArgs),
    /// Time-average characteristic function against the random model.
    Limit(LimitArgs),
    /// Density sweep over a parameter family.
    Dense(DenseArgs),
    /// Beurling–Selberg inequality suite.
    Bs(BsArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct FieldArgs {
    #[arg(long)]
    pub d: i64,
    /// Tabulate rational primes up to this bound.
    #[arg(long, default_value_t = 50)]
    pub primes: u64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct AlphaArgs {
    #[arg(long, default_value_t = 4)]
    pub a: i64,
    #[arg(long, default_value_t = 2)]
    pub b: i64,
    #[arg(long, default_value_t = 2)]
    pub d: i64,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    pub sign: Sign,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CasselsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub alpha: AlphaArgs,
    #[arg(long = "N", id = "N", default_value_t = 2000)]
    #[serde(rename = "N")]
    pub n: u64,
    #[arg(long, default_value_t = 0.8)]
    pub sigma: f64,
    /// Per-N ratio table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ModelArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub alpha: AlphaArgs,
    #[arg(long = "N", id = "N", default_value_t = 20)]
    #[serde(rename = "N")]
    pub n: u64,
    #[arg(long, default_value_t = 0.8)]
    pub sigma: f64,
    #[arg(long = "M", id = "M", default_value_t = 100_000)]
    #[serde(rename = "M")]
    pub m: usize,
    /// Indices n whose X_α(n) law is compared with J0.
    #[arg(long, value_delimiter = ',', default_value = "0,1,7")]
    pub n_list: Vec<u64>,
    #[arg(long, default_value_t = 5.0)]
    pub w_radius: f64,
    #[arg(long, default_value_t = 25)]
    pub w_count: usize,
    /// Window half-width for the joint arc probability, in turns.
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    /// Number of coordinates minus one in the joint window.
    #[arg(long, default_value_t = 3)]
    pub window_n: u64,
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct LimitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub alpha: AlphaArgs,
    #[arg(long, default_value_t = 0.8)]
    pub sigma: f64,
    #[arg(long = "N", id = "N", default_value_t = 64)]
    #[serde(rename = "N")]
    pub n: u64,
    /// T ladder; a single value T runs {T/10, T}.
    #[arg(long = "T", id = "T", value_delimiter = ',', default_value = "1000,10000")]
    #[serde(rename = "T")]
    pub t: Vec<f64>,
    #[arg(long = "M", id = "M", default_value_t = 200_000)]
    #[serde(rename = "M")]
    pub m: usize,
    #[arg(long, default_value_t = 3.0)]
    pub w_radius: f64,
    #[arg(long, default_value_t = 25)]
    pub w_count: usize,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    /// Bound on the discrepancy at the largest T.
    #[arg(long, default_value_t = 0.05)]
    pub tol: f64,
    /// Allowed growth between ladder steps.
    #[arg(long, default_value_t = 0.01)]
    pub noise: f64,
    /// Per-(T, w) discrepancies as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct DenseArgs {
    #[arg(long, default_value_t = 0.1)]
    pub c: f64,
    #[arg(long, default_value_t = 2)]
    pub d: i64,
    #[arg(long, default_value_t = 6)]
    pub amax: i64,
    #[arg(long, default_value_t = 0.8)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub z0_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub z0_im: f64,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long = "T", id = "T", default_value_t = 5000.0)]
    #[serde(rename = "T")]
    pub t: f64,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    #[arg(long, default_value_t = 3)]
    pub e1_n: u64,
    #[arg(long, default_value_t = 3)]
    pub e1_bound: i64,
    /// Upper index L for the quotient relation search; 0 skips it.
    #[arg(long, default_value_t = 0)]
    pub e2_l: u64,
    /// Per-α densities as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Majorant,
    Windows,
    Fourier,
    Product,
    All,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct BsArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Points in the real-line grid.
    #[arg(long, default_value_t = 100_000)]
    pub grid: usize,
    /// Half-width of the real-line grid.
    #[arg(long, default_value_t = 50.0)]
    pub range: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub slack: f64,
    /// Random point tuples for the product bound.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
}
