use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "growthlab",
    version,
    about = "Sharp growth constants and verification runs for p-Laplacian subsolutions",
    args_override_self = true
)]
pub struct Cli {
    /// `key = value` file; its entries act as flags placed before the command line.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Base tolerance of the inequality checks (default 1e-8, or GROWTHLAB_TOL).
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// C0, C1 and the comparison constants of a parameter tuple.
    Constants(ConstantsArgs),
    /// Build an extremal example, check its residual and optionally its rate.
    Sharp(SharpArgs),
    /// Residual, FD, bracket, rate and inequality checks for one example.
    Verify(ExampleArgs),
    /// Sample ln G over radii and fit the tail rate.
    Rate(RateArgs),
    /// Integral inequality checks at chosen radii.
    Inequalities(InequalityArgs),
    /// Divergence condition for the R^n p-harmonic example or a given slope.
    L1(L1Args),
    /// Liouville verdict for a claimed growth rate.
    Liouville(LiouvilleArgs),
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
}

#[derive(Debug, Args, Clone)]
pub struct ExampleArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub mu: f64,
    /// Override of `a`; requires `--c`, on the extremal ray.
    #[arg(long, requires = "c", allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, requires = "a")]
    pub c: Option<f64>,
    /// Truncation level, above v(1).
    #[arg(long)]
    pub s0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SharpArgs {
    #[command(flatten)]
    pub example: ExampleArgs,
    /// Also measure the growth rate.
    #[arg(long)]
    pub rate: bool,
    #[command(flatten)]
    pub window: WindowArgs,
}

#[derive(Debug, Args, Clone, Default)]
pub struct WindowArgs {
    #[arg(long)]
    pub rmin: Option<f64>,
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    /// Explicit comma-separated radii, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    pub radii: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub example: ExampleArgs,
    #[command(flatten)]
    pub window: WindowArgs,
}

#[derive(Debug, Args)]
pub struct InequalityArgs {
    #[command(flatten)]
    pub example: ExampleArgs,
    /// Inner radius of the growth and local bounds (default t0 + 1).
    #[arg(long)]
    pub r1: Option<f64>,
    /// Outer radius (default 10 (t0 + 1)).
    #[arg(long = "r")]
    pub r: Option<f64>,
    /// Cutoff width (default R1^{mu/p}).
    #[arg(long)]
    pub h: Option<f64>,
    /// Relaxation of lambda (default: the smallest valid one from t0 on).
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Args)]
pub struct L1Args {
    /// Use this sphere-integral exponent instead of measuring one.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// With `--alpha`: phi is infinite on an initial interval.
    #[arg(long)]
    pub initially_infinite: bool,
    #[arg(long, default_value_t = 3.0)]
    pub p: f64,
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long, default_value_t = 3.0)]
    pub q: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub s0: f64,
    #[arg(long, default_value_t = 1e4)]
    pub smin: f64,
    #[arg(long, default_value_t = 1e8)]
    pub smax: f64,
}

#[derive(Debug, Args)]
pub struct LiouvilleArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Claimed exponential growth rate of the ball integrals.
    #[arg(long)]
    pub growth: f64,
}
