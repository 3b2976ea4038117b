use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use skewlqu::quantum::observable::MIN_SPECTRAL_GAP;

#[derive(Debug, Parser)]
#[command(name = "skewlqu", version, about = "Skew information, local quantum uncertainty and steering bounds")]
#[command(arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Skew information and variance of a state for one observable.
    Skew(CommonArgs),
    /// Total uncertainty Q, and Q_A / Q_B for bipartite states.
    Q(CommonArgs),
    /// Local quantum uncertainty by numerical minimization.
    Lqu(CommonArgs),
    /// Steering-induced skew information and its averaged version.
    Steer(CommonArgs),
    /// Monte Carlo verification of a bound.
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    Claim1,
    Claim2,
    Avg,
    /// Optimization-free per-basis inequality behind claim2.
    Lemma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// K_B is the LQU minimizer.
    Argmin,
    /// K_B is random.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    A,
    B,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long = "dim-a", default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub dim_a: u64,
    #[arg(long = "dim-b", default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub dim_b: u64,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Comma-separated, strictly ascending eigenvalues (default: equally spaced on [-1, 1]).
    #[arg(long, allow_hyphen_values = true, value_parser = parse_spectrum)]
    pub spectrum: Option<Spectrum>,
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    pub restarts: u64,
    /// Violation tolerance.
    #[arg(long, default_value_t = 1e-7, value_parser = parse_positive)]
    pub tol: f64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub kraus: u64,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub bases: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    pub format: OutFormat,
    #[arg(long = "state-file")]
    pub state_file: Option<PathBuf>,
    /// Eigenbasis (columns) of the observable for `skew`, in the state-file format with a `dim:` header.
    #[arg(long = "basis-file")]
    pub basis_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Argmin)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = SideArg::A)]
    pub side: SideArg,
    /// Record per-trial wall time in reports (makes them non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

/// Validated explicit spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(pub Vec<f64>);

fn parse_spectrum(s: &str) -> Result<Spectrum, String> {
    let values: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad eigenvalue {t:?}")))
        .collect::<Result<_, _>>()?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err("eigenvalues must be finite".into());
    }
    if let Some(w) = values.windows(2).find(|w| w[1] - w[0] < MIN_SPECTRAL_GAP) {
        return Err(format!("spectrum must be strictly ascending and nondegenerate ({} then {})", w[0], w[1]));
    }
    Ok(Spectrum(values))
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}
