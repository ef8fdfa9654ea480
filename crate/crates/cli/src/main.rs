//! `autossa`: decompose series, multichannel series and 2D fields, run the
//! automatic identification methods, calibrate the angle threshold and run
//! the method comparison experiment.
//!
//! Exit codes: 0 on success, 2 for usage and parameter errors, 3 for data
//! errors. Component indices in all outputs are 1-based.

mod commands;
mod error;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{usage, CliError, CliResult};
use crate::input::InputLayout;
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "autossa", version, about = "Singular spectrum analysis with automatic grouping")]
struct Cli {
    /// Worker threads for the parallel parts (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decompose the input and list its eigentriples.
    Decompose(DecomposeArgs),
    /// Run an identification method on a decomposition.
    Identify(IdentifyArgs),
    /// Monte-Carlo quantiles of the angle measure for a grid of noise levels.
    Calibrate(CalibrateArgs),
    /// Compare the angle and periodogram methods against two-component
    /// reconstruction.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Input CSV file.
    input: PathBuf,

    /// Window length L for series and multichannel input.
    #[arg(short = 'L', long)]
    window: Option<usize>,

    /// Window sizes for field input, as `Lx,Ly`.
    #[arg(long, value_parser = parse_pair)]
    window2d: Option<(usize, usize)>,

    /// How to read the input file.
    #[arg(long, value_enum, default_value = "auto")]
    layout: InputLayout,

    /// Singular values below this fraction of the largest are dropped.
    #[arg(long, default_value_t = autossa::DEFAULT_RANK_TOL)]
    rank_tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file (default: standard output).
    #[arg(short, long)]
    output: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    data: DataArgs,

    #[command(flatten)]
    out: OutputArgs,

    /// Also write every elementary reconstruction to this CSV file, one
    /// column per component.
    #[arg(long)]
    components: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Low-frequency method for trends.
    Trend,
    /// Periodogram method for oscillations.
    Freq,
    /// Angle-regularity method for oscillations.
    Angle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    /// Left singular vectors.
    Eigen,
    /// Right singular vectors (split per channel for multichannel input).
    Factor,
    /// Elementary reconstructed components.
    Recon,
}

#[derive(Debug, Clone, Args)]
pub struct IdentifyArgs {
    #[command(flatten)]
    data: DataArgs,

    #[command(flatten)]
    out: OutputArgs,

    #[arg(long, value_enum)]
    method: MethodArg,

    #[arg(long, value_enum, default_value = "eigen")]
    source: SourceArg,

    /// Candidate components as a 1-based inclusive range `a-b`, or `n` for
    /// the leading n (default: all).
    #[arg(long, value_parser = parse_range)]
    candidates: Option<(usize, usize)>,

    /// Trend bin upper frequency (series and multichannel: `[0, omega)`;
    /// fields: first axis of `[0, omega] x [0, omega2]`).
    #[arg(long, value_parser = parse_real)]
    omega: Option<f64>,

    /// Second-axis bound of the field trend rectangle (default: omega).
    #[arg(long, value_parser = parse_real)]
    omega2: Option<f64>,

    /// Trend threshold T0 in [0, 1].
    #[arg(long, value_parser = parse_real)]
    threshold: Option<f64>,

    /// Allowed distance between periodogram peaks, in grid steps.
    #[arg(long, default_value_t = 1)]
    s0: usize,

    /// Periodogram method threshold in [0, 1].
    #[arg(long, value_parser = parse_real)]
    rho0: Option<f64>,

    /// Angle method threshold: keep pairs with normalized tau below t0.
    #[arg(long, value_parser = parse_real, conflicts_with = "m")]
    t0: Option<f64>,

    /// Angle method count: keep the m best pairs.
    #[arg(long)]
    m: Option<usize>,

    /// Write 2D diagram points of consecutive candidate pairs to this CSV.
    #[arg(long)]
    diagram: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Series length N.
    #[arg(short = 'N', long, default_value_t = 99)]
    length: usize,

    /// Window length L.
    #[arg(short = 'L', long, default_value_t = 50)]
    window: usize,

    /// Modulation rate per step.
    #[arg(long, value_parser = parse_real, default_value = "0")]
    alpha: f64,

    /// Master seed.
    #[arg(long, env = "AUTOSSA_SEED")]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    model: ModelArgs,

    #[command(flatten)]
    out: OutputArgs,

    /// Harmonic frequency (fractions such as `1/5` are accepted).
    #[arg(long, value_parser = parse_real, default_value = "1/5")]
    omega: f64,

    /// Noise levels, as a list `a,b,c` or a range `start:stop:step`.
    #[arg(long, value_parser = parse_grid, default_value = "0:1.4:0.2")]
    sigma_grid: Grid,

    /// Simulations per noise level.
    #[arg(long, default_value_t = 1000)]
    nsim: usize,

    /// Also write the recommended threshold and the curve as JSON here.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    model: ModelArgs,

    #[command(flatten)]
    out: OutputArgs,

    /// Harmonic frequency (fractions such as `1/7` are accepted).
    #[arg(long, value_parser = parse_real, default_value = "1/7")]
    omega: f64,

    /// Noise levels, as a list `a,b,c` or a range `start:stop:step`.
    #[arg(long, value_parser = parse_grid, default_value = "0.2:1:0.2")]
    sigma_grid: Grid,

    /// Replications per noise level.
    #[arg(long, default_value_t = 200)]
    nrep: usize,

    /// Peak slack of the periodogram method.
    #[arg(long, default_value_t = 1)]
    s0: usize,

    /// Include every replication in JSON output.
    #[arg(long)]
    replications: bool,
}

/// A list of grid values (newtype so clap does not treat it as repeated).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

/// A real number or a fraction `p/q`.
fn parse_real(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
            let q: f64 = q.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
            p / q
        }
        None => s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("'{s}' is not a finite number"))
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `Lx,Ly`, got '{s}'"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("'{t}' is not a size"));
    Ok((parse(a)?, parse(b)?))
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("'{t}' is not an index"));
    let (a, b) = match s.split_once('-') {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => (1, parse(s)?),
    };
    if a == 0 || b < a {
        return Err(format!("'{s}' is not a 1-based range a-b with a <= b"));
    }
    Ok((a, b))
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (parse_real(start)?, parse_real(stop)?, parse_real(step)?);
            if step.is_nan() || step <= 0.0 || stop < start {
                return Err(format!("'{s}' is not a range start:stop:step"));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            // rounding keeps 0.6 from printing as 0.6000000000000001
            (0..=n)
                .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
                .collect()
        }
        [list] => list
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(parse_real)
            .collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("'{s}' is neither a list nor a range")),
    };
    Ok(Grid(values))
}

fn run(cli: Cli) -> CliResult<()> {
    let threads = cli.threads;
    let work = move || match cli.command {
        Command::Decompose(args) => commands::decompose_cmd(&args, threads),
        Command::Identify(args) => commands::identify_cmd(&args, threads),
        Command::Calibrate(args) => commands::calibrate_cmd(&args, threads),
        Command::Compare(args) => commands::compare_cmd(&args, threads),
    };
    match threads {
        None => work(),
        Some(0) => usage("--threads must be at least 1"),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?
            .install(work),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("autossa: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
