mod commands;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::{CliError, EXIT_OK};

#[derive(Debug, Parser)]
#[command(name = "qrboot", version, about = "Contamination experiments for bootstrap estimates")]
struct Cli {
    /// Master seed; overrides the seed of an experiment config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output file, or output directory for `experiment`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bounded-Lipschitz and Prohorov distances between two measure files.
    Metric(MetricArgs),
    /// Draw a sample path from a process config.
    Generate(GenerateArgs),
    /// Resample a path, or compute the bootstrap law of an estimator.
    Bootstrap(BootstrapArgs),
    /// Mixing coefficients of a Markov chain process.
    Alpha(AlphaArgs),
    /// Decay of empirical measures towards a target law.
    Varadarajan(VaradarajanArgs),
    /// Run a robustness experiment and write its report.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    /// Measure CSV (`coords..., weight`).
    pub p: PathBuf,
    pub q: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Process config (TOML).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    Efron,
    MovingBlock,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    /// Path CSV (`index, coords...`).
    pub path: PathBuf,
    #[arg(long, value_enum, default_value = "efron")]
    pub scheme: SchemeArg,
    /// Block-length exponent of the moving block scheme.
    #[arg(long, default_value_t = qrboot::bootstrap::DEFAULT_BLOCK_EXPONENT)]
    pub exponent: f64,
    /// Allow exponents up to 0.45.
    #[arg(long)]
    pub extended: bool,
    /// Draw block starts only where the whole block fits.
    #[arg(long)]
    pub non_circular: bool,
    /// Efron resample size (default: path length).
    #[arg(long)]
    pub resample_size: Option<usize>,
    /// Number of resamples.
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    /// Estimator whose bootstrap law is written instead of a resample.
    #[arg(long)]
    pub estimator: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    /// Write `rep,position,source_index` rows for every resample.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AlphaArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub max_lag: usize,
    /// Comma-separated sizes for the bi-mixing averages.
    #[arg(long, value_delimiter = ',', default_value = "10,100")]
    pub n_grid: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct VaradarajanArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "100,400,1600")]
    pub n_grid: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    pub reps: usize,
    /// Target measure CSV; the declared limit law of the process otherwise.
    #[arg(long)]
    pub target: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    pub config: PathBuf,
}

fn run(cli: Cli) -> Result<i32, CliError> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config {
                path: "--threads".into(),
                message: e.to_string(),
            })?;
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Metric(a) => commands::metric(&a, out),
        Command::Generate(a) => commands::generate(&a, cli.seed.unwrap_or(0), out),
        Command::Bootstrap(a) => commands::bootstrap(&a, cli.seed.unwrap_or(0), out),
        Command::Alpha(a) => commands::alpha(&a, out),
        Command::Varadarajan(a) => commands::varadarajan(&a, cli.seed.unwrap_or(0), out),
        Command::Experiment(a) => commands::experiment(&a, cli.seed, out),
    }?;
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
