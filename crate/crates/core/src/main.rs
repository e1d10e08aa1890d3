use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use log::{error, info};

use wzbounds::experiments::{load_config, run, ExperimentConfig, ExperimentKind};
use wzbounds::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Experiment {
    Fig2,
    Fig3,
    LargeGaussian,
    LargeCircular,
    Custom,
}

impl From<Experiment> for ExperimentKind {
    fn from(e: Experiment) -> Self {
        match e {
            Experiment::Fig2 => ExperimentKind::Fig2,
            Experiment::Fig3 => ExperimentKind::Fig3,
            Experiment::LargeGaussian => ExperimentKind::LargeGaussian,
            Experiment::LargeCircular => ExperimentKind::LargeCircular,
            Experiment::Custom => ExperimentKind::Custom,
        }
    }
}

/// Distortion bounds for scalar Wyner–Ziv codes, written as CSV.
#[derive(Debug, Parser)]
#[command(name = "wzbounds", version)]
struct Cli {
    experiment: Experiment,
    /// JSON config; the experiment defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory. Overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed. Overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    threads: Option<usize>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => 3,
        Error::NonConvergence { .. } => 4,
        Error::Io(_) | Error::Csv(_) => 1,
        _ => 2,
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
    }
    let mut config = match &cli.config {
        Some(p) => load_config(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        config.seed = Some(s);
    }
    let out = cli
        .out
        .or_else(|| config.out.as_ref().map(PathBuf::from))
        .ok_or_else(|| Error::Parameter("no output directory: pass --out".into()))?;

    let kind = ExperimentKind::from(cli.experiment);
    let start = Instant::now();
    let bundle = run(kind, &config)?;
    let wall = start.elapsed();
    for (bound, code, rate, gap) in bundle.soundness_violations(1e-9) {
        log::warn!("{bound} exceeds {code} at rate {rate} by {gap:e}");
    }
    bundle.write_to(&out, &config, wall)?;
    info!("{kind}: wrote {} files to {} in {:.2?}", bundle.artifacts.len() + 1, out.display(), wall);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
