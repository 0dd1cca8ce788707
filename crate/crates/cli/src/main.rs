//! Experiment runner for the OFDM sensing library.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for runtime
//! failures.

mod commands;
mod config_file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config_file::ExperimentConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Fos,
    Dfos,
    Both,
}

impl Method {
    pub fn runs_fos(self) -> bool {
        matches!(self, Method::Fos | Method::Both)
    }

    pub fn runs_dfos(self) -> bool {
        matches!(self, Method::Dfos | Method::Both)
    }
}

#[derive(Parser)]
#[command(
    name = "ofdm-sensing",
    version,
    about = "OFDM radar sensing experiments: full-rate and decimated range-Doppler pipelines"
)]
struct Cli {
    /// JSON experiment configuration; defaults cover the 24 GHz reference
    /// system when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Which pipeline(s) to run where applicable.
    #[arg(long, global = true, value_enum, default_value_t = Method::Both)]
    method: Method,

    /// Override the Monte-Carlo trial count.
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Override the worker thread count (outputs do not depend on it).
    #[arg(long, global = true)]
    parallel: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run both pipelines on the configured targets and write detections,
    /// maps and cuts.
    Detect,
    /// Monte-Carlo sweep of the decimated-map SNR over the branch tap count.
    SweepP,
    /// Monte-Carlo sweep of both pipelines' RDM SNR over the grid SNR.
    SnrSweep,
    /// Analytic complexity model plus wall-clock stage timings.
    Bench {
        /// Timing repetitions per stage.
        #[arg(long, default_value_t = 20)]
        reps: usize,
    },
    /// Compute and dump a single range-Doppler map.
    Rdm {
        /// Also write the pre-processed echo grid as CSV.
        #[arg(long)]
        dump_grid: bool,
        /// Load the echo grid from a CSV instead of synthesizing it.
        #[arg(long)]
        grid_in: Option<PathBuf>,
    },
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, String> {
    let mut exp = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        exp.seed = seed;
    }
    if let Some(out) = &cli.out {
        exp.out_dir = out.display().to_string();
    }
    if let Some(trials) = cli.trials {
        exp.trials = trials;
    }
    if let Some(parallel) = cli.parallel {
        exp.parallel = parallel;
    }
    exp.validate()?;
    Ok(exp)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exp = match load_config(&cli) {
        Ok(exp) => exp,
        Err(msg) => {
            eprintln!("config error: {msg}");
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Detect => commands::cmd_detect(&exp, cli.method),
        Command::SweepP => commands::cmd_sweep_p(&exp),
        Command::SnrSweep => commands::cmd_snr_sweep(&exp),
        Command::Bench { reps } => commands::cmd_bench(&exp, *reps),
        Command::Rdm { dump_grid, grid_in } => {
            commands::cmd_rdm(&exp, cli.method, *dump_grid, grid_in.as_deref())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(3)
        }
    }
}
