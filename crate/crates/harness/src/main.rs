use std::path::PathBuf;
use std::process::ExitCode;

use agile_afdm::{ExperimentConfig, ExperimentKind};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "agile-afdm", version, about = "Per-block AFDM chirp optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write CSV tables plus summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; defaults to the number of CPUs.
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory, overriding the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and validate a configuration without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the default configuration of an experiment as TOML.
    Defaults {
        #[arg(long, value_enum)]
        experiment: Kind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Papr,
    Sir,
    Crlb,
    Sensitivity,
}

impl From<Kind> for ExperimentKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Papr => ExperimentKind::Papr,
            Kind::Sir => ExperimentKind::Sir,
            Kind::Crlb => ExperimentKind::Crlb,
            Kind::Sensitivity => ExperimentKind::Sensitivity,
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run {
            config,
            seed,
            workers,
            out,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(o) = out {
                cfg.output = Some(o);
            }
            if workers == Some(0) {
                anyhow::bail!("--workers must be at least 1");
            }
            for p in agile_afdm::run_to_disk(&cfg, workers)? {
                println!("{}", p.display());
            }
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            println!("{}: ok ({} experiment, {} blocks)", config.display(), cfg.experiment, cfg.block_count());
        }
        Command::Defaults { experiment } => {
            print!("{}", ExperimentConfig::defaults(experiment.into()).to_toml());
        }
    }
    Ok(())
}
