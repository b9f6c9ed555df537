//! Experiment harness for per-block AFDM chirp optimization: PAPR, SIR,
//! sensing bounds and bound sensitivity, driven by TOML configurations.

pub mod config;
pub mod experiments;
pub mod modulation;
pub mod output;
pub mod stats;

use std::path::PathBuf;
use std::time::Instant;

use serde_json::json;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind};
use output::Table;

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub experiment: ExperimentKind,
    pub tables: Vec<Table>,
    /// Summary statistics plus wall time, as written to `summary.json`.
    pub summary: serde_json::Value,
}

/// Runs the configured experiment on `workers` threads, or on rayon's default
/// pool size when `None`. Results do not depend on the worker count.
pub fn run(cfg: &ExperimentConfig, workers: Option<usize>) -> anyhow::Result<RunOutput> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()?;
    let start = Instant::now();
    let (tables, summary) = pool.install(|| -> anyhow::Result<_> {
        Ok(match cfg.experiment {
            ExperimentKind::Papr => {
                let r = experiments::papr::run(cfg)?;
                (r.tables, serde_json::to_value(r.summary)?)
            }
            ExperimentKind::Sir => {
                let r = experiments::sir::run(cfg)?;
                (r.tables, serde_json::to_value(r.summary)?)
            }
            ExperimentKind::Crlb => {
                let r = experiments::crlb::run(cfg)?;
                (r.tables, serde_json::to_value(r.summary)?)
            }
            ExperimentKind::Sensitivity => {
                let r = experiments::sensitivity::run(cfg)?;
                (r.tables, serde_json::to_value(r.summary)?)
            }
        })
    })?;
    Ok(RunOutput {
        experiment: cfg.experiment,
        tables,
        summary: json!({
            "experiment": cfg.experiment.name(),
            "version": output::VERSION,
            "seed": cfg.seed,
            "wall_time_s": start.elapsed().as_secs_f64(),
            "summary": summary,
        }),
    })
}

/// Runs and writes the results to the configured output directory.
pub fn run_to_disk(cfg: &ExperimentConfig, workers: Option<usize>) -> anyhow::Result<Vec<PathBuf>> {
    let out = run(cfg, workers)?;
    output::write_run(&cfg.output_dir(), cfg, &out.tables, &out.summary)
}
