use afdm_core::channel::{ChannelPath, PathSet};
use afdm_core::daft::SymbolBlock;
use afdm_core::sir::{grid_point, optimize_sir, sir_db, SirObjective};
use afdm_core::rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Modulation};
use crate::modulation::SymbolSource;
use crate::output::{fmt, Table};
use crate::stats::{cdf, mean, quantile, sorted, ThresholdGrid};

pub const SCHEMES: [&str; 3] = ["ofdm", "static_afdm", "agile"];
/// Blocks whose static grids are held in memory at once.
const CHUNK: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SirBlock {
    pub block: usize,
    /// Linear SIR per entry of [`SCHEMES`].
    pub sir: [f64; 3],
    pub agile_c: [f64; 2],
    pub agile_steps: usize,
    pub aborted_runs: usize,
    /// Best linear SIR over the static lattice for this realization alone.
    pub grid_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SirSchemeSummary {
    /// `10 log10` of the mean linear SIR.
    pub mean_db: f64,
    pub median_db: f64,
    pub q25_db: f64,
    pub q75_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JensenCheck {
    /// Mean over realizations of the per-realization maximum, linear.
    pub mean_of_max: f64,
    /// Maximum over the lattice of the ensemble mean, linear.
    pub max_of_mean: f64,
    pub standard_error: f64,
    /// `mean_of_max >= max_of_mean - 2 * standard_error`.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SirSummary {
    pub blocks: usize,
    pub ofdm: SirSchemeSummary,
    pub static_afdm: SirSchemeSummary,
    pub agile: SirSchemeSummary,
    pub static_c: [f64; 2],
    pub aborted_runs: usize,
    /// Uses the agile optimizer output as the per-realization maximum.
    pub jensen_agile: JensenCheck,
    /// Uses the per-realization lattice maximum.
    pub jensen_grid: JensenCheck,
}

#[derive(Debug, Clone)]
pub struct SirRun {
    pub blocks: Vec<SirBlock>,
    pub summary: SirSummary,
    pub tables: Vec<Table>,
}

/// Rayleigh taps with the configured powers, redrawn for each block.
pub fn block_channel(cfg: &ExperimentConfig, b: usize) -> anyhow::Result<PathSet> {
    let ch = &cfg.channel;
    let mut r = rng::stream(cfg.seed, rng::CHANNEL, b as u64);
    let paths = ch
        .delays
        .iter()
        .zip(&ch.dopplers)
        .zip(&ch.powers)
        .map(|((&delay, &doppler), &power)| ChannelPath {
            gain: SymbolSource::new(Modulation::Gaussian, power).sample(&mut r),
            delay,
            doppler,
        })
        .collect();
    Ok(PathSet::new(paths, 0.0)?)
}

pub fn block_data(cfg: &ExperimentConfig, b: usize) -> anyhow::Result<SymbolBlock> {
    let src = SymbolSource::new(cfg.modulation(), 1.0);
    let mut r = rng::stream(cfg.seed, rng::DATA, b as u64);
    Ok(SymbolBlock::new(src.fill(&mut r, cfg.n))?)
}

fn objective(cfg: &ExperimentConfig, b: usize) -> anyhow::Result<SirObjective> {
    Ok(SirObjective::new(
        block_channel(cfg, b)?,
        &block_data(cfg, b)?,
        cfg.sir.delta,
    )?)
}

fn summarize(linear: &[f64]) -> SirSchemeSummary {
    let db = sorted(&linear.iter().map(|&v| sir_db(v)).collect::<Vec<_>>());
    SirSchemeSummary {
        mean_db: sir_db(mean(linear)),
        median_db: quantile(&db, 0.5),
        q25_db: quantile(&db, 0.25),
        q75_db: quantile(&db, 0.75),
    }
}

fn jensen(per_block_max: &[f64], max_of_mean: f64) -> JensenCheck {
    let n = per_block_max.len() as f64;
    let m = mean(per_block_max);
    let var = if per_block_max.len() > 1 {
        per_block_max.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let se = (var / n).sqrt();
    JensenCheck {
        mean_of_max: m,
        max_of_mean,
        standard_error: se,
        holds: m >= max_of_mean - 2.0 * se,
    }
}

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<SirRun> {
    let opt = cfg.sir.optimizer();
    let g = cfg.sir.static_grid;
    let count = cfg.block_count();

    let mut blocks = Vec::with_capacity(count);
    let mut totals = vec![0.0; g * g];
    for start in (0..count).step_by(CHUNK) {
        let chunk: Vec<(SirBlock, Vec<f64>)> = (start..(start + CHUNK).min(count))
            .into_par_iter()
            .map(|b| -> anyhow::Result<(SirBlock, Vec<f64>)> {
                let mut obj = objective(cfg, b)?;
                let ofdm = obj.sir([0.0, 0.0]);
                let agile = optimize_sir(&mut obj, &opt)?;
                let grid: Vec<f64> = (0..g * g).map(|i| obj.sir(grid_point(g, i))).collect();
                let grid_max = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                Ok((
                    SirBlock {
                        block: b,
                        sir: [ofdm, f64::NAN, agile.sir],
                        agile_c: [agile.chirp.c1(), agile.chirp.c2()],
                        agile_steps: agile.runs.iter().map(|r| r.steps).sum(),
                        aborted_runs: agile.runs.iter().filter(|r| r.aborted).count(),
                        grid_max,
                    },
                    grid,
                ))
            })
            .collect::<anyhow::Result<_>>()?;
        for (block, grid) in chunk {
            for (t, v) in totals.iter_mut().zip(&grid) {
                *t += v;
            }
            blocks.push(block);
        }
    }

    let mut best = 0;
    for (i, &t) in totals.iter().enumerate() {
        if t > totals[best] {
            best = i;
        }
    }
    let static_c = grid_point(g, best);
    let static_sir: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|b| -> anyhow::Result<f64> { Ok(objective(cfg, b)?.sir(static_c)) })
        .collect::<anyhow::Result<_>>()?;
    for (blk, s) in blocks.iter_mut().zip(static_sir) {
        blk.sir[1] = s;
    }

    let column = |k: usize| blocks.iter().map(|b| b.sir[k]).collect::<Vec<_>>();
    let max_of_mean = totals[best] / count as f64;
    let summary = SirSummary {
        blocks: count,
        ofdm: summarize(&column(0)),
        static_afdm: summarize(&column(1)),
        agile: summarize(&column(2)),
        static_c,
        aborted_runs: blocks.iter().map(|b| b.aborted_runs).sum(),
        jensen_agile: jensen(&column(2), max_of_mean),
        jensen_grid: jensen(
            &blocks.iter().map(|b| b.grid_max).collect::<Vec<_>>(),
            max_of_mean,
        ),
    };

    let mut rows = Table::new(
        "sir_blocks",
        vec!["block", "scheme", "sir_linear", "sir_db", "c1", "c2", "evaluations"],
    );
    for b in &blocks {
        let params = [[0.0, 0.0], static_c, b.agile_c];
        let evals = [1, g * g, b.agile_steps];
        for (k, name) in SCHEMES.iter().enumerate() {
            rows.push(vec![
                b.block.to_string(),
                name.to_string(),
                fmt(b.sir[k]),
                fmt(sir_db(b.sir[k])),
                fmt(params[k][0]),
                fmt(params[k][1]),
                evals[k].to_string(),
            ]);
        }
    }

    let db: Vec<Vec<f64>> = (0..SCHEMES.len())
        .map(|k| sorted(&column(k).iter().map(|&v| sir_db(v)).collect::<Vec<_>>()))
        .collect();
    let all: Vec<f64> = db.iter().flatten().copied().collect();
    let grid = ThresholdGrid::covering(&all, cfg.sir.cdf_step_db);
    let curves: Vec<Vec<f64>> = db.iter().map(|c| cdf(c, &grid)).collect();
    let mut cols = vec!["threshold_db"];
    cols.extend(SCHEMES);
    let mut table = Table::new("sir_cdf", cols);
    for (i, k) in grid.indices().enumerate() {
        let mut row = vec![grid.label(k)];
        row.extend(curves.iter().map(|c| fmt(c[i])));
        table.push(row);
    }

    Ok(SirRun {
        blocks,
        summary,
        tables: vec![rows, table],
    })
}
