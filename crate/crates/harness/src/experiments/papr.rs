use afdm_core::baselines::{clipped_papr, ofdm_papr, pts, slm};
use afdm_core::daft::SymbolBlock;
use afdm_core::papr::PaprOptimizer;
use afdm_core::{rng, Complex64};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::modulation::SymbolSource;
use crate::output::{fmt, Table};
use crate::stats::{ccdf, ccdf_point, ks_two_sample, mean, sorted, KsTest, ThresholdGrid};

pub const SCHEMES: [&str; 6] = ["ofdm", "static_afdm", "clipping", "slm", "pts", "agile"];
pub const CCDF_STEP_DB: f64 = 0.01;
pub const CCDF_LEVEL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct PaprBlock {
    pub block: usize,
    pub user: usize,
    /// PAPR in dB per entry of [`SCHEMES`].
    pub papr_db: [f64; 6],
    pub evaluations: [usize; 6],
    pub agile_c2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PaprSchemeSummary {
    pub mean_db: f64,
    /// Threshold where the CCDF first reaches 1e-3.
    pub ccdf_point_db: f64,
    pub max_evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaprSummary {
    pub blocks: usize,
    pub ofdm: PaprSchemeSummary,
    pub static_afdm: PaprSchemeSummary,
    pub clipping: PaprSchemeSummary,
    pub slm: PaprSchemeSummary,
    pub pts: PaprSchemeSummary,
    pub agile: PaprSchemeSummary,
    /// Baseline CCDF point minus the agile one.
    pub gap_slm_db: f64,
    pub gap_pts_db: f64,
    pub gap_clipping_db: f64,
    pub static_vs_ofdm: KsTest,
}

#[derive(Debug, Clone)]
pub struct PaprRun {
    pub blocks: Vec<PaprBlock>,
    pub summary: PaprSummary,
    pub tables: Vec<Table>,
}

/// Block `b` carries user `b mod K` on its contiguous run of subcarriers.
pub fn user_block(cfg: &ExperimentConfig, b: usize) -> anyhow::Result<(usize, SymbolBlock)> {
    let n = cfg.n;
    let width = n / cfg.papr.users;
    let user = b % cfg.papr.users;
    let src = SymbolSource::new(cfg.modulation(), 1.0);
    let mut r = rng::stream(cfg.seed, rng::DATA, b as u64);
    let mut data = vec![Complex64::new(0.0, 0.0); n];
    for v in &mut data[user * width..(user + 1) * width] {
        *v = src.sample(&mut r);
    }
    Ok((user, SymbolBlock::new(data)?))
}

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<PaprRun> {
    let p = &cfg.papr;
    let optimizer = PaprOptimizer::new(cfg.n, p.search())?;
    let baselines = p.baselines();
    let width = cfg.n / p.users;
    let blocks: Vec<PaprBlock> = (0..cfg.block_count())
        .into_par_iter()
        .map(|b| -> anyhow::Result<PaprBlock> {
            let plan = optimizer.plan();
            let (user, x) = user_block(cfg, b)?;
            let s = slm(plan, &x, &baselines, cfg.seed)?;
            let t = pts(plan, &x, user * width..(user + 1) * width, &baselines)?;
            let a = optimizer.optimize(&x)?;
            Ok(PaprBlock {
                block: b,
                user,
                papr_db: [
                    ofdm_papr(plan, &x)?,
                    plan.papr_db(&x, p.static_c2)?,
                    clipped_papr(plan, &x, p.clipping_ratio)?,
                    s.papr_db,
                    t.papr_db,
                    a.papr_db,
                ],
                evaluations: [1, 1, 1, s.evaluations, t.evaluations, a.evaluations],
                agile_c2: a.c2,
            })
        })
        .collect::<anyhow::Result<_>>()?;

    let columns: Vec<Vec<f64>> = (0..SCHEMES.len())
        .map(|k| sorted(&blocks.iter().map(|b| b.papr_db[k]).collect::<Vec<_>>()))
        .collect();
    let all: Vec<f64> = columns.iter().flatten().copied().collect();
    let grid = ThresholdGrid::covering(&all, CCDF_STEP_DB);
    let scheme = |k: usize| PaprSchemeSummary {
        mean_db: mean(&columns[k]),
        ccdf_point_db: ccdf_point(&columns[k], &grid, CCDF_LEVEL),
        max_evaluations: blocks.iter().map(|b| b.evaluations[k]).max().unwrap_or(0),
    };
    let summary = PaprSummary {
        blocks: blocks.len(),
        ofdm: scheme(0),
        static_afdm: scheme(1),
        clipping: scheme(2),
        slm: scheme(3),
        pts: scheme(4),
        agile: scheme(5),
        gap_slm_db: scheme(3).ccdf_point_db - scheme(5).ccdf_point_db,
        gap_pts_db: scheme(4).ccdf_point_db - scheme(5).ccdf_point_db,
        gap_clipping_db: scheme(2).ccdf_point_db - scheme(5).ccdf_point_db,
        static_vs_ofdm: ks_two_sample(&columns[1], &columns[0]),
    };

    let mut rows = Table::new(
        "papr_blocks",
        vec!["block", "user", "scheme", "papr_db", "c1", "c2", "evaluations"],
    );
    for b in &blocks {
        for (k, name) in SCHEMES.iter().enumerate() {
            let c2 = match k {
                1 => p.static_c2,
                5 => b.agile_c2,
                _ => 0.0,
            };
            rows.push(vec![
                b.block.to_string(),
                b.user.to_string(),
                name.to_string(),
                fmt(b.papr_db[k]),
                fmt(0.0),
                fmt(c2),
                b.evaluations[k].to_string(),
            ]);
        }
    }
    let mut cols = vec!["threshold_db"];
    cols.extend(SCHEMES);
    let mut table = Table::new("papr_ccdf", cols);
    let curves: Vec<Vec<f64>> = columns.iter().map(|c| ccdf(c, &grid)).collect();
    for (i, k) in grid.indices().enumerate() {
        let mut row = vec![grid.label(k)];
        row.extend(curves.iter().map(|c| fmt(c[i])));
        table.push(row);
    }
    Ok(PaprRun {
        blocks,
        summary,
        tables: vec![rows, table],
    })
}
