use afdm_core::crlb::{CrlbPair, SensingModel};
use afdm_core::daft::SymbolBlock;
use afdm_core::pso::pso_minimize;
use afdm_core::sir::grid_point;
use afdm_core::{rng, Error};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::modulation::SymbolSource;
use crate::output::{fmt, Table};

pub const SCHEMES: [&str; 3] = ["ofdm", "static_afdm", "agile"];
pub const METRICS: [&str; 2] = ["delay", "doppler"];

/// Bound for one metric, `+inf` when delay and Doppler are not identifiable.
pub fn metric_bound(
    model: &mut SensingModel,
    delay: f64,
    doppler: f64,
    c: [f64; 2],
    snr: f64,
    metric: usize,
) -> anyhow::Result<f64> {
    Ok(bound_pair(model, delay, doppler, c, snr)?[metric])
}

/// Delay and Doppler bounds, both `+inf` when not identifiable.
pub fn bound_pair(
    model: &mut SensingModel,
    delay: f64,
    doppler: f64,
    c: [f64; 2],
    snr: f64,
) -> anyhow::Result<[f64; 2]> {
    pair_or_inf(model.crlb(delay, doppler, c, snr))
}

fn pair_or_inf(r: afdm_core::Result<CrlbPair>) -> anyhow::Result<[f64; 2]> {
    match r {
        Ok(p) => Ok([p.delay, p.doppler]),
        Err(Error::Unidentifiable) => Ok([f64::INFINITY; 2]),
        Err(e) => Err(e.into()),
    }
}

/// Symbols at power `1/N` from the stream `(seed, label, index)`.
pub fn sensing_block(cfg: &ExperimentConfig, label: u64, index: u64) -> anyhow::Result<SymbolBlock> {
    let src = SymbolSource::new(cfg.modulation(), 1.0 / cfg.n as f64);
    let mut r = rng::stream(cfg.seed, label, index);
    Ok(SymbolBlock::new(src.fill(&mut r, cfg.n))?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrlbBlock {
    pub point: usize,
    pub block: usize,
    /// `bound[scheme][metric]`.
    pub bound: [[f64; 2]; 3],
    /// Agile parameters per metric.
    pub agile_c: [[f64; 2]; 2],
    pub agile_evaluations: [usize; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Improvements {
    pub delay_vs_ofdm: f64,
    pub delay_vs_static: f64,
    pub doppler_vs_ofdm: f64,
    pub doppler_vs_static: f64,
}

impl Improvements {
    pub fn as_array(&self) -> [f64; 4] {
        [
            self.delay_vs_ofdm,
            self.delay_vs_static,
            self.doppler_vs_ofdm,
            self.doppler_vs_static,
        ]
    }

    fn from_array(a: [f64; 4]) -> Self {
        Self {
            delay_vs_ofdm: a[0],
            delay_vs_static: a[1],
            doppler_vs_ofdm: a[2],
            doppler_vs_static: a[3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPointSummary {
    pub delay: f64,
    pub doppler: f64,
    /// Static parameters per metric.
    pub static_c: [[f64; 2]; 2],
    /// `mean[scheme][metric]` over the blocks kept for that metric.
    pub mean: [[f64; 2]; 3],
    pub improvement: Improvements,
    /// Blocks dropped per metric because some scheme was unidentifiable.
    pub excluded: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrlbSummary {
    pub blocks_per_point: usize,
    pub points: Vec<GridPointSummary>,
    /// Average of the per-point improvements, in percent.
    pub mean_improvement: Improvements,
    pub min_improvement: Improvements,
    pub unidentifiable_static_cells: usize,
}

#[derive(Debug, Clone)]
pub struct CrlbRun {
    pub blocks: Vec<CrlbBlock>,
    pub summary: CrlbSummary,
    pub tables: Vec<Table>,
}

/// `100 (1 - mean agile / mean baseline)`.
pub fn improvement(agile: f64, baseline: f64) -> f64 {
    100.0 * (1.0 - agile / baseline)
}

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<CrlbRun> {
    let c = &cfg.crlb;
    let snr = c.snr();
    let g = c.static_grid;
    let per_point = cfg.block_count();
    let targets: Vec<(f64, f64)> = c
        .delays
        .iter()
        .flat_map(|&l| c.dopplers.iter().map(move |&v| (l, v)))
        .collect();
    let jobs: Vec<(usize, usize)> = (0..targets.len())
        .flat_map(|p| (0..per_point).map(move |b| (p, b)))
        .collect();
    let job_index = |p: usize, b: usize| (p * per_point + b) as u64;

    // Full lattice per (point, block); lattice index 0 is the OFDM point.
    let tables: Vec<Vec<[f64; 2]>> = jobs
        .par_iter()
        .map(|&(p, b)| -> anyhow::Result<Vec<[f64; 2]>> {
            let (l, v) = targets[p];
            let mut model = SensingModel::new(
                &sensing_block(cfg, rng::DATA, job_index(p, b))?,
                c.jacobian_step,
            )?;
            (0..g * g)
                .map(|i| pair_or_inf(model.crlb(l, v, grid_point(g, i), snr)))
                .collect()
        })
        .collect::<anyhow::Result<_>>()?;

    let mut unidentifiable_static_cells = 0;
    let mut static_c = vec![[[0.0; 2]; 2]; targets.len()];
    for (p, sc) in static_c.iter_mut().enumerate() {
        let rows = &tables[p * per_point..(p + 1) * per_point];
        for (m, out) in sc.iter_mut().enumerate() {
            let mut best = (f64::INFINITY, 0);
            for i in 0..g * g {
                let total: f64 = rows.iter().map(|t| t[i][m]).sum();
                if !total.is_finite() {
                    unidentifiable_static_cells += usize::from(m == 0);
                }
                if total < best.0 {
                    best = (total, i);
                }
            }
            *out = grid_point(g, best.1);
        }
    }

    let pso = cfg.pso.optimizer();
    let blocks: Vec<CrlbBlock> = jobs
        .par_iter()
        .map(|&(p, b)| -> anyhow::Result<CrlbBlock> {
            let (l, v) = targets[p];
            let idx = job_index(p, b);
            let mut model =
                SensingModel::new(&sensing_block(cfg, rng::DATA, idx)?, c.jacobian_step)?;
            let table = &tables[idx as usize];
            let mut bound = [[0.0; 2]; 3];
            let mut agile_c = [[0.0; 2]; 2];
            let mut agile_evaluations = [0; 2];
            for m in 0..2 {
                let sc = static_c[p][m];
                bound[0][m] = table[0][m];
                bound[1][m] = metric_bound(&mut model, l, v, sc, snr, m)?;
                let mut failure = None;
                let r = pso_minimize(
                    |x| match metric_bound(&mut model, l, v, x, snr, m) {
                        Ok(val) => val,
                        Err(e) => {
                            failure.get_or_insert(e);
                            f64::INFINITY
                        }
                    },
                    &pso,
                    rng::derive_seed(cfg.seed, rng::PSO, 2 * idx + m as u64),
                    &[[0.0, 0.0], sc],
                )?;
                if let Some(e) = failure {
                    return Err(e);
                }
                bound[2][m] = r.value;
                agile_c[m] = r.best;
                agile_evaluations[m] = r.evaluations;
            }
            Ok(CrlbBlock {
                point: p,
                block: b,
                bound,
                agile_c,
                agile_evaluations,
            })
        })
        .collect::<anyhow::Result<_>>()?;

    let mut points = Vec::with_capacity(targets.len());
    for (p, &(l, v)) in targets.iter().enumerate() {
        let rows = &blocks[p * per_point..(p + 1) * per_point];
        let mut mean = [[f64::NAN; 2]; 3];
        let mut excluded = [0; 2];
        for m in 0..2 {
            let kept: Vec<&CrlbBlock> = rows
                .iter()
                .filter(|r| r.bound.iter().all(|s| s[m].is_finite()))
                .collect();
            excluded[m] = rows.len() - kept.len();
            for (s, out) in mean.iter_mut().enumerate() {
                out[m] = kept.iter().map(|r| r.bound[s][m]).sum::<f64>() / kept.len() as f64;
            }
        }
        points.push(GridPointSummary {
            delay: l,
            doppler: v,
            static_c: static_c[p],
            improvement: Improvements::from_array([
                improvement(mean[2][0], mean[0][0]),
                improvement(mean[2][0], mean[1][0]),
                improvement(mean[2][1], mean[0][1]),
                improvement(mean[2][1], mean[1][1]),
            ]),
            mean,
            excluded,
        });
    }
    let mut avg = [0.0; 4];
    let mut min = [f64::INFINITY; 4];
    for pt in &points {
        for (k, val) in pt.improvement.as_array().into_iter().enumerate() {
            avg[k] += val / points.len() as f64;
            min[k] = min[k].min(val);
        }
    }
    let summary = CrlbSummary {
        blocks_per_point: per_point,
        points,
        mean_improvement: Improvements::from_array(avg),
        min_improvement: Improvements::from_array(min),
        unidentifiable_static_cells,
    };

    let mut rows = Table::new(
        "crlb_blocks",
        vec![
            "target_delay",
            "target_doppler",
            "block",
            "scheme",
            "metric",
            "crlb",
            "c1",
            "c2",
            "evaluations",
        ],
    );
    for r in &blocks {
        let (l, v) = targets[r.point];
        for (s, scheme) in SCHEMES.iter().enumerate() {
            for (m, metric) in METRICS.iter().enumerate() {
                let (c, evals) = match s {
                    0 => ([0.0, 0.0], 1),
                    1 => (static_c[r.point][m], g * g),
                    _ => (r.agile_c[m], r.agile_evaluations[m]),
                };
                rows.push(vec![
                    fmt(l),
                    fmt(v),
                    r.block.to_string(),
                    scheme.to_string(),
                    metric.to_string(),
                    fmt(r.bound[s][m]),
                    fmt(c[0]),
                    fmt(c[1]),
                    evals.to_string(),
                ]);
            }
        }
    }
    let mut grid = Table::new(
        "crlb_grid",
        vec![
            "target_delay",
            "target_doppler",
            "ofdm_delay",
            "static_delay",
            "agile_delay",
            "ofdm_doppler",
            "static_doppler",
            "agile_doppler",
            "delay_vs_ofdm_pct",
            "delay_vs_static_pct",
            "doppler_vs_ofdm_pct",
            "doppler_vs_static_pct",
            "excluded_delay",
            "excluded_doppler",
        ],
    );
    for pt in &summary.points {
        let mut row = vec![fmt(pt.delay), fmt(pt.doppler)];
        for m in 0..2 {
            row.extend((0..3).map(|s| fmt(pt.mean[s][m])));
        }
        row.extend(pt.improvement.as_array().into_iter().map(fmt));
        row.extend(pt.excluded.iter().map(|e| e.to_string()));
        grid.push(row);
    }

    Ok(CrlbRun {
        blocks,
        summary,
        tables: vec![rows, grid],
    })
}
