use afdm_core::crlb::{sensitivity_rv_cv, SensingModel, Sensitivity};
use afdm_core::rng;
use afdm_core::sir::grid_point;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::experiments::crlb::{bound_pair, sensing_block, METRICS};
use crate::output::{fmt, Table};
use crate::stats::{mean, quantile, sorted, std_dev};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricSensitivity {
    pub rv: f64,
    pub cv: f64,
    /// Same statistics after dropping values above the clip quantile.
    pub rv_clipped: f64,
    pub cv_clipped: f64,
    pub unidentifiable: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityTrial {
    pub trial: usize,
    /// Delay then Doppler.
    pub metrics: [MetricSensitivity; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spread {
    pub mean: f64,
    pub std_dev: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricSummary {
    pub rv: Spread,
    pub cv: Spread,
    pub rv_clipped: Spread,
    pub cv_clipped: Spread,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivitySummary {
    pub trials: usize,
    pub delay: MetricSummary,
    pub doppler: MetricSummary,
}

#[derive(Debug, Clone)]
pub struct SensitivityRun {
    pub trials: Vec<SensitivityTrial>,
    pub summary: SensitivitySummary,
    pub tables: Vec<Table>,
}

fn stats(values: &[f64], clip_quantile: f64) -> anyhow::Result<MetricSensitivity> {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let all: Sensitivity = sensitivity_rv_cv(&finite)?;
    let s = sorted(&finite);
    let cut = quantile(&s, clip_quantile);
    let kept: Vec<f64> = s.into_iter().filter(|&v| v <= cut).collect();
    let clipped = sensitivity_rv_cv(&kept)?;
    Ok(MetricSensitivity {
        rv: all.rv,
        cv: all.cv,
        rv_clipped: clipped.rv,
        cv_clipped: clipped.cv,
        unidentifiable: values.len() - finite.len(),
    })
}

fn spread(v: &[f64]) -> Spread {
    Spread {
        mean: mean(v),
        std_dev: std_dev(v),
    }
}

fn metric_summary(trials: &[SensitivityTrial], m: usize) -> MetricSummary {
    let col = |f: fn(&MetricSensitivity) -> f64| -> Vec<f64> {
        trials.iter().map(|t| f(&t.metrics[m])).collect()
    };
    MetricSummary {
        rv: spread(&col(|s| s.rv)),
        cv: spread(&col(|s| s.cv)),
        rv_clipped: spread(&col(|s| s.rv_clipped)),
        cv_clipped: spread(&col(|s| s.cv_clipped)),
    }
}

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<SensitivityRun> {
    let s = &cfg.sensitivity;
    let snr = cfg.crlb.snr();
    let g = s.grid;
    let trials: Vec<SensitivityTrial> = (0..cfg.block_count())
        .into_par_iter()
        .map(|t| -> anyhow::Result<SensitivityTrial> {
            let x = sensing_block(cfg, rng::TRIAL, t as u64)?;
            let mut model = SensingModel::new(&x, cfg.crlb.jacobian_step)?;
            let mut values = [Vec::with_capacity(g * g), Vec::with_capacity(g * g)];
            for i in 0..g * g {
                let pair = bound_pair(&mut model, s.delay, s.doppler, grid_point(g, i), snr)?;
                for (v, b) in values.iter_mut().zip(pair) {
                    v.push(b);
                }
            }
            Ok(SensitivityTrial {
                trial: t,
                metrics: [
                    stats(&values[0], s.clip_quantile)?,
                    stats(&values[1], s.clip_quantile)?,
                ],
            })
        })
        .collect::<anyhow::Result<_>>()?;

    let summary = SensitivitySummary {
        trials: trials.len(),
        delay: metric_summary(&trials, 0),
        doppler: metric_summary(&trials, 1),
    };
    let mut table = Table::new(
        "sensitivity_trials",
        vec![
            "trial",
            "metric",
            "rv_pct",
            "cv_pct",
            "rv_clipped_pct",
            "cv_clipped_pct",
            "unidentifiable",
        ],
    );
    for t in &trials {
        for (m, name) in METRICS.iter().enumerate() {
            let v = &t.metrics[m];
            table.push(vec![
                t.trial.to_string(),
                name.to_string(),
                fmt(v.rv),
                fmt(v.cv),
                fmt(v.rv_clipped),
                fmt(v.cv_clipped),
                v.unidentifiable.to_string(),
            ]);
        }
    }
    Ok(SensitivityRun {
        trials,
        summary,
        tables: vec![table],
    })
}
