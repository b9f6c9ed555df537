//! Conventional PAPR-reduction baselines evaluated on the same oversampled envelope.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;
use num_complex::Complex64;
use rand::Rng;

use crate::daft::{samples_papr_db, EnvelopePlan, SymbolBlock, TimeSignal};
use crate::error::{invalid, Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    /// Clipping threshold relative to the RMS amplitude.
    pub clipping_ratio: f64,
    pub slm_candidates: usize,
    pub pts_subblocks: usize,
    pub pts_phases: Vec<Complex64>,
    pub eval_budget: usize,
    pub oversample: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            clipping_ratio: 2.0,
            slm_candidates: 128,
            pts_subblocks: 4,
            pts_phases: vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
            ],
            eval_budget: 128,
            oversample: 10,
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.clipping_ratio > 1.0) || !self.clipping_ratio.is_finite() {
            return Err(invalid("clipping_ratio", "must exceed 1"));
        }
        if self.slm_candidates == 0 || self.slm_candidates > self.eval_budget {
            return Err(invalid("slm_candidates", "must lie in 1..=eval_budget"));
        }
        if self.pts_subblocks == 0 {
            return Err(invalid("pts_subblocks", "must be at least 1"));
        }
        if self.pts_phases.is_empty() {
            return Err(invalid("pts_phases", "must not be empty"));
        }
        if self
            .pts_phases
            .iter()
            .any(|p| libm::fabs(p.norm() - 1.0) > 1e-12)
        {
            return Err(invalid("pts_phases", "entries must have unit modulus"));
        }
        if self.oversample == 0 {
            return Err(invalid("oversample", "must be at least 1"));
        }
        Ok(())
    }
}

/// OFDM PAPR, i.e. the envelope at `c2 = 0`.
pub fn ofdm_papr(plan: &EnvelopePlan, x: &SymbolBlock) -> Result<f64> {
    plan.papr_db(x, 0.0)
}

/// Limits every sample to `ratio * rms` while preserving its phase.
pub fn clip(s: &TimeSignal, ratio: f64) -> Result<TimeSignal> {
    if !(ratio > 0.0) {
        return Err(invalid("clipping_ratio", "must be positive"));
    }
    if s.is_empty() {
        return Err(Error::ZeroEnergy);
    }
    let rms = libm::sqrt(s.energy() / s.len() as f64);
    let a = ratio * rms;
    let samples = s
        .samples
        .iter()
        .map(|&v| {
            let m = v.norm();
            if m > a {
                v * (a / m)
            } else {
                v
            }
        })
        .collect();
    Ok(TimeSignal {
        samples,
        sample_period: s.sample_period,
        oversample: s.oversample,
    })
}

/// PAPR of the clipped OFDM envelope, measured after clipping.
pub fn clipped_papr(plan: &EnvelopePlan, x: &SymbolBlock, ratio: f64) -> Result<f64> {
    let env = plan.envelope(x, 0.0)?;
    let c = clip(&env, ratio)?;
    samples_papr_db(&c.samples)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlmOutcome {
    pub mask_index: usize,
    pub papr_db: f64,
    pub evaluations: usize,
    pub block: SymbolBlock,
}

/// Phase mask `u` of selected mapping. Mask 0 is the identity; the others are
/// i.i.d. QPSK phases drawn from a stream keyed by `(seed, u)`.
pub fn slm_mask(n: usize, seed: u64, u: usize) -> Vec<Complex64> {
    if u == 0 {
        return vec![Complex64::new(1.0, 0.0); n];
    }
    let mut r = rng::stream(seed, rng::SLM, u as u64);
    (0..n)
        .map(|_| match r.random_range(0..4u8) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        })
        .collect()
}

pub fn slm(
    plan: &EnvelopePlan,
    x: &SymbolBlock,
    cfg: &BaselineConfig,
    seed: u64,
) -> Result<SlmOutcome> {
    cfg.validate()?;
    let n = x.len();
    let mut best: Option<SlmOutcome> = None;
    for u in 0..cfg.slm_candidates {
        let mask = slm_mask(n, seed, u);
        let data = x.as_slice().iter().zip(&mask).map(|(a, b)| a * b).collect();
        let block = SymbolBlock::new(data)?;
        let v = plan.papr_db(&block, 0.0)?;
        if best.as_ref().is_none_or(|b| v < b.papr_db) {
            best = Some(SlmOutcome {
                mask_index: u,
                papr_db: v,
                evaluations: 0,
                block,
            });
        }
    }
    let mut out = best.ok_or(Error::ZeroEnergy)?;
    out.evaluations = cfg.slm_candidates;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PtsOutcome {
    pub phases: Vec<Complex64>,
    pub papr_db: f64,
    pub evaluations: usize,
    pub block: SymbolBlock,
}

/// Partial transmit sequences over the subcarriers in `support`, split into
/// `V` contiguous sub-blocks. The first sub-block keeps phase 1; the rest are
/// searched in lexicographic order, truncated to the evaluation budget.
pub fn pts(
    plan: &EnvelopePlan,
    x: &SymbolBlock,
    support: Range<usize>,
    cfg: &BaselineConfig,
) -> Result<PtsOutcome> {
    cfg.validate()?;
    let len = support.end.saturating_sub(support.start);
    if support.end > x.len() || len == 0 {
        return Err(invalid(
            "support",
            "must be a non-empty range inside the block",
        ));
    }
    let v = cfg.pts_subblocks;
    if len % v != 0 {
        return Err(Error::IndivisibleSubblocks { subblocks: v, len });
    }
    let width = len / v;
    let a = cfg.pts_phases.len();
    let total = (a as u128).checked_pow(v as u32 - 1).unwrap_or(u128::MAX);
    let count = total.min(cfg.eval_budget as u128) as usize;

    let mut digits = vec![0usize; v - 1];
    let mut best: Option<PtsOutcome> = None;
    for _ in 0..count {
        let mut phases = Vec::with_capacity(v);
        phases.push(Complex64::new(1.0, 0.0));
        phases.extend(digits.iter().map(|&d| cfg.pts_phases[d]));
        let mut data = x.as_slice().to_vec();
        for (i, s) in data[support.clone()].iter_mut().enumerate() {
            *s *= phases[i / width];
        }
        let block = SymbolBlock::new(data)?;
        let val = plan.papr_db(&block, 0.0)?;
        if best.as_ref().is_none_or(|b| val < b.papr_db) {
            best = Some(PtsOutcome {
                phases,
                papr_db: val,
                evaluations: 0,
                block,
            });
        }
        // increment the last digit first
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < a {
                break;
            }
            *d = 0;
        }
    }
    let mut out = best.ok_or(Error::ZeroEnergy)?;
    out.evaluations = count;
    Ok(out)
}
