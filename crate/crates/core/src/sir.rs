//! Ergodic SIR objective and its fractional-programming optimizer.
//!
//! The per-block objective is `zeta(c) = (1/N) sum_p Psig_p / (Pint_p + delta)`.
//! With auxiliary weights `z`, the quadratic transform
//! `f(c, z) = sum_p 2 z_p sqrt(Psig_p) - z_p^2 (Pint_p + delta)` is maximized
//! over `z` by `z_p = sqrt(Psig_p) / (Pint_p + delta)`, where it equals `N zeta(c)`.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::channel::{CommEvaluator, IciPowers, PathSet};
use crate::chirp::{torus_distance, wrap_unit, ChirpParams};
use crate::daft::SymbolBlock;
use crate::error::{invalid, Error, Result};

/// Ratio added to the interference power before division.
pub const DEFAULT_DELTA: f64 = 1e-12;

/// Display cap for SIR values in dB.
pub const SIR_DB_CAP: f64 = 120.0;

pub fn sir_db(linear: f64) -> f64 {
    if linear <= 0.0 {
        return f64::NEG_INFINITY;
    }
    (10.0 * libm::log10(linear)).min(SIR_DB_CAP)
}

#[derive(Debug, Clone)]
pub struct SirObjective {
    eval: CommEvaluator,
    x: Vec<Complex64>,
    delta: f64,
    buf: IciPowers,
}

impl SirObjective {
    pub fn new(paths: PathSet, x: &SymbolBlock, delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(invalid("delta", "must be positive and finite"));
        }
        Ok(Self {
            eval: CommEvaluator::new(paths, x.len())?,
            x: x.as_slice().to_vec(),
            delta,
            buf: IciPowers {
                signal: Vec::new(),
                interference: Vec::new(),
            },
        })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn paths(&self) -> &PathSet {
        self.eval.paths()
    }

    fn refresh(&mut self, c: [f64; 2]) {
        self.eval.powers_into(&self.x, c[0], c[1], &mut self.buf);
    }

    pub fn powers(&mut self, c: [f64; 2]) -> IciPowers {
        self.refresh(c);
        self.buf.clone()
    }

    /// Linear `zeta(c)`.
    pub fn sir(&mut self, c: [f64; 2]) -> f64 {
        self.refresh(c);
        let d = self.delta;
        let s: f64 = self
            .buf
            .signal
            .iter()
            .zip(&self.buf.interference)
            .map(|(ps, pi)| ps / (pi + d))
            .sum();
        s / self.n() as f64
    }

    pub fn update_auxiliary(&mut self, c: [f64; 2]) -> Vec<f64> {
        self.refresh(c);
        let d = self.delta;
        self.buf
            .signal
            .iter()
            .zip(&self.buf.interference)
            .map(|(ps, pi)| libm::sqrt(*ps) / (pi + d))
            .collect()
    }

    pub fn surrogate(&mut self, c: [f64; 2], z: &[f64]) -> f64 {
        self.refresh(c);
        let d = self.delta;
        self.buf
            .signal
            .iter()
            .zip(&self.buf.interference)
            .zip(z)
            .map(|((ps, pi), z)| 2.0 * z * libm::sqrt(*ps) - z * z * (pi + d))
            .sum()
    }

    /// Central-difference gradient of the surrogate in `(c1, c2)`.
    pub fn surrogate_gradient(&mut self, c: [f64; 2], z: &[f64], h: f64) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (k, gk) in g.iter_mut().enumerate() {
            let mut hi = c;
            let mut lo = c;
            hi[k] += h;
            lo[k] -= h;
            *gk = (self.surrogate(hi, z) - self.surrogate(lo, z)) / (2.0 * h);
        }
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Adam moment estimates for a two-dimensional ascent.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    cfg: AdamConfig,
    m: [f64; 2],
    v: [f64; 2],
    t: i32,
}

impl AdamState {
    pub fn new(cfg: AdamConfig) -> Self {
        Self {
            cfg,
            m: [0.0; 2],
            v: [0.0; 2],
            t: 0,
        }
    }

    /// Returns the ascent step for gradient `g`.
    pub fn step(&mut self, g: [f64; 2]) -> [f64; 2] {
        let c = self.cfg;
        self.t += 1;
        let b1t = 1.0 - libm::pow(c.beta1, self.t as f64);
        let b2t = 1.0 - libm::pow(c.beta2, self.t as f64);
        let mut out = [0.0; 2];
        for k in 0..2 {
            self.m[k] = c.beta1 * self.m[k] + (1.0 - c.beta1) * g[k];
            self.v[k] = c.beta2 * self.v[k] + (1.0 - c.beta2) * g[k] * g[k];
            let mh = self.m[k] / b1t;
            let vh = self.v[k] / b2t;
            out[k] = c.lr * mh / (libm::sqrt(vh) + c.eps);
        }
        out
    }
}

/// Where each parameter block seeds its ascent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlockStart {
    /// Lower-left lattice corner `(i/B, j/B)`; includes the OFDM point.
    #[default]
    Corner,
    Center,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirOptConfig {
    /// The unit square is split into `blocks x blocks` starting cells.
    pub blocks: usize,
    pub start: BlockStart,
    pub tolerance: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub adam: AdamConfig,
    pub fd_step: f64,
}

impl Default for SirOptConfig {
    fn default() -> Self {
        Self {
            blocks: 4,
            start: BlockStart::Corner,
            tolerance: 1e-6,
            max_outer: 50,
            max_inner: 50,
            adam: AdamConfig::default(),
            fd_step: 1e-6,
        }
    }
}

impl SirOptConfig {
    pub fn validate(&self) -> Result<()> {
        if self.blocks == 0 {
            return Err(invalid("blocks", "must be at least 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid("tolerance", "must be positive"));
        }
        if !(self.fd_step > 0.0) {
            return Err(invalid("fd_step", "must be positive"));
        }
        if !(self.adam.lr > 0.0)
            || !(0.0..1.0).contains(&self.adam.beta1)
            || !(0.0..1.0).contains(&self.adam.beta2)
        {
            return Err(invalid(
                "adam",
                "learning rate must be positive and betas in [0, 1)",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockRun {
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub sir: f64,
    pub outer_iterations: usize,
    /// Adam steps taken across all outer iterations.
    pub steps: usize,
    pub aborted: bool,
    /// Surrogate values after each inner ascent and each auxiliary update.
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SirOptResult {
    pub chirp: ChirpParams,
    /// Linear SIR at the selected parameters.
    pub sir: f64,
    pub runs: Vec<BlockRun>,
}

impl SirOptResult {
    pub fn sir_db(&self) -> f64 {
        sir_db(self.sir)
    }
}

/// Runs the FP/Adam ascent from one point of every parameter block and
/// returns the best local solution. Ties go to the lexicographically
/// smaller `(c1, c2)`.
pub fn optimize_sir(obj: &mut SirObjective, cfg: &SirOptConfig) -> Result<SirOptResult> {
    cfg.validate()?;
    let b = cfg.blocks;
    let mut runs = Vec::with_capacity(b * b);
    for i in 0..b {
        for j in 0..b {
            let off = match cfg.start {
                BlockStart::Corner => 0.0,
                BlockStart::Center => 0.5,
            };
            let start = [(i as f64 + off) / b as f64, (j as f64 + off) / b as f64];
            runs.push(run_block(obj, start, cfg));
        }
    }
    let mut best: Option<(f64, [f64; 2])> = None;
    for r in runs.iter().filter(|r| !r.aborted) {
        let better = match best {
            None => true,
            Some((v, c)) => r.sir > v || (r.sir == v && (r.end[0], r.end[1]) < (c[0], c[1])),
        };
        if better {
            best = Some((r.sir, r.end));
        }
    }
    let (sir, c) = best.ok_or(Error::NonFinite("SIR surrogate in every parameter block"))?;
    Ok(SirOptResult {
        chirp: ChirpParams::new(c[0], c[1])?,
        sir,
        runs,
    })
}

fn wrap(c: [f64; 2]) -> [f64; 2] {
    [wrap_unit(c[0]), wrap_unit(c[1])]
}

fn run_block(obj: &mut SirObjective, start: [f64; 2], cfg: &SirOptConfig) -> BlockRun {
    let mut trace = Vec::new();
    let mut c = start;
    let mut z = obj.update_auxiliary(c);
    let mut f_cur = obj.surrogate(c, &z);
    trace.push(f_cur);
    let mut outer = 0;
    let mut steps = 0;
    let mut aborted = !f_cur.is_finite();
    while !aborted && outer < cfg.max_outer {
        outer += 1;
        let mut adam = AdamState::new(cfg.adam);
        let (mut best_c, mut best_f) = (c, f_cur);
        let mut ci = c;
        for _ in 0..=cfg.max_inner {
            let g = obj.surrogate_gradient(ci, &z, cfg.fd_step);
            if !g[0].is_finite() || !g[1].is_finite() {
                aborted = true;
                break;
            }
            let s = adam.step(g);
            steps += 1;
            let next = wrap([ci[0] + s[0], ci[1] + s[1]]);
            let f = obj.surrogate(next, &z);
            if !f.is_finite() {
                aborted = true;
                break;
            }
            if f > best_f {
                best_f = f;
                best_c = next;
            }
            let moved = torus_distance(next, ci);
            ci = next;
            if moved < cfg.tolerance {
                break;
            }
        }
        if aborted {
            break;
        }
        trace.push(best_f);
        let moved = torus_distance(best_c, c);
        c = best_c;
        z = obj.update_auxiliary(c);
        f_cur = obj.surrogate(c, &z);
        trace.push(f_cur);
        if moved < cfg.tolerance {
            break;
        }
    }
    let sir = obj.sir(c);
    BlockRun {
        start,
        end: c,
        sir,
        outer_iterations: outer,
        steps,
        aborted: aborted || !sir.is_finite(),
        trace,
    }
}

/// Point `index` of the row-major `grid x grid` lattice on `[0, 1)^2`.
pub fn grid_point(grid: usize, index: usize) -> [f64; 2] {
    [
        (index / grid) as f64 / grid as f64,
        (index % grid) as f64 / grid as f64,
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticSirResult {
    pub chirp: ChirpParams,
    /// Ensemble mean of linear SIR at the selected parameters.
    pub mean_sir: f64,
}

/// Single `(c1, c2)` on a `grid x grid` lattice maximizing the ensemble mean SIR.
pub fn static_sir_baseline(ensemble: &mut [SirObjective], grid: usize) -> Result<StaticSirResult> {
    if grid == 0 {
        return Err(invalid("grid", "must be at least 1"));
    }
    if ensemble.is_empty() {
        return Err(invalid("ensemble", "must not be empty"));
    }
    let mut best = (f64::NEG_INFINITY, 0usize);
    for idx in 0..grid * grid {
        let c = grid_point(grid, idx);
        let mean = ensemble.iter_mut().map(|o| o.sir(c)).sum::<f64>() / ensemble.len() as f64;
        if mean > best.0 {
            best = (mean, idx);
        }
    }
    let c = grid_point(grid, best.1);
    Ok(StaticSirResult {
        chirp: ChirpParams::new(c[0], c[1])?,
        mean_sir: best.0,
    })
}
