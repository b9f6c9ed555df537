//! Particle swarm minimization over a box in `(c1, c2)`.

use alloc::vec::Vec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsoConfig {
    pub particles: usize,
    pub max_iters: usize,
    pub inertia_start: f64,
    pub inertia_end: f64,
    pub cognitive: f64,
    pub social: f64,
    pub tolerance: f64,
    /// Consecutive iterations with global-best movement below `tolerance`
    /// before stopping.
    pub patience: usize,
    pub lower: f64,
    pub upper: f64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            particles: 200,
            max_iters: 100,
            inertia_start: 0.99,
            inertia_end: 0.4,
            cognitive: 1.2,
            social: 1.8,
            tolerance: 1e-6,
            patience: 10,
            lower: 0.0,
            upper: 0.999,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.particles == 0 {
            return Err(invalid("particles", "must be at least 1"));
        }
        if !(self.lower < self.upper) {
            return Err(invalid("bounds", "lower must be below upper"));
        }
        if !(0.0 < self.inertia_end
            && self.inertia_end <= self.inertia_start
            && self.inertia_start < 1.0)
        {
            return Err(invalid(
                "inertia",
                "requires 0 < inertia_end <= inertia_start < 1",
            ));
        }
        if !(self.cognitive > 0.0 && self.social > 0.0) {
            return Err(invalid(
                "acceleration",
                "cognitive and social weights must be positive",
            ));
        }
        if self.patience == 0 {
            return Err(invalid("patience", "must be at least 1"));
        }
        Ok(())
    }

    fn inertia(&self, iter: usize) -> f64 {
        if self.max_iters == 0 {
            return self.inertia_start;
        }
        let t = (iter as f64 / self.max_iters as f64).min(1.0);
        self.inertia_start - (self.inertia_start - self.inertia_end) * t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoResult {
    pub best: [f64; 2],
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Global best value after initialization and after every iteration.
    pub history: Vec<f64>,
}

struct Particle {
    x: [f64; 2],
    v: [f64; 2],
    best: [f64; 2],
    best_value: f64,
    rng: ChaCha8Rng,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Minimizes `objective`. The first particles start at `warm_start` (clamped
/// to the box); the rest start uniformly at random. Each particle owns a random
/// stream keyed by `(seed, index)`, so results are reproducible. Non-finite
/// objective values are treated as `+inf`.
pub fn pso_minimize<F>(
    mut objective: F,
    cfg: &PsoConfig,
    seed: u64,
    warm_start: &[[f64; 2]],
) -> Result<PsoResult>
where
    F: FnMut([f64; 2]) -> f64,
{
    cfg.validate()?;
    let clamp = |v: f64| v.clamp(cfg.lower, cfg.upper);
    let mut swarm: Vec<Particle> = Vec::with_capacity(cfg.particles);
    let mut evaluations = 0;
    for i in 0..cfg.particles {
        let mut r = rng::stream(seed, rng::PSO, i as u64);
        let x = match warm_start.get(i) {
            Some(w) => [clamp(w[0]), clamp(w[1])],
            None => [
                r.random_range(cfg.lower..cfg.upper),
                r.random_range(cfg.lower..cfg.upper),
            ],
        };
        let val = sanitize(objective(x));
        evaluations += 1;
        swarm.push(Particle {
            x,
            v: [0.0; 2],
            best: x,
            best_value: val,
            rng: r,
        });
    }
    let mut g = swarm[0].best;
    let mut g_val = swarm[0].best_value;
    for p in &swarm[1..] {
        if p.best_value < g_val {
            g = p.best;
            g_val = p.best_value;
        }
    }
    let mut history = Vec::with_capacity(cfg.max_iters + 1);
    history.push(g_val);
    let mut stall = 0;
    let mut iter = 0;
    while iter < cfg.max_iters {
        let w = cfg.inertia(iter);
        for p in swarm.iter_mut() {
            let r1: f64 = p.rng.random();
            let r2: f64 = p.rng.random();
            for k in 0..2 {
                p.v[k] = w * p.v[k]
                    + cfg.cognitive * r1 * (p.best[k] - p.x[k])
                    + cfg.social * r2 * (g[k] - p.x[k]);
                p.x[k] = clamp(p.x[k] + p.v[k]);
            }
        }
        iter += 1;
        let prev = g;
        for p in swarm.iter_mut() {
            let val = sanitize(objective(p.x));
            evaluations += 1;
            if val < p.best_value {
                p.best_value = val;
                p.best = p.x;
            }
            if val < g_val {
                g_val = val;
                g = p.x;
            }
        }
        history.push(g_val);
        let moved = libm::hypot(g[0] - prev[0], g[1] - prev[1]);
        if moved < cfg.tolerance {
            stall += 1;
            if stall >= cfg.patience {
                break;
            }
        } else {
            stall = 0;
        }
    }
    Ok(PsoResult {
        best: g,
        value: g_val,
        iterations: iter,
        evaluations,
        history,
    })
}
