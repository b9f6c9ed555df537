//! Analytic PAPR surrogate in `c2` and the coarse-to-fine search over `c2`.
//!
//! The instantaneous envelope power is
//! `|s(t)|^2 = |x|^2 / N + (2 / N) g(t)` with
//! `g = sum_p (gamma1_p + gamma2_p) cos(p tau) + (gamma3_p + gamma4_p) sin(p tau)`
//! and `tau = 2 pi t / T`. The surrogate is `I(c2) = integral_0^{2 pi} g^4 dtau`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::daft::{EnvelopePlan, SymbolBlock};
use crate::error::{invalid, Error, Result};
use crate::trig::{candidate_fourth, quartic_unchecked, TrigKind, TrigSeries};
use crate::TAU;

/// Per-lag envelope coefficients at a given `c2`. Index `p` runs over `1..N`;
/// entry 0 is unused and zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeCoefficients {
    pub c2: f64,
    pub gamma: [Vec<f64>; 4],
    /// `d gamma / d c2` divided by `2 pi`.
    pub rho: [Vec<f64>; 4],
}

#[derive(Debug, Clone, Copy)]
struct Pair {
    p: usize,
    /// `p (2 m + p)`, so that `beta = 2 pi c2 k`.
    k: u64,
    lambda: f64,
    mu: f64,
}

/// `c2`-independent correlations `x[m + p] x*[m]` of one block.
#[derive(Debug, Clone)]
pub struct PaprSurrogate {
    n: usize,
    energy: f64,
    pairs: Vec<Pair>,
}

impl PaprSurrogate {
    pub fn new(x: &SymbolBlock) -> Self {
        let d = x.as_slice();
        let n = d.len();
        let mut pairs = Vec::new();
        for p in 1..n {
            for m in 0..n - p {
                let v = d[m + p] * d[m].conj();
                if v.re != 0.0 || v.im != 0.0 {
                    pairs.push(Pair {
                        p,
                        k: (p * (2 * m + p)) as u64,
                        lambda: v.re,
                        mu: v.im,
                    });
                }
            }
        }
        Self {
            n,
            energy: x.energy(),
            pairs,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn beta_trig(c2: f64, k: u64) -> (f64, f64) {
        // reduce c2 * k modulo 1 before scaling by 2 pi
        let t = c2 * k as f64;
        let r = t - libm::floor(t);
        libm::sincos(TAU * r)
    }

    pub fn coefficients(&self, c2: f64) -> EnvelopeCoefficients {
        let n = self.n;
        let mut gamma = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let mut rho = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for pr in &self.pairs {
            let (s, c) = Self::beta_trig(c2, pr.k);
            let k = pr.k as f64;
            gamma[0][pr.p] += pr.lambda * c;
            gamma[1][pr.p] -= pr.mu * s;
            gamma[2][pr.p] -= pr.lambda * s;
            gamma[3][pr.p] -= pr.mu * c;
            rho[0][pr.p] -= k * pr.lambda * s;
            rho[1][pr.p] -= k * pr.mu * c;
            rho[2][pr.p] -= k * pr.lambda * c;
            rho[3][pr.p] += k * pr.mu * s;
        }
        EnvelopeCoefficients { c2, gamma, rho }
    }

    /// `g` and `dg/dc2` as trigonometric series in `tau`.
    pub fn series(&self, c2: f64) -> (TrigSeries, TrigSeries) {
        let n = self.n;
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut da = vec![0.0; n];
        let mut db = vec![0.0; n];
        for pr in &self.pairs {
            let (s, c) = Self::beta_trig(c2, pr.k);
            let k = TAU * pr.k as f64;
            a[pr.p] += pr.lambda * c - pr.mu * s;
            b[pr.p] -= pr.lambda * s + pr.mu * c;
            da[pr.p] -= k * (pr.lambda * s + pr.mu * c);
            db[pr.p] += k * (pr.mu * s - pr.lambda * c);
        }
        (TrigSeries::new(a, b), TrigSeries::new(da, db))
    }

    /// Instantaneous power `|s(t)|^2` at `tau = 2 pi t / T`.
    pub fn envelope_power(&self, c2: f64, tau: f64) -> f64 {
        let (g, _) = self.series(c2);
        let n = self.n as f64;
        self.energy / n + 2.0 / n * g.eval(tau)
    }

    /// `I(c2) = integral g^4`.
    pub fn value(&self, c2: f64) -> f64 {
        let (g, _) = self.series(c2);
        let g2 = g.mul(&g);
        g2.inner(&g2)
    }

    /// `I'(c2) = 4 integral g^3 dg/dc2`.
    pub fn derivative(&self, c2: f64) -> f64 {
        let (g, dg) = self.series(c2);
        let g2 = g.mul(&g);
        4.0 * g2.inner(&g.mul(&dg))
    }

    /// `I'(c2)` by enumerating index quadruples against the closed-form
    /// quartic integrals. `O(N^3)`; kept as an independent route.
    pub fn derivative_quadruples(&self, c2: f64) -> f64 {
        let (g, dg) = self.series(c2);
        let n = self.n;
        let terms = |s: &TrigSeries| -> Vec<(usize, TrigKind, f64)> {
            let mut v = Vec::new();
            for k in 1..=s.degree() {
                if s.cos[k] != 0.0 {
                    v.push((k, TrigKind::Cos, s.cos[k]));
                }
                if s.sin[k] != 0.0 {
                    v.push((k, TrigKind::Sin, s.sin[k]));
                }
            }
            v
        };
        let gt = terms(&g);
        let coef = |s: &TrigSeries, k: usize, kind: TrigKind| -> f64 {
            if k > s.degree() {
                0.0
            } else if kind == TrigKind::Cos {
                s.cos[k]
            } else {
                s.sin[k]
            }
        };
        let mut total = 0.0;
        let mut cand: Vec<usize> = Vec::with_capacity(7);
        for &(k, w1, a1) in &gt {
            for &(l, w2, a2) in &gt {
                for &(m, w3, a3) in &gt {
                    cand.clear();
                    for c in candidate_fourth(k, l, m) {
                        if c >= 1 && (c as usize) < n && !cand.contains(&(c as usize)) {
                            cand.push(c as usize);
                        }
                    }
                    for &nn in &cand {
                        for w4 in [TrigKind::Cos, TrigKind::Sin] {
                            let a4 = coef(&dg, nn, w4);
                            if a4 != 0.0 {
                                total += a1
                                    * a2
                                    * a3
                                    * a4
                                    * quartic_unchecked([w1, w2, w3, w4], [k, l, m, nn]);
                            }
                        }
                    }
                }
            }
        }
        4.0 * total
    }
}

pub fn envelope_coefficients(x: &SymbolBlock, c2: f64) -> EnvelopeCoefficients {
    PaprSurrogate::new(x).coefficients(c2)
}

/// `I'(c2)` by the quadruple enumeration.
pub fn surrogate_derivative(x: &SymbolBlock, c2: f64) -> f64 {
    PaprSurrogate::new(x).derivative_quadruples(c2)
}

/// PAPR in dB of the `L`-times oversampled envelope.
pub fn papr_db(x: &SymbolBlock, c2: f64, oversample: usize) -> Result<f64> {
    EnvelopePlan::new(x.len(), oversample)?.papr_db(x, c2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaprSearchConfig {
    pub coarse_step: f64,
    pub fine_step: f64,
    /// Maximum number of exact PAPR evaluations per block.
    pub eval_budget: usize,
    pub oversample: usize,
}

impl Default for PaprSearchConfig {
    fn default() -> Self {
        Self {
            coarse_step: 1.0 / 80.0,
            fine_step: 1.0 / 3120.0,
            eval_budget: 128,
            oversample: 10,
        }
    }
}

impl PaprSearchConfig {
    /// Returns `(coarse points, fine steps per coarse step)`.
    pub fn grid(&self) -> Result<(usize, usize)> {
        if !(self.coarse_step > 0.0 && self.coarse_step < 0.5) {
            return Err(invalid("coarse_step", "must lie in (0, 1/2)"));
        }
        if !(self.fine_step > 0.0 && self.fine_step <= self.coarse_step) {
            return Err(invalid("fine_step", "must lie in (0, coarse_step]"));
        }
        let ratio = self.coarse_step / self.fine_step;
        let r = libm::round(ratio);
        if libm::fabs(ratio - r) > 1e-9 * r {
            return Err(invalid(
                "fine_step",
                "coarse_step must be an integer multiple of fine_step",
            ));
        }
        if self.eval_budget == 0 {
            return Err(invalid("eval_budget", "must be at least 1"));
        }
        if self.oversample == 0 {
            return Err(invalid("oversample", "must be at least 1"));
        }
        let half = 0.5 / self.coarse_step;
        let count = libm::floor(half + 1e-9) as usize;
        Ok((count, r as usize))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaprSearchResult {
    pub c2: f64,
    pub papr_db: f64,
    /// Exact PAPR evaluations spent.
    pub evaluations: usize,
    /// Fine candidates admitted by the coarse bracket test.
    pub bracketed: usize,
    /// Candidates that passed the fine sign test, before budget truncation.
    pub retained: usize,
}

/// Coarse-to-fine `c2` search driven by the sign of `I'`.
#[derive(Debug, Clone)]
pub struct PaprOptimizer {
    cfg: PaprSearchConfig,
    plan: EnvelopePlan,
    coarse: usize,
    ratio: usize,
}

impl PaprOptimizer {
    pub fn new(n: usize, cfg: PaprSearchConfig) -> Result<Self> {
        let (coarse, ratio) = cfg.grid()?;
        Ok(Self {
            cfg,
            plan: EnvelopePlan::new(n, cfg.oversample)?,
            coarse,
            ratio,
        })
    }

    pub fn config(&self) -> &PaprSearchConfig {
        &self.cfg
    }

    pub fn plan(&self) -> &EnvelopePlan {
        &self.plan
    }

    pub fn optimize(&self, x: &SymbolBlock) -> Result<PaprSearchResult> {
        if x.len() != self.plan.n() {
            return Err(Error::LengthMismatch {
                expected: self.plan.n(),
                got: x.len(),
            });
        }
        if x.energy() <= 0.0 {
            return Err(Error::ZeroEnergy);
        }
        let sur = PaprSurrogate::new(x);
        let dc = self.cfg.coarse_step;
        let fine = self.cfg.fine_step;
        let r = self.ratio;

        let coarse_d: Vec<f64> = (0..=self.coarse)
            .map(|i| sur.derivative(i as f64 * dc))
            .collect();
        let mut bracket: Vec<usize> = Vec::new();
        for i in 0..self.coarse {
            if coarse_d[i] <= 0.0 && coarse_d[i + 1] >= 0.0 {
                bracket.extend((0..=r).map(|j| i * r + j));
            }
        }
        bracket.sort_unstable();
        bracket.dedup();

        let mut cache: BTreeMap<usize, f64> = BTreeMap::new();
        let mut d_at = |f: usize| {
            *cache
                .entry(f)
                .or_insert_with(|| sur.derivative(f as f64 * fine))
        };
        let mut retained: Vec<usize> = Vec::new();
        for &f in &bracket {
            if d_at(f) <= 0.0 && d_at(f + 1) >= 0.0 {
                retained.push(f);
            }
        }
        let n_retained = retained.len();
        let mut cands: Vec<f64> = if retained.is_empty() {
            (0..self.coarse).map(|i| i as f64 * dc).collect()
        } else {
            retained.iter().map(|&f| f as f64 * fine).collect()
        };
        if cands.len() > self.cfg.eval_budget {
            let mut scored: Vec<(f64, f64)> = cands.iter().map(|&c| (sur.value(c), c)).collect();
            scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            scored.truncate(self.cfg.eval_budget);
            cands = scored.into_iter().map(|(_, c)| c).collect();
            cands.sort_by(f64::total_cmp);
        }

        let mut best = (f64::INFINITY, 0.0);
        for &c in &cands {
            let v = self.plan.papr_db(x, c)?;
            if v < best.0 {
                best = (v, c);
            }
        }
        Ok(PaprSearchResult {
            c2: best.1,
            papr_db: best.0,
            evaluations: cands.len(),
            bracketed: bracket.len(),
            retained: n_retained,
        })
    }
}

pub fn optimize_papr_c2(x: &SymbolBlock, cfg: &PaprSearchConfig) -> Result<PaprSearchResult> {
    PaprOptimizer::new(x.len(), *cfg)?.optimize(x)
}
