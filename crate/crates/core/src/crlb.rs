//! Cramér-Rao bounds for joint delay and Doppler estimation of one target.
//!
//! The echo is `y = alpha u(l, nu) + w` with `u = G(l, nu) x`, `G` the sensing
//! matrix at unit reflection, and `snr = |alpha|^2 / N0`. The unknown complex
//! reflection is treated as a nuisance parameter, which projects the derivative
//! signals onto the orthogonal complement of `u`.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::channel::{chirp_table, PathApplicator};
use crate::daft::SymbolBlock;
use crate::error::{invalid, Error, Result};

/// Finite-difference step for the derivative signals.
pub const DEFAULT_JACOBIAN_STEP: f64 = 1e-4;

/// Relative determinant threshold below which the bounds are reported as
/// unidentifiable.
pub const SINGULAR_RATIO: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSignals {
    pub u: Vec<Complex64>,
    pub u_delay: Vec<Complex64>,
    pub u_doppler: Vec<Complex64>,
}

/// Projected Fisher information summaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FimSummary {
    pub phi_delay: f64,
    pub phi_doppler: f64,
    pub xi: f64,
    pub snr: f64,
}

impl FimSummary {
    pub fn determinant(&self) -> f64 {
        self.phi_delay * self.phi_doppler - self.xi * self.xi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrlbPair {
    pub delay: f64,
    pub doppler: f64,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    // a^H b
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm2(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum()
}

/// Evaluates reference signals for a fixed data block.
#[derive(Debug, Clone)]
pub struct SensingModel {
    x: Vec<Complex64>,
    app: PathApplicator,
    step: f64,
}

impl SensingModel {
    pub fn new(x: &SymbolBlock, step: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(invalid("jacobian_step", "must be positive"));
        }
        Ok(Self {
            x: x.as_slice().to_vec(),
            app: PathApplicator::new(x.len())?,
            step,
        })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    fn apply(&mut self, chirp2: &[Complex64], delay: f64, doppler: f64, c1: f64) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.x.len()];
        let one = Complex64::new(1.0, 0.0);
        self.app
            .accumulate(&self.x, chirp2, one, delay, doppler, c1, &mut y, None);
        y
    }

    /// `u` and its central-difference derivatives in delay and Doppler. The
    /// common output chirp in `c2` is dropped; it cancels in every quantity
    /// used by the bounds.
    pub fn references(&mut self, delay: f64, doppler: f64, c: [f64; 2]) -> ReferenceSignals {
        let chirp2 = chirp_table(c[1], self.x.len());
        let h = self.step;
        let u = self.apply(&chirp2, delay, doppler, c[0]);
        let lp = self.apply(&chirp2, delay + h, doppler, c[0]);
        let lm = self.apply(&chirp2, delay - h, doppler, c[0]);
        let np = self.apply(&chirp2, delay, doppler + h, c[0]);
        let nm = self.apply(&chirp2, delay, doppler - h, c[0]);
        let diff = |a: &[Complex64], b: &[Complex64]| -> Vec<Complex64> {
            a.iter().zip(b).map(|(p, m)| (p - m) / (2.0 * h)).collect()
        };
        ReferenceSignals {
            u_delay: diff(&lp, &lm),
            u_doppler: diff(&np, &nm),
            u,
        }
    }

    pub fn crlb(&mut self, delay: f64, doppler: f64, c: [f64; 2], snr: f64) -> Result<CrlbPair> {
        let refs = self.references(delay, doppler, c);
        crlb(&fim_summary(&refs, snr)?)
    }
}

pub fn fim_summary(r: &ReferenceSignals, snr: f64) -> Result<FimSummary> {
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(invalid("snr", "must be positive"));
    }
    let uu = norm2(&r.u);
    if !(uu > 0.0) {
        return Err(Error::DegenerateReference);
    }
    let a = dot(&r.u, &r.u_delay);
    let b = dot(&r.u, &r.u_doppler);
    let phi_delay = norm2(&r.u_delay) - a.norm_sqr() / uu;
    let phi_doppler = norm2(&r.u_doppler) - b.norm_sqr() / uu;
    let xi = (dot(&r.u_delay, &r.u_doppler) - a.conj() * b / uu).re;
    Ok(FimSummary {
        phi_delay,
        phi_doppler,
        xi,
        snr,
    })
}

/// Bounds with the reflection known, from the unprojected derivatives.
pub fn fim_summary_ideal(r: &ReferenceSignals, snr: f64) -> Result<FimSummary> {
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(invalid("snr", "must be positive"));
    }
    Ok(FimSummary {
        phi_delay: norm2(&r.u_delay),
        phi_doppler: norm2(&r.u_doppler),
        xi: dot(&r.u_delay, &r.u_doppler).re,
        snr,
    })
}

/// Bounds from the closed-form 2x2 inverse, without the identifiability check.
pub fn crlb_unchecked(s: &FimSummary) -> CrlbPair {
    let det = s.determinant();
    CrlbPair {
        delay: s.phi_doppler / (2.0 * s.snr * det),
        doppler: s.phi_delay / (2.0 * s.snr * det),
    }
}

pub fn crlb(s: &FimSummary) -> Result<CrlbPair> {
    let det = s.determinant();
    if !(det > SINGULAR_RATIO * s.phi_delay * s.phi_doppler) || !det.is_finite() {
        return Err(Error::Unidentifiable);
    }
    Ok(crlb_unchecked(s))
}

pub fn crlb_ideal(r: &ReferenceSignals, snr: f64) -> Result<CrlbPair> {
    crlb(&fim_summary_ideal(r, snr)?)
}

/// Full Fisher information over `(Re alpha, Im alpha, delay, Doppler)` at
/// unit reflection.
pub fn full_fim(r: &ReferenceSignals, snr: f64) -> [[f64; 4]; 4] {
    let j = Complex64::new(0.0, 1.0);
    let ju: Vec<Complex64> = r.u.iter().map(|v| v * j).collect();
    let cols: [&[Complex64]; 4] = [&r.u, &ju, &r.u_delay, &r.u_doppler];
    let mut out = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            out[a][b] = 2.0 * snr * dot(cols[a], cols[b]).re;
        }
    }
    out
}

/// Relative variation and coefficient of variation, both in percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivity {
    pub rv: f64,
    pub cv: f64,
}

pub fn sensitivity_rv_cv(values: &[f64]) -> Result<Sensitivity> {
    if values.is_empty() {
        return Err(invalid("values", "must not be empty"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("sensitivity input"));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(min > 0.0) {
        return Err(invalid("values", "must be strictly positive"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok(Sensitivity {
        rv: (max - min) / min * 100.0,
        cv: libm::sqrt(var) / mean * 100.0,
    })
}
