//! Discrete affine Fourier transform, chirp-periodic prefix and the
//! oversampled continuous-time envelope.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::chirp::ChirpParams;
use crate::cis_turns;
use crate::error::{Error, Result};
use crate::fft::FftPlan;

/// One block of `N` data symbols in the DAFT domain.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBlock {
    data: Vec<Complex64>,
}

impl SymbolBlock {
    /// Rejects odd or zero lengths and non-finite entries.
    pub fn new(data: Vec<Complex64>) -> Result<Self> {
        let n = data.len();
        if n == 0 || n % 2 != 0 {
            return Err(Error::InvalidLength(n));
        }
        if data.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("symbol block"));
        }
        Ok(Self { data })
    }

    /// Unit impulse at subcarrier `m`.
    pub fn impulse(n: usize, m: usize) -> Result<Self> {
        let mut data = vec![Complex64::new(0.0, 0.0); n];
        if m >= n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: m,
            });
        }
        data[m] = Complex64::new(1.0, 0.0);
        Self::new(data)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// Uniformly sampled complex baseband signal.
///
/// `sample_period` is expressed in units of the critical sampling interval, so
/// a DAFT output has period 1 and an `L`-times oversampled envelope has `1/L`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    pub samples: Vec<Complex64>,
    pub sample_period: f64,
    pub oversample: usize,
}

impl TimeSignal {
    pub fn critical(samples: Vec<Complex64>) -> Self {
        Self {
            samples,
            sample_period: 1.0,
            oversample: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Peak-to-average power ratio of the samples in dB.
    pub fn papr_db(&self) -> Result<f64> {
        samples_papr_db(&self.samples)
    }
}

pub(crate) fn samples_papr_db(samples: &[Complex64]) -> Result<f64> {
    let mut peak = 0.0f64;
    let mut sum = 0.0;
    for v in samples {
        let p = v.norm_sqr();
        peak = peak.max(p);
        sum += p;
    }
    if sum <= 0.0 || samples.is_empty() {
        return Err(Error::ZeroEnergy);
    }
    if !sum.is_finite() {
        return Err(Error::NonFinite("time signal"));
    }
    let mean = sum / samples.len() as f64;
    Ok(10.0 * libm::log10(peak / mean))
}

fn chirp_phase(c: f64, k: usize) -> Complex64 {
    cis_turns(c * (k as f64) * (k as f64))
}

/// Inverse DAFT `s = A^H x` with `A = L(c2) F L(c1)` and unitary `F`.
pub fn idaft(x: &SymbolBlock, c: ChirpParams) -> TimeSignal {
    idaft_with(&FftPlan::new(x.len()), x, c)
}

pub fn idaft_with(plan: &FftPlan, x: &SymbolBlock, c: ChirpParams) -> TimeSignal {
    let n = x.len();
    assert_eq!(plan.len(), n);
    let mut buf: Vec<Complex64> = x
        .as_slice()
        .iter()
        .enumerate()
        .map(|(m, v)| v * chirp_phase(c.c2(), m))
        .collect();
    plan.inverse(&mut buf);
    let scale = 1.0 / libm::sqrt(n as f64);
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= chirp_phase(c.c1(), k) * scale;
    }
    TimeSignal::critical(buf)
}

/// Forward DAFT `x = A r` of an `N`-sample prefix-free signal.
pub fn daft(r: &TimeSignal, c: ChirpParams, n: usize) -> Result<SymbolBlock> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidLength(n));
    }
    if r.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: r.len(),
        });
    }
    let plan = FftPlan::new(n);
    let mut buf: Vec<Complex64> = r
        .samples
        .iter()
        .enumerate()
        .map(|(k, v)| v * chirp_phase(c.c1(), k).conj())
        .collect();
    plan.forward(&mut buf);
    let scale = 1.0 / libm::sqrt(n as f64);
    for (m, v) in buf.iter_mut().enumerate() {
        *v *= chirp_phase(c.c2(), m).conj() * scale;
    }
    SymbolBlock::new(buf)
}

/// Prepends a chirp-periodic prefix of `prefix` samples.
///
/// Sample `n < 0` is `s[N + n] exp(-j 2 pi c1 (N^2 + 2 N n))`, which makes the
/// extended signal consistent with the chirp-periodicity of the DAFT.
pub fn append_cpp(s: &TimeSignal, c1: f64, prefix: usize) -> Result<TimeSignal> {
    let n = s.len();
    if prefix >= n {
        return Err(Error::PrefixTooLong { prefix, n });
    }
    let nn = n as f64;
    let mut out = Vec::with_capacity(n + prefix);
    for i in 0..prefix {
        let idx = i as f64 - prefix as f64;
        let phase = -c1 * (nn * nn + 2.0 * nn * idx);
        out.push(s.samples[n - prefix + i] * cis_turns(phase));
    }
    out.extend_from_slice(&s.samples);
    Ok(TimeSignal {
        samples: out,
        sample_period: s.sample_period,
        oversample: s.oversample,
    })
}

/// Drops the first `prefix` samples and keeps the next `n`.
pub fn remove_prefix(r: &TimeSignal, prefix: usize, n: usize) -> Result<TimeSignal> {
    if r.len() < prefix + n {
        return Err(Error::LengthMismatch {
            expected: prefix + n,
            got: r.len(),
        });
    }
    Ok(TimeSignal {
        samples: r.samples[prefix..prefix + n].to_vec(),
        sample_period: r.sample_period,
        oversample: r.oversample,
    })
}

/// Samples of the continuous-time envelope `L` times per critical interval.
///
/// The `c1` chirp only multiplies the envelope by a unit-modulus factor, so it
/// is omitted. Sample `k` is
/// `(1/sqrt N) sum_m x[m] exp(j 2 pi (c2 m^2 + m k / (N L)))`.
#[derive(Debug, Clone)]
pub struct EnvelopePlan {
    n: usize,
    oversample: usize,
    fft: FftPlan,
    // exp(j 2 pi r / (N L))
    roots: Vec<Complex64>,
}

impl EnvelopePlan {
    pub fn new(n: usize, oversample: usize) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return Err(Error::InvalidLength(n));
        }
        if oversample == 0 {
            return Err(crate::error::invalid("oversample", "must be at least 1"));
        }
        let total = n * oversample;
        let roots = (0..total)
            .map(|r| cis_turns(r as f64 / total as f64))
            .collect();
        Ok(Self {
            n,
            oversample,
            fft: FftPlan::new(total),
            roots,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    pub fn envelope(&self, x: &SymbolBlock, c2: f64) -> Result<TimeSignal> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let total = self.n * self.oversample;
        let scale = 1.0 / libm::sqrt(self.n as f64);
        let active: Vec<(usize, Complex64)> = x
            .as_slice()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm_sqr() > 0.0)
            .map(|(m, v)| (m, v * chirp_phase(c2, m) * scale))
            .collect();
        let samples = if active.len() * 4 <= self.fft_cost_hint() {
            let mut out = vec![Complex64::new(0.0, 0.0); total];
            for (m, y) in &active {
                let mut idx = 0usize;
                for o in out.iter_mut() {
                    *o += y * self.roots[idx];
                    idx += m;
                    if idx >= total {
                        idx -= total;
                    }
                }
            }
            out
        } else {
            let mut buf = vec![Complex64::new(0.0, 0.0); total];
            for (m, y) in &active {
                buf[*m] = *y;
            }
            self.fft.inverse(&mut buf);
            buf
        };
        Ok(TimeSignal {
            samples,
            sample_period: 1.0 / self.oversample as f64,
            oversample: self.oversample,
        })
    }

    fn fft_cost_hint(&self) -> usize {
        let m = (self.n * self.oversample).next_power_of_two();
        let log = m.trailing_zeros() as usize;
        // Bluestein needs two transforms of the padded length
        if self.n * self.oversample == m {
            log
        } else {
            4 * log
        }
    }

    /// PAPR in dB of the envelope for the given `c2`.
    pub fn papr_db(&self, x: &SymbolBlock, c2: f64) -> Result<f64> {
        if x.energy() <= 0.0 {
            return Err(Error::ZeroEnergy);
        }
        self.envelope(x, c2)?.papr_db()
    }
}

pub fn oversampled_envelope(x: &SymbolBlock, c2: f64, oversample: usize) -> Result<TimeSignal> {
    EnvelopePlan::new(x.len(), oversample)?.envelope(x, c2)
}
