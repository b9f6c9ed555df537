//! Doubly dispersive channels and their closed-form effective DAFT-domain matrices.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cis_turns;
use crate::daft::TimeSignal;
use crate::error::{invalid, Error, Result};
use crate::PI;

/// One propagation path: complex gain, integer delay in samples and
/// normalized Doppler shift in subcarrier spacings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelPath {
    pub gain: Complex64,
    pub delay: usize,
    pub doppler: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    paths: Vec<ChannelPath>,
    noise_power: f64,
}

impl PathSet {
    pub fn new(paths: Vec<ChannelPath>, noise_power: f64) -> Result<Self> {
        if paths.is_empty() {
            return Err(invalid("paths", "at least one path is required"));
        }
        for p in &paths {
            if !p.gain.re.is_finite() || !p.gain.im.is_finite() || !p.doppler.is_finite() {
                return Err(Error::NonFinite("channel path"));
            }
        }
        if !(noise_power >= 0.0) || !noise_power.is_finite() {
            return Err(invalid("noise_power", "must be finite and non-negative"));
        }
        Ok(Self { paths, noise_power })
    }

    pub fn paths(&self) -> &[ChannelPath] {
        &self.paths
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn max_delay(&self) -> usize {
        self.paths.iter().map(|p| p.delay).max().unwrap_or(0)
    }
}

/// Point target seen by the sensing receiver. The delay may be fractional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingTarget {
    pub reflection: Complex64,
    pub delay: f64,
    pub doppler: f64,
}

/// `F(psi) = sum_{n<N} exp(-j 2 pi psi n / N)`.
///
/// Evaluated as a phase times a ratio of sines with both arguments reduced, and
/// equal to `N` when `psi / N` is within `1e-9` of an integer.
pub fn dirichlet(psi: f64, n: usize) -> Complex64 {
    let nn = n as f64;
    let m = libm::round(psi / nn);
    let r = psi - m * nn;
    if libm::fabs(r / nn) < 1e-9 {
        return Complex64::new(nn, 0.0);
    }
    let k = libm::round(r);
    let d = r - k;
    let mut num = libm::sin(PI * d);
    if (k as i64).rem_euclid(2) == 1 {
        num = -num;
    }
    let den = libm::sin(PI * r / nn);
    let mut ratio = num / den;
    // sin(pi psi) = (-1)^(m N) sin(pi r), sin(pi psi / N) = (-1)^m sin(pi r / N)
    if ((m as i64) * (n as i64 - 1)).rem_euclid(2) == 1 {
        ratio = -ratio;
    }
    cis_turns(-psi * (nn - 1.0) / (2.0 * nn)) * ratio
}

/// `F(d + theta)` for every `d` in `-(N-1)..=N-1`, stored at `d + N - 1`.
fn dirichlet_row(theta: f64, n: usize, roots: &[Complex64], out: &mut Vec<Complex64>) {
    out.clear();
    let num = cis_turns(-theta) - 1.0;
    let e = cis_turns(-theta / n as f64);
    for d in -(n as i64 - 1)..=(n as i64 - 1) {
        let den = e * roots[d.rem_euclid(n as i64) as usize] - 1.0;
        if den.norm_sqr() < 1e-12 {
            out.push(dirichlet(d as f64 + theta, n));
        } else {
            out.push(num / den);
        }
    }
}

/// Row-major dense `N x N` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    n: usize,
    data: Vec<Complex64>,
}

impl EffectiveChannel {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, p: usize, q: usize) -> Complex64 {
        self.data[p * self.n + q]
    }

    pub fn set(&mut self, p: usize, q: usize, v: Complex64) {
        self.data[p * self.n + q] = v;
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(h, v)| h * v).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn add_path(h: &mut EffectiveChannel, gain: Complex64, delay: f64, doppler: f64, c1: f64, c2: f64) {
    let n = h.n;
    let nn = n as f64;
    let scale = gain * cis_turns(c1 * delay * delay) / nn;
    for p in 0..n {
        for q in 0..n {
            let psi = p as f64 - q as f64 + doppler + 2.0 * nn * c1 * delay;
            let phase = -(q as f64) * delay / nn + c2 * ((q * q) as f64 - (p * p) as f64);
            let v = scale * cis_turns(phase) * dirichlet(psi, n);
            h.data[p * n + q] += v;
        }
    }
}

fn check_len(n: usize) -> Result<()> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidLength(n));
    }
    Ok(())
}

/// Closed-form effective channel `H_eff = A H A^H` for arbitrary real `c1, c2`.
pub fn effective_comm_channel(
    paths: &PathSet,
    c1: f64,
    c2: f64,
    n: usize,
) -> Result<EffectiveChannel> {
    check_len(n)?;
    let mut h = EffectiveChannel::zeros(n);
    for p in &paths.paths {
        add_path(&mut h, p.gain, p.delay as f64, p.doppler, c1, c2);
    }
    Ok(h)
}

/// Single-target sensing matrix; the closed form is extended to fractional delay.
pub fn effective_sens_channel(
    target: &SensingTarget,
    c1: f64,
    c2: f64,
    n: usize,
) -> Result<EffectiveChannel> {
    check_len(n)?;
    if !target.delay.is_finite() || !target.doppler.is_finite() {
        return Err(Error::NonFinite("sensing target"));
    }
    let mut h = EffectiveChannel::zeros(n);
    add_path(
        &mut h,
        target.reflection,
        target.delay,
        target.doppler,
        c1,
        c2,
    );
    Ok(h)
}

/// Per-subcarrier useful and inter-carrier interference powers.
#[derive(Debug, Clone, PartialEq)]
pub struct IciPowers {
    pub signal: Vec<f64>,
    pub interference: Vec<f64>,
}

pub fn ici_decompose(h: &EffectiveChannel, x: &[Complex64]) -> Result<IciPowers> {
    if x.len() != h.n {
        return Err(Error::LengthMismatch {
            expected: h.n,
            got: x.len(),
        });
    }
    let y = h.apply(x);
    let mut signal = Vec::with_capacity(h.n);
    let mut interference = Vec::with_capacity(h.n);
    for p in 0..h.n {
        let s = h.get(p, p) * x[p];
        signal.push(s.norm_sqr());
        interference.push((y[p] - s).norm_sqr());
    }
    Ok(IciPowers {
        signal,
        interference,
    })
}

/// Applies a sum of closed-form paths to `x` without forming the matrix.
///
/// The common output phase `exp(-j 2 pi c2 p^2)` is dropped, so magnitudes and
/// inner products between outputs of the same `c2` are exact. The diagonal
/// part is returned alongside the full product.
#[derive(Debug, Clone)]
pub struct PathApplicator {
    n: usize,
    roots: Vec<Complex64>,
    row: Vec<Complex64>,
    w: Vec<Complex64>,
}

impl PathApplicator {
    pub fn new(n: usize) -> Result<Self> {
        check_len(n)?;
        let roots = (0..n).map(|k| cis_turns(-(k as f64) / n as f64)).collect();
        Ok(Self {
            n,
            roots,
            row: Vec::with_capacity(2 * n),
            w: vec![Complex64::new(0.0, 0.0); n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Accumulates one path into `y` (full product) and `diag` (diagonal part).
    #[allow(clippy::too_many_arguments)]
    pub fn accumulate(
        &mut self,
        x: &[Complex64],
        chirp2: &[Complex64],
        gain: Complex64,
        delay: f64,
        doppler: f64,
        c1: f64,
        y: &mut [Complex64],
        diag: Option<&mut [Complex64]>,
    ) {
        let n = self.n;
        let nn = n as f64;
        let theta = doppler + 2.0 * nn * c1 * delay;
        dirichlet_row(theta, n, &self.roots, &mut self.row);
        let g0 = gain * cis_turns(c1 * delay * delay) / nn;
        let step = cis_turns(-delay / nn);
        let int_delay = delay >= 0.0 && libm::floor(delay) == delay;
        let mut rot = Complex64::new(1.0, 0.0);
        for q in 0..n {
            let r = if int_delay {
                self.roots[(q * delay as usize) % n]
            } else {
                rot
            };
            self.w[q] = g0 * r * chirp2[q] * x[q];
            rot *= step;
        }
        for (p, yp) in y.iter_mut().enumerate() {
            // F(p - q + theta) sits at p - q + N - 1
            let base = p + n - 1;
            let mut acc = Complex64::new(0.0, 0.0);
            for (q, wq) in self.w.iter().enumerate() {
                acc += self.row[base - q] * wq;
            }
            *yp += acc;
        }
        if let Some(d) = diag {
            let f0 = self.row[n - 1];
            for (dp, wp) in d.iter_mut().zip(&self.w) {
                *dp += f0 * wp;
            }
        }
    }
}

/// `exp(j 2 pi c2 q^2)` for `q < n`.
pub fn chirp_table(c2: f64, n: usize) -> Vec<Complex64> {
    (0..n).map(|q| cis_turns(c2 * (q * q) as f64)).collect()
}

/// Fast per-subcarrier powers for a communication channel.
#[derive(Debug, Clone)]
pub struct CommEvaluator {
    paths: PathSet,
    app: PathApplicator,
    y: Vec<Complex64>,
    diag: Vec<Complex64>,
}

impl CommEvaluator {
    pub fn new(paths: PathSet, n: usize) -> Result<Self> {
        let app = PathApplicator::new(n)?;
        Ok(Self {
            paths,
            app,
            y: vec![Complex64::new(0.0, 0.0); n],
            diag: vec![Complex64::new(0.0, 0.0); n],
        })
    }

    pub fn paths(&self) -> &PathSet {
        &self.paths
    }

    pub fn n(&self) -> usize {
        self.app.n
    }

    pub fn powers_into(&mut self, x: &[Complex64], c1: f64, c2: f64, out: &mut IciPowers) {
        let n = self.app.n;
        assert_eq!(x.len(), n);
        let chirp2 = chirp_table(c2, n);
        self.y
            .iter_mut()
            .for_each(|v| *v = Complex64::new(0.0, 0.0));
        self.diag
            .iter_mut()
            .for_each(|v| *v = Complex64::new(0.0, 0.0));
        for path in &self.paths.paths {
            self.app.accumulate(
                x,
                &chirp2,
                path.gain,
                path.delay as f64,
                path.doppler,
                c1,
                &mut self.y,
                Some(&mut self.diag),
            );
        }
        out.signal.clear();
        out.interference.clear();
        for (y, d) in self.y.iter().zip(&self.diag) {
            out.signal.push(d.norm_sqr());
            out.interference.push((y - d).norm_sqr());
        }
    }

    pub fn powers(&mut self, x: &[Complex64], c1: f64, c2: f64) -> IciPowers {
        let mut out = IciPowers {
            signal: Vec::new(),
            interference: Vec::new(),
        };
        self.powers_into(x, c1, c2, &mut out);
        out
    }
}

/// Time-domain propagation of a prefixed signal followed by prefix removal.
///
/// Output sample `k < N` is `sum_i h_i exp(-j 2 pi nu_i k / N) s[k - l_i]`,
/// where `s` is indexed so that `s[-prefix..0]` is the prefix.
pub fn propagate(paths: &PathSet, tx: &TimeSignal, prefix: usize) -> Result<TimeSignal> {
    if tx.len() <= prefix {
        return Err(Error::PrefixTooLong {
            prefix,
            n: tx.len(),
        });
    }
    let n = tx.len() - prefix;
    if paths.max_delay() > prefix {
        return Err(invalid("prefix", "shorter than the maximum path delay"));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for p in &paths.paths {
        for (k, o) in out.iter_mut().enumerate() {
            let src = tx.samples[k + prefix - p.delay];
            *o += p.gain * cis_turns(-p.doppler * k as f64 / n as f64) * src;
        }
    }
    Ok(TimeSignal::critical(out))
}

/// Adds circularly-symmetric complex Gaussian noise of total power `n0`.
pub fn add_awgn<R: Rng + ?Sized>(samples: &mut [Complex64], n0: f64, rng: &mut R) {
    let sd = libm::sqrt(n0 / 2.0);
    for s in samples.iter_mut() {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *s += Complex64::new(re * sd, im * sd);
    }
}
