//! Small unnormalized complex FFT: iterative radix-2 with a Bluestein fallback
//! for lengths that are not powers of two.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::cis_turns;

#[derive(Debug, Clone)]
pub struct FftPlan {
    n: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Radix2(Radix2),
    Bluestein(Bluestein),
}

#[derive(Debug, Clone)]
struct Radix2 {
    n: usize,
    // exp(-j 2 pi k / n) for k < n / 2
    twiddles: Vec<Complex64>,
}

#[derive(Debug, Clone)]
struct Bluestein {
    n: usize,
    inner: Radix2,
    // exp(-j pi k^2 / n)
    chirp: Vec<Complex64>,
    // FFT of the conjugate chirp, zero padded and wrapped
    kernel: Vec<Complex64>,
}

impl FftPlan {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "FFT length must be positive");
        let kind = if n.is_power_of_two() {
            Kind::Radix2(Radix2::new(n))
        } else {
            Kind::Bluestein(Bluestein::new(n))
        };
        Self { n, kind }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// In place `X[k] = sum_n x[n] exp(-j 2 pi k n / N)`.
    pub fn forward(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.n);
        match &self.kind {
            Kind::Radix2(r) => r.run(data),
            Kind::Bluestein(b) => b.run(data),
        }
    }

    /// In place `x[n] = sum_k X[k] exp(+j 2 pi k n / N)`, without the `1/N`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        for v in data.iter_mut() {
            *v = v.conj();
        }
        self.forward(data);
        for v in data.iter_mut() {
            *v = v.conj();
        }
    }
}

impl Radix2 {
    fn new(n: usize) -> Self {
        let twiddles = (0..n / 2)
            .map(|k| cis_turns(-(k as f64) / n as f64))
            .collect();
        Self { n, twiddles }
    }

    fn run(&self, a: &mut [Complex64]) {
        let n = self.n;
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if i < j {
                a.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let u = a[start + k];
                    let v = a[start + k + half] * w;
                    a[start + k] = u + v;
                    a[start + k + half] = u - v;
                }
            }
            len <<= 1;
        }
    }
}

impl Bluestein {
    fn new(n: usize) -> Self {
        let m = (2 * n - 1).next_power_of_two();
        let inner = Radix2::new(m);
        // k^2 mod 2n keeps the phase argument small
        let chirp: Vec<Complex64> = (0..n)
            .map(|k| {
                let k2 = ((k as u128 * k as u128) % (2 * n as u128)) as f64;
                cis_turns(-k2 / (2 * n) as f64)
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); m];
        kernel[0] = chirp[0].conj();
        for k in 1..n {
            kernel[k] = chirp[k].conj();
            kernel[m - k] = chirp[k].conj();
        }
        inner.run(&mut kernel);
        Self {
            n,
            inner,
            chirp,
            kernel,
        }
    }

    fn run(&self, data: &mut [Complex64]) {
        let m = self.kernel.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for k in 0..self.n {
            buf[k] = data[k] * self.chirp[k];
        }
        self.inner.run(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel) {
            *b *= k;
        }
        // inverse via conjugation
        for b in buf.iter_mut() {
            *b = b.conj();
        }
        self.inner.run(&mut buf);
        let scale = 1.0 / m as f64;
        for k in 0..self.n {
            data[k] = buf[k].conj() * scale * self.chirp[k];
        }
    }
}
