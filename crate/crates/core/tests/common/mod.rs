#![allow(dead_code)]

use afdm_core::daft::SymbolBlock;
use afdm_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cgauss<R: Rng>(r: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let a: f64 = StandardNormal.sample(r);
    let b: f64 = StandardNormal.sample(r);
    Complex64::new(a * s, b * s)
}

pub fn gaussian_vec<R: Rng>(r: &mut R, n: usize, var: f64) -> Vec<Complex64> {
    (0..n).map(|_| cgauss(r, var)).collect()
}

pub fn gaussian_block<R: Rng>(r: &mut R, n: usize) -> SymbolBlock {
    SymbolBlock::new(gaussian_vec(r, n, 1.0)).unwrap()
}

pub fn qpsk_block<R: Rng>(r: &mut R, n: usize) -> SymbolBlock {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = (0..n)
        .map(|_| {
            Complex64::new(
                if r.random() { s } else { -s },
                if r.random() { s } else { -s },
            )
        })
        .collect();
    SymbolBlock::new(v).unwrap()
}

pub fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * phase)
}

/// Brute-force `s[n] = N^-1/2 sum_m x[m] exp(j 2 pi (c1 n^2 + c2 m^2 + n m / N))`.
pub fn idaft_direct(x: &[Complex64], c1: f64, c2: f64) -> Vec<Complex64> {
    let n = x.len();
    let nf = n as f64;
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, v) in x.iter().enumerate() {
                let (kf, mf) = (k as f64, m as f64);
                acc += v * cis(c1 * kf * kf + c2 * mf * mf + kf * mf / nf);
            }
            acc / nf.sqrt()
        })
        .collect()
}

pub type Mat = Vec<Vec<Complex64>>;

pub fn zeros(n: usize) -> Mat {
    vec![vec![Complex64::new(0.0, 0.0); n]; n]
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut c = zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            for j in 0..n {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

pub fn adjoint(a: &Mat) -> Mat {
    let n = a.len();
    let mut c = zeros(n);
    for i in 0..n {
        for j in 0..n {
            c[j][i] = a[i][j].conj();
        }
    }
    c
}

/// DAFT matrix `A = L(c2) F L(c1)` with unitary `F`.
pub fn daft_matrix(n: usize, c1: f64, c2: f64) -> Mat {
    let nf = n as f64;
    let mut a = zeros(n);
    for m in 0..n {
        for k in 0..n {
            let (mf, kf) = (m as f64, k as f64);
            a[m][k] = cis(-(c2 * mf * mf + mf * kf / nf + c1 * kf * kf)) / nf.sqrt();
        }
    }
    a
}

pub fn rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|v| v.norm_sqr()).sum();
    (num / den).sqrt()
}
