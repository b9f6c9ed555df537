//! Real trigonometric polynomials on `[0, 2 pi)` and closed-form quartic integrals.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigKind {
    Cos,
    Sin,
}

/// `f(t) = sum_k a_k cos(k t) + b_k sin(k t)`, with `b_0` ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSeries {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigSeries {
    pub fn new(mut cos: Vec<f64>, mut sin: Vec<f64>) -> Self {
        let len = cos.len().max(sin.len()).max(1);
        cos.resize(len, 0.0);
        sin.resize(len, 0.0);
        sin[0] = 0.0;
        let mut s = Self { cos, sin };
        s.trim();
        s
    }

    pub fn zero() -> Self {
        Self {
            cos: vec![0.0],
            sin: vec![0.0],
        }
    }

    pub fn degree(&self) -> usize {
        self.cos.len() - 1
    }

    fn trim(&mut self) {
        while self.cos.len() > 1 {
            let k = self.cos.len() - 1;
            if self.cos[k] == 0.0 && self.sin[k] == 0.0 {
                self.cos.pop();
                self.sin.pop();
            } else {
                break;
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = self.cos[0];
        for k in 1..self.cos.len() {
            let (s, c) = libm::sincos(k as f64 * t);
            acc += self.cos[k] * c + self.sin[k] * s;
        }
        acc
    }

    /// Product via product-to-sum identities.
    pub fn mul(&self, other: &Self) -> Self {
        let deg = self.degree() + other.degree();
        let mut cos = vec![0.0; deg + 1];
        let mut sin = vec![0.0; deg + 1];
        for (i, (&a1, &b1)) in self.cos.iter().zip(&self.sin).enumerate() {
            if a1 == 0.0 && b1 == 0.0 {
                continue;
            }
            for (j, (&a2, &b2)) in other.cos.iter().zip(&other.sin).enumerate() {
                if a2 == 0.0 && b2 == 0.0 {
                    continue;
                }
                let sum = i + j;
                let (diff, sign) = if i >= j { (i - j, 1.0) } else { (j - i, -1.0) };
                // cos cos
                cos[sum] += 0.5 * a1 * a2;
                cos[diff] += 0.5 * a1 * a2;
                // sin sin
                cos[diff] += 0.5 * b1 * b2;
                cos[sum] -= 0.5 * b1 * b2;
                // sin(i) cos(j) = (sin(i+j) + sin(i-j)) / 2
                sin[sum] += 0.5 * b1 * a2;
                sin[diff] += 0.5 * b1 * a2 * sign;
                // cos(i) sin(j) = (sin(i+j) - sin(i-j)) / 2
                sin[sum] += 0.5 * a1 * b2;
                sin[diff] -= 0.5 * a1 * b2 * sign;
            }
        }
        Self::new(cos, sin)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(
            self.cos.iter().map(|v| v * s).collect(),
            self.sin.iter().map(|v| v * s).collect(),
        )
    }

    /// Integral over one period.
    pub fn integral(&self) -> f64 {
        2.0 * PI * self.cos[0]
    }

    /// `integral_0^{2 pi} f g` by orthogonality.
    pub fn inner(&self, other: &Self) -> f64 {
        let mut acc = 2.0 * self.cos[0] * other.cos[0];
        for k in 1..self.cos.len().min(other.cos.len()) {
            acc += self.cos[k] * other.cos[k] + self.sin[k] * other.sin[k];
        }
        PI * acc
    }
}

const Q: [[i8; 8]; 16] = {
    let mut q = [[0i8; 8]; 16];
    q[0] = [0, 1, 1, 1, 1, 1, 1, 1];
    q[3] = [0, -1, 1, 1, -1, -1, 1, 1];
    q[5] = [0, 1, 1, -1, 1, -1, -1, 1];
    q[6] = [0, 1, -1, 1, 1, -1, 1, -1];
    q[9] = [0, 1, 1, -1, -1, 1, 1, -1];
    q[10] = [0, 1, -1, 1, -1, 1, -1, 1];
    q[12] = [0, -1, -1, -1, 1, 1, 1, 1];
    q[15] = [0, 1, -1, -1, -1, -1, 1, 1];
    q
};

/// The eight signed index combinations tested against zero, in table order.
fn deltas(k: i64, l: i64, m: i64, n: i64) -> [i64; 8] {
    [
        k + l + m + n,
        k + l - m - n,
        k + l + m - n,
        k + l - m + n,
        k - l + m + n,
        k - l - m - n,
        k - l + m - n,
        k - l - m + n,
    ]
}

fn row(kinds: [TrigKind; 4]) -> usize {
    kinds
        .iter()
        .fold(0, |acc, k| 2 * acc + usize::from(*k == TrigKind::Sin))
}

/// `integral_0^{2 pi} w1(k t) w2(l t) w3(m t) w4(n t) dt` for indices in `1..=max`.
pub fn quartic_trig_integral(kinds: [TrigKind; 4], idx: [usize; 4], max: usize) -> Result<f64> {
    for &i in &idx {
        if i == 0 || i > max {
            return Err(Error::IndexOutOfRange { index: i, max });
        }
    }
    Ok(quartic_unchecked(kinds, idx))
}

pub(crate) fn quartic_unchecked(kinds: [TrigKind; 4], idx: [usize; 4]) -> f64 {
    let q = &Q[row(kinds)];
    let d = deltas(idx[0] as i64, idx[1] as i64, idx[2] as i64, idx[3] as i64);
    let hits: i32 = q
        .iter()
        .zip(d.iter())
        .filter(|(_, &d)| d == 0)
        .map(|(&c, _)| i32::from(c))
        .sum();
    PI / 4.0 * hits as f64
}

/// All `n >= 1` for which some delta can vanish given `k, l, m`.
pub(crate) fn candidate_fourth(k: usize, l: usize, m: usize) -> [i64; 7] {
    let (k, l, m) = (k as i64, l as i64, m as i64);
    [
        k + l - m,
        k + l + m,
        m - k - l,
        l - k - m,
        k - l - m,
        k - l + m,
        l + m - k,
    ]
}
