use afdm_core::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::Modulation;

/// Draws symbols with average power `power`.
#[derive(Debug, Clone)]
pub struct SymbolSource {
    points: Option<Vec<Complex64>>,
    scale: f64,
}

impl SymbolSource {
    pub fn new(m: Modulation, power: f64) -> Self {
        match m {
            Modulation::Gaussian => Self {
                points: None,
                scale: (power / 2.0).sqrt(),
            },
            Modulation::Qam { order } => {
                let points = qam_points(order);
                let mean = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64;
                Self {
                    points: Some(points),
                    scale: (power / mean).sqrt(),
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, r: &mut R) -> Complex64 {
        match &self.points {
            None => {
                let a: f64 = StandardNormal.sample(r);
                let b: f64 = StandardNormal.sample(r);
                Complex64::new(a, b) * self.scale
            }
            Some(p) => p[r.random_range(0..p.len())] * self.scale,
        }
    }

    pub fn fill<R: Rng + ?Sized>(&self, r: &mut R, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| self.sample(r)).collect()
    }
}

/// Unnormalized odd-integer lattice of a `2^b`-point QAM. Odd `b` gives a
/// rectangular `2^((b+1)/2) x 2^((b-1)/2)` layout.
pub fn qam_points(order: u32) -> Vec<Complex64> {
    let bits = order.trailing_zeros();
    let (i_bits, q_bits) = (bits.div_ceil(2), bits / 2);
    let (ni, nq) = (1i64 << i_bits, 1i64 << q_bits);
    let mut out = Vec::with_capacity(order as usize);
    for i in 0..ni {
        for q in 0..nq {
            out.push(Complex64::new(
                (2 * i - (ni - 1)) as f64,
                (2 * q - (nq - 1)) as f64,
            ));
        }
    }
    out
}
