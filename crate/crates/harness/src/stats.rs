//! Empirical distribution helpers.

use serde::Serialize;

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Population standard deviation.
pub fn std_dev(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64).sqrt()
}

pub fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Linear-interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Threshold index `k` stands for `k * step`. Integer indices keep the grid
/// identical across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdGrid {
    pub first: i64,
    pub last: i64,
    pub step: f64,
}

impl ThresholdGrid {
    pub fn covering(values: &[f64], step: f64) -> Self {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self {
            first: (lo / step).floor() as i64,
            last: (hi / step).ceil() as i64,
            step,
        }
    }

    pub fn value(&self, k: i64) -> f64 {
        k as f64 * self.step
    }

    /// Threshold text with as many decimals as the step needs.
    pub fn label(&self, k: i64) -> String {
        let decimals = (0..12)
            .find(|&d| {
                let scaled = self.step * 10f64.powi(d);
                (scaled - scaled.round()).abs() < 1e-9 * scaled.max(1.0)
            })
            .unwrap_or(12) as usize;
        format!("{:.*}", decimals, self.value(k))
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        self.first..=self.last
    }
}

/// `Pr(v > t)` for every threshold.
pub fn ccdf(sorted: &[f64], grid: &ThresholdGrid) -> Vec<f64> {
    let n = sorted.len() as f64;
    grid.indices()
        .map(|k| {
            let t = grid.value(k);
            let at_or_below = sorted.partition_point(|&v| v <= t);
            (sorted.len() - at_or_below) as f64 / n
        })
        .collect()
}

/// `Pr(v <= t)` for every threshold.
pub fn cdf(sorted: &[f64], grid: &ThresholdGrid) -> Vec<f64> {
    let n = sorted.len() as f64;
    grid.indices()
        .map(|k| sorted.partition_point(|&v| v <= grid.value(k)) as f64 / n)
        .collect()
}

/// Smallest grid threshold at which the CCDF falls to `level` or below.
pub fn ccdf_point(sorted: &[f64], grid: &ThresholdGrid, level: f64) -> f64 {
    let values = ccdf(sorted, grid);
    grid.indices()
        .zip(values)
        .find(|&(_, p)| p <= level)
        .map(|(k, _)| grid.value(k))
        .unwrap_or(grid.value(grid.last))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsTest {
    let a = sorted(a);
    let b = sorted(b);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    let ne = (a.len() * b.len()) as f64 / (a.len() + b.len()) as f64;
    let sq = ne.sqrt();
    let lambda = (sq + 0.12 + 0.11 / sq) * d;
    KsTest {
        statistic: d,
        p_value: kolmogorov_q(lambda),
    }
}

fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = sign * (-2.0 * kf * kf * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
