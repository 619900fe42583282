//! Batch-means estimation and a negative-binomial goodness-of-fit test.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Batch means over a fixed time window split into equal-length batches.
///
/// Each batch keeps a sum of values and a sum of weights, so ratio
/// estimators are supported; plain samples have weight one. The standard
/// error is the sample standard deviation of the non-empty batch ratios over
/// the square root of their number.
#[derive(Debug, Clone)]
pub struct BatchMeans {
    start: u64,
    span: u64,
    sums: Vec<f64>,
    weights: Vec<f64>,
    counts: Vec<u64>,
}

impl BatchMeans {
    pub const DEFAULT_BATCHES: usize = 32;

    /// Window `[start, end)` split into `batches` batches.
    pub fn new(start: u64, end: u64, batches: usize) -> Self {
        let batches = batches.max(1);
        Self {
            start,
            span: end.saturating_sub(start).max(1),
            sums: vec![0.0; batches],
            weights: vec![0.0; batches],
            counts: vec![0; batches],
        }
    }

    pub fn contains(&self, t: u64) -> bool {
        t >= self.start && t - self.start < self.span
    }

    /// Adds a sample observed at time `t`; samples outside the window are dropped.
    pub fn add(&mut self, t: u64, value: f64) {
        self.add_weighted(t, value, 1.0);
    }

    /// Adds `value` with `weight` to the ratio estimate.
    pub fn add_weighted(&mut self, t: u64, value: f64, weight: f64) {
        if !self.contains(t) {
            return;
        }
        let n = self.sums.len() as u128;
        let b = ((t - self.start) as u128 * n / self.span as u128) as usize;
        self.sums[b] += value;
        self.weights[b] += weight;
        self.counts[b] += 1;
    }

    pub fn count(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Pooled ratio; NaN when empty.
    pub fn mean(&self) -> f64 {
        if self.count() == 0 {
            return f64::NAN;
        }
        self.sums.iter().sum::<f64>() / self.weights.iter().sum::<f64>()
    }

    /// Batch-means standard error; NaN with fewer than two non-empty batches.
    pub fn std_error(&self) -> f64 {
        let ratios: Vec<f64> = self
            .sums
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&s, &w)| s / w)
            .collect();
        let n = ratios.len();
        if n < 2 {
            return f64::NAN;
        }
        let m = ratios.iter().sum::<f64>() / n as f64;
        let var = ratios.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    }
}

/// Mean and standard error of independent samples.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (m, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (m, (var / n as f64).sqrt())
}

/// `P(X = x)` for the number of trials needed for `k` successes with
/// success probability `r`, `x ≥ k`.
pub fn negbin_pmf(x: u64, k: u32, r: f64) -> f64 {
    let k = k as u64;
    if x < k {
        return 0.0;
    }
    let ln_binom = statrs::function::factorial::ln_binomial(x - 1, k - 1);
    (ln_binom + k as f64 * r.ln() + (x - k) as f64 * (1.0 - r).ln()).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square test of `samples` against NegBin(`k`, `r`).
///
/// Support points are binned left to right until each bin expects at least
/// five observations; the tail beyond the last full bin is merged into it.
pub fn chi_square_negbin(samples: &[u64], k: u32, r: f64) -> ChiSquareTest {
    let n = samples.len() as f64;
    let max = samples.iter().copied().max().unwrap_or(k as u64);
    let mut observed = vec![0u64; (max + 2) as usize];
    for &x in samples {
        observed[x as usize] += 1;
    }

    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut exp_acc, mut obs_acc, mut cdf) = (0.0, 0.0, 0.0);
    for x in k as u64..=max {
        let p = negbin_pmf(x, k, r);
        cdf += p;
        exp_acc += n * p;
        obs_acc += observed[x as usize] as f64;
        if exp_acc >= 5.0 {
            bins.push((obs_acc, exp_acc));
            exp_acc = 0.0;
            obs_acc = 0.0;
        }
    }
    let tail = exp_acc + n * (1.0 - cdf).max(0.0);
    match bins.last_mut() {
        Some(last) if tail < 5.0 => {
            last.0 += obs_acc;
            last.1 += tail;
        }
        _ => bins.push((obs_acc, tail)),
    }

    let statistic: f64 = bins.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = bins.len().saturating_sub(1).max(1);
    let p_value = ChiSquared::new(dof as f64).map(|d| d.sf(statistic)).unwrap_or(f64::NAN);
    ChiSquareTest { statistic, dof, p_value }
}
