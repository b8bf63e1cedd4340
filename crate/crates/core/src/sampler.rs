//! Monte Carlo trajectories of (n, m) outcome pairs and jackknife estimates
//! of exponential averages.
//!
//! Exponential averages are dominated by rare outcome pairs with large
//! negative weights, so finite-sample estimates converge slowly; the
//! estimator reports carry standard errors and z-scores against exact values
//! from the [`crate::tpm`] engine.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::table::Table;
use crate::tpm::JointDistribution;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplerError {
    #[error("sample count must be at least 1")]
    ZeroCount,

    #[error("degenerate distribution: no outcome pair above the support threshold")]
    DegenerateDistribution,

    #[error("non-finite weight {value} at ({n}, {m})")]
    NonFiniteWeight { n: usize, m: usize, value: f64 },

    #[error("sample ({n}, {m}) lies outside the {rows}x{cols} weight table")]
    OutOfRange { n: usize, m: usize, rows: usize, cols: usize },
}

pub type Result<T> = std::result::Result<T, SamplerError>;

/// One realisation: first outcome n, then second outcome m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub first_outcome: usize,
    pub second_outcome: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub sample_count: usize,
    pub mean: f64,
    pub std_error: f64,
    pub exact_value: Option<f64>,
    pub z_score: Option<f64>,
}

/// Cumulative weights restricted to `keep`, and their total.
fn masked_cdf(weights: impl Iterator<Item = (f64, bool)>) -> (Vec<f64>, f64) {
    let mut acc = 0.0;
    let cdf = weights
        .map(|(w, keep)| {
            if keep {
                acc += w;
            }
            acc
        })
        .collect();
    (cdf, acc)
}

/// Inverse-CDF draw; only indices with `keep` set can be returned.
fn draw<R: Rng + ?Sized>(cdf: &[f64], total: f64, keep: impl Fn(usize) -> bool, rng: &mut R) -> usize {
    let u = rng.random::<f64>() * total;
    let k = cdf.partition_point(|&c| c <= u);
    if k < cdf.len() && keep(k) {
        return k;
    }
    // u landed on the top edge through rounding
    (0..cdf.len()).rev().find(|&i| keep(i)).expect("nonempty support")
}

/// I.i.d. draws from p(n,m) restricted to its support: first n from p(n),
/// then m from p(·|n).
pub fn sample_trajectories<R: Rng + ?Sized>(
    jd: &JointDistribution,
    count: usize,
    rng: &mut R,
) -> Result<Vec<TrajectorySample>> {
    if count == 0 {
        return Err(SamplerError::ZeroCount);
    }
    let rows = jd.first_len();
    let cols = jd.second_len();
    let row_has_support: Vec<bool> = (0..rows).map(|n| (0..cols).any(|m| jd.on_support(n, m))).collect();
    let (first_cdf, first_total) = masked_cdf(jd.p_first().iter().copied().zip(row_has_support.iter().copied()));
    if first_total <= 0.0 {
        return Err(SamplerError::DegenerateDistribution);
    }
    let row_cdfs: Vec<(Vec<f64>, f64)> = (0..rows)
        .map(|n| masked_cdf(jd.p_cond().row(n).iter().enumerate().map(|(m, &p)| (p, jd.on_support(n, m)))))
        .collect();

    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let n = draw(&first_cdf, first_total, |i| row_has_support[i], rng);
        let (cdf, total) = &row_cdfs[n];
        let m = draw(cdf, *total, |j| jd.on_support(n, j), rng);
        out.push(TrajectorySample { first_outcome: n, second_outcome: m });
    }
    Ok(out)
}

/// Jackknife standard error of the sample mean.
pub fn jackknife_std_error(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let total: f64 = values.iter().sum();
    let denom = (n - 1) as f64;
    let loo_mean = total / n as f64;
    let spread: f64 = values
        .iter()
        .map(|&x| {
            let theta = (total - x) / denom;
            (theta - loo_mean) * (theta - loo_mean)
        })
        .sum();
    (denom / n as f64 * spread).sqrt()
}

/// Sample mean of e^{−w(n,m)} with a jackknife error bar.
pub fn estimate_exponential_average(
    samples: &[TrajectorySample],
    weight_table: &Table<f64>,
    exact: Option<f64>,
) -> Result<EstimatorReport> {
    if samples.is_empty() {
        return Err(SamplerError::ZeroCount);
    }
    let (rows, cols) = weight_table.shape();
    let mut values = Vec::with_capacity(samples.len());
    for s in samples {
        let (n, m) = (s.first_outcome, s.second_outcome);
        if n >= rows || m >= cols {
            return Err(SamplerError::OutOfRange { n, m, rows, cols });
        }
        let w = *weight_table.get(n, m);
        let value = (-w).exp();
        if !w.is_finite() || !value.is_finite() {
            return Err(SamplerError::NonFiniteWeight { n, m, value: w });
        }
        values.push(value);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let std_error = jackknife_std_error(&values);
    let z_score = exact.and_then(|e| {
        if std_error > 0.0 {
            Some((mean - e) / std_error)
        } else if mean == e {
            Some(0.0)
        } else {
            None
        }
    });
    Ok(EstimatorReport { sample_count: values.len(), mean, std_error, exact_value: exact, z_score })
}

/// Empirical frequency of each outcome pair.
pub fn empirical_frequencies(samples: &[TrajectorySample], rows: usize, cols: usize) -> Table<f64> {
    let mut counts = vec![0usize; rows * cols];
    for s in samples {
        counts[s.first_outcome * cols + s.second_outcome] += 1;
    }
    let total = samples.len().max(1) as f64;
    Table::from_vec(rows, cols, counts.into_iter().map(|c| c as f64 / total).collect()).expect("shape")
}
