//! Inception Score over class-probability rows.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Tolerance on each probability row summing to one.
pub const ROW_SUM_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_EPSILON: f64 = 1e-12;
pub const DEFAULT_SPLITS: usize = 10;

/// `n x k` matrix of per-image class probabilities `p(y|x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbMatrix {
    n: usize,
    k: usize,
    values: Vec<f64>,
}

impl ProbMatrix {
    /// Validates entries in `[0, 1]` and unit row sums.
    pub fn new(n: usize, k: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::TooFewSamples {
                required: 1,
                actual: n.min(k),
            });
        }
        if values.len() != n * k {
            return Err(Error::PixelCount {
                expected: n * k,
                actual: values.len(),
            });
        }
        for (row, chunk) in values.chunks_exact(k).enumerate() {
            if let Some(bad) = chunk
                .iter()
                .find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0)
            {
                return Err(Error::InvalidProbRow {
                    row,
                    reason: format!("entry {bad} outside [0, 1]"),
                });
            }
            let sum: f64 = chunk.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::InvalidProbRow {
                    row,
                    reason: format!("row sums to {sum}"),
                });
            }
        }
        Ok(Self { n, k, values })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let k = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * k);
        for (i, row) in rows.iter().enumerate() {
            if row.as_ref().len() != k {
                return Err(Error::InvalidProbRow {
                    row: i,
                    reason: format!("has {} classes, expected {k}", row.as_ref().len()),
                });
            }
            values.extend_from_slice(row.as_ref());
        }
        Self::new(rows.len(), k, values)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.k..(i + 1) * self.k]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IsResult {
    pub mean: f64,
    /// Population standard deviation over splits.
    pub std: f64,
    pub n_splits: usize,
}

fn block_score(p: &ProbMatrix, rows: core::ops::Range<usize>, epsilon: f64) -> f64 {
    let k = p.k();
    let count = rows.len() as f64;
    let mut marginal = vec![0.0; k];
    for i in rows.clone() {
        for (m, &v) in marginal.iter_mut().zip(p.row(i)) {
            *m += v;
        }
    }
    marginal.iter_mut().for_each(|m| *m /= count);

    let mut kl_sum = 0.0;
    for i in rows {
        let mut kl = 0.0;
        for (&py_x, &py) in p.row(i).iter().zip(&marginal) {
            if py_x > 0.0 {
                kl += py_x * libm::log((py_x + epsilon) / (py + epsilon));
            }
        }
        kl_sum += kl;
    }
    libm::exp(kl_sum / count)
}

/// `exp(E_x KL(p(y|x) ‖ p(y)))` per contiguous split; mean and std over
/// splits. The last split takes the remainder rows.
pub fn inception_score(p: &ProbMatrix, n_splits: usize, epsilon: f64) -> Result<IsResult> {
    if n_splits == 0 {
        return Err(Error::InvalidConfig("n_splits must be at least 1".into()));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidConfig("epsilon must be positive".into()));
    }
    if p.n() < n_splits {
        return Err(Error::TooFewSamples {
            required: n_splits,
            actual: p.n(),
        });
    }
    let size = p.n() / n_splits;
    let scores: Vec<f64> = (0..n_splits)
        .map(|s| {
            let start = s * size;
            let end = if s + 1 == n_splits {
                p.n()
            } else {
                start + size
            };
            block_score(p, start..end, epsilon)
        })
        .collect();
    let m = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / m;
    let var = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / m;
    Ok(IsResult {
        mean,
        std: libm::sqrt(var),
        n_splits,
    })
}

/// Entropy form `exp(H(p(y)) − E_x H(p(y|x)))` over all rows as one split,
/// without smoothing.
pub fn inception_score_entropy_form(p: &ProbMatrix) -> f64 {
    let entropy = |row: &[f64]| -> f64 {
        row.iter()
            .filter(|&&v| v > 0.0)
            .map(|&v| -v * libm::log(v))
            .sum()
    };
    let n = p.n() as f64;
    let mut marginal = vec![0.0; p.k()];
    let mut cond = 0.0;
    for i in 0..p.n() {
        let row = p.row(i);
        for (m, &v) in marginal.iter_mut().zip(row) {
            *m += v;
        }
        cond += entropy(row);
    }
    marginal.iter_mut().for_each(|m| *m /= n);
    libm::exp(entropy(&marginal) - cond / n)
}
