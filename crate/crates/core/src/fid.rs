//! Fréchet distance between Gaussians fitted to feature activations.
//!
//! `d² = ‖μa − μb‖² + Tr(Σa + Σb − 2 (√Σa Σb √Σa)^½)`. The inner product is
//! taken in its symmetric form so every root is of a symmetric PSD matrix.

use alloc::vec;
use alloc::vec::Vec;

use crate::aiin::tile_span;
use crate::linalg::{clamp_psd, matrix_sqrt_psd, symmetric_eigen, SquareMatrix};
use crate::{Error, GrayImage, Result};

/// Side of the block-averaged thumbnail used by [`pixel_features`].
pub const PIXEL_FEATURE_SIDE: usize = 8;

/// `n x d` activations, one row per image.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * d {
            return Err(Error::PixelCount {
                expected: n * d,
                actual: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / d,
                col: pos % d,
            });
        }
        Ok(Self { n, d, values })
    }

    /// Stacks equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * d);
        for row in rows {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::FeatureDimMismatch {
                    left: d,
                    right: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(rows.len(), d, values)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.d.max(1)).take(self.n)
    }
}

/// Mean and covariance of a feature set.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStats {
    pub mean: Vec<f64>,
    pub cov: SquareMatrix,
}

impl GaussianStats {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Column means and unbiased (`n − 1`) covariance, symmetrized.
pub fn fit_gaussian(f: &FeatureMatrix) -> Result<GaussianStats> {
    if f.n() < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            actual: f.n(),
        });
    }
    let d = f.d();
    let mut mean = vec![0.0; d];
    for row in f.rows() {
        for (m, &v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    let n = f.n() as f64;
    mean.iter_mut().for_each(|m| *m /= n);

    let mut cov = SquareMatrix::zeros(d);
    let mut centred = vec![0.0; d];
    for row in f.rows() {
        for ((c, &v), &m) in centred.iter_mut().zip(row).zip(&mean) {
            *c = v - m;
        }
        for i in 0..d {
            let ci = centred[i];
            for j in i..d {
                cov[(i, j)] += ci * centred[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let v = cov[(i, j)] / (n - 1.0);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    Ok(GaussianStats { mean, cov })
}

/// `Tr((√A B √A)^½)`, with eigenvalues of the product clamped at zero.
fn trace_sqrt_product(a: &SquareMatrix, b: &SquareMatrix) -> Result<f64> {
    let root_a = matrix_sqrt_psd(a)?;
    let inner = root_a.matmul(b).matmul(&root_a).symmetrized();
    let mut values = symmetric_eigen(&inner)?.values;
    clamp_psd(&mut values)?;
    Ok(values.iter().map(|&v| libm::sqrt(v)).sum())
}

/// Fréchet (2-Wasserstein) distance between two Gaussians, clamped at 0.
pub fn frechet_distance(a: &GaussianStats, b: &GaussianStats) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::FeatureDimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let mean_term: f64 = a
        .mean
        .iter()
        .zip(&b.mean)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    let cross = trace_sqrt_product(&a.cov, &b.cov)?;
    let d = mean_term + a.cov.trace() + b.cov.trace() - 2.0 * cross;
    Ok(d.max(0.0))
}

/// FID between two activation sets.
pub fn fid_score(real: &FeatureMatrix, synth: &FeatureMatrix) -> Result<f64> {
    if real.d() != synth.d() {
        return Err(Error::FeatureDimMismatch {
            left: real.d(),
            right: synth.d(),
        });
    }
    frechet_distance(&fit_gaussian(real)?, &fit_gaussian(synth)?)
}

/// 64-d intensity thumbnail: block-average to 8x8, scale to `[0, 1]`.
///
/// Blocks follow the same partition as the normalization tiles; images
/// narrower than 8 pixels repeat their last column/row.
pub fn pixel_features(img: &GrayImage) -> Vec<f64> {
    let side = PIXEL_FEATURE_SIDE;
    let span = |len: usize, i: usize| {
        if len >= side {
            tile_span(len, side, i)
        } else {
            let p = (i * len / side).min(len - 1);
            (p, p + 1)
        }
    };
    let mut out = Vec::with_capacity(side * side);
    for by in 0..side {
        let (y0, y1) = span(img.height(), by);
        for bx in 0..side {
            let (x0, x1) = span(img.width(), bx);
            let mut sum = 0u64;
            for y in y0..y1 {
                for x in x0..x1 {
                    sum += img.get(x, y) as u64;
                }
            }
            let count = ((x1 - x0) * (y1 - y0)) as f64;
            out.push(sum as f64 / count / 255.0);
        }
    }
    out
}

/// Pixel features of every image, stacked.
pub fn pixel_feature_matrix(images: &[GrayImage]) -> Result<FeatureMatrix> {
    let rows: Vec<Vec<f64>> = images.iter().map(pixel_features).collect();
    if rows.is_empty() {
        return FeatureMatrix::new(0, PIXEL_FEATURE_SIDE * PIXEL_FEATURE_SIDE, Vec::new());
    }
    FeatureMatrix::from_rows(&rows)
}
