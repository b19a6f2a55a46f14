//! Parallel dataset-level metric drivers.

use diverscope_core::fid::{fid_score, pixel_features, FeatureMatrix};
use diverscope_core::msssim::{msssim, sample_pairs, MsSsimParams, PairSamplingSpec, PairScores};
use diverscope_core::GrayImage;
use rayon::prelude::*;

use crate::Result;

/// Mean MS-SSIM over seeded random pairs.
///
/// Pairs are drawn sequentially from the seed, scored in parallel and
/// averaged in pair order.
pub fn dataset_msssim(
    images: &[GrayImage],
    spec: &PairSamplingSpec,
    params: &MsSsimParams,
) -> Result<PairScores> {
    let pairs = sample_pairs(images.len(), spec)?;
    let scores = pairs
        .par_iter()
        .map(|&(i, j)| msssim(&images[i], &images[j], params))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PairScores::from_scores(pairs, scores))
}

pub fn pixel_feature_matrix(images: &[GrayImage]) -> Result<FeatureMatrix> {
    let rows: Vec<Vec<f64>> = images.par_iter().map(pixel_features).collect();
    if rows.is_empty() {
        return Ok(FeatureMatrix::new(0, 64, Vec::new())?);
    }
    Ok(FeatureMatrix::from_rows(&rows)?)
}

/// FID between two image sets using the built-in pixel features.
pub fn pixel_fid(real: &[GrayImage], synth: &[GrayImage]) -> Result<f64> {
    Ok(fid_score(
        &pixel_feature_matrix(real)?,
        &pixel_feature_matrix(synth)?,
    )?)
}
