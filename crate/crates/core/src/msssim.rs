//! Multi-scale structural similarity and the dataset-level pair protocol.
//!
//! Local statistics use a normalized Gaussian window evaluated only where the
//! window fits entirely inside the image (no padding). Luminance enters at
//! the coarsest scale only; contrast and structure enter at every scale.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, GrayImage, Result};

/// Scale weights of the five-scale pyramid.
pub const DEFAULT_WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];

/// Pairs drawn per dataset by default.
pub const DEFAULT_PAIRS: usize = 670;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MsSsimParams {
    pub max_scales: usize,
    /// Per-scale exponent, finest first. Renormalized over the scales used.
    pub weights: Vec<f64>,
    pub window_side: usize,
    pub sigma: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Default for MsSsimParams {
    fn default() -> Self {
        let c2 = (0.03f64 * 255.0) * (0.03 * 255.0);
        Self {
            max_scales: 5,
            weights: DEFAULT_WEIGHTS.to_vec(),
            window_side: 11,
            sigma: 1.5,
            c1: (0.01f64 * 255.0) * (0.01 * 255.0),
            c2,
            c3: c2 / 2.0,
        }
    }
}

impl MsSsimParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.max_scales == 0 {
            return bad("max_scales must be at least 1");
        }
        if self.weights.len() < self.max_scales {
            return bad("need one weight per scale");
        }
        if self.weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return bad("scale weights must be positive");
        }
        if self.window_side % 2 == 0 {
            return bad("window side must be odd");
        }
        if self.sigma.is_nan() || self.sigma <= 0.0 {
            return bad("window sigma must be positive");
        }
        Ok(())
    }

    /// Number of pyramid levels whose smaller side still fits the window.
    pub fn effective_scales(&self, width: usize, height: usize) -> usize {
        let mut side = width.min(height);
        let mut scales = 0;
        while scales < self.max_scales && side >= self.window_side {
            scales += 1;
            side /= 2;
        }
        scales
    }

    /// Weights of the first `scales` levels rescaled to sum to one.
    pub fn normalized_weights(&self, scales: usize) -> Vec<f64> {
        let used = &self.weights[..scales];
        let total: f64 = used.iter().sum();
        used.iter().map(|w| w / total).collect()
    }

    fn kernel(&self) -> Vec<f64> {
        let r = (self.window_side / 2) as f64;
        let mut k: Vec<f64> = (0..self.window_side)
            .map(|i| {
                let d = i as f64 - r;
                libm::exp(-(d * d) / (2.0 * self.sigma * self.sigma))
            })
            .collect();
        let sum: f64 = k.iter().sum();
        k.iter_mut().for_each(|v| *v /= sum);
        k
    }
}

/// Mean luminance, contrast and structure terms at one scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleComponents {
    pub luminance: f64,
    pub contrast: f64,
    pub structure: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    fn from_image(img: &GrayImage) -> Self {
        Self {
            width: img.width(),
            height: img.height(),
            data: img.pixels().iter().map(|&v| v as f64).collect(),
        }
    }

    fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Separable valid-region convolution with `kernel`.
    fn filter_valid(&self, kernel: &[f64]) -> Plane {
        let k = kernel.len();
        let out_w = self.width + 1 - k;
        let out_h = self.height + 1 - k;
        let mut horiz = vec![0.0; out_w * self.height];
        for y in 0..self.height {
            let row = &self.data[y * self.width..(y + 1) * self.width];
            for x in 0..out_w {
                let mut acc = 0.0;
                for (i, &kv) in kernel.iter().enumerate() {
                    acc += kv * row[x + i];
                }
                horiz[y * out_w + x] = acc;
            }
        }
        let mut data = vec![0.0; out_w * out_h];
        for y in 0..out_h {
            for x in 0..out_w {
                let mut acc = 0.0;
                for (i, &kv) in kernel.iter().enumerate() {
                    acc += kv * horiz[(y + i) * out_w + x];
                }
                data[y * out_w + x] = acc;
            }
        }
        Plane {
            width: out_w,
            height: out_h,
            data,
        }
    }

    /// 2x2 box average followed by decimation; odd trailing rows/columns
    /// are dropped.
    fn downsample(&self) -> Plane {
        let w = self.width / 2;
        let h = self.height / 2;
        let mut data = Vec::with_capacity(w * h);
        for y in 0..h {
            let r0 = 2 * y * self.width;
            let r1 = r0 + self.width;
            for x in 0..w {
                let s = self.data[r0 + 2 * x]
                    + self.data[r0 + 2 * x + 1]
                    + self.data[r1 + 2 * x]
                    + self.data[r1 + 2 * x + 1];
                data.push(s / 4.0);
            }
        }
        Plane {
            width: w,
            height: h,
            data,
        }
    }
}

fn components(x: &Plane, y: &Plane, params: &MsSsimParams, kernel: &[f64]) -> ScaleComponents {
    let mu_x = x.filter_valid(kernel);
    let mu_y = y.filter_valid(kernel);
    let xx = x.zip_map(x, |a, b| a * b).filter_valid(kernel);
    let yy = y.zip_map(y, |a, b| a * b).filter_valid(kernel);
    let xy = x.zip_map(y, |a, b| a * b).filter_valid(kernel);

    let (c1, c2, c3) = (params.c1, params.c2, params.c3);
    let (mut l_sum, mut c_sum, mut s_sum) = (0.0, 0.0, 0.0);
    for i in 0..mu_x.data.len() {
        let mx = mu_x.data[i];
        let my = mu_y.data[i];
        let vx = (xx.data[i] - mx * mx).max(0.0);
        let vy = (yy.data[i] - my * my).max(0.0);
        let cov = xy.data[i] - mx * my;
        let sx = libm::sqrt(vx);
        let sy = libm::sqrt(vy);
        l_sum += (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
        c_sum += (2.0 * sx * sy + c2) / (vx + vy + c2);
        s_sum += (cov + c3) / (sx * sy + c3);
    }
    let n = mu_x.data.len() as f64;
    ScaleComponents {
        luminance: l_sum / n,
        contrast: c_sum / n,
        structure: s_sum / n,
    }
}

fn check_pair(x: &GrayImage, y: &GrayImage, params: &MsSsimParams) -> Result<()> {
    params.validate()?;
    x.check_same_dims(y)?;
    if x.width().min(x.height()) < params.window_side {
        return Err(Error::ImageTooSmall {
            width: x.width(),
            height: x.height(),
            required: params.window_side,
        });
    }
    Ok(())
}

/// Single-scale luminance, contrast and structure, each averaged over the
/// valid window positions.
pub fn ssim_scale(x: &GrayImage, y: &GrayImage, params: &MsSsimParams) -> Result<ScaleComponents> {
    check_pair(x, y, params)?;
    Ok(components(
        &Plane::from_image(x),
        &Plane::from_image(y),
        params,
        &params.kernel(),
    ))
}

/// Per-scale components for every pyramid level used by [`msssim`],
/// finest first.
pub fn msssim_components(
    x: &GrayImage,
    y: &GrayImage,
    params: &MsSsimParams,
) -> Result<Vec<ScaleComponents>> {
    check_pair(x, y, params)?;
    let scales = params.effective_scales(x.width(), x.height());
    let kernel = params.kernel();
    let mut px = Plane::from_image(x);
    let mut py = Plane::from_image(y);
    let mut out = Vec::with_capacity(scales);
    for j in 0..scales {
        if j > 0 {
            px = px.downsample();
            py = py.downsample();
        }
        out.push(components(&px, &py, params, &kernel));
    }
    Ok(out)
}

/// MS-SSIM of two equally sized images, in `[0, 1]`.
pub fn msssim(x: &GrayImage, y: &GrayImage, params: &MsSsimParams) -> Result<f64> {
    let comps = msssim_components(x, y, params)?;
    let weights = params.normalized_weights(comps.len());
    let coarsest = comps.len() - 1;
    let mut score = libm::pow(comps[coarsest].luminance, weights[coarsest]);
    for (c, &w) in comps.iter().zip(&weights) {
        let cs = (c.contrast * c.structure).max(0.0);
        score *= libm::pow(cs, w);
    }
    Ok(score)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairSamplingSpec {
    pub n_pairs: usize,
    pub seed: u64,
}

impl Default for PairSamplingSpec {
    fn default() -> Self {
        Self {
            n_pairs: DEFAULT_PAIRS,
            seed: 0,
        }
    }
}

/// Draws `spec.n_pairs` index pairs `(i, j)`, `i != j`, uniformly from
/// `0..n_images`. Pairs may repeat.
pub fn sample_pairs(n_images: usize, spec: &PairSamplingSpec) -> Result<Vec<(usize, usize)>> {
    if n_images < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            actual: n_images,
        });
    }
    if spec.n_pairs == 0 {
        return Err(Error::InvalidConfig("n_pairs must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok((0..spec.n_pairs)
        .map(|_| {
            let i = rng.random_range(0..n_images);
            let mut j = rng.random_range(0..n_images - 1);
            if j >= i {
                j += 1;
            }
            (i, j)
        })
        .collect())
}

/// Per-pair MS-SSIM scores of a dataset and their mean.
#[derive(Debug, Clone, PartialEq)]
pub struct PairScores {
    pub pairs: Vec<(usize, usize)>,
    pub scores: Vec<f64>,
    pub mean: f64,
}

impl PairScores {
    /// Assembles scores computed elsewhere; the mean is accumulated in pair
    /// order.
    pub fn from_scores(pairs: Vec<(usize, usize)>, scores: Vec<f64>) -> Self {
        let mean = scores.iter().sum::<f64>() / scores.len() as f64;
        Self {
            pairs,
            scores,
            mean,
        }
    }
}

/// Mean MS-SSIM over seeded random pairs of `images`.
pub fn dataset_msssim(
    images: &[GrayImage],
    spec: &PairSamplingSpec,
    params: &MsSsimParams,
) -> Result<PairScores> {
    let pairs = sample_pairs(images.len(), spec)?;
    let scores = pairs
        .iter()
        .map(|&(i, j)| msssim(&images[i], &images[j], params))
        .collect::<Result<Vec<_>>>()?;
    Ok(PairScores::from_scores(pairs, scores))
}
