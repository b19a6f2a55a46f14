//! Seeded generator of image sets with an exact number of modes.
//!
//! Each mode is a template made of three 2-D cosines. Image `i` is template
//! `i mod k` plus uniform integer noise. Template `t` depends only on the
//! seed and `t`, so the modes of a `k`-mode set are a prefix of the modes of
//! any larger set with the same seed.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::quantize;
use crate::inception::ProbMatrix;
use crate::{Error, GrayImage, Result};

pub const MAX_NOISE_AMP: u8 = 64;

/// Stream offset separating per-image noise from template streams.
const NOISE_STREAM_BASE: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimSpec {
    pub k_modes: usize,
    pub n_images: usize,
    pub side: usize,
    pub noise_amp: u8,
    pub seed: u64,
}

impl Default for SimSpec {
    fn default() -> Self {
        Self {
            k_modes: 1,
            n_images: 100,
            side: 128,
            noise_amp: 8,
            seed: 0,
        }
    }
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k_modes == 0 {
            return Err(Error::InvalidConfig("k_modes must be at least 1".into()));
        }
        if self.n_images < self.k_modes {
            return Err(Error::InvalidConfig(format!(
                "n_images ({}) must be at least k_modes ({})",
                self.n_images, self.k_modes
            )));
        }
        if self.side == 0 {
            return Err(Error::InvalidConfig("side must be at least 1".into()));
        }
        if self.noise_amp > MAX_NOISE_AMP {
            return Err(Error::InvalidConfig(format!(
                "noise_amp must be at most {MAX_NOISE_AMP}, got {}",
                self.noise_amp
            )));
        }
        Ok(())
    }

    /// Mode index of image `i`.
    #[inline]
    pub fn mode_of(&self, i: usize) -> usize {
        i % self.k_modes
    }
}

struct Wave {
    amp: f64,
    fx: f64,
    fy: f64,
    phase: f64,
}

fn template(seed: u64, t: usize, side: usize) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t as u64);
    let waves: Vec<Wave> = (0..3)
        .map(|_| {
            let sign = |rng: &mut ChaCha8Rng| if rng.random::<bool>() { 1.0 } else { -1.0 };
            Wave {
                amp: rng.random_range(20.0..40.0),
                fx: sign(&mut rng) * rng.random_range(0.5..4.0),
                fy: sign(&mut rng) * rng.random_range(0.5..4.0),
                phase: rng.random_range(0.0..2.0 * PI),
            }
        })
        .collect();
    let scale = 2.0 * PI / side as f64;
    GrayImage::from_fn(side, side, |x, y| {
        let v: f64 = waves
            .iter()
            .map(|w| w.amp * libm::cos(scale * (w.fx * x as f64 + w.fy * y as f64) + w.phase))
            .sum();
        quantize(127.5 + v)
    })
    .expect("side validated non-zero")
}

/// The `k_modes` noise-free templates.
pub fn templates(spec: &SimSpec) -> Result<Vec<GrayImage>> {
    spec.validate()?;
    Ok((0..spec.k_modes)
        .map(|t| template(spec.seed, t, spec.side))
        .collect())
}

/// Generates the `n_images` images of `spec`, in index order.
pub fn generate_modes(spec: &SimSpec) -> Result<Vec<GrayImage>> {
    let temps = templates(spec)?;
    Ok((0..spec.n_images)
        .map(|i| noisy_copy(spec, &temps[spec.mode_of(i)], i))
        .collect())
}

/// Image `i` of `spec`, given its template.
pub fn noisy_copy(spec: &SimSpec, template: &GrayImage, i: usize) -> GrayImage {
    if spec.noise_amp == 0 {
        return template.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(NOISE_STREAM_BASE + i as u64);
    let amp = spec.noise_amp as i32;
    let pixels = template
        .pixels()
        .iter()
        .map(|&v| (v as i32 + rng.random_range(-amp..=amp)).clamp(0, 255) as u8)
        .collect();
    GrayImage::new(template.width(), template.height(), pixels).expect("same dims as template")
}

/// Stand-in classifier: softmax over negative mean squared distance to each
/// template. Distances are in `[0, 1]` intensity units with temperature
/// `1/255²`, so the logits equal minus the MSE in 8-bit units.
pub fn oracle_probs(images: &[GrayImage], spec: &SimSpec) -> Result<ProbMatrix> {
    let temps = templates(spec)?;
    if images.len() != spec.n_images {
        return Err(Error::SpecMismatch(format!(
            "expected {} images, got {}",
            spec.n_images,
            images.len()
        )));
    }
    let mut values = Vec::with_capacity(images.len() * spec.k_modes);
    for (i, img) in images.iter().enumerate() {
        if img.width() != spec.side || img.height() != spec.side {
            return Err(Error::SpecMismatch(format!(
                "image {i} is {}x{}, expected {}x{}",
                img.width(),
                img.height(),
                spec.side,
                spec.side
            )));
        }
        let own = &temps[spec.mode_of(i)];
        let max_dev = img
            .pixels()
            .iter()
            .zip(own.pixels())
            .map(|(&a, &b)| a.abs_diff(b))
            .max()
            .unwrap_or(0);
        if max_dev > spec.noise_amp {
            return Err(Error::SpecMismatch(format!(
                "image {i} deviates from template {} by {max_dev} > noise_amp {}",
                spec.mode_of(i),
                spec.noise_amp
            )));
        }

        let logits: Vec<f64> = temps.iter().map(|t| -mse(img, t)).collect();
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|&l| libm::exp(l - max)).collect();
        let total: f64 = exps.iter().sum();
        values.extend(exps.iter().map(|e| e / total));
    }
    ProbMatrix::new(images.len(), spec.k_modes, values)
}

fn mse(a: &GrayImage, b: &GrayImage) -> f64 {
    let sum: f64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum();
    sum / a.pixels().len() as f64
}
