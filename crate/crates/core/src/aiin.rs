//! Adaptive input-image normalization.
//!
//! The image is split into a `grid_n x grid_n` grid of non-overlapping tiles.
//! Each tile's histogram is clipped at a contrast limit, the excess is
//! redistributed, and the clipped histogram becomes a 256-entry lookup table.
//! Output pixels blend the lookup tables of the four nearest tile centres
//! bilinearly, clamping to edge and corner tables outside the outermost
//! centres.

use alloc::format;
use alloc::vec::Vec;

use crate::image::quantize;
use crate::{Error, GrayImage, Result};

/// How per-tile lookup tables are combined into the output image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Interpolation {
    /// Four-neighbour bilinear blend of tile-centre mappings.
    #[default]
    BilinearStitch,
    /// Every pixel uses only the mapping of the tile containing it.
    PerTileHard,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AiinConfig {
    /// Tiles per axis.
    pub grid_n: usize,
    /// Clip limit relative to a flat histogram; `0` disables clipping.
    pub contrast_threshold: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub interpolation: Interpolation,
}

impl Default for AiinConfig {
    fn default() -> Self {
        Self {
            grid_n: 8,
            contrast_threshold: 20.0,
            interpolation: Interpolation::BilinearStitch,
        }
    }
}

impl AiinConfig {
    pub fn new(grid_n: usize, contrast_threshold: f64) -> Self {
        Self {
            grid_n,
            contrast_threshold,
            interpolation: Interpolation::BilinearStitch,
        }
    }

    pub fn with_interpolation(mut self, interpolation: Interpolation) -> Self {
        self.interpolation = interpolation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_n == 0 {
            return Err(Error::InvalidConfig("grid_n must be at least 1".into()));
        }
        if self.contrast_threshold.is_nan() || self.contrast_threshold < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "contrast threshold must be non-negative, got {}",
                self.contrast_threshold
            )));
        }
        Ok(())
    }
}

/// Equalization mapping of one tile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileMapping {
    pub row: usize,
    pub col: usize,
    pub lut: [u8; 256],
}

/// Per-bin clip limit for a tile of `tile_area` pixels, `None` when clipping
/// is disabled or can never bind.
fn clip_limit(threshold: f64, tile_area: u64) -> Option<u64> {
    if threshold == 0.0 {
        return None;
    }
    let raw = libm::floor(threshold * tile_area as f64 / 256.0);
    if raw >= tile_area as f64 {
        return None;
    }
    Some((raw as u64).max(1))
}

/// Clips every bin at the contrast limit and spreads the excess uniformly.
///
/// The remainder of the integer division goes one count per bin starting at
/// bin 0. A single pass; bins may exceed the limit again after redistribution.
pub fn clip_histogram(hist: &[u64; 256], threshold: f64, tile_area: u64) -> Result<[u64; 256]> {
    let total: u64 = hist.iter().sum();
    if total != tile_area {
        return Err(Error::HistogramSum {
            expected: tile_area,
            actual: total,
        });
    }
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "contrast threshold must be non-negative, got {threshold}"
        )));
    }
    let Some(limit) = clip_limit(threshold, tile_area) else {
        return Ok(*hist);
    };

    let mut out = *hist;
    let mut excess = 0u64;
    for bin in out.iter_mut() {
        if *bin > limit {
            excess += *bin - limit;
            *bin = limit;
        }
    }
    let share = excess / 256;
    let remainder = (excess % 256) as usize;
    for (i, bin) in out.iter_mut().enumerate() {
        *bin += share + u64::from(i < remainder);
    }
    Ok(out)
}

/// Identity lookup table.
pub fn identity_lut() -> [u8; 256] {
    core::array::from_fn(|v| v as u8)
}

/// Histogram-equalization lookup table from a (clipped) histogram.
pub fn tile_lut(hist: &[u64; 256], tile_area: u64) -> Result<[u8; 256]> {
    let total: u64 = hist.iter().sum();
    if tile_area == 0 || total != tile_area {
        return Err(Error::HistogramSum {
            expected: tile_area,
            actual: total,
        });
    }
    let cdf_min = hist.iter().copied().find(|&c| c > 0).unwrap_or(0);
    if cdf_min == tile_area {
        return Ok(identity_lut());
    }
    let span = (tile_area - cdf_min) as f64;
    let mut lut = [0u8; 256];
    let mut cdf = 0u64;
    for (v, &count) in hist.iter().enumerate() {
        cdf += count;
        let scaled = (cdf.saturating_sub(cdf_min)) as f64 / span * 255.0;
        lut[v] = quantize(scaled);
    }
    Ok(lut)
}

/// Start and end (exclusive) of tile `index` along an axis of `len` pixels.
/// The last tile absorbs the remainder.
#[inline]
pub(crate) fn tile_span(len: usize, tiles: usize, index: usize) -> (usize, usize) {
    let size = len / tiles;
    let start = index * size;
    let end = if index + 1 == tiles {
        len
    } else {
        start + size
    };
    (start, end)
}

fn check_fits(img: &GrayImage, cfg: &AiinConfig) -> Result<()> {
    cfg.validate()?;
    if img.width() < cfg.grid_n || img.height() < cfg.grid_n {
        return Err(Error::ImageTooSmall {
            width: img.width(),
            height: img.height(),
            required: cfg.grid_n,
        });
    }
    Ok(())
}

/// Computes the clipped-equalization mapping of every tile, row-major.
///
/// Tiles whose pixels all share one intensity map through the identity.
pub fn tile_mappings(img: &GrayImage, cfg: &AiinConfig) -> Result<Vec<TileMapping>> {
    check_fits(img, cfg)?;
    let n = cfg.grid_n;
    let mut out = Vec::with_capacity(n * n);
    for row in 0..n {
        let (y0, y1) = tile_span(img.height(), n, row);
        for col in 0..n {
            let (x0, x1) = tile_span(img.width(), n, col);
            let area = ((x1 - x0) * (y1 - y0)) as u64;
            let hist = img.histogram(x0, x1, y0, y1);
            let lut = if hist.contains(&area) {
                identity_lut()
            } else {
                let clipped = clip_histogram(&hist, cfg.contrast_threshold, area)?;
                tile_lut(&clipped, area)?
            };
            out.push(TileMapping { row, col, lut });
        }
    }
    Ok(out)
}

/// Per-pixel blend coordinates along one axis: `(lower tile, upper tile,
/// weight of upper)`.
fn blend_axis(len: usize, tiles: usize) -> Vec<(usize, usize, f64)> {
    let centres: Vec<f64> = (0..tiles)
        .map(|t| {
            let (s, e) = tile_span(len, tiles, t);
            (s + e - 1) as f64 / 2.0
        })
        .collect();
    let last = tiles - 1;
    let mut seg = 0;
    (0..len)
        .map(|p| {
            let pos = p as f64;
            if pos <= centres[0] {
                (0, 0, 0.0)
            } else if pos >= centres[last] {
                (last, last, 0.0)
            } else {
                while centres[seg + 1] <= pos {
                    seg += 1;
                }
                let f = (pos - centres[seg]) / (centres[seg + 1] - centres[seg]);
                (seg, seg + 1, f)
            }
        })
        .collect()
}

/// Normalizes one image. Output has the input's dimensions.
pub fn aiin_normalize(img: &GrayImage, cfg: &AiinConfig) -> Result<GrayImage> {
    let maps = tile_mappings(img, cfg)?;
    let n = cfg.grid_n;
    let lut = |row: usize, col: usize| &maps[row * n + col].lut;
    let (w, h) = (img.width(), img.height());
    let mut pixels = Vec::with_capacity(w * h);

    match cfg.interpolation {
        Interpolation::PerTileHard => {
            let tile_w = w / n;
            let tile_h = h / n;
            for y in 0..h {
                let row = (y / tile_h).min(n - 1);
                for x in 0..w {
                    let col = (x / tile_w).min(n - 1);
                    pixels.push(lut(row, col)[img.get(x, y) as usize]);
                }
            }
        }
        Interpolation::BilinearStitch => {
            let xs = blend_axis(w, n);
            let ys = blend_axis(h, n);
            for (y, &(r0, r1, fy)) in ys.iter().enumerate() {
                for (x, &(c0, c1, fx)) in xs.iter().enumerate() {
                    let v = img.get(x, y) as usize;
                    let a = lut(r0, c0)[v] as f64;
                    let b = lut(r0, c1)[v] as f64;
                    let c = lut(r1, c0)[v] as f64;
                    let d = lut(r1, c1)[v] as f64;
                    let top = (1.0 - fx) * a + fx * b;
                    let bottom = (1.0 - fx) * c + fx * d;
                    pixels.push(quantize((1.0 - fy) * top + fy * bottom));
                }
            }
        }
    }
    GrayImage::new(w, h, pixels)
}
