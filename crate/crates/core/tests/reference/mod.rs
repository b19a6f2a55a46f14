//! Straight-line reference implementations used as test oracles.
//!
//! Written without touching the library's internals: plain loops over raw
//! pixel buffers, direct 2-D windows instead of separable filters, and
//! nalgebra for eigendecompositions.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn seeded_pixels(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random()).collect()
}

fn round_clamp(v: f64) -> u8 {
    let r = v.round();
    if r < 0.0 {
        0
    } else if r > 255.0 {
        255
    } else {
        r as u8
    }
}

/// Global histogram equalization by brute-force counting.
pub fn global_he(px: &[u8]) -> Vec<u8> {
    let n = px.len();
    let cdf = |v: u8| px.iter().filter(|&&p| p <= v).count();
    let cdf_min = px.iter().map(|&p| cdf(p)).min().unwrap();
    if cdf_min == n {
        return px.to_vec();
    }
    px.iter()
        .map(|&p| round_clamp((cdf(p) - cdf_min) as f64 / (n - cdf_min) as f64 * 255.0))
        .collect()
}

/// Tile-and-stitch contrast-limited equalization, computed pixel by pixel.
pub fn clahe(w: usize, h: usize, px: &[u8], n: usize, threshold: f64) -> Vec<u8> {
    let bounds = |len: usize, t: usize| {
        let size = len / n;
        let lo = t * size;
        let hi = if t == n - 1 { len } else { lo + size };
        (lo, hi)
    };

    let mut luts = vec![[0u8; 256]; n * n];
    for ty in 0..n {
        for tx in 0..n {
            let (x0, x1) = bounds(w, tx);
            let (y0, y1) = bounds(h, ty);
            let area = (x1 - x0) * (y1 - y0);
            let mut hist = [0usize; 256];
            for y in y0..y1 {
                for x in x0..x1 {
                    hist[px[y * w + x] as usize] += 1;
                }
            }
            let lut = &mut luts[ty * n + tx];
            if hist.contains(&area) {
                for v in 0..256 {
                    lut[v] = v as u8;
                }
                continue;
            }
            if threshold > 0.0 {
                let limit = ((threshold * area as f64 / 256.0).floor() as usize).max(1);
                if limit < area {
                    let mut excess = 0;
                    for b in hist.iter_mut() {
                        if *b > limit {
                            excess += *b - limit;
                            *b = limit;
                        }
                    }
                    for (i, b) in hist.iter_mut().enumerate() {
                        *b += excess / 256;
                        if i < excess % 256 {
                            *b += 1;
                        }
                    }
                }
            }
            let mut cdf = [0usize; 256];
            let mut acc = 0;
            for v in 0..256 {
                acc += hist[v];
                cdf[v] = acc;
            }
            let cdf_min = *cdf.iter().find(|&&c| c > 0).unwrap();
            for v in 0..256 {
                let num = cdf[v].saturating_sub(cdf_min) as f64;
                lut[v] = round_clamp(num / (area - cdf_min) as f64 * 255.0);
            }
        }
    }

    let centre = |len: usize, t: usize| {
        let (lo, hi) = bounds(len, t);
        (lo + hi - 1) as f64 / 2.0
    };
    let locate = |len: usize, p: usize| -> (usize, usize, f64) {
        let p = p as f64;
        if p <= centre(len, 0) {
            return (0, 0, 0.0);
        }
        if p >= centre(len, n - 1) {
            return (n - 1, n - 1, 0.0);
        }
        for t in 0..n - 1 {
            let (a, b) = (centre(len, t), centre(len, t + 1));
            if p >= a && p < b {
                return (t, t + 1, (p - a) / (b - a));
            }
        }
        unreachable!()
    };

    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        let (r0, r1, fy) = locate(h, y);
        for x in 0..w {
            let (c0, c1, fx) = locate(w, x);
            let v = px[y * w + x] as usize;
            let a = luts[r0 * n + c0][v] as f64;
            let b = luts[r0 * n + c1][v] as f64;
            let c = luts[r1 * n + c0][v] as f64;
            let d = luts[r1 * n + c1][v] as f64;
            let top = (1.0 - fx) * a + fx * b;
            let bottom = (1.0 - fx) * c + fx * d;
            out.push(round_clamp((1.0 - fy) * top + fy * bottom));
        }
    }
    out
}

pub struct Components {
    pub l: f64,
    pub c: f64,
    pub s: f64,
}

/// Single-scale SSIM terms with a direct 11x11 Gaussian window.
pub fn ssim_terms(w: usize, h: usize, x: &[f64], y: &[f64]) -> Components {
    const SIDE: usize = 11;
    let sigma = 1.5f64;
    let mut win = [[0.0f64; SIDE]; SIDE];
    let mut total = 0.0;
    for (i, row) in win.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let di = i as f64 - 5.0;
            let dj = j as f64 - 5.0;
            *v = (-(di * di + dj * dj) / (2.0 * sigma * sigma)).exp();
            total += *v;
        }
    }
    let c1 = (0.01f64 * 255.0).powi(2);
    let c2 = (0.03f64 * 255.0).powi(2);
    let c3 = c2 / 2.0;

    let (mut ls, mut cs, mut ss, mut count) = (0.0, 0.0, 0.0, 0.0);
    for oy in 0..=h - SIDE {
        for ox in 0..=w - SIDE {
            let (mut mx, mut my, mut xx, mut yy, mut xy) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for i in 0..SIDE {
                for j in 0..SIDE {
                    let wt = win[i][j] / total;
                    let a = x[(oy + i) * w + ox + j];
                    let b = y[(oy + i) * w + ox + j];
                    mx += wt * a;
                    my += wt * b;
                    xx += wt * a * a;
                    yy += wt * b * b;
                    xy += wt * a * b;
                }
            }
            let vx = (xx - mx * mx).max(0.0);
            let vy = (yy - my * my).max(0.0);
            let cov = xy - mx * my;
            ls += (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
            cs += (2.0 * (vx * vy).sqrt() + c2) / (vx + vy + c2);
            ss += (cov + c3) / ((vx * vy).sqrt() + c3);
            count += 1.0;
        }
    }
    Components {
        l: ls / count,
        c: cs / count,
        s: ss / count,
    }
}

fn halve(w: usize, h: usize, p: &[f64]) -> (usize, usize, Vec<f64>) {
    let (nw, nh) = (w / 2, h / 2);
    let mut out = vec![0.0; nw * nh];
    for y in 0..nh {
        for x in 0..nw {
            out[y * nw + x] = (p[2 * y * w + 2 * x]
                + p[2 * y * w + 2 * x + 1]
                + p[(2 * y + 1) * w + 2 * x]
                + p[(2 * y + 1) * w + 2 * x + 1])
                / 4.0;
        }
    }
    (nw, nh, out)
}

/// Five-weight MS-SSIM over as many scales as fit an 11-pixel window.
pub fn msssim(w: usize, h: usize, x: &[u8], y: &[u8]) -> f64 {
    let weights = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];
    let mut scales = 0;
    let mut side = w.min(h);
    while scales < 5 && side >= 11 {
        scales += 1;
        side /= 2;
    }
    let wsum: f64 = weights[..scales].iter().sum();

    let mut cur = (
        w,
        h,
        x.iter().map(|&v| v as f64).collect::<Vec<_>>(),
        y.iter().map(|&v| v as f64).collect::<Vec<_>>(),
    );
    let mut result = 1.0;
    for j in 0..scales {
        if j > 0 {
            let (nw, nh, nx) = halve(cur.0, cur.1, &cur.2);
            let (_, _, ny) = halve(cur.0, cur.1, &cur.3);
            cur = (nw, nh, nx, ny);
        }
        let t = ssim_terms(cur.0, cur.1, &cur.2, &cur.3);
        let wj = weights[j] / wsum;
        result *= (t.c * t.s).max(0.0).powf(wj);
        if j == scales - 1 {
            result *= t.l.powf(wj);
        }
    }
    result
}

/// Fréchet distance via nalgebra eigendecompositions.
pub fn frechet(
    mean_a: &[f64],
    cov_a: &nalgebra::DMatrix<f64>,
    mean_b: &[f64],
    cov_b: &nalgebra::DMatrix<f64>,
) -> f64 {
    let sqrt_psd = |m: &nalgebra::DMatrix<f64>| {
        let e = m.clone().symmetric_eigen();
        let d = nalgebra::DMatrix::from_diagonal(&e.eigenvalues.map(|v| v.max(0.0).sqrt()));
        &e.eigenvectors * d * e.eigenvectors.transpose()
    };
    let ra = sqrt_psd(cov_a);
    let inner = &ra * cov_b * &ra;
    let inner = (&inner + inner.transpose()) * 0.5;
    let tr_sqrt: f64 = inner
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .sum();
    let mean_term: f64 = mean_a
        .iter()
        .zip(mean_b)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    (mean_term + cov_a.trace() + cov_b.trace() - 2.0 * tr_sqrt).max(0.0)
}

/// Textbook two-pass sample covariance of row-major `n x d` data.
pub fn covariance(n: usize, d: usize, data: &[f64]) -> (Vec<f64>, nalgebra::DMatrix<f64>) {
    let mut mean = vec![0.0; d];
    for r in 0..n {
        for c in 0..d {
            mean[c] += data[r * d + c];
        }
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }
    let mut cov = nalgebra::DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut s = 0.0;
            for r in 0..n {
                s += (data[r * d + i] - mean[i]) * (data[r * d + j] - mean[j]);
            }
            cov[(i, j)] = s / (n as f64 - 1.0);
        }
    }
    (mean, cov)
}

/// Random symmetric PSD matrix `A Aᵀ` with entries of `A` in `[-1, 1]`,
/// rank possibly deficient.
pub fn random_psd(d: usize, rank: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let a: Vec<f64> = (0..d * rank).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut s = 0.0;
            for k in 0..rank {
                s += a[i * rank + k] * a[j * rank + k];
            }
            m[i * d + j] = s;
        }
    }
    m
}
