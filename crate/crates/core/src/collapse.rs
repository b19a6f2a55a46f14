//! Mode-collapse decision rules.
//!
//! Intra-class collapse: synthetic MS-SSIM above the real set's.
//! Inter-class collapse: synthetic Inception Score below the real set's.
//! Equal scores are not collapse.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum CollapseMetric {
    MsSsim,
    InceptionScore,
}

impl CollapseMetric {
    pub fn name(self) -> &'static str {
        match self {
            CollapseMetric::MsSsim => "ms-ssim",
            CollapseMetric::InceptionScore => "inception-score",
        }
    }
}

impl core::fmt::Display for CollapseMetric {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CollapseReport {
    pub metric: CollapseMetric,
    pub real_score: f64,
    pub synthetic_score: f64,
    /// `synthetic_score - real_score`.
    pub delta: f64,
    pub collapsed: bool,
}

fn finite(metric: CollapseMetric, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidScore {
            metric: metric.name(),
            value: v,
        })
    }
}

/// Flags intra-class collapse when the synthetic mean MS-SSIM exceeds the
/// real one.
pub fn detect_intra_collapse(real_mean: f64, synth_mean: f64) -> Result<CollapseReport> {
    let m = CollapseMetric::MsSsim;
    let real = finite(m, real_mean)?;
    let synth = finite(m, synth_mean)?;
    Ok(CollapseReport {
        metric: m,
        real_score: real,
        synthetic_score: synth,
        delta: synth - real,
        collapsed: synth > real,
    })
}

/// Flags inter-class collapse when the synthetic Inception Score falls below
/// the real one.
pub fn detect_inter_collapse(real_is: f64, synth_is: f64) -> Result<CollapseReport> {
    let m = CollapseMetric::InceptionScore;
    let real = finite(m, real_is)?;
    let synth = finite(m, synth_is)?;
    for v in [real, synth] {
        if v < 1.0 - 1e-9 {
            return Err(Error::InvalidScore {
                metric: m.name(),
                value: v,
            });
        }
    }
    Ok(CollapseReport {
        metric: m,
        real_score: real,
        synthetic_score: synth,
        delta: synth - real,
        collapsed: synth < real,
    })
}
