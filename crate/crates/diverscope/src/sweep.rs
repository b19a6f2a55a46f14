//! Parameter sweep over normalization grid points and generator batch tags.
//!
//! For every `(window, threshold)` grid point both the real set and each
//! tagged synthetic set are normalized with the same configuration and
//! scored. Un-normalized baseline rows come first. Rows are ordered by
//! window, then threshold, then tag, in the order the config lists them.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use diverscope_core::aiin::AiinConfig;
use diverscope_core::collapse::{detect_inter_collapse, detect_intra_collapse};
use diverscope_core::inception::{inception_score, ProbMatrix, DEFAULT_EPSILON, DEFAULT_SPLITS};
use diverscope_core::msssim::{MsSsimParams, PairSamplingSpec, DEFAULT_PAIRS};
use diverscope_core::GrayImage;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{load_dataset, normalize_images};
use crate::formats::load_probs;
use crate::metrics::{dataset_msssim, pixel_fid};
use crate::{Error, Result};

/// Column order of `report.csv`.
pub const REPORT_COLUMNS: [&str; 12] = [
    "window",
    "threshold",
    "batch_tag",
    "msssim_real",
    "msssim_synth",
    "msssim_delta",
    "msssim_collapsed",
    "fid",
    "is_real",
    "is_synth",
    "is_delta",
    "is_collapsed",
];

pub const PLOT_COLUMNS: [&str; 5] = ["metric", "batch_tag", "series", "x", "y"];

fn default_windows() -> Vec<usize> {
    vec![4, 8, 16]
}

fn default_thresholds() -> Vec<f64> {
    vec![0.0, 5.0, 10.0, 20.0, 50.0, 100.0]
}

fn default_tags() -> Vec<String> {
    ["BS20", "BS67", "BS134"].map(String::from).to_vec()
}

fn default_pairs() -> usize {
    DEFAULT_PAIRS
}

fn default_splits() -> usize {
    DEFAULT_SPLITS
}

/// Sweep configuration, read from JSON.
///
/// `probs` maps a set name to a class-probability file. Names are `real` or
/// a batch tag for the baseline rows, and `<name>/<window>/<threshold>`
/// (e.g. `BS67/8/20`) for a grid point. Sets without an entry get empty IS
/// columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_windows")]
    pub window_sizes: Vec<usize>,
    #[serde(default = "default_thresholds")]
    pub thresholds: Vec<f64>,
    #[serde(default = "default_tags")]
    pub batch_tags: Vec<String>,
    pub real_dir: PathBuf,
    pub synth_dirs: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default)]
    pub resize: Option<[usize; 2]>,
    #[serde(default)]
    pub probs: BTreeMap<String, PathBuf>,
    #[serde(default = "default_splits")]
    pub is_splits: usize,
}

impl SweepSpec {
    /// Minimal spec with the default grid.
    pub fn new(real_dir: impl Into<PathBuf>, synth_dirs: BTreeMap<String, PathBuf>) -> Self {
        Self {
            window_sizes: default_windows(),
            thresholds: default_thresholds(),
            batch_tags: synth_dirs.keys().cloned().collect(),
            real_dir: real_dir.into(),
            synth_dirs,
            seed: 0,
            pairs: DEFAULT_PAIRS,
            resize: None,
            probs: BTreeMap::new(),
            is_splits: DEFAULT_SPLITS,
        }
    }

    /// Parses a config file; relative paths resolve against its directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut spec: SweepSpec =
            serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut spec.real_dir);
        spec.synth_dirs.values_mut().for_each(resolve);
        spec.probs.values_mut().for_each(resolve);
        Ok(spec)
    }

    /// Checks every parameter and referenced path before any computation.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.window_sizes.is_empty() {
            return bad("window_sizes is empty".into());
        }
        if self.thresholds.is_empty() {
            return bad("thresholds is empty".into());
        }
        if self.batch_tags.is_empty() {
            return bad("batch_tags is empty".into());
        }
        if let Some(w) = self.window_sizes.iter().find(|&&w| w == 0) {
            return bad(format!("window size {w} must be at least 1"));
        }
        if let Some(t) = self.thresholds.iter().find(|t| !t.is_finite() || **t < 0.0) {
            return bad(format!("threshold {t} must be finite and non-negative"));
        }
        if self.pairs == 0 {
            return bad("pairs must be at least 1".into());
        }
        if self.is_splits == 0 {
            return bad("is_splits must be at least 1".into());
        }
        if let Some([w, h]) = self.resize {
            if w == 0 || h == 0 {
                return bad("resize dimensions must be at least 1".into());
            }
        }
        let mut missing = Vec::new();
        if !self.real_dir.is_dir() {
            missing.push(format!("real_dir {}", self.real_dir.display()));
        }
        for tag in &self.batch_tags {
            match self.synth_dirs.get(tag) {
                None => return bad(format!("batch tag '{tag}' has no entry in synth_dirs")),
                Some(dir) if !dir.is_dir() => {
                    missing.push(format!("synth_dirs.{tag} {}", dir.display()))
                }
                _ => {}
            }
        }
        for (name, path) in &self.probs {
            if !path.is_file() {
                missing.push(format!("probs.{name} {}", path.display()));
            }
        }
        if !missing.is_empty() {
            return bad(format!("missing inputs: {}", missing.join(", ")));
        }
        Ok(())
    }

    fn grid(&self) -> Vec<Option<(usize, f64)>> {
        let mut out = vec![None];
        for &w in &self.window_sizes {
            for &t in &self.thresholds {
                out.push(Some((w, t)));
            }
        }
        out
    }
}

/// One line of the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    /// `None` for un-normalized baseline rows.
    pub window: Option<usize>,
    pub threshold: Option<f64>,
    pub batch_tag: String,
    pub msssim_real: f64,
    pub msssim_synth: f64,
    pub msssim_delta: f64,
    pub msssim_collapsed: bool,
    pub fid: f64,
    pub is_real: Option<f64>,
    pub is_synth: Option<f64>,
    pub is_delta: Option<f64>,
    pub is_collapsed: Option<bool>,
}

fn fmt_f(v: f64) -> String {
    format!("{v:.12}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f).unwrap_or_default()
}

fn fmt_threshold(t: f64) -> String {
    format!("{t}")
}

impl ReportRow {
    fn csv_fields(&self) -> [String; 12] {
        [
            self.window.map_or("none".into(), |w| w.to_string()),
            self.threshold.map_or("none".into(), fmt_threshold),
            self.batch_tag.clone(),
            fmt_f(self.msssim_real),
            fmt_f(self.msssim_synth),
            fmt_f(self.msssim_delta),
            self.msssim_collapsed.to_string(),
            fmt_f(self.fid),
            fmt_opt(self.is_real),
            fmt_opt(self.is_synth),
            fmt_opt(self.is_delta),
            self.is_collapsed.map(|b| b.to_string()).unwrap_or_default(),
        ]
    }
}

/// Report rows as CSV text with the fixed [`REPORT_COLUMNS`] header.
pub fn report_csv(rows: &[ReportRow]) -> String {
    let mut out = REPORT_COLUMNS.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_fields().join(","));
        out.push('\n');
    }
    out
}

/// `(metric, tag, series = window, x = threshold, y)` lines for plotting.
pub fn plot_csv(rows: &[ReportRow]) -> String {
    let mut out = PLOT_COLUMNS.join(",");
    out.push('\n');
    for row in rows {
        let series = row.window.map_or("none".into(), |w| format!("{w}x{w}"));
        let x = row.threshold.map(fmt_threshold).unwrap_or_default();
        let metrics = [
            ("msssim_real", Some(row.msssim_real)),
            ("msssim_synth", Some(row.msssim_synth)),
            ("msssim_delta", Some(row.msssim_delta)),
            ("fid", Some(row.fid)),
            ("is_real", row.is_real),
            ("is_synth", row.is_synth),
            ("is_delta", row.is_delta),
        ];
        for (name, value) in metrics {
            if let Some(y) = value {
                let _ = writeln!(out, "{name},{},{series},{x},{}", row.batch_tag, fmt_f(y));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<ReportRow>,
    pub report_csv: PathBuf,
    pub report_json: PathBuf,
    pub plot_csv: PathBuf,
}

fn probs_key(name: &str, cell: Option<(usize, f64)>) -> String {
    match cell {
        None => name.to_owned(),
        Some((w, t)) => format!("{name}/{w}/{}", fmt_threshold(t)),
    }
}

struct Inputs {
    real: Vec<GrayImage>,
    synth: Vec<Vec<GrayImage>>,
    probs: BTreeMap<String, ProbMatrix>,
}

fn load_inputs(spec: &SweepSpec) -> Result<Inputs> {
    let resize = spec.resize.map(|[w, h]| (w, h));
    let real = load_dataset(&spec.real_dir, resize)?.images();
    let synth = spec
        .batch_tags
        .iter()
        .map(|tag| Ok(load_dataset(&spec.synth_dirs[tag], resize)?.images()))
        .collect::<Result<Vec<_>>>()?;
    let probs = spec
        .probs
        .iter()
        .map(|(k, p)| Ok((k.clone(), load_probs(p)?)))
        .collect::<Result<_>>()?;
    Ok(Inputs { real, synth, probs })
}

fn grid_rows(
    spec: &SweepSpec,
    inputs: &Inputs,
    cell: Option<(usize, f64)>,
) -> Result<Vec<ReportRow>> {
    let params = MsSsimParams::default();
    let sampling = PairSamplingSpec {
        n_pairs: spec.pairs,
        seed: spec.seed,
    };
    let prepare = |images: &[GrayImage]| -> Result<Vec<GrayImage>> {
        match cell {
            None => Ok(images.to_vec()),
            Some((w, t)) => normalize_images(images, &AiinConfig::new(w, t)),
        }
    };
    let score_is = |name: &str| -> Result<Option<f64>> {
        inputs
            .probs
            .get(&probs_key(name, cell))
            .map(|p| Ok(inception_score(p, spec.is_splits, DEFAULT_EPSILON)?.mean))
            .transpose()
    };

    let real = prepare(&inputs.real)?;
    let msssim_real = dataset_msssim(&real, &sampling, &params)?.mean;
    let is_real = score_is("real")?;

    spec.batch_tags
        .par_iter()
        .zip(inputs.synth.par_iter())
        .map(|(tag, images)| {
            let synth = prepare(images)?;
            let msssim_synth = dataset_msssim(&synth, &sampling, &params)?.mean;
            let intra = detect_intra_collapse(msssim_real, msssim_synth)?;
            let fid = pixel_fid(&real, &synth)?;
            let is_synth = score_is(tag)?;
            let inter = match (is_real, is_synth) {
                (Some(r), Some(s)) => Some(detect_inter_collapse(r, s)?),
                _ => None,
            };
            Ok(ReportRow {
                window: cell.map(|c| c.0),
                threshold: cell.map(|c| c.1),
                batch_tag: tag.clone(),
                msssim_real,
                msssim_synth,
                msssim_delta: intra.delta,
                msssim_collapsed: intra.collapsed,
                fid,
                is_real,
                is_synth,
                is_delta: inter.map(|r| r.delta),
                is_collapsed: inter.map(|r| r.collapsed),
            })
        })
        .collect()
}

/// Computes every report row without writing anything.
pub fn compute_rows(spec: &SweepSpec) -> Result<Vec<ReportRow>> {
    spec.validate()?;
    let inputs = load_inputs(spec)?;
    let per_cell = spec
        .grid()
        .into_par_iter()
        .map(|cell| grid_rows(spec, &inputs, cell))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_cell.into_iter().flatten().collect())
}

/// Runs the sweep and writes `report.csv`, `report.json` and `plotdata.csv`
/// into `out_dir`. `threads` sizes a dedicated pool; `None` uses the global
/// one.
pub fn run_sweep(spec: &SweepSpec, out_dir: &Path, threads: Option<usize>) -> Result<SweepReport> {
    spec.validate()?;
    let rows = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Invalid(format!("cannot build thread pool: {e}")))?
            .install(|| compute_rows(spec))?,
        None => compute_rows(spec)?,
    };

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let csv_path = out_dir.join("report.csv");
    let report_json = out_dir.join("report.json");
    let plot = out_dir.join("plotdata.csv");
    fs::write(&csv_path, report_csv(&rows)).map_err(|e| Error::io(&csv_path, e))?;
    let json = serde_json::json!({
        "columns": REPORT_COLUMNS,
        "config": spec,
        "rows": rows,
    });
    let json = serde_json::to_string_pretty(&json).map_err(|e| Error::Invalid(e.to_string()))?;
    fs::write(&report_json, json).map_err(|e| Error::io(&report_json, e))?;
    fs::write(&plot, plot_csv(&rows)).map_err(|e| Error::io(&plot, e))?;
    Ok(SweepReport {
        rows,
        report_csv: csv_path,
        report_json,
        plot_csv: plot,
    })
}
