//! Implementations behind each CLI verb. Each returns the JSON document the
//! binary prints on standard output.

use std::path::{Path, PathBuf};

use diverscope_core::aiin::{AiinConfig, Interpolation};
use diverscope_core::collapse::{detect_inter_collapse, detect_intra_collapse};
use diverscope_core::fid::fid_score;
use diverscope_core::inception::{inception_score, DEFAULT_EPSILON};
use diverscope_core::msssim::{MsSsimParams, PairSamplingSpec};
use diverscope_core::sim::SimSpec;
use serde_json::{json, Value};

use crate::dataset::{load_dataset, normalize_dataset};
use crate::formats::{load_features, load_probs, write_pair_scores};
use crate::metrics::{dataset_msssim, pixel_feature_matrix};
use crate::simulate::simulate_to_dir;
use crate::sweep::{run_sweep, SweepSpec};
use crate::{Error, Result};

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn log_skipped(ds: &crate::DatasetHandle) {
    for s in &ds.skipped {
        eprintln!("skipped {}: {}", s.path.display(), s.reason);
    }
}

pub fn normalize(
    in_dir: &Path,
    out_dir: &Path,
    grid: usize,
    threshold: f64,
    interpolation: Interpolation,
) -> Result<Value> {
    let cfg = AiinConfig::new(grid, threshold).with_interpolation(interpolation);
    cfg.validate()?;
    let ds = load_dataset(in_dir, None)?;
    log_skipped(&ds);
    eprintln!("normalizing {} images from {}", ds.len(), in_dir.display());
    let out = normalize_dataset(&ds, &cfg, out_dir)?;
    Ok(json!({
        "count": out.len(),
        "skipped": ds.skipped.len(),
        "out_dir": out_dir.display().to_string(),
        "config": cfg,
    }))
}

pub struct MsSsimArgs<'a> {
    pub dir_a: &'a Path,
    pub dir_b: Option<&'a Path>,
    pub pairs: usize,
    pub seed: u64,
    pub resize: Option<(usize, usize)>,
    pub pair_scores: Option<&'a Path>,
}

pub fn msssim(args: &MsSsimArgs<'_>) -> Result<Value> {
    let spec = PairSamplingSpec {
        n_pairs: args.pairs,
        seed: args.seed,
    };
    let params = MsSsimParams::default();
    let a = load_dataset(args.dir_a, args.resize)?;
    log_skipped(&a);
    eprintln!("scoring {} pairs from {}", args.pairs, args.dir_a.display());
    let sa = dataset_msssim(&a.images(), &spec, &params)?;
    if let Some(path) = args.pair_scores {
        write_pair_scores(path, &sa.pairs, &sa.scores)?;
    }
    let Some(dir_b) = args.dir_b else {
        return Ok(json!({ "mean": sa.mean, "n_pairs": sa.pairs.len() }));
    };
    let b = load_dataset(dir_b, args.resize)?;
    log_skipped(&b);
    eprintln!("scoring {} pairs from {}", args.pairs, dir_b.display());
    let sb = dataset_msssim(&b.images(), &spec, &params)?;
    Ok(to_json(&detect_intra_collapse(sa.mean, sb.mean)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureSource {
    /// Built-in pixel features computed from image directories.
    Pixel,
    /// Precomputed FVEC1 or CSV feature files.
    File,
}

pub fn fid(real: &Path, synth: &Path, features: FeatureSource) -> Result<Value> {
    let (fr, fs) = match features {
        FeatureSource::Pixel => {
            let a = load_dataset(real, None)?;
            let b = load_dataset(synth, None)?;
            log_skipped(&a);
            log_skipped(&b);
            (
                pixel_feature_matrix(&a.images())?,
                pixel_feature_matrix(&b.images())?,
            )
        }
        FeatureSource::File => {
            let fr = load_features(real)?;
            let fs = load_features(synth)?;
            if fr.d() != fs.d() {
                return Err(Error::FeatureDims {
                    left_path: real.display().to_string(),
                    left: fr.d(),
                    right_path: synth.display().to_string(),
                    right: fs.d(),
                });
            }
            (fr, fs)
        }
    };
    eprintln!(
        "fitting {}x{} and {}x{} features",
        fr.n(),
        fr.d(),
        fs.n(),
        fs.d()
    );
    Ok(json!({ "fid": fid_score(&fr, &fs)?, "n_real": fr.n(), "n_synth": fs.n(), "d": fr.d() }))
}

pub fn is(probs: &Path, splits: usize, real: Option<&Path>) -> Result<Value> {
    let p = load_probs(probs)?;
    let r = inception_score(&p, splits, DEFAULT_EPSILON)?;
    let Some(real) = real else {
        return Ok(json!({ "mean": r.mean, "std": r.std, "n_splits": r.n_splits, "n": p.n() }));
    };
    let pr = load_probs(real)?;
    let rr = inception_score(&pr, splits, DEFAULT_EPSILON)?;
    Ok(json!({
        "mean": r.mean,
        "std": r.std,
        "n_splits": r.n_splits,
        "n": p.n(),
        "real": { "mean": rr.mean, "std": rr.std },
        "collapse": to_json(&detect_inter_collapse(rr.mean, r.mean)?),
    }))
}

pub fn sweep(config: &Path, out_dir: &Path, threads: Option<usize>) -> Result<Value> {
    let spec = SweepSpec::from_file(config)?;
    spec.validate()?;
    eprintln!(
        "sweep: {} windows x {} thresholds x {} tags",
        spec.window_sizes.len(),
        spec.thresholds.len(),
        spec.batch_tags.len()
    );
    let report = run_sweep(&spec, out_dir, threads)?;
    let path = |p: &PathBuf| p.display().to_string();
    Ok(json!({
        "rows": report.rows.len(),
        "report_csv": path(&report.report_csv),
        "report_json": path(&report.report_json),
        "plotdata_csv": path(&report.plot_csv),
    }))
}

pub fn simulate(spec: &SimSpec, out_dir: &Path, probs: Option<&Path>) -> Result<Value> {
    eprintln!(
        "simulating {} images with {} modes into {}",
        spec.n_images,
        spec.k_modes,
        out_dir.display()
    );
    Ok(to_json(&simulate_to_dir(spec, out_dir, probs)?))
}
