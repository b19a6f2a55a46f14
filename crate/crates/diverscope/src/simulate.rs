//! Writing simulator datasets to disk.

use std::path::Path;

use diverscope_core::sim::{generate_modes, oracle_probs, SimSpec};

use crate::dataset::{write_dataset, DatasetHandle};
use crate::formats::{write_matrix, MatrixFormat};
use crate::Result;

/// Summary of a simulated dataset written to disk.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SimulationOutput {
    pub count: usize,
    pub distinct: usize,
    pub out_dir: String,
    pub probs: Option<String>,
}

/// In-memory dataset for `spec`.
pub fn simulate_dataset(spec: &SimSpec) -> Result<DatasetHandle> {
    DatasetHandle::from_images(format!("sim-k{}", spec.k_modes), generate_modes(spec)?)
}

/// Writes `img_00000.png`, ... to `out_dir` and optionally the oracle
/// classifier's probabilities to `probs` (CSV for `.csv`, FVEC1 otherwise).
pub fn simulate_to_dir(
    spec: &SimSpec,
    out_dir: &Path,
    probs: Option<&Path>,
) -> Result<SimulationOutput> {
    let ds = simulate_dataset(spec)?;
    write_dataset(&ds, out_dir)?;
    if let Some(path) = probs {
        let p = oracle_probs(&ds.images(), spec)?;
        write_matrix(path, p.n(), p.k(), p.values(), MatrixFormat::for_path(path))?;
    }
    let mut distinct: Vec<&[u8]> = ds.items.iter().map(|i| i.image.pixels()).collect();
    distinct.sort_unstable();
    distinct.dedup();
    Ok(SimulationOutput {
        count: ds.len(),
        distinct: distinct.len(),
        out_dir: out_dir.display().to_string(),
        probs: probs.map(|p| p.display().to_string()),
    })
}
