//! Dataset IO, file formats, parallel metric drivers and the parameter sweep
//! built on [`diverscope_core`].
//!
//! Parallel code paths evaluate independent items on the rayon pool and
//! reduce in index order, so every result is bit-identical across thread
//! counts.

pub mod commands;
pub mod dataset;
mod error;
pub mod formats;
pub mod metrics;
pub mod simulate;
pub mod sweep;

pub use diverscope_core as core;

pub use self::dataset::{load_dataset, load_image, normalize_dataset, DatasetHandle, DatasetItem};
pub use self::error::{Error, Result};
