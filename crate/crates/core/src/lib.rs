//! Numerical core of diverscope.
//!
//! Adaptive input-image normalization (tile-wise contrast-limited histogram
//! equalization with bilinear stitching) and the diversity metrics used to
//! detect mode collapse in image generators: MS-SSIM, Fréchet distance over
//! feature activations, and Inception Score. A seeded multi-mode image
//! generator provides ground truth for the metrics' collapse sensitivity.
//!
//! The crate is `no_std` and only needs `alloc`. Decoding, dataset
//! directories, file formats and the CLI live in the `diverscope` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod aiin;
pub mod collapse;
mod error;
pub mod fid;
pub mod image;
pub mod inception;
pub mod linalg;
pub mod msssim;
pub mod sim;

pub use self::error::{Error, Result};
pub use self::image::GrayImage;
