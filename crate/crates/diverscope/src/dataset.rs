//! Image decoding and dataset directories.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use diverscope_core::aiin::{aiin_normalize, AiinConfig};
use diverscope_core::image::{luminance, resize_bilinear};
use diverscope_core::GrayImage;
use image::{DynamicImage, ImageFormat};
use rayon::prelude::*;

use crate::{Error, Result};

/// Decodes a PNG or JPEG file to 8-bit grayscale.
///
/// Gray inputs pass through; colour inputs use BT.601 integer luminance and
/// ignore alpha.
pub fn load_image(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let decode_err = |reason: String| Error::Decode {
        path: path.to_path_buf(),
        reason,
    };
    let format = image::guess_format(&bytes).map_err(|e| decode_err(e.to_string()))?;
    if !matches!(format, ImageFormat::Png | ImageFormat::Jpeg) {
        return Err(decode_err(format!("unsupported codec {format:?}")));
    }
    let decoded = image::load_from_memory_with_format(&bytes, format)
        .map_err(|e| decode_err(e.to_string()))?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    let pixels = match decoded {
        DynamicImage::ImageLuma8(buf) => buf.into_raw(),
        DynamicImage::ImageLumaA8(buf) => buf.pixels().map(|p| p.0[0]).collect(),
        DynamicImage::ImageLuma16(_) | DynamicImage::ImageLumaA16(_) => {
            decoded.to_luma8().into_raw()
        }
        other => other
            .to_rgb8()
            .pixels()
            .map(|p| luminance(p.0[0], p.0[1], p.0[2]))
            .collect(),
    };
    Ok(GrayImage::new(w, h, pixels)?)
}

/// Writes an 8-bit grayscale PNG.
pub fn save_png(img: &GrayImage, path: &Path) -> Result<()> {
    image::save_buffer_with_format(
        path,
        img.pixels(),
        img.width() as u32,
        img.height() as u32,
        image::ExtendedColorType::L8,
        ImageFormat::Png,
    )
    .map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::Invalid(format!("{}: {other}", path.display())),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetItem {
    pub path: PathBuf,
    pub image: GrayImage,
}

/// A file that was found but not decoded.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Skipped {
    pub path: PathBuf,
    pub reason: String,
}

/// Images of one class, sorted by path.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetHandle {
    pub label: String,
    pub items: Vec<DatasetItem>,
    pub skipped: Vec<Skipped>,
}

impl DatasetHandle {
    /// Builds a handle from in-memory images; paths are synthesized as
    /// `img_00000.png`, ... and only serve as output names.
    pub fn from_images(label: impl Into<String>, images: Vec<GrayImage>) -> Result<Self> {
        if let Some(first) = images.first() {
            if let Some(bad) = images.iter().find(|i| !i.same_dims(first)) {
                return Err(Error::Invalid(format!(
                    "images differ in size: {}x{} vs {}x{}",
                    first.width(),
                    first.height(),
                    bad.width(),
                    bad.height()
                )));
            }
        }
        let items = images
            .into_iter()
            .enumerate()
            .map(|(i, image)| DatasetItem {
                path: PathBuf::from(format!("img_{i:05}.png")),
                image,
            })
            .collect();
        Ok(Self {
            label: label.into(),
            items,
            skipped: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn images(&self) -> Vec<GrayImage> {
        self.items.iter().map(|i| i.image.clone()).collect()
    }

    /// `(width, height)` shared by every image.
    pub fn dims(&self) -> Option<(usize, usize)> {
        self.items
            .first()
            .map(|i| (i.image.width(), i.image.height()))
    }
}

fn list_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let hidden = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with('.'));
        if !hidden && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Loads every decodable image in `dir`, sorted lexicographically by path.
///
/// Undecodable files are listed in [`DatasetHandle::skipped`]. Without a
/// resize target all images must share one size.
pub fn load_dataset(dir: &Path, resize_to: Option<(usize, usize)>) -> Result<DatasetHandle> {
    let files = list_files(dir)?;
    let decoded: Vec<(PathBuf, Result<GrayImage>)> = files
        .into_par_iter()
        .map(|path| {
            let img = load_image(&path).and_then(|img| match resize_to {
                Some((w, h)) => Ok(resize_bilinear(&img, w, h)?),
                None => Ok(img),
            });
            (path, img)
        })
        .collect();

    let mut items = Vec::new();
    let mut skipped = Vec::new();
    for (path, res) in decoded {
        match res {
            Ok(image) => items.push(DatasetItem { path, image }),
            Err(e) => skipped.push(Skipped {
                path,
                reason: e.to_string(),
            }),
        }
    }
    if items.is_empty() {
        return Err(Error::EmptyDataset {
            dir: dir.to_path_buf(),
            skipped: skipped.len(),
        });
    }
    let first = &items[0].image;
    if let Some(bad) = items.iter().find(|i| !i.image.same_dims(first)) {
        return Err(Error::MixedDimensions {
            path: bad.path.clone(),
            width: bad.image.width(),
            height: bad.image.height(),
            expected_w: first.width(),
            expected_h: first.height(),
        });
    }
    let label = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(DatasetHandle {
        label,
        items,
        skipped,
    })
}

/// Output name for a normalized image: the input name with a `.png`
/// extension.
fn output_name(path: &Path) -> PathBuf {
    let mut name = PathBuf::from(path.file_name().unwrap_or(path.as_os_str()));
    name.set_extension("png");
    name
}

/// Normalizes every image with `cfg` and writes 8-bit PNGs into `out_dir`.
///
/// On a write failure the files written by this call are removed.
pub fn normalize_dataset(
    ds: &DatasetHandle,
    cfg: &AiinConfig,
    out_dir: &Path,
) -> Result<DatasetHandle> {
    if ds.is_empty() {
        return Err(Error::Invalid(format!("dataset '{}' is empty", ds.label)));
    }
    cfg.validate()?;
    let mut seen: HashMap<PathBuf, &Path> = HashMap::new();
    for item in &ds.items {
        if let Some(prev) = seen.insert(output_name(&item.path), &item.path) {
            return Err(Error::Invalid(format!(
                "{} and {} map to the same output file",
                prev.display(),
                item.path.display()
            )));
        }
    }

    let normalized = ds
        .items
        .par_iter()
        .map(|item| aiin_normalize(&item.image, cfg))
        .collect::<Result<Vec<_>, _>>()?;

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written: Vec<PathBuf> = Vec::with_capacity(normalized.len());
    let mut items = Vec::with_capacity(normalized.len());
    for (item, image) in ds.items.iter().zip(normalized) {
        let path = out_dir.join(output_name(&item.path));
        if let Err(e) = save_png(&image, &path) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(e);
        }
        written.push(path.clone());
        items.push(DatasetItem { path, image });
    }
    Ok(DatasetHandle {
        label: ds.label.clone(),
        items,
        skipped: Vec::new(),
    })
}

/// Normalizes in memory without touching the filesystem.
pub fn normalize_images(images: &[GrayImage], cfg: &AiinConfig) -> Result<Vec<GrayImage>> {
    Ok(images
        .par_iter()
        .map(|img| aiin_normalize(img, cfg))
        .collect::<Result<Vec<_>, _>>()?)
}

/// Writes every item of `ds` as PNG under `out_dir`, keeping file names.
pub fn write_dataset(ds: &DatasetHandle, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    ds.items
        .iter()
        .map(|item| {
            let path = out_dir.join(output_name(&item.path));
            save_png(&item.image, &path).map(|_| path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_rgb(path: &Path, w: u32, h: u32, rgb: &[u8]) {
        image::save_buffer(path, rgb, w, h, image::ExtendedColorType::Rgb8).unwrap();
    }

    #[test]
    fn decodes_color_and_gray() {
        let dir = tempfile::tempdir().unwrap();
        let white = dir.path().join("white.png");
        write_rgb(&white, 1, 1, &[255, 255, 255]);
        assert_eq!(load_image(&white).unwrap().pixels(), &[255]);

        let red = dir.path().join("red.png");
        write_rgb(&red, 1, 1, &[255, 0, 0]);
        assert_eq!(load_image(&red).unwrap().pixels(), &[76]);

        let gray = dir.path().join("gray.png");
        let img = GrayImage::new(2, 2, vec![0, 85, 170, 255]).unwrap();
        save_png(&img, &gray).unwrap();
        assert_eq!(load_image(&gray).unwrap(), img);
    }

    #[test]
    fn jpeg_is_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("flat.jpg");
        image::save_buffer(&path, &[128u8; 64], 8, 8, image::ExtendedColorType::L8).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!((img.width(), img.height()), (8, 8));
        assert!(img.pixels().iter().all(|&v| v.abs_diff(128) <= 2));
    }

    #[test]
    fn rejects_garbage_and_missing() {
        let dir = tempfile::tempdir().unwrap();
        let junk = dir.path().join("junk.png");
        fs::write(&junk, b"not an image").unwrap();
        assert!(matches!(load_image(&junk), Err(Error::Decode { .. })));
        assert!(matches!(
            load_image(&dir.path().join("missing.png")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn dataset_is_sorted_and_reports_skips() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["b.png", "a.png", "c.png"] {
            save_png(&GrayImage::filled(4, 4, 9).unwrap(), &dir.path().join(name)).unwrap();
        }
        fs::write(dir.path().join("notes.txt"), "x").unwrap();
        let ds = load_dataset(dir.path(), None).unwrap();
        let names: Vec<_> = ds
            .items
            .iter()
            .map(|i| i.path.file_name().unwrap().to_str().unwrap().to_owned())
            .collect();
        assert_eq!(names, ["a.png", "b.png", "c.png"]);
        assert_eq!(ds.skipped.len(), 1);
        assert!(ds.skipped[0].path.ends_with("notes.txt"));
    }

    #[test]
    fn empty_dir_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_dataset(dir.path(), None),
            Err(Error::EmptyDataset { skipped: 0, .. })
        ));
    }

    #[test]
    fn mixed_sizes_need_resize() {
        let dir = tempfile::tempdir().unwrap();
        save_png(
            &GrayImage::filled(4, 4, 1).unwrap(),
            &dir.path().join("a.png"),
        )
        .unwrap();
        save_png(
            &GrayImage::filled(6, 5, 1).unwrap(),
            &dir.path().join("b.png"),
        )
        .unwrap();
        assert!(matches!(
            load_dataset(dir.path(), None),
            Err(Error::MixedDimensions { .. })
        ));
        let ds = load_dataset(dir.path(), Some((8, 8))).unwrap();
        assert_eq!(ds.dims(), Some((8, 8)));
    }

    #[test]
    fn normalize_preserves_names() {
        let src = tempfile::tempdir().unwrap();
        let out = tempfile::tempdir().unwrap();
        for (i, name) in ["x.png", "y.jpg"].iter().enumerate() {
            let img = GrayImage::from_fn(16, 16, |x, y| (x * 8 + y * 4 + i) as u8).unwrap();
            if name.ends_with(".png") {
                save_png(&img, &src.path().join(name)).unwrap();
            } else {
                image::save_buffer(
                    src.path().join(name),
                    img.pixels(),
                    16,
                    16,
                    image::ExtendedColorType::L8,
                )
                .unwrap();
            }
        }
        let ds = load_dataset(src.path(), None).unwrap();
        let res = normalize_dataset(&ds, &AiinConfig::new(4, 20.0), out.path()).unwrap();
        assert_eq!(res.len(), 2);
        assert!(out.path().join("x.png").exists());
        assert!(out.path().join("y.png").exists());
        let back = load_dataset(out.path(), None).unwrap();
        assert_eq!(back.images(), res.images());
    }

    #[test]
    fn normalize_rejects_empty_and_collisions() {
        let out = tempfile::tempdir().unwrap();
        let empty = DatasetHandle::from_images("e", vec![]).unwrap();
        assert!(normalize_dataset(&empty, &AiinConfig::default(), out.path()).is_err());

        let img = GrayImage::filled(8, 8, 3).unwrap();
        let mut ds = DatasetHandle::from_images("c", vec![img.clone(), img]).unwrap();
        ds.items[0].path = "a.png".into();
        ds.items[1].path = "a.jpg".into();
        assert!(normalize_dataset(&ds, &AiinConfig::default(), out.path()).is_err());
    }
}
