use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] diverscope_core::Error),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: cannot decode image: {reason}", .path.display())]
    Decode { path: PathBuf, reason: String },
    #[error("{}: no decodable images ({} files skipped)", .dir.display(), .skipped)]
    EmptyDataset { dir: PathBuf, skipped: usize },
    #[error("{}: image is {width}x{height} but the dataset is {expected_w}x{expected_h}; pass a resize target", .path.display())]
    MixedDimensions {
        path: PathBuf,
        width: usize,
        height: usize,
        expected_w: usize,
        expected_h: usize,
    },
    #[error("{}: {reason}", .path.display())]
    Format { path: PathBuf, reason: String },
    #[error("feature dimensions differ: {left_path} has d={left}, {right_path} has d={right}")]
    FeatureDims {
        left_path: String,
        left: usize,
        right_path: String,
        right: usize,
    },
    #[error("invalid sweep config: {0}")]
    Config(String),
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
