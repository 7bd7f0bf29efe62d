use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Failures reading or writing benchmark datasets and prediction files.
#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: bad magic bytes, expected {expected}")]
    Format { path: PathBuf, expected: &'static str },
    #[error("{path}: unsupported format version {found} (supported: {supported})")]
    Version { path: PathBuf, found: u32, supported: u32 },
    #[error("{path}: file ends inside record {record}")]
    Truncated { path: PathBuf, record: u64 },
    #[error("{path}: header declares {found} records, expected {expected}")]
    CountMismatch { path: PathBuf, expected: u64, found: u64 },
    #[error("{path}: content hash {found} does not match manifest {expected}")]
    HashMismatch { path: PathBuf, expected: String, found: String },
    #[error("{path}: {reason}")]
    Integrity { path: PathBuf, reason: String },
    #[error("manifest has no `{0}` split")]
    MissingSplit(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: malformed manifest: {source}")]
    Manifest { path: PathBuf, source: serde_json::Error },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] railwave_core::Error),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn io_at(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}
