//! File formats, reports and verification suites on top of `cfpinch-core`.

use std::path::{Path, PathBuf};

pub mod corpus;
pub mod random;
pub mod report;
pub mod suites;
pub mod table;
pub mod tolerances;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("configuration: {0}")]
    Config(String),
    #[error("warp table line {line}: {msg}")]
    Table { line: usize, msg: String },
    #[error(transparent)]
    Core(#[from] cfpinch_core::Error),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
