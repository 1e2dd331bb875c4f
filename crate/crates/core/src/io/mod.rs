//! On-disk formats: JSON configs, diagnostics CSV, MREF snapshots, PGM
//! heatmaps, run manifests and output-directory locks.

mod config;
mod heatmap;
mod manifest;
mod snapshot;
mod table;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{emit_config, parse_config, parse_config_str, ConfigFile};
pub use heatmap::{render_heatmap, slice_3d, HeatmapInfo};
pub use manifest::{OutputLock, RunManifest, LOCK_FILE};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot, SnapshotError, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};
pub use table::{
    diagnostics_columns, read_table_csv, write_diagnostics_csv, write_table_csv, DataTable,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// `field` is the dotted JSON path of the offending entry.
    #[error("{field}: {message}")]
    Config { field: String, message: String },
    #[error("{path}: {source}")]
    Snapshot {
        path: PathBuf,
        #[source]
        source: SnapshotError,
    },
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("{path}: {message}")]
    Json { path: PathBuf, message: String },
    #[error("output directory {0} is locked by another job")]
    Locked(PathBuf),
    #[error("artifact {0} is missing or empty")]
    Artifact(PathBuf),
    #[error("{0}")]
    Shape(String),
}

impl IoError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable category.
    pub fn category(&self) -> &'static str {
        match self {
            IoError::Io { .. } => "io",
            IoError::Config { .. } => "config",
            IoError::Snapshot { .. } => "snapshot",
            IoError::Csv { .. } => "csv",
            IoError::Json { .. } => "json",
            IoError::Locked(_) => "locked",
            IoError::Artifact(_) => "artifact",
            IoError::Shape(_) => "shape",
        }
    }
}
