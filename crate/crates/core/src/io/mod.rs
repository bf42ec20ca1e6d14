//! Dataset and trace ingestion plus artifact serialization.
//!
//! IDX image/label files (optionally gzip-compressed, sniffed from the
//! stream's first bytes) are parsed bit-exactly; measurement traces
//! exchange as CSV with fixed, documented headers; parameter records ride
//! in the JSON model card (see [`crate::cards`]). Loaders never panic on
//! malformed input: every failure mode is a typed error.

mod idx;
mod pgm;
mod trace;

pub use idx::{
    load_idx_images, load_idx_labels, resolve_idx, save_idx_images, save_idx_labels, IdxImages,
    IdxLabels,
};
pub use pgm::write_pgm;
pub use trace::{
    load_iv_csv, load_pulse_csv, write_iv_csv, write_pulse_csv, IV_HEADERS, PULSE_HEADERS,
};

use std::path::PathBuf;

use thiserror::Error;

/// Environment variable naming the default data directory.
pub const DATA_DIR_ENV: &str = "FESYN_DATA_DIR";

/// Data directory from the environment, falling back to `./data`.
pub fn default_data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("data"))
}

/// Errors raised by loaders and writers.
#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad magic: found {found:#010x}, expected {expected:#010x}")]
    BadMagic { found: u32, expected: u32 },
    #[error("truncated file: needed {needed} bytes at offset {offset}")]
    Truncated { offset: usize, needed: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("label {value} out of range 0-9 at index {index}")]
    BadLabel { index: usize, value: u8 },
    #[error("missing or misnamed column `{column}`")]
    SchemaMismatch { column: String },
    #[error("non-finite value in row {row}")]
    NonFinite { row: usize },
    #[error("invalid data: {0}")]
    InvalidData(String),
}
