//! Corpus loading, ratio accounting, chunk-size sweeps and the comparison table.

mod corpus;
mod published;
mod sweep;
mod table;

use std::path::PathBuf;

use thiserror::Error;

use crate::baselines::BaselineError;
use crate::codec::CodecError;

pub use corpus::{ingest_corpus, CorpusSlice, CORPUS_ENV};
pub use published::{check_published, render_published, PublishedCheck, PublishedRow, PUBLISHED_TABLE};
pub use sweep::{sweep_chunk_sizes, write_sweep_csv, SweepOptions, SweepRow, SWEEP_HEADER};
pub use table::{baseline_table, render_table, write_table_csv, TableReport, TableRow, TABLE_HEADER};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot read corpus {path}: {source}")]
    FileUnreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corpus slice is empty")]
    EmptySlice,
    #[error("corpus content does not match its recorded hash")]
    HashMismatch,
    #[error("compressed size is zero")]
    ZeroCompressedSize,
    #[error("chunk size {0} outside 1..=128")]
    InvalidChunkSize(usize),
    #[error("round trip of {0} did not reproduce the input")]
    VerificationFailed(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `original / compressed`.
pub fn compression_ratio(original_bytes: u64, compressed_bytes: u64) -> Result<f64, BenchError> {
    if compressed_bytes == 0 {
        return Err(BenchError::ZeroCompressedSize);
    }
    Ok(original_bytes as f64 / compressed_bytes as f64)
}

/// Rounds half away from zero at `decimals` places.
pub fn round_to(x: f64, decimals: u32) -> f64 {
    let s = 10f64.powi(decimals as i32);
    (x * s).round() / s
}
