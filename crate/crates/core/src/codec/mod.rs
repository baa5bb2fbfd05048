//! End-to-end lossless pipeline around a compressor/decompressor pair.
//!
//! Each chunk is stored as the compressor's greedy token sequence, packed at a
//! fixed bit width, plus a list of corrections for every position where the
//! decompressor's greedy prediction is wrong. Corrections make the round trip
//! exact for any parameters, trained or not.

mod container;
mod pack;
mod pipeline;

use thiserror::Error;

use crate::model::ModelError;

pub use container::{ChunkRecord, CompressedContainer, Correction, SizeReport, HEADER_BYTES, MAGIC, VERSION};
pub use pack::{bits_per_token, pack_tokens, unpack_tokens};
pub use pipeline::{compress_chunk, compress_stream, decompress_chunk, decompress_stream};

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("not a compressed container (bad magic)")]
    BadMagic,
    #[error("unsupported container version {0}")]
    VersionUnsupported(u8),
    #[error("vocabulary mismatch: container {container}, model {model}")]
    VocabMismatch { container: usize, model: usize },
    #[error("corrupt container: {0}")]
    CorruptContainer(String),
    #[error("malformed chunk record: {0}")]
    MalformedRecord(String),
    #[error("token {token} outside vocabulary of {vocab}")]
    TokenOutOfRange { token: usize, vocab: usize },
    #[error("token payload truncated: need {expected} bytes, have {actual}")]
    PayloadTruncated { expected: usize, actual: usize },
    #[error("chunk length {0} outside 1..=128 or beyond the model context")]
    InvalidChunkLen(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}
