//! Classic lossless coders used as references: LZ77, a bitwise arithmetic
//! coder, and an integer range coder, plus Shannon entropy.

mod arith;
mod bits;
mod file;
mod freq;
mod lz77;
mod range;

use thiserror::Error;

pub use arith::{ac_decode, ac_encode, EncodedBits};
pub use bits::{BitReader, BitWriter};
pub use file::{decode_file, encode_file, BaselineCodec, FILE_MAGIC};
pub use freq::{FrequencyModel, ADAPTIVE_INCREMENT, ADAPTIVE_MAX_TOTAL, EOS_SYMBOL, MAX_TOTAL};
pub use lz77::{
    lz77_decode_fixed, lz77_encode_fixed, lz77_reconstruct, lz77_tokenize, Lz77Token, DEFAULT_LOOKAHEAD, DEFAULT_WINDOW,
};
pub use range::{range_decode, range_encode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BaselineError {
    #[error("not a probability distribution: {0}")]
    NotADistribution(String),
    #[error("match offset {offset} reaches before the start of the output at position {position}")]
    DanglingOffset { offset: usize, position: usize },
    #[error("corrupt bitstream: {0}")]
    CorruptBitstream(String),
    #[error("not a baseline file (bad magic)")]
    BadMagic,
    #[error("unknown baseline codec id {0}")]
    UnknownCodec(u8),
    #[error("baseline file truncated")]
    Truncated,
    #[error("decoded {actual} bytes, header says {expected}")]
    LengthMismatch { expected: u64, actual: u64 },
}

/// Shannon entropy in bits. Zero-probability terms contribute nothing.
pub fn entropy(p: &[f64]) -> Result<f64, BaselineError> {
    if p.is_empty() {
        return Err(BaselineError::NotADistribution("empty".into()));
    }
    if let Some(bad) = p.iter().find(|&&x| !x.is_finite() || x < 0.0) {
        return Err(BaselineError::NotADistribution(format!("entry {bad}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(BaselineError::NotADistribution(format!("sums to {sum}")));
    }
    Ok(p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0))
}
