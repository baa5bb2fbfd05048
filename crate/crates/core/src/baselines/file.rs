//! Self-describing file wrapper: "RLTB" | codec id u8 | original length u64 LE | payload.

use super::arith::{ac_decode, ac_encode};
use super::freq::FrequencyModel;
use super::lz77::{lz77_decode_fixed, lz77_encode_fixed, DEFAULT_LOOKAHEAD, DEFAULT_WINDOW};
use super::range::{range_decode, range_encode};
use super::BaselineError;

pub const FILE_MAGIC: [u8; 4] = *b"RLTB";
const HEADER: usize = 4 + 1 + 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineCodec {
    /// LZ77 tokens at fixed width.
    Lz77 = 1,
    /// Adaptive order-0 arithmetic coding.
    Arithmetic = 2,
    /// Adaptive order-0 range coding.
    Range = 3,
}

impl BaselineCodec {
    pub const ALL: [BaselineCodec; 3] = [BaselineCodec::Lz77, BaselineCodec::Arithmetic, BaselineCodec::Range];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Result<Self, BaselineError> {
        Self::ALL
            .into_iter()
            .find(|c| c.id() == id)
            .ok_or(BaselineError::UnknownCodec(id))
    }

    pub fn name(self) -> &'static str {
        match self {
            BaselineCodec::Lz77 => "lz77",
            BaselineCodec::Arithmetic => "arithmetic",
            BaselineCodec::Range => "range",
        }
    }
}

pub fn encode_file(codec: BaselineCodec, data: &[u8]) -> Vec<u8> {
    let payload = match codec {
        BaselineCodec::Lz77 => lz77_encode_fixed(data, DEFAULT_WINDOW, DEFAULT_LOOKAHEAD),
        BaselineCodec::Arithmetic => ac_encode(data, &FrequencyModel::adaptive()).bytes,
        BaselineCodec::Range => range_encode(data, &FrequencyModel::adaptive()),
    };
    let mut out = Vec::with_capacity(HEADER + payload.len());
    out.extend_from_slice(&FILE_MAGIC);
    out.push(codec.id());
    out.extend_from_slice(&(data.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload);
    out
}

pub fn decode_file(bytes: &[u8]) -> Result<(BaselineCodec, Vec<u8>), BaselineError> {
    let n = bytes.len().min(4);
    if bytes[..n] != FILE_MAGIC[..n] {
        return Err(BaselineError::BadMagic);
    }
    if bytes.len() < HEADER {
        return Err(BaselineError::Truncated);
    }
    let codec = BaselineCodec::from_id(bytes[4])?;
    let expected = u64::from_le_bytes(bytes[5..13].try_into().expect("8 bytes"));
    let payload = &bytes[HEADER..];
    let data = match codec {
        BaselineCodec::Lz77 => lz77_decode_fixed(payload)?,
        BaselineCodec::Arithmetic => ac_decode(payload, &FrequencyModel::adaptive())?,
        BaselineCodec::Range => range_decode(payload, &FrequencyModel::adaptive())?,
    };
    if data.len() as u64 != expected {
        return Err(BaselineError::LengthMismatch {
            expected,
            actual: data.len() as u64,
        });
    }
    Ok((codec, data))
}
