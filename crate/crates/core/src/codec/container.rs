//! Byte layout of a compressed file. Integers are little-endian.
//!
//! ```text
//! header  "RLTC" | version u8 | vocab u32 | chunk_len u16 | original_len u64 | n_chunks u32
//! record  n_tokens u16 | packed tokens | n_corrections u16 | (pos u16, token u16)*
//! ```

use super::pack::{pack_tokens, unpack_tokens};
use super::CodecError;
use crate::tokenizer::{TokenSequence, MAX_CHUNK_LEN};

pub const MAGIC: [u8; 4] = *b"RLTC";
pub const VERSION: u8 = 1;
pub const HEADER_BYTES: usize = 4 + 1 + 4 + 2 + 8 + 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Correction {
    pub pos: u16,
    pub token: u16,
}

/// One chunk: the compressed tokens (without the implied STOP) and the corrections.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChunkRecord {
    pub tokens: TokenSequence,
    pub corrections: Vec<Correction>,
}

impl ChunkRecord {
    fn payload_bytes(&self, vocab: usize) -> usize {
        2 + (self.tokens.len() * super::bits_per_token(vocab)).div_ceil(8)
    }

    fn corrections_bytes(&self) -> usize {
        2 + 4 * self.corrections.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedContainer {
    pub vocab: u32,
    pub chunk_len: u16,
    pub original_len: u64,
    pub records: Vec<ChunkRecord>,
}

/// Where the bytes of a container go. The parts sum to `container_bytes`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SizeReport {
    pub original_bytes: u64,
    pub container_bytes: u64,
    /// Token counts and packed tokens.
    pub token_payload_bytes: u64,
    /// Correction counts and entries.
    pub corrections_bytes: u64,
    pub header_bytes: u64,
}

impl SizeReport {
    pub fn parts_sum(&self) -> u64 {
        self.token_payload_bytes + self.corrections_bytes + self.header_bytes
    }
}

fn corrupt(msg: impl Into<String>) -> CodecError {
    CodecError::CorruptContainer(msg.into())
}

/// Number of chunks a stream of `len` bytes splits into.
pub(crate) fn expected_chunks(len: u64, chunk_len: u16) -> u64 {
    len.div_ceil(chunk_len as u64)
}

impl CompressedContainer {
    /// Valid length of chunk `i`; every chunk is full except possibly the last.
    pub fn valid_len(&self, i: usize) -> usize {
        let start = i as u64 * self.chunk_len as u64;
        (self.original_len - start).min(self.chunk_len as u64) as usize
    }

    pub fn size_report(&self) -> SizeReport {
        let vocab = self.vocab as usize;
        let token_payload_bytes: usize = self.records.iter().map(|r| r.payload_bytes(vocab)).sum();
        let corrections_bytes: usize = self.records.iter().map(ChunkRecord::corrections_bytes).sum();
        SizeReport {
            original_bytes: self.original_len,
            container_bytes: (HEADER_BYTES + token_payload_bytes + corrections_bytes) as u64,
            token_payload_bytes: token_payload_bytes as u64,
            corrections_bytes: corrections_bytes as u64,
            header_bytes: HEADER_BYTES as u64,
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CodecError> {
        let mut out = Vec::with_capacity(self.size_report().container_bytes as usize);
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&self.vocab.to_le_bytes());
        out.extend_from_slice(&self.chunk_len.to_le_bytes());
        out.extend_from_slice(&self.original_len.to_le_bytes());
        out.extend_from_slice(&(self.records.len() as u32).to_le_bytes());
        for r in &self.records {
            let n = u16::try_from(r.tokens.len()).map_err(|_| corrupt("too many tokens in record"))?;
            out.extend_from_slice(&n.to_le_bytes());
            out.extend_from_slice(&pack_tokens(&r.tokens, self.vocab as usize)?);
            let m = u16::try_from(r.corrections.len()).map_err(|_| corrupt("too many corrections in record"))?;
            out.extend_from_slice(&m.to_le_bytes());
            for c in &r.corrections {
                out.extend_from_slice(&c.pos.to_le_bytes());
                out.extend_from_slice(&c.token.to_le_bytes());
            }
        }
        Ok(out)
    }

    /// Parses and structurally validates a container. Truncation and trailing
    /// bytes are reported as corruption.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        let n = bytes.len().min(4);
        if bytes[..n] != MAGIC[..n] {
            return Err(CodecError::BadMagic);
        }
        let mut r = Reader { bytes, pos: 0 };
        r.take(4)?;
        let version = r.u8()?;
        if version != VERSION {
            return Err(CodecError::VersionUnsupported(version));
        }
        let vocab = r.u32()?;
        let chunk_len = r.u16()?;
        let original_len = r.u64()?;
        let n_chunks = r.u32()?;
        if !(2..=1 << 16).contains(&vocab) {
            return Err(corrupt(format!("vocabulary size {vocab}")));
        }
        if chunk_len == 0 || chunk_len as usize > MAX_CHUNK_LEN {
            return Err(corrupt(format!("chunk length {chunk_len}")));
        }
        if n_chunks as u64 != expected_chunks(original_len, chunk_len) {
            return Err(corrupt(format!(
                "{n_chunks} chunks cannot hold {original_len} bytes at chunk length {chunk_len}"
            )));
        }
        let w = super::bits_per_token(vocab as usize);
        let mut records = Vec::with_capacity(n_chunks as usize);
        for _ in 0..n_chunks {
            let n_tokens = r.u16()? as usize;
            if n_tokens > chunk_len as usize {
                return Err(corrupt(format!(
                    "record holds {n_tokens} tokens, chunk length is {chunk_len}"
                )));
            }
            let payload = r.take((n_tokens * w).div_ceil(8))?;
            let tokens = unpack_tokens(payload, n_tokens, vocab as usize)?;
            let n_corr = r.u16()? as usize;
            if n_corr > chunk_len as usize {
                return Err(corrupt(format!(
                    "record holds {n_corr} corrections, chunk length is {chunk_len}"
                )));
            }
            let mut corrections = Vec::with_capacity(n_corr);
            for _ in 0..n_corr {
                corrections.push(Correction {
                    pos: r.u16()?,
                    token: r.u16()?,
                });
            }
            records.push(ChunkRecord { tokens, corrections });
        }
        if r.pos != bytes.len() {
            return Err(corrupt(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        Ok(Self {
            vocab,
            chunk_len,
            original_len,
            records,
        })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| corrupt("truncated"))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], CodecError> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, CodecError> {
        self.array().map(u16::from_le_bytes)
    }

    fn u32(&mut self) -> Result<u32, CodecError> {
        self.array().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64, CodecError> {
        self.array().map(u64::from_le_bytes)
    }
}
