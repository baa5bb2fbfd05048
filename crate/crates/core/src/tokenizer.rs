//! Byte-level tokenization and fixed-length chunking.
//!
//! Every byte maps to the token id of the same value. Four special ids sit
//! directly after the byte range so the payload region stays contiguous.

use thiserror::Error;

/// A token id. Byte tokens occupy `0..=255`, specials `256..260`.
pub type TokenId = u16;

/// Largest chunk length supported by the model context.
pub const MAX_CHUNK_LEN: usize = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TokenizerError {
    #[error("special token {0} found in byte payload")]
    SpecialTokenInPayload(TokenId),
    #[error("chunk size must be at least 1")]
    ZeroChunkSize,
}

/// The fixed byte-level vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vocab;

impl Vocab {
    pub const SIZE: usize = 260;
    pub const PAD: TokenId = 256;
    pub const BOS: TokenId = 257;
    pub const EOS: TokenId = 258;
    pub const STOP: TokenId = 259;

    pub fn is_byte(id: TokenId) -> bool {
        id < 256
    }

    pub fn is_special(id: TokenId) -> bool {
        (256..Self::SIZE as TokenId).contains(&id)
    }
}

/// Ordered token ids over the vocabulary.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenSequence(pub Vec<TokenId>);

impl TokenSequence {
    pub fn new(tokens: Vec<TokenId>) -> Self {
        Self(tokens)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[TokenId] {
        &self.0
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&t| t as usize)
    }
}

impl From<Vec<TokenId>> for TokenSequence {
    fn from(v: Vec<TokenId>) -> Self {
        Self(v)
    }
}

/// A fixed-length window of tokens; positions at or after `valid_len` hold PAD.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub tokens: TokenSequence,
    pub valid_len: usize,
}

impl Chunk {
    /// Builds a chunk of length `len` from up to `len` payload tokens.
    pub fn from_tokens(payload: &[TokenId], len: usize) -> Self {
        assert!(payload.len() <= len, "payload longer than chunk");
        let mut tokens = Vec::with_capacity(len);
        tokens.extend_from_slice(payload);
        tokens.resize(len, Vocab::PAD);
        Self {
            tokens: TokenSequence(tokens),
            valid_len: payload.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// The non-padding prefix.
    pub fn valid(&self) -> &[TokenId] {
        &self.tokens.0[..self.valid_len]
    }
}

pub fn encode_bytes(data: &[u8]) -> TokenSequence {
    TokenSequence(data.iter().map(|&b| b as TokenId).collect())
}

pub fn decode_tokens(seq: &TokenSequence) -> Result<Vec<u8>, TokenizerError> {
    seq.0
        .iter()
        .map(|&t| u8::try_from(t).map_err(|_| TokenizerError::SpecialTokenInPayload(t)))
        .collect()
}

/// Splits `seq` into chunks of `size` tokens, PAD-filling the last one.
pub fn chunk_stream(seq: &TokenSequence, size: usize) -> Result<Vec<Chunk>, TokenizerError> {
    if size == 0 {
        return Err(TokenizerError::ZeroChunkSize);
    }
    Ok(seq.0.chunks(size).map(|c| Chunk::from_tokens(c, size)).collect())
}

/// Concatenates the valid prefixes of `chunks`.
pub fn unchunk(chunks: &[Chunk]) -> TokenSequence {
    TokenSequence(chunks.iter().flat_map(|c| c.valid().iter().copied()).collect())
}
