use super::CodecError;
use crate::tokenizer::{TokenId, TokenSequence};

/// `ceil(log2 vocab)`, at least 1.
pub fn bits_per_token(vocab: usize) -> usize {
    let mut w = 1;
    while (1usize << w) < vocab {
        w += 1;
    }
    w
}

fn packed_len(n_tokens: usize, width: usize) -> usize {
    (n_tokens * width).div_ceil(8)
}

/// Packs tokens at a fixed width, most significant bit first; the final byte is zero-padded.
pub fn pack_tokens(tokens: &TokenSequence, vocab: usize) -> Result<Vec<u8>, CodecError> {
    let w = bits_per_token(vocab);
    let mut out = vec![0u8; packed_len(tokens.len(), w)];
    let mut bit = 0;
    for &t in tokens.as_slice() {
        if t as usize >= vocab {
            return Err(CodecError::TokenOutOfRange {
                token: t as usize,
                vocab,
            });
        }
        for i in (0..w).rev() {
            if (t >> i) & 1 == 1 {
                out[bit / 8] |= 0x80 >> (bit % 8);
            }
            bit += 1;
        }
    }
    Ok(out)
}

/// Inverse of [`pack_tokens`]. `payload` must be exactly the packed length.
pub fn unpack_tokens(payload: &[u8], n_tokens: usize, vocab: usize) -> Result<TokenSequence, CodecError> {
    let w = bits_per_token(vocab);
    let expected = packed_len(n_tokens, w);
    if payload.len() != expected {
        return Err(CodecError::PayloadTruncated {
            expected,
            actual: payload.len(),
        });
    }
    let mut tokens = Vec::with_capacity(n_tokens);
    let mut bit = 0;
    for _ in 0..n_tokens {
        let mut t: TokenId = 0;
        for _ in 0..w {
            t = (t << 1) | ((payload[bit / 8] >> (7 - bit % 8)) & 1) as TokenId;
            bit += 1;
        }
        if t as usize >= vocab {
            return Err(CodecError::TokenOutOfRange {
                token: t as usize,
                vocab,
            });
        }
        tokens.push(t);
    }
    Ok(TokenSequence(tokens))
}
