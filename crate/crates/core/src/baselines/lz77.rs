//! LZ77 with explicit literals: each token is a literal byte or a
//! back-reference `(offset, length)` into the last `window` bytes.

use super::bits::{BitReader, BitWriter};
use super::BaselineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lz77Token {
    Literal(u8),
    /// Copy `length` bytes starting `offset` bytes back. The copy may run
    /// into the bytes it produces (`length > offset`).
    Match {
        offset: usize,
        length: usize,
    },
}

pub const DEFAULT_WINDOW: usize = 4096;
pub const DEFAULT_LOOKAHEAD: usize = 256;

/// Greedy longest-match parse. Among equally long matches the nearest wins;
/// positions with no match (not even one byte) become literals.
pub fn lz77_tokenize(data: &[u8], window: usize, lookahead: usize) -> Vec<Lz77Token> {
    assert!(window >= 1 && lookahead >= 1, "window and lookahead must be positive");
    // prev[i]: the previous position holding the same byte, so candidates are
    // visited nearest first.
    let mut head = [usize::MAX; 256];
    let mut prev = vec![usize::MAX; data.len()];
    let mut indexed = 0;
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < data.len() {
        while indexed < i {
            let b = data[indexed] as usize;
            prev[indexed] = head[b];
            head[b] = indexed;
            indexed += 1;
        }
        let limit = lookahead.min(data.len() - i);
        let (mut best_len, mut best_off) = (0, 0);
        let mut cand = head[data[i] as usize];
        while cand != usize::MAX && i - cand <= window {
            let len = data[i..i + limit]
                .iter()
                .zip(&data[cand..])
                .take_while(|(a, b)| a == b)
                .count();
            if len > best_len {
                best_len = len;
                best_off = i - cand;
                if len == limit {
                    break;
                }
            }
            cand = prev[cand];
        }
        if best_len == 0 {
            tokens.push(Lz77Token::Literal(data[i]));
            i += 1;
        } else {
            tokens.push(Lz77Token::Match {
                offset: best_off,
                length: best_len,
            });
            i += best_len;
        }
    }
    tokens
}

pub fn lz77_reconstruct(tokens: &[Lz77Token]) -> Result<Vec<u8>, BaselineError> {
    let mut out = Vec::new();
    for t in tokens {
        match *t {
            Lz77Token::Literal(b) => out.push(b),
            Lz77Token::Match { offset, length } => {
                if offset == 0 || offset > out.len() {
                    return Err(BaselineError::DanglingOffset {
                        offset,
                        position: out.len(),
                    });
                }
                let start = out.len() - offset;
                for k in 0..length {
                    out.push(out[start + k]);
                }
            }
        }
    }
    Ok(out)
}

fn width(max_value: usize) -> u32 {
    usize::BITS - max_value.leading_zeros()
}

/// Fixed-width serialization: window u32, lookahead u32, token count u64
/// (little-endian), then per token a flag bit followed by 8 literal bits or
/// `offset - 1` and `length - 1` at the widths the window and lookahead need.
pub fn lz77_encode_fixed(data: &[u8], window: usize, lookahead: usize) -> Vec<u8> {
    let tokens = lz77_tokenize(data, window, lookahead);
    let (ow, lw) = (width(window - 1), width(lookahead - 1));
    let mut bits = BitWriter::new();
    for t in &tokens {
        match *t {
            Lz77Token::Literal(b) => {
                bits.push_bit(false);
                bits.push_bits(b as u64, 8);
            }
            Lz77Token::Match { offset, length } => {
                bits.push_bit(true);
                bits.push_bits((offset - 1) as u64, ow);
                bits.push_bits((length - 1) as u64, lw);
            }
        }
    }
    let mut out = Vec::with_capacity(16 + bits.bit_len().div_ceil(8) as usize);
    out.extend_from_slice(&(window as u32).to_le_bytes());
    out.extend_from_slice(&(lookahead as u32).to_le_bytes());
    out.extend_from_slice(&(tokens.len() as u64).to_le_bytes());
    out.extend_from_slice(&bits.into_bytes());
    out
}

pub fn lz77_decode_fixed(bytes: &[u8]) -> Result<Vec<u8>, BaselineError> {
    if bytes.len() < 16 {
        return Err(BaselineError::Truncated);
    }
    let window = u32::from_le_bytes(bytes[0..4].try_into().expect("4 bytes")) as usize;
    let lookahead = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    let n = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    if window == 0 || lookahead == 0 {
        return Err(BaselineError::CorruptBitstream("zero window or lookahead".into()));
    }
    let (ow, lw) = (width(window - 1), width(lookahead - 1));
    let payload = &bytes[16..];
    // every token takes at least one bit
    if n > payload.len() as u64 * 8 {
        return Err(BaselineError::Truncated);
    }
    let mut r = BitReader::new(payload);
    let mut tokens = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let t = if r.read_bit() {
            Lz77Token::Match {
                offset: r.read_bits(ow) as usize + 1,
                length: r.read_bits(lw) as usize + 1,
            }
        } else {
            Lz77Token::Literal(r.read_bits(8) as u8)
        };
        tokens.push(t);
    }
    if r.overrun() > 0 || r.position().div_ceil(8) != payload.len() as u64 {
        return Err(BaselineError::Truncated);
    }
    lz77_reconstruct(&tokens)
}
