//! Byte-oriented range coder: 32-bit range, low kept in 64 bits so a carry
//! out of the top byte can ripple back through pending 0xFF bytes.
//! Everything here is integer arithmetic.

use super::freq::{FrequencyModel, EOS_SYMBOL};
use super::BaselineError;

const TOP: u32 = 1 << 24;
/// Bytes a decoder may read past the end before the stream is declared corrupt.
const MAX_OVERRUN: usize = 8;

struct Encoder {
    low: u64,
    range: u32,
    cache: u8,
    cache_size: u64,
    out: Vec<u8>,
}

impl Encoder {
    fn shift_low(&mut self) {
        if self.low < 0xFF00_0000 || self.low > 0xFFFF_FFFF {
            let carry = (self.low >> 32) as u8;
            let mut byte = self.cache;
            loop {
                self.out.push(byte.wrapping_add(carry));
                byte = 0xFF;
                self.cache_size -= 1;
                if self.cache_size == 0 {
                    break;
                }
            }
            self.cache = (self.low >> 24) as u8;
        }
        self.cache_size += 1;
        self.low = (self.low & 0x00FF_FFFF) << 8;
    }

    fn encode(&mut self, model: &FrequencyModel, sym: usize) {
        let (lo, hi) = model.interval(sym);
        let r = self.range / model.total() as u32;
        self.low += r as u64 * lo;
        self.range = r * (hi - lo) as u32;
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
    }
}

/// Encodes `data` followed by EOS. The first output byte is always zero.
pub fn range_encode(data: &[u8], model: &FrequencyModel) -> Vec<u8> {
    let mut model = model.clone();
    let mut enc = Encoder {
        low: 0,
        range: u32::MAX,
        cache: 0,
        cache_size: 1,
        out: Vec::new(),
    };
    for &b in data {
        enc.encode(&model, b as usize);
        model.update(b as usize);
    }
    enc.encode(&model, EOS_SYMBOL);
    for _ in 0..5 {
        enc.shift_low();
    }
    enc.out
}

struct Input<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Input<'_> {
    fn next(&mut self) -> Result<u8, BaselineError> {
        let b = self.bytes.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        if self.pos > self.bytes.len() + MAX_OVERRUN {
            return Err(BaselineError::CorruptBitstream(format!(
                "no end-of-stream symbol within {MAX_OVERRUN} bytes past the input"
            )));
        }
        Ok(b)
    }
}

/// Decodes until EOS. `model` must be the initial model given to the encoder.
pub fn range_decode(bytes: &[u8], model: &FrequencyModel) -> Result<Vec<u8>, BaselineError> {
    let mut model = model.clone();
    let mut input = Input { bytes, pos: 0 };
    let mut code: u32 = 0;
    let mut range = u32::MAX;
    for _ in 0..5 {
        code = (code << 8) | input.next()? as u32;
    }
    let mut out = Vec::new();
    loop {
        let total = model.total();
        let r = range / total as u32;
        let target = (code / r) as u64;
        if target >= total {
            return Err(BaselineError::CorruptBitstream(
                "code value outside the interval".into(),
            ));
        }
        let sym = model.find(target);
        let (lo, hi) = model.interval(sym);
        code -= r * lo as u32;
        range = r * (hi - lo) as u32;
        while range < TOP {
            range <<= 8;
            code = (code << 8) | input.next()? as u32;
        }
        if sym == EOS_SYMBOL {
            return Ok(out);
        }
        if sym > EOS_SYMBOL {
            return Err(BaselineError::CorruptBitstream(format!(
                "symbol {sym} outside the byte alphabet"
            )));
        }
        out.push(sym as u8);
        model.update(sym);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn coding_path_has_no_floating_point() {
        let src = include_str!("range.rs");
        let code = src.split("#[cfg(test)]").next().unwrap();
        for needle in ["f32", "f64", "as f"] {
            assert!(!code.contains(needle), "found `{needle}` in the range coder");
        }
        let b = code.as_bytes();
        let float_literal = b
            .windows(3)
            .any(|w| w[0].is_ascii_digit() && w[1] == b'.' && w[2].is_ascii_digit());
        assert!(!float_literal, "float literal in the range coder");
    }

    #[test]
    fn carry_propagation_and_edges() {
        let model = FrequencyModel::adaptive();
        assert!(range_decode(&range_encode(&[], &model), &model).unwrap().is_empty());
        // long runs of the likeliest symbol push low toward 0xFF.. and force carries
        for byte in [0u8, 0xff, 0x80] {
            let data = vec![byte; 50_000];
            assert_eq!(range_decode(&range_encode(&data, &model), &model).unwrap(), data);
        }
        let junk: Vec<u8> = (0..64u32).map(|i| (i * 37 % 251) as u8).collect();
        let _ = range_decode(&junk, &model);
    }

    proptest! {
        #[test]
        fn round_trip(data in prop::collection::vec(any::<u8>(), 0..2000)) {
            let model = FrequencyModel::adaptive();
            let enc = range_encode(&data, &model);
            prop_assert_eq!(enc[0], 0);
            prop_assert_eq!(range_decode(&enc, &model).unwrap(), data);
        }
    }
}
