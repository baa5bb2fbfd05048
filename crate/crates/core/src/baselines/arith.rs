//! Bitwise arithmetic coder with 32-bit state and quarter-range renormalization.

use super::bits::{BitReader, BitWriter};
use super::freq::{FrequencyModel, EOS_SYMBOL};
use super::BaselineError;

const BITS: u32 = 32;
const TOP: u64 = (1 << BITS) - 1;
const HALF: u64 = 1 << (BITS - 1);
const QUARTER: u64 = 1 << (BITS - 2);
/// Bits a decoder may read past the end before the stream is declared corrupt.
const MAX_OVERRUN: u64 = 64;

/// Coded output with its exact length in bits; `bytes` is zero-padded to a byte boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedBits {
    pub bytes: Vec<u8>,
    pub bit_len: u64,
}

struct Encoder {
    low: u64,
    high: u64,
    pending: u64,
    out: BitWriter,
}

impl Encoder {
    fn emit(&mut self, bit: bool) {
        self.out.push_bit(bit);
        for _ in 0..self.pending {
            self.out.push_bit(!bit);
        }
        self.pending = 0;
    }

    fn encode(&mut self, model: &FrequencyModel, sym: usize) {
        let (lo, hi) = model.interval(sym);
        let range = self.high - self.low + 1;
        self.high = self.low + range * hi / model.total() - 1;
        self.low += range * lo / model.total();
        loop {
            if self.high < HALF {
                self.emit(false);
            } else if self.low >= HALF {
                self.emit(true);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < 3 * QUARTER {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
    }

    fn finish(mut self) -> BitWriter {
        // two more bits pin a point inside [low, high]
        self.pending += 1;
        self.emit(self.low >= QUARTER);
        self.out
    }
}

/// Encodes `data` followed by EOS, starting from `model` (cloned; adaptive
/// models evolve identically in the decoder).
pub fn ac_encode(data: &[u8], model: &FrequencyModel) -> EncodedBits {
    let mut model = model.clone();
    let mut enc = Encoder {
        low: 0,
        high: TOP,
        pending: 0,
        out: BitWriter::new(),
    };
    for &b in data {
        enc.encode(&model, b as usize);
        model.update(b as usize);
    }
    enc.encode(&model, EOS_SYMBOL);
    let out = enc.finish();
    EncodedBits {
        bit_len: out.bit_len(),
        bytes: out.into_bytes(),
    }
}

/// Decodes until EOS. `model` must be the initial model given to the encoder.
pub fn ac_decode(bytes: &[u8], model: &FrequencyModel) -> Result<Vec<u8>, BaselineError> {
    let mut model = model.clone();
    let mut input = BitReader::new(bytes);
    let mut value = input.read_bits(BITS);
    let (mut low, mut high) = (0u64, TOP);
    let mut out = Vec::new();
    loop {
        if input.overrun() > MAX_OVERRUN {
            return Err(BaselineError::CorruptBitstream(format!(
                "no end-of-stream symbol within {MAX_OVERRUN} bits past the input"
            )));
        }
        let range = high - low + 1;
        let total = model.total();
        let target = ((value - low + 1) * total - 1) / range;
        if target >= total {
            return Err(BaselineError::CorruptBitstream(
                "code value outside the interval".into(),
            ));
        }
        let sym = model.find(target);
        let (lo, hi) = model.interval(sym);
        high = low + range * hi / total - 1;
        low += range * lo / total;
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
        loop {
            if high < HALF {
            } else if low >= HALF {
                low -= HALF;
                high -= HALF;
                value -= HALF;
            } else if low >= QUARTER && high < 3 * QUARTER {
                low -= QUARTER;
                high -= QUARTER;
                value -= QUARTER;
            } else {
                break;
            }
            low <<= 1;
            high = (high << 1) | 1;
            value = (value << 1) | input.read_bit() as u64;
        }
    }
}
