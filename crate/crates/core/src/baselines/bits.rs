/// Appends bits most-significant-first into bytes.
#[derive(Debug, Clone, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    bit_len: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_bit(&mut self, bit: bool) {
        let used = (self.bit_len % 8) as u32;
        if used == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().expect("byte pushed above") |= 0x80 >> used;
        }
        self.bit_len += 1;
    }

    /// Writes the low `n` bits of `value`, high bit first.
    pub fn push_bits(&mut self, value: u64, n: u32) {
        for i in (0..n).rev() {
            self.push_bit((value >> i) & 1 == 1);
        }
    }

    pub fn bit_len(&self) -> u64 {
        self.bit_len
    }

    /// The bytes written so far; the last byte is zero-padded.
    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

/// Reads bits most-significant-first. Past the end it yields zeros and
/// counts how many it had to invent.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub fn read_bit(&mut self) -> bool {
        let byte = (self.pos / 8) as usize;
        let bit = self.bytes.get(byte).is_some_and(|b| (b >> (7 - self.pos % 8)) & 1 == 1);
        self.pos += 1;
        bit
    }

    pub fn read_bits(&mut self, n: u32) -> u64 {
        (0..n).fold(0, |acc, _| (acc << 1) | self.read_bit() as u64)
    }

    /// Bits read beyond the end of the input.
    pub fn overrun(&self) -> u64 {
        self.pos.saturating_sub(self.bytes.len() as u64 * 8)
    }

    pub fn position(&self) -> u64 {
        self.pos
    }
}
