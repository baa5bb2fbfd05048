use super::ModelError;
use crate::tokenizer::{Vocab, MAX_CHUNK_LEN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    Relu,
    Gelu,
}

impl Activation {
    pub(crate) fn code(self) -> u8 {
        match self {
            Activation::Relu => 0,
            Activation::Gelu => 1,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Activation::Relu),
            1 => Some(Activation::Gelu),
            _ => None,
        }
    }
}

/// Shape hyperparameters of the encoder-decoder transformer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelConfig {
    pub d_model: usize,
    pub n_heads: usize,
    pub n_layers_enc: usize,
    pub n_layers_dec: usize,
    pub d_ff: usize,
    pub vocab: usize,
    pub max_pos: usize,
    pub activation: Activation,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            d_model: 64,
            n_heads: 4,
            n_layers_enc: 2,
            n_layers_dec: 2,
            d_ff: 256,
            vocab: Vocab::SIZE,
            max_pos: MAX_CHUNK_LEN + 2,
            activation: Activation::Gelu,
        }
    }
}

impl ModelConfig {
    /// A small configuration that trains in seconds on one core.
    pub fn small() -> Self {
        Self {
            d_model: 32,
            n_heads: 2,
            n_layers_enc: 1,
            n_layers_dec: 1,
            d_ff: 64,
            ..Self::default()
        }
    }

    pub fn head_dim(&self) -> usize {
        self.d_model / self.n_heads
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: &str| Err(ModelError::InvalidConfig(msg.to_string()));
        if self.d_model == 0 || self.n_heads == 0 || self.d_ff == 0 {
            return bad("dimensions must be positive");
        }
        if !self.d_model.is_multiple_of(self.n_heads) {
            return bad("d_model must be divisible by n_heads");
        }
        if self.vocab == 0 || self.max_pos == 0 {
            return bad("vocab and max_pos must be positive");
        }
        Ok(())
    }

    /// Checks that chunks of `chunk_len` fit, including BOS and STOP on the decoder side.
    pub fn supports_chunk_len(&self, chunk_len: usize) -> bool {
        self.max_pos >= chunk_len + 2
    }
}
