//! Tiny encoder-decoder transformer with a policy (language-modeling) head
//! and a scalar value head, trained with hand-written reverse-mode gradients.

mod checkpoint;
mod config;
mod loss;
mod optim;
mod params;
mod sampling;
mod tape;
pub mod tensor;
mod transformer;

use thiserror::Error;

pub use checkpoint::{load, read_checkpoint, save, to_bytes, write_checkpoint};
pub use config::{Activation, ModelConfig};
pub use loss::{lm_loss, lm_loss_on_tape};
pub use optim::{adam_step, OptimizerState, DEFAULT_LR};
pub use params::{GradientStore, Layout, ModelParams, ParamId};
pub use sampling::{log_prob, sample_token};
pub use tape::{AttnMask, Tape, Var};
pub use tensor::Tensor;
pub use transformer::{
    argmax, decode_on_tape, encode_ids, encode_on_tape, forward_decoder, forward_encoder, greedy_decode, EncoderStates,
    IncrementalDecoder, StepOutput,
};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model config: {0}")]
    InvalidConfig(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("token {token} outside vocabulary of {vocab}")]
    TokenOutOfRange { token: usize, vocab: usize },
    #[error("every target position is padding")]
    EmptyTarget,
    #[error("bad checkpoint: {0}")]
    BadCheckpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PartialEq for ModelError {
    fn eq(&self, other: &Self) -> bool {
        use ModelError::*;
        match (self, other) {
            (InvalidConfig(a), InvalidConfig(b)) => a == b,
            (ShapeMismatch(a), ShapeMismatch(b)) => a == b,
            (TokenOutOfRange { token: a, vocab: b }, TokenOutOfRange { token: c, vocab: d }) => a == c && b == d,
            (EmptyTarget, EmptyTarget) => true,
            (BadCheckpoint(a), BadCheckpoint(b)) => a == b,
            _ => false,
        }
    }
}
