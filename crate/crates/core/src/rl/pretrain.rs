//! Supervised sequence-to-sequence updates, used for identity pre-training
//! and for the decompressor's reconstruction objective.

use rand::Rng;
use rayon::prelude::*;

use super::rollout::teacher_forced_inputs;
use super::TrainError;
use crate::model::{
    adam_step, decode_on_tape, encode_on_tape, lm_loss_on_tape, GradientStore, ModelError, ModelParams, OptimizerState,
    Tape,
};
use crate::tokenizer::{Chunk, Vocab};

/// A source sequence (with its attendable length) and the target the decoder must produce.
#[derive(Debug, Clone, PartialEq)]
pub struct Seq2SeqExample {
    pub source: Vec<usize>,
    pub source_valid: usize,
    pub target: Vec<usize>,
}

/// Which side of the compressor/decompressor pair an identity target is built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityRole {
    /// Source is the padded chunk, target its payload followed by STOP.
    Compressor,
    /// Source is what an identity compressor would emit, target the payload.
    Decompressor,
}

impl Seq2SeqExample {
    pub fn identity(chunk: &Chunk, role: IdentityRole) -> Self {
        let payload: Vec<usize> = chunk.valid().iter().map(|&t| t as usize).collect();
        match role {
            IdentityRole::Compressor => {
                let mut target = payload;
                target.push(Vocab::STOP as usize);
                Self {
                    source: chunk.tokens.ids().collect(),
                    source_valid: chunk.valid_len,
                    target,
                }
            }
            IdentityRole::Decompressor => {
                let mut source = payload.clone();
                if chunk.valid_len < chunk.len() || source.is_empty() {
                    source.push(Vocab::STOP as usize);
                }
                Self {
                    source_valid: source.len(),
                    source,
                    target: payload,
                }
            }
        }
    }
}

/// Teacher-forced LM loss (mean nats) and its gradient for one example.
pub fn example_loss_and_grad(params: &ModelParams, ex: &Seq2SeqExample) -> Result<(f64, GradientStore), ModelError> {
    let mut tape = Tape::new(params);
    let enc = encode_on_tape(&mut tape, &ex.source, ex.source_valid)?;
    let dec_ids = teacher_forced_inputs(&ex.target);
    let (logits, _) = decode_on_tape(&mut tape, enc, ex.source_valid, &dec_ids)?;
    let loss = lm_loss_on_tape(&mut tape, logits, &ex.target, Some(Vocab::PAD as usize))?;
    Ok((tape.value(loss).data[0], tape.backward(loss)))
}

/// Batch-mean loss and gradient; examples are processed in parallel and
/// reduced in order.
pub fn batch_loss_and_grad(
    params: &ModelParams,
    batch: &[Seq2SeqExample],
) -> Result<(Vec<f64>, GradientStore), ModelError> {
    let results: Vec<_> = batch.par_iter().map(|ex| example_loss_and_grad(params, ex)).collect();
    let mut total = GradientStore::zeros_like(params);
    let mut losses = Vec::with_capacity(batch.len());
    let w = 1.0 / batch.len() as f64;
    for r in results {
        let (loss, g) = r?;
        losses.push(loss);
        total.add_scaled(&g, w);
    }
    Ok((losses, total))
}

/// One supervised Adam step; returns the per-example losses before the update.
pub fn supervised_step(
    params: &mut ModelParams,
    opt: &mut OptimizerState,
    batch: &[Seq2SeqExample],
    max_grad_norm: Option<f64>,
) -> Result<Vec<f64>, ModelError> {
    let (losses, mut grads) = batch_loss_and_grad(params, batch)?;
    if let Some(max) = max_grad_norm {
        grads.clip_global_norm(max);
    }
    adam_step(params, &grads, opt);
    Ok(losses)
}

/// Options for [`pretrain_identity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PretrainConfig {
    pub steps: usize,
    pub batch_size: usize,
    pub max_grad_norm: Option<f64>,
}

impl Default for PretrainConfig {
    fn default() -> Self {
        Self {
            steps: 500,
            batch_size: 16,
            max_grad_norm: Some(1.0),
        }
    }
}

/// Trains `params` to reproduce its input; returns the mean loss of each step.
pub fn pretrain_identity<R: Rng + ?Sized>(
    params: &mut ModelParams,
    opt: &mut OptimizerState,
    corpus: &[Chunk],
    role: IdentityRole,
    cfg: &PretrainConfig,
    rng: &mut R,
) -> Result<Vec<f64>, TrainError> {
    if corpus.is_empty() {
        return Err(TrainError::EmptyCorpus);
    }
    let examples: Vec<Seq2SeqExample> = corpus.iter().map(|c| Seq2SeqExample::identity(c, role)).collect();
    let mut curve = Vec::with_capacity(cfg.steps);
    for _ in 0..cfg.steps {
        let batch: Vec<Seq2SeqExample> = (0..cfg.batch_size.max(1))
            .map(|_| examples[rng.random_range(0..examples.len())].clone())
            .collect();
        let losses = supervised_step(params, opt, &batch, cfg.max_grad_norm)?;
        curve.push(losses.iter().sum::<f64>() / losses.len() as f64);
    }
    Ok(curve)
}
