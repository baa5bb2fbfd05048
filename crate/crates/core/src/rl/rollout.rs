//! Autoregressive compression episodes and their teacher-forced recomputation.

use rand::Rng;

use super::Trajectory;
use crate::model::{
    argmax, decode_on_tape, encode_on_tape, forward_encoder, log_prob, sample_token, IncrementalDecoder, ModelError,
    ModelParams, Tape, Var,
};
use crate::tokenizer::{Chunk, TokenId, TokenSequence, Vocab};

/// Samples a compressed sequence from the policy head, starting at BOS and
/// stopping at STOP or after `max_len` tokens.
pub fn rollout_compress<R: Rng + ?Sized>(
    params: &ModelParams,
    chunk: &Chunk,
    max_len: usize,
    temperature: f64,
    rng: &mut R,
) -> Result<Trajectory, ModelError> {
    let enc = forward_encoder(params, chunk)?;
    let mut dec = IncrementalDecoder::new(params, &enc)?;
    let mut traj = Trajectory::default();
    let mut tok = Vocab::BOS as usize;
    for _ in 0..max_len.max(1) {
        let out = dec.step(tok)?;
        let action = sample_token(&out.logits, temperature, rng);
        traj.logprobs.push(log_prob(&out.logits, temperature, action));
        traj.values.push(out.value);
        traj.actions.0.push(action as TokenId);
        if action == Vocab::STOP as usize {
            break;
        }
        tok = action;
    }
    Ok(traj)
}

/// Deterministic compression: argmax at every step, same stopping rule as [`rollout_compress`].
pub fn greedy_compress(params: &ModelParams, chunk: &Chunk, max_len: usize) -> Result<TokenSequence, ModelError> {
    let enc = forward_encoder(params, chunk)?;
    let mut dec = IncrementalDecoder::new(params, &enc)?;
    let mut actions = Vec::new();
    let mut tok = Vocab::BOS as usize;
    for _ in 0..max_len.max(1) {
        let out = dec.step(tok)?;
        let action = argmax(&out.logits);
        actions.push(action as TokenId);
        if action == Vocab::STOP as usize {
            break;
        }
        tok = action;
    }
    Ok(TokenSequence(actions))
}

/// Decoder inputs that teacher-force `actions`: BOS followed by all but the last action.
pub fn teacher_forced_inputs(actions: &[usize]) -> Vec<usize> {
    let mut ids = Vec::with_capacity(actions.len());
    ids.push(Vocab::BOS as usize);
    ids.extend_from_slice(&actions[..actions.len().saturating_sub(1)]);
    ids
}

/// Records one parallel pass over a finished episode; returns `(log π(aₜ) [n×1], v̂ₜ [n×1])`.
pub fn evaluate_actions_on_tape(
    tape: &mut Tape,
    chunk: &Chunk,
    actions: &[usize],
    temperature: f64,
) -> Result<(Var, Var), ModelError> {
    let src: Vec<usize> = chunk.tokens.ids().collect();
    let enc = encode_on_tape(tape, &src, chunk.valid_len)?;
    let dec_ids = teacher_forced_inputs(actions);
    let (logits, values) = decode_on_tape(tape, enc, chunk.valid_len, &dec_ids)?;
    let logp = tape.log_prob_pick(logits, actions, temperature);
    Ok((logp, values))
}

/// Log-probabilities and values of `actions` recomputed in one teacher-forced pass.
pub fn recompute_trajectory(
    params: &ModelParams,
    chunk: &Chunk,
    actions: &[usize],
    temperature: f64,
) -> Result<(Vec<f64>, Vec<f64>), ModelError> {
    let mut tape = Tape::new(params);
    let (logp, values) = evaluate_actions_on_tape(&mut tape, chunk, actions, temperature)?;
    Ok((tape.value(logp).data.clone(), tape.value(values).data.clone()))
}

/// What the decompressor's encoder sees for a compressed sequence: the
/// emitted tokens, or a lone STOP when nothing was emitted.
pub fn decompressor_source(actions: &[usize]) -> Vec<usize> {
    if actions.is_empty() {
        vec![Vocab::STOP as usize]
    } else {
        actions.to_vec()
    }
}
