//! Encoder-decoder forward passes: recorded on a [`Tape`] for training, and a
//! KV-cached step-by-step decoder for autoregressive generation.

use super::config::Activation;
use super::params::{AttnIds, FeedForwardIds, ModelParams};
use super::tape::{AttnMask, Tape, Var};
use super::tensor::{self, layer_norm_row, matmul, vecmat, Tensor};
use super::ModelError;
use crate::tokenizer::Chunk;

/// Encoder output together with the number of attendable (non-PAD) positions.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderStates {
    pub hidden: Tensor,
    pub valid_len: usize,
}

fn check_ids(params: &ModelParams, ids: &[usize]) -> Result<(), ModelError> {
    let cfg = &params.config;
    if ids.len() > cfg.max_pos {
        return Err(ModelError::ShapeMismatch(format!(
            "sequence length {} exceeds max_pos {}",
            ids.len(),
            cfg.max_pos
        )));
    }
    if let Some(&bad) = ids.iter().find(|&&t| t >= cfg.vocab) {
        return Err(ModelError::TokenOutOfRange {
            token: bad,
            vocab: cfg.vocab,
        });
    }
    Ok(())
}

fn embed(tape: &mut Tape, ids: &[usize]) -> Var {
    let layout = &tape.params().layout;
    let (tok, pos) = (layout.tok_emb, layout.pos_emb);
    let positions: Vec<usize> = (0..ids.len()).collect();
    let t = tape.gather(Var::Param(tok), ids);
    let p = tape.gather(Var::Param(pos), &positions);
    tape.add(t, p)
}

fn attention_block(tape: &mut Tape, x: Var, kv_src: Var, ids: AttnIds, mask: AttnMask) -> Var {
    let heads = tape.params().config.n_heads;
    let q = tape.matmul(x, Var::Param(ids.wq));
    let k = tape.matmul(kv_src, Var::Param(ids.wk));
    let v = tape.matmul(kv_src, Var::Param(ids.wv));
    let a = tape.attention(q, k, v, heads, mask);
    tape.matmul(a, Var::Param(ids.wo))
}

fn feed_forward(tape: &mut Tape, x: Var, ids: FeedForwardIds, act: Activation) -> Var {
    let h = tape.matmul(x, Var::Param(ids.w1));
    let h = tape.add_bias(h, Var::Param(ids.b1));
    let h = tape.activate(h, act);
    let o = tape.matmul(h, Var::Param(ids.w2));
    tape.add_bias(o, Var::Param(ids.b2))
}

/// Records the bidirectional encoder; positions `>= valid_len` are hidden from attention.
pub fn encode_on_tape(tape: &mut Tape, ids: &[usize], valid_len: usize) -> Result<Var, ModelError> {
    let params = tape.params();
    check_ids(params, ids)?;
    let cfg = params.config;
    let layout = &params.layout;
    let mask = AttnMask::fully_visible(valid_len.min(ids.len()));
    let mut x = embed(tape, ids);
    for layer in &layout.enc {
        let h = tape.layer_norm(x, layer.ln_attn);
        let a = attention_block(tape, h, h, layer.attn, mask);
        x = tape.add(x, a);
        let h = tape.layer_norm(x, layer.ln_ff);
        let f = feed_forward(tape, h, layer.ff, cfg.activation);
        x = tape.add(x, f);
    }
    Ok(tape.layer_norm(x, layout.enc_norm))
}

/// Records the causal decoder with cross-attention; returns `(logits [T × vocab], values [T × 1])`.
pub fn decode_on_tape(
    tape: &mut Tape,
    enc: Var,
    enc_valid_len: usize,
    dec_ids: &[usize],
) -> Result<(Var, Var), ModelError> {
    let params = tape.params();
    check_ids(params, dec_ids)?;
    let cfg = params.config;
    let layout = &params.layout;
    let self_mask = AttnMask::causal(dec_ids.len());
    let cross_mask = AttnMask::fully_visible(enc_valid_len.min(tape.value(enc).rows));
    let mut x = embed(tape, dec_ids);
    for layer in &layout.dec {
        let h = tape.layer_norm(x, layer.ln_self);
        let a = attention_block(tape, h, h, layer.self_attn, self_mask);
        x = tape.add(x, a);
        let h = tape.layer_norm(x, layer.ln_cross);
        let a = attention_block(tape, h, enc, layer.cross_attn, cross_mask);
        x = tape.add(x, a);
        let h = tape.layer_norm(x, layer.ln_ff);
        let f = feed_forward(tape, h, layer.ff, cfg.activation);
        x = tape.add(x, f);
    }
    let h = tape.layer_norm(x, layout.dec_norm);
    let logits = tape.matmul(h, Var::Param(layout.lm_w));
    let logits = tape.add_bias(logits, Var::Param(layout.lm_b));
    let values = tape.matmul(h, Var::Param(layout.value_w));
    let values = tape.add_bias(values, Var::Param(layout.value_b));
    Ok((logits, values))
}

/// Encoder hidden states `[S × d_model]` for a chunk.
pub fn forward_encoder(params: &ModelParams, chunk: &Chunk) -> Result<EncoderStates, ModelError> {
    let ids: Vec<usize> = chunk.tokens.ids().collect();
    encode_ids(params, &ids, chunk.valid_len)
}

pub fn encode_ids(params: &ModelParams, ids: &[usize], valid_len: usize) -> Result<EncoderStates, ModelError> {
    let mut tape = Tape::new(params);
    let h = encode_on_tape(&mut tape, ids, valid_len)?;
    Ok(EncoderStates {
        hidden: tape.value(h).clone(),
        valid_len: valid_len.min(ids.len()),
    })
}

/// Teacher-forced decoder pass: logits `[T × vocab]` and critic values `[T]`.
pub fn forward_decoder(
    params: &ModelParams,
    enc: &EncoderStates,
    dec_ids: &[usize],
) -> Result<(Tensor, Vec<f64>), ModelError> {
    if enc.hidden.cols != params.config.d_model {
        return Err(ModelError::ShapeMismatch("encoder width differs from d_model".into()));
    }
    let mut tape = Tape::new(params);
    let e = tape.constant(enc.hidden.clone());
    let (logits, values) = decode_on_tape(&mut tape, e, enc.valid_len, dec_ids)?;
    Ok((tape.value(logits).clone(), tape.value(values).data.clone()))
}

/// Output of one incremental decoder step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    pub logits: Vec<f64>,
    pub value: f64,
}

struct LayerCache {
    self_k: Vec<f64>,
    self_v: Vec<f64>,
    cross_k: Tensor,
    cross_v: Tensor,
}

/// Autoregressive decoder that caches self-attention keys and values, so each
/// step costs one position of compute.
pub struct IncrementalDecoder<'p> {
    params: &'p ModelParams,
    enc_len: usize,
    layers: Vec<LayerCache>,
    pos: usize,
}

fn attend_row(q: &[f64], keys: &[f64], values: &[f64], n_keys: usize, heads: usize) -> Vec<f64> {
    let d = q.len();
    let dh = d / heads;
    let scale = 1.0 / (dh as f64).sqrt();
    let mut out = vec![0.0; d];
    if n_keys == 0 {
        return out;
    }
    let mut scores = vec![0.0; n_keys];
    for h in 0..heads {
        let cols = h * dh..(h + 1) * dh;
        for (s, sc) in scores.iter_mut().enumerate() {
            *sc = tensor::dot(&q[cols.clone()], &keys[s * d..(s + 1) * d][cols.clone()]) * scale;
        }
        tensor::softmax_in_place(&mut scores);
        for (s, &p) in scores.iter().enumerate() {
            tensor::axpy(&mut out[cols.clone()], p, &values[s * d..(s + 1) * d][cols.clone()]);
        }
    }
    out
}

fn ff_row(params: &ModelParams, x: &[f64], ids: FeedForwardIds) -> Vec<f64> {
    let mut h = vecmat(x, params.get(ids.w1));
    for (v, b) in h.iter_mut().zip(&params.get(ids.b1).data) {
        *v += b;
        *v = match params.config.activation {
            Activation::Gelu => tensor::gelu(*v),
            Activation::Relu => v.max(0.0),
        };
    }
    let mut o = vecmat(&h, params.get(ids.w2));
    for (v, b) in o.iter_mut().zip(&params.get(ids.b2).data) {
        *v += b;
    }
    o
}

impl<'p> IncrementalDecoder<'p> {
    pub fn new(params: &'p ModelParams, enc: &EncoderStates) -> Result<Self, ModelError> {
        if enc.hidden.cols != params.config.d_model {
            return Err(ModelError::ShapeMismatch("encoder width differs from d_model".into()));
        }
        let layers = params
            .layout
            .dec
            .iter()
            .map(|l| LayerCache {
                self_k: Vec::new(),
                self_v: Vec::new(),
                cross_k: matmul(&enc.hidden, params.get(l.cross_attn.wk)),
                cross_v: matmul(&enc.hidden, params.get(l.cross_attn.wv)),
            })
            .collect();
        Ok(Self {
            params,
            enc_len: enc.valid_len.min(enc.hidden.rows),
            layers,
            pos: 0,
        })
    }

    /// Number of tokens consumed so far.
    pub fn position(&self) -> usize {
        self.pos
    }

    /// Feeds `token` at the next position and returns the prediction for the following one.
    pub fn step(&mut self, token: usize) -> Result<StepOutput, ModelError> {
        let p = self.params;
        let cfg = &p.config;
        if self.pos >= cfg.max_pos {
            return Err(ModelError::ShapeMismatch(format!(
                "decoder position {} exceeds max_pos {}",
                self.pos, cfg.max_pos
            )));
        }
        if token >= cfg.vocab {
            return Err(ModelError::TokenOutOfRange {
                token,
                vocab: cfg.vocab,
            });
        }
        let layout = &p.layout;
        let mut x: Vec<f64> = p
            .get(layout.tok_emb)
            .row(token)
            .iter()
            .zip(p.get(layout.pos_emb).row(self.pos))
            .map(|(a, b)| a + b)
            .collect();
        let n_self = self.pos + 1;
        for (ids, cache) in layout.dec.iter().zip(&mut self.layers) {
            let h = layer_norm_row(&x, &p.get(ids.ln_self.gamma).data, &p.get(ids.ln_self.beta).data);
            let q = vecmat(&h, p.get(ids.self_attn.wq));
            cache.self_k.extend(vecmat(&h, p.get(ids.self_attn.wk)));
            cache.self_v.extend(vecmat(&h, p.get(ids.self_attn.wv)));
            let a = attend_row(&q, &cache.self_k, &cache.self_v, n_self, cfg.n_heads);
            tensor::axpy(&mut x, 1.0, &vecmat(&a, p.get(ids.self_attn.wo)));

            let h = layer_norm_row(&x, &p.get(ids.ln_cross.gamma).data, &p.get(ids.ln_cross.beta).data);
            let q = vecmat(&h, p.get(ids.cross_attn.wq));
            let a = attend_row(&q, &cache.cross_k.data, &cache.cross_v.data, self.enc_len, cfg.n_heads);
            tensor::axpy(&mut x, 1.0, &vecmat(&a, p.get(ids.cross_attn.wo)));

            let h = layer_norm_row(&x, &p.get(ids.ln_ff.gamma).data, &p.get(ids.ln_ff.beta).data);
            tensor::axpy(&mut x, 1.0, &ff_row(p, &h, ids.ff));
        }
        let h = layer_norm_row(
            &x,
            &p.get(layout.dec_norm.gamma).data,
            &p.get(layout.dec_norm.beta).data,
        );
        let mut logits = vecmat(&h, p.get(layout.lm_w));
        for (v, b) in logits.iter_mut().zip(&p.get(layout.lm_b).data) {
            *v += b;
        }
        let value = tensor::dot(&h, &p.get(layout.value_w).data) + p.get(layout.value_b).data[0];
        self.pos += 1;
        Ok(StepOutput { logits, value })
    }
}

/// Index of the largest logit; ties resolve to the lowest index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// Greedy autoregressive decode of `len` tokens after `start`.
pub fn greedy_decode(
    params: &ModelParams,
    enc: &EncoderStates,
    start: usize,
    len: usize,
) -> Result<Vec<usize>, ModelError> {
    let mut dec = IncrementalDecoder::new(params, enc)?;
    let mut out = Vec::with_capacity(len);
    let mut tok = start;
    for _ in 0..len {
        let step = dec.step(tok)?;
        tok = argmax(&step.logits);
        out.push(tok);
    }
    Ok(out)
}
