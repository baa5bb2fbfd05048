use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::tensor::Tensor;
use super::{ModelConfig, ModelError};

/// Index of a parameter tensor inside [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamId(pub usize);

#[derive(Debug, Clone, Copy)]
pub struct NormIds {
    pub gamma: ParamId,
    pub beta: ParamId,
}

#[derive(Debug, Clone, Copy)]
pub struct AttnIds {
    pub wq: ParamId,
    pub wk: ParamId,
    pub wv: ParamId,
    pub wo: ParamId,
}

#[derive(Debug, Clone, Copy)]
pub struct FeedForwardIds {
    pub w1: ParamId,
    pub b1: ParamId,
    pub w2: ParamId,
    pub b2: ParamId,
}

#[derive(Debug, Clone, Copy)]
pub struct EncoderLayerIds {
    pub ln_attn: NormIds,
    pub attn: AttnIds,
    pub ln_ff: NormIds,
    pub ff: FeedForwardIds,
}

#[derive(Debug, Clone, Copy)]
pub struct DecoderLayerIds {
    pub ln_self: NormIds,
    pub self_attn: AttnIds,
    pub ln_cross: NormIds,
    pub cross_attn: AttnIds,
    pub ln_ff: NormIds,
    pub ff: FeedForwardIds,
}

/// Where each named tensor lives, derived deterministically from the config.
#[derive(Debug, Clone)]
pub struct Layout {
    pub tok_emb: ParamId,
    pub pos_emb: ParamId,
    pub enc: Vec<EncoderLayerIds>,
    pub enc_norm: NormIds,
    pub dec: Vec<DecoderLayerIds>,
    pub dec_norm: NormIds,
    pub lm_w: ParamId,
    pub lm_b: ParamId,
    pub value_w: ParamId,
    pub value_b: ParamId,
}

#[derive(Clone, Copy)]
enum Init {
    Normal(f64),
    Zeros,
    Ones,
}

struct Spec {
    name: String,
    rows: usize,
    cols: usize,
    init: Init,
}

struct Builder {
    specs: Vec<Spec>,
}

impl Builder {
    fn add(&mut self, name: String, rows: usize, cols: usize, init: Init) -> ParamId {
        self.specs.push(Spec { name, rows, cols, init });
        ParamId(self.specs.len() - 1)
    }

    fn norm(&mut self, prefix: &str, d: usize) -> NormIds {
        NormIds {
            gamma: self.add(format!("{prefix}.gamma"), 1, d, Init::Ones),
            beta: self.add(format!("{prefix}.beta"), 1, d, Init::Zeros),
        }
    }

    fn attn(&mut self, prefix: &str, d: usize, std: f64, out_std: f64) -> AttnIds {
        AttnIds {
            wq: self.add(format!("{prefix}.wq"), d, d, Init::Normal(std)),
            wk: self.add(format!("{prefix}.wk"), d, d, Init::Normal(std)),
            wv: self.add(format!("{prefix}.wv"), d, d, Init::Normal(std)),
            wo: self.add(format!("{prefix}.wo"), d, d, Init::Normal(out_std)),
        }
    }

    fn ff(&mut self, prefix: &str, d: usize, d_ff: usize, std: f64, out_std: f64) -> FeedForwardIds {
        FeedForwardIds {
            w1: self.add(format!("{prefix}.w1"), d, d_ff, Init::Normal(std)),
            b1: self.add(format!("{prefix}.b1"), 1, d_ff, Init::Zeros),
            w2: self.add(format!("{prefix}.w2"), d_ff, d, Init::Normal(out_std)),
            b2: self.add(format!("{prefix}.b2"), 1, d, Init::Zeros),
        }
    }
}

fn build_layout(cfg: &ModelConfig) -> (Layout, Vec<Spec>) {
    let d = cfg.d_model;
    let std = 0.02;
    let n_layers = (cfg.n_layers_enc + cfg.n_layers_dec).max(1) as f64;
    let out_std = std / (2.0 * n_layers).sqrt();
    let mut b = Builder { specs: Vec::new() };
    let tok_emb = b.add("tok_emb".into(), cfg.vocab, d, Init::Normal(std));
    let pos_emb = b.add("pos_emb".into(), cfg.max_pos, d, Init::Normal(std));
    let enc = (0..cfg.n_layers_enc)
        .map(|i| EncoderLayerIds {
            ln_attn: b.norm(&format!("enc.{i}.ln_attn"), d),
            attn: b.attn(&format!("enc.{i}.attn"), d, std, out_std),
            ln_ff: b.norm(&format!("enc.{i}.ln_ff"), d),
            ff: b.ff(&format!("enc.{i}.ff"), d, cfg.d_ff, std, out_std),
        })
        .collect();
    let enc_norm = b.norm("enc.ln_final", d);
    let dec = (0..cfg.n_layers_dec)
        .map(|i| DecoderLayerIds {
            ln_self: b.norm(&format!("dec.{i}.ln_self"), d),
            self_attn: b.attn(&format!("dec.{i}.self_attn"), d, std, out_std),
            ln_cross: b.norm(&format!("dec.{i}.ln_cross"), d),
            cross_attn: b.attn(&format!("dec.{i}.cross_attn"), d, std, out_std),
            ln_ff: b.norm(&format!("dec.{i}.ln_ff"), d),
            ff: b.ff(&format!("dec.{i}.ff"), d, cfg.d_ff, std, out_std),
        })
        .collect();
    let dec_norm = b.norm("dec.ln_final", d);
    let lm_w = b.add("lm_head.w".into(), d, cfg.vocab, Init::Normal(std));
    let lm_b = b.add("lm_head.b".into(), 1, cfg.vocab, Init::Zeros);
    let value_w = b.add("value_head.w".into(), d, 1, Init::Normal(std));
    let value_b = b.add("value_head.b".into(), 1, 1, Init::Zeros);
    let layout = Layout {
        tok_emb,
        pos_emb,
        enc,
        enc_norm,
        dec,
        dec_norm,
        lm_w,
        lm_b,
        value_w,
        value_b,
    };
    (layout, b.specs)
}

/// Named weight tensors of one encoder-decoder model with policy and value heads.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub config: ModelConfig,
    pub layout: Layout,
    names: Vec<String>,
    tensors: Vec<Tensor>,
}

impl PartialEq for ModelParams {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config && self.names == other.names && self.tensors == other.tensors
    }
}

impl ModelParams {
    /// Randomly initialized parameters; identical for identical `(config, seed)`.
    pub fn init(config: ModelConfig, seed: u64) -> Result<Self, ModelError> {
        config.validate()?;
        let (layout, specs) = build_layout(&config);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut names = Vec::with_capacity(specs.len());
        let mut tensors = Vec::with_capacity(specs.len());
        for spec in specs {
            let n = spec.rows * spec.cols;
            let data = match spec.init {
                Init::Zeros => vec![0.0; n],
                Init::Ones => vec![1.0; n],
                Init::Normal(std) => {
                    let dist = Normal::new(0.0, std).expect("finite std");
                    (0..n).map(|_| dist.sample(&mut rng)).collect()
                }
            };
            names.push(spec.name);
            tensors.push(Tensor::from_vec(spec.rows, spec.cols, data));
        }
        Ok(Self {
            config,
            layout,
            names,
            tensors,
        })
    }

    /// Rebuilds parameters from named tensors, checking names and shapes against the config.
    pub fn from_named(config: ModelConfig, named: Vec<(String, Tensor)>) -> Result<Self, ModelError> {
        config.validate()?;
        let (layout, specs) = build_layout(&config);
        if named.len() != specs.len() {
            return Err(ModelError::ShapeMismatch(format!(
                "expected {} tensors, found {}",
                specs.len(),
                named.len()
            )));
        }
        let mut names = Vec::with_capacity(specs.len());
        let mut tensors = Vec::with_capacity(specs.len());
        for (spec, (name, t)) in specs.into_iter().zip(named) {
            if spec.name != name || t.shape() != (spec.rows, spec.cols) {
                return Err(ModelError::ShapeMismatch(format!(
                    "tensor {name} {:?} does not match {} [{}x{}]",
                    t.shape(),
                    spec.name,
                    spec.rows,
                    spec.cols
                )));
            }
            names.push(name);
            tensors.push(t);
        }
        Ok(Self {
            config,
            layout,
            names,
            tensors,
        })
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn num_scalars(&self) -> usize {
        self.tensors.iter().map(Tensor::len).sum()
    }

    #[inline]
    pub fn get(&self, id: ParamId) -> &Tensor {
        &self.tensors[id.0]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Tensor {
        &mut self.tensors[id.0]
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn id_of(&self, name: &str) -> Option<ParamId> {
        self.names.iter().position(|n| n == name).map(ParamId)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ParamId, &str, &Tensor)> {
        self.names
            .iter()
            .zip(&self.tensors)
            .enumerate()
            .map(|(i, (n, t))| (ParamId(i), n.as_str(), t))
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub(crate) fn tensors_mut(&mut self) -> &mut [Tensor] {
        &mut self.tensors
    }

    pub fn is_finite(&self) -> bool {
        self.tensors.iter().all(Tensor::is_finite)
    }

    /// Perturbs every entry with small noise; handy for tests that need non-trivial biases.
    pub fn jitter(&mut self, scale: f64, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in &mut self.tensors {
            for v in &mut t.data {
                *v += scale * (rng.random::<f64>() * 2.0 - 1.0);
            }
        }
    }
}

/// One gradient tensor per parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientStore {
    tensors: Vec<Tensor>,
}

impl GradientStore {
    pub fn zeros_like(params: &ModelParams) -> Self {
        Self {
            tensors: params.tensors.iter().map(|t| Tensor::zeros(t.rows, t.cols)).collect(),
        }
    }

    #[inline]
    pub fn get(&self, id: ParamId) -> &Tensor {
        &self.tensors[id.0]
    }

    #[inline]
    pub fn get_mut(&mut self, id: ParamId) -> &mut Tensor {
        &mut self.tensors[id.0]
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn add_scaled(&mut self, other: &GradientStore, s: f64) {
        for (a, b) in self.tensors.iter_mut().zip(&other.tensors) {
            for (x, y) in a.data.iter_mut().zip(&b.data) {
                *x += s * y;
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for t in &mut self.tensors {
            t.scale(s);
        }
    }

    pub fn global_norm(&self) -> f64 {
        self.tensors.iter().map(Tensor::sum_sq).sum::<f64>().sqrt()
    }

    /// Rescales so the global L2 norm is at most `max_norm`; returns the norm before clipping.
    pub fn clip_global_norm(&mut self, max_norm: f64) -> f64 {
        let norm = self.global_norm();
        if norm > max_norm && norm > 0.0 {
            self.scale(max_norm / norm);
        }
        norm
    }

    pub fn is_finite(&self) -> bool {
        self.tensors.iter().all(Tensor::is_finite)
    }

    /// Zeroes every gradient except those of `keep`.
    pub fn keep_only(&mut self, keep: &[ParamId]) {
        for (i, t) in self.tensors.iter_mut().enumerate() {
            if !keep.contains(&ParamId(i)) {
                t.scale(0.0);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.tensors.iter().all(|t| t.data.iter().all(|&v| v == 0.0))
    }
}
