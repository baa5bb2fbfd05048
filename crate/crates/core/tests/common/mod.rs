#![allow(dead_code)]

use rltc::model::{Activation, GradientStore, ModelConfig, ModelParams};

/// The gradient-check configuration: d_model 8, one encoder and one decoder layer, vocab 16.
pub fn tiny_config() -> ModelConfig {
    ModelConfig {
        d_model: 8,
        n_heads: 2,
        n_layers_enc: 1,
        n_layers_dec: 1,
        d_ff: 16,
        vocab: 16,
        max_pos: 8,
        activation: Activation::Gelu,
    }
}

/// Randomly initialised tiny params with every entry jittered so biases and
/// norm offsets are non-trivial.
pub fn tiny_params(seed: u64) -> ModelParams {
    let mut p = ModelParams::init(tiny_config(), seed).unwrap();
    p.jitter(0.3, seed ^ 0x5eed);
    p
}

pub struct FdReport {
    pub max_rel_err: f64,
    pub worst: String,
    pub checked: usize,
}

/// Relative error with an absolute floor so that entries whose true gradient
/// is zero are judged by absolute error.
pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

/// Compares every analytic gradient entry with a central finite difference of `objective`.
pub fn finite_difference_check(
    params: &ModelParams,
    analytic: &GradientStore,
    step: f64,
    objective: impl Fn(&ModelParams) -> f64,
) -> FdReport {
    let mut work = params.clone();
    let mut report = FdReport {
        max_rel_err: 0.0,
        worst: String::new(),
        checked: 0,
    };
    let ids: Vec<_> = params.iter().map(|(id, name, _)| (id, name.to_string())).collect();
    for (id, name) in ids {
        for i in 0..params.get(id).len() {
            let orig = work.get(id).data[i];
            work.get_mut(id).data[i] = orig + step;
            let plus = objective(&work);
            work.get_mut(id).data[i] = orig - step;
            let minus = objective(&work);
            work.get_mut(id).data[i] = orig;
            let numeric = (plus - minus) / (2.0 * step);
            let a = analytic.get(id).data[i];
            let e = rel_err(a, numeric);
            report.checked += 1;
            if e > report.max_rel_err {
                report.max_rel_err = e;
                report.worst = format!("{name}[{i}] analytic={a:e} numeric={numeric:e}");
            }
        }
    }
    report
}

pub const GOLDEN_INPUT: &[u8] = include_bytes!("../fixtures/golden_input.txt");
pub const GOLDEN_CHUNK_LEN: usize = 32;
pub const GOLDEN_CONTAINER_PATH: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/golden.rltc");

/// The untrained pair the golden container was produced with.
pub fn golden_models() -> (ModelParams, ModelParams) {
    (
        ModelParams::init(ModelConfig::small(), 2024).unwrap(),
        ModelParams::init(ModelConfig::small(), 2025).unwrap(),
    )
}
