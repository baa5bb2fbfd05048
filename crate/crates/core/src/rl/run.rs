//! Training run directory artifacts: an append-only metrics CSV and a
//! `key=value` record of the run configuration.

use std::fs::{File, OpenOptions};
use std::path::Path;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    pretrain_identity, A2cTrainer, IdentityRole, PretrainConfig, RewardSchedule, StepMetrics, TrainError, TrainerConfig,
};
use crate::fsutil;
use crate::model::{ModelConfig, ModelParams, OptimizerState};
use crate::tokenizer::Chunk;

pub const METRICS_HEADER: [&str; 8] = [
    "step",
    "L_D",
    "mean_c_len",
    "actor_loss",
    "critic_loss",
    "raw_reward",
    "scaled_reward",
    "cost_per_token",
];

/// Appends one CSV row per training step.
pub struct MetricsLog {
    writer: csv::Writer<File>,
}

impl MetricsLog {
    /// Opens `path` for appending, writing the header only when the file is new or empty.
    pub fn open(path: &Path) -> Result<Self, TrainError> {
        let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        if fresh {
            writer.write_record(METRICS_HEADER)?;
            writer.flush()?;
        }
        Ok(Self { writer })
    }

    pub fn append(&mut self, m: &StepMetrics) -> Result<(), TrainError> {
        self.writer.write_record([
            m.step.to_string(),
            m.reconstruction_loss.to_string(),
            m.mean_compressed_len.to_string(),
            m.actor_loss.to_string(),
            m.critic_loss.to_string(),
            m.raw_reward.to_string(),
            m.scaled_reward.to_string(),
            m.cost_per_token.to_string(),
        ])?;
        self.writer.flush()?;
        Ok(())
    }
}

/// Ordered `key=value` pairs describing a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunConfig {
    pub entries: Vec<(String, String)>,
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();
        Self { entries }
    }

    pub fn write(&self, path: &Path) -> Result<(), TrainError> {
        fsutil::write_atomic(path, self.render().as_bytes())?;
        Ok(())
    }
}

/// Everything needed to train a compressor/decompressor pair from scratch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainPlan {
    pub model: ModelConfig,
    pub seed: u64,
    /// Identity pre-training, applied to each model.
    pub pretrain: PretrainConfig,
    pub pretrain_lr: f64,
    pub a2c_steps: u64,
    pub trainer: TrainerConfig,
    pub schedule: RewardSchedule,
}

impl Default for TrainPlan {
    fn default() -> Self {
        Self {
            model: ModelConfig::small(),
            seed: 0,
            pretrain: PretrainConfig::default(),
            pretrain_lr: 1e-3,
            a2c_steps: 1000,
            trainer: TrainerConfig::default(),
            schedule: RewardSchedule::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub compressor: ModelParams,
    pub decompressor: ModelParams,
    pub compressor_pretrain_loss: Vec<f64>,
    pub decompressor_pretrain_loss: Vec<f64>,
}

/// Pre-trains both models as identity maps, then runs A2C for `plan.a2c_steps`
/// on batches drawn uniformly from `corpus`. The optimizer moments carry over
/// from pre-training: restarting Adam on a converged model turns its tiny
/// gradients into full-size steps. `on_step` sees every step's metrics.
pub fn train_pair(
    corpus: &[Chunk],
    plan: &TrainPlan,
    mut on_step: impl FnMut(&StepMetrics) -> Result<(), TrainError>,
) -> Result<TrainOutcome, TrainError> {
    if corpus.is_empty() {
        return Err(TrainError::EmptyCorpus);
    }
    let mut master = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut c = ModelParams::init(plan.model, master.next_u64())?;
    let mut d = ModelParams::init(plan.model, master.next_u64())?;
    let mut oc = OptimizerState::new(&c, plan.pretrain_lr);
    let mut od = OptimizerState::new(&d, plan.pretrain_lr);
    let c_loss = pretrain_identity(
        &mut c,
        &mut oc,
        corpus,
        IdentityRole::Compressor,
        &plan.pretrain,
        &mut master,
    )?;
    let d_loss = pretrain_identity(
        &mut d,
        &mut od,
        corpus,
        IdentityRole::Decompressor,
        &plan.pretrain,
        &mut master,
    )?;

    let mut trainer = A2cTrainer::new(c, d, plan.trainer, plan.schedule, master.next_u64())?;
    oc.lr = plan.trainer.compressor_lr;
    od.lr = plan.trainer.decompressor_lr;
    trainer.compressor_opt = oc;
    trainer.decompressor_opt = od;
    let batch_size = plan.trainer.batch_size;
    for _ in 0..plan.a2c_steps {
        let batch: Vec<Chunk> = (0..batch_size)
            .map(|_| corpus[master.random_range(0..corpus.len())].clone())
            .collect();
        let m = trainer.train_step(&batch)?;
        on_step(&m)?;
    }
    Ok(TrainOutcome {
        compressor: trainer.compressor,
        decompressor: trainer.decompressor,
        compressor_pretrain_loss: c_loss,
        decompressor_pretrain_loss: d_loss,
    })
}


#[cfg(test)]
mod plan_tests {
    use super::*;
    use crate::tokenizer::TokenId;

    #[test]
    fn train_pair_is_deterministic() {
        let corpus: Vec<Chunk> = (0..8u16)
            .map(|i| Chunk::from_tokens(&[97 + i as TokenId, 98, 99, 100], 4))
            .collect();
        let mut plan = TrainPlan::default();
        plan.pretrain.steps = 3;
        plan.pretrain.batch_size = 2;
        plan.a2c_steps = 3;
        plan.trainer.batch_size = 2;
        let mut steps = 0;
        let a = train_pair(&corpus, &plan, |_| {
            steps += 1;
            Ok(())
        })
        .unwrap();
        let b = train_pair(&corpus, &plan, |_| Ok(())).unwrap();
        assert_eq!(steps, 3);
        assert_eq!(a.compressor, b.compressor);
        assert_eq!(a.decompressor, b.decompressor);
        assert!(matches!(
            train_pair(&[], &plan, |_| Ok(())),
            Err(TrainError::EmptyCorpus)
        ));
    }
}
