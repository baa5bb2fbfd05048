//! The compressor/decompressor training loop.
//!
//! Each step: sample compressed sequences from the compressor, score the
//! decompressor's reconstruction of every chunk, update the decompressor on
//! that loss, turn length and loss into rewards, and update the compressor on
//! the actor and critic objectives.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::losses::{a2c_objective_on_tape, actor_loss, critic_loss};
use super::pretrain::{batch_loss_and_grad, Seq2SeqExample};
use super::reward::{assign_rewards, scale_reward, RewardNormalizer, RewardSchedule};
use super::rollout::{decompressor_source, evaluate_actions_on_tape, rollout_compress};
use super::{TrainError, Trajectory};
use crate::model::{adam_step, GradientStore, ModelParams, OptimizerState, Tape, DEFAULT_LR};
use crate::tokenizer::Chunk;

/// Units of the reconstruction term in the reward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReconstructionUnits {
    /// Mean cross-entropy in nats per reconstructed token.
    MeanNats,
    /// Total cross-entropy over the chunk in bits, commensurate with a per-token cost in bits.
    ChunkBits,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainerConfig {
    pub gamma: f64,
    pub batch_size: usize,
    /// Cap on compressed length; `None` means the chunk length.
    pub max_compress_len: Option<usize>,
    pub temperature: f64,
    pub critic_loss_weight: f64,
    /// Steps at the start during which only the value head is fitted, so the
    /// actor never sees advantages from an untrained critic and the critic
    /// cannot disturb the shared trunk while its error is large.
    pub critic_warmup_steps: u64,
    pub compressor_lr: f64,
    pub decompressor_lr: f64,
    pub max_grad_norm: Option<f64>,
    pub reconstruction_units: ReconstructionUnits,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            batch_size: 16,
            max_compress_len: None,
            temperature: 1.0,
            critic_loss_weight: 0.5,
            critic_warmup_steps: 0,
            compressor_lr: DEFAULT_LR,
            decompressor_lr: DEFAULT_LR,
            max_grad_norm: Some(1.0),
            reconstruction_units: ReconstructionUnits::ChunkBits,
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: &str| Err(TrainError::InvalidConfig(m.to_string()));
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad("gamma must lie in (0, 1]");
        }
        if self.batch_size == 0 {
            return bad("batch size must be positive");
        }
        if self.temperature <= 0.0 {
            return bad("temperature must be positive");
        }
        if self.max_compress_len == Some(0) {
            return bad("max_compress_len must be positive");
        }
        Ok(())
    }

    fn cap_for(&self, chunk: &Chunk) -> usize {
        self.max_compress_len.map_or(chunk.len(), |m| m.min(chunk.len()))
    }
}

/// Batch-averaged quantities reported by one training step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMetrics {
    pub step: u64,
    /// Mean decompressor loss, nats per token.
    pub reconstruction_loss: f64,
    pub mean_compressed_len: f64,
    pub actor_loss: f64,
    pub critic_loss: f64,
    pub raw_reward: f64,
    pub scaled_reward: f64,
    pub cost_per_token: f64,
}

impl StepMetrics {
    pub fn is_finite(&self) -> bool {
        [
            self.reconstruction_loss,
            self.mean_compressed_len,
            self.actor_loss,
            self.critic_loss,
            self.raw_reward,
            self.scaled_reward,
            self.cost_per_token,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Both models, their optimizers, and the reward bookkeeping.
#[derive(Debug, Clone)]
pub struct A2cTrainer {
    pub compressor: ModelParams,
    pub decompressor: ModelParams,
    pub compressor_opt: OptimizerState,
    pub decompressor_opt: OptimizerState,
    pub config: TrainerConfig,
    pub schedule: RewardSchedule,
    pub normalizer: RewardNormalizer,
    pub step: u64,
    rng: ChaCha8Rng,
}

impl A2cTrainer {
    pub fn new(
        compressor: ModelParams,
        decompressor: ModelParams,
        config: TrainerConfig,
        schedule: RewardSchedule,
        seed: u64,
    ) -> Result<Self, TrainError> {
        config.validate()?;
        if compressor.config.vocab != decompressor.config.vocab {
            return Err(TrainError::InvalidConfig(
                "compressor and decompressor vocabularies differ".into(),
            ));
        }
        Ok(Self {
            compressor_opt: OptimizerState::new(&compressor, config.compressor_lr),
            decompressor_opt: OptimizerState::new(&decompressor, config.decompressor_lr),
            compressor,
            decompressor,
            config,
            schedule,
            normalizer: RewardNormalizer::new(),
            step: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// Runs one update of both models on `batch`.
    pub fn train_step(&mut self, batch: &[Chunk]) -> Result<StepMetrics, TrainError> {
        if batch.is_empty() {
            return Err(TrainError::EmptyCorpus);
        }
        let cfg = self.config;
        let actor_weight = if self.step < cfg.critic_warmup_steps { 0.0 } else { 1.0 };
        let b = batch.len() as f64;

        // compress: one independent RNG stream per chunk
        let seeds: Vec<u64> = batch.iter().map(|_| self.rng.next_u64()).collect();
        let compressor = &self.compressor;
        let mut trajs: Vec<Trajectory> = batch
            .par_iter()
            .zip(&seeds)
            .map(|(chunk, &seed)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rollout_compress(compressor, chunk, cfg.cap_for(chunk), cfg.temperature, &mut rng)
            })
            .collect::<Result<_, _>>()?;

        // decompress and score reconstruction, then update the decompressor
        let examples: Vec<Seq2SeqExample> = batch
            .iter()
            .zip(&trajs)
            .map(|(chunk, t)| {
                let source = decompressor_source(&t.action_ids());
                Seq2SeqExample {
                    source_valid: source.len(),
                    source,
                    target: chunk.valid().iter().map(|&x| x as usize).collect(),
                }
            })
            .collect();
        let (recon, mut d_grads) = batch_loss_and_grad(&self.decompressor, &examples)?;
        if let Some(max) = cfg.max_grad_norm {
            d_grads.clip_global_norm(max);
        }
        adam_step(&mut self.decompressor, &d_grads, &mut self.decompressor_opt);

        // rewards: scaled episode reward split over the steps
        let cost = self.schedule.cost(self.step);
        let mut raw_rewards = Vec::with_capacity(batch.len());
        let mut scaled_rewards = Vec::with_capacity(batch.len());
        for ((traj, chunk), &loss) in trajs.iter_mut().zip(batch).zip(&recon) {
            let recon_term = match cfg.reconstruction_units {
                ReconstructionUnits::MeanNats => loss,
                ReconstructionUnits::ChunkBits => loss * chunk.valid_len as f64 / std::f64::consts::LN_2,
            };
            let raw = -(cost * traj.len() as f64 + recon_term);
            // Only the spread is applied per step: a mean shift would land on
            // the terminal step and act as a bonus for stopping early.
            let (_, scale) = self.normalizer.transform();
            scaled_rewards.push(scale_reward(&mut self.normalizer, raw));
            assign_rewards(traj, recon_term / scale, cost / scale);
            raw_rewards.push(raw);
        }

        // actor and critic update from a teacher-forced pass over each episode
        let per_episode: Vec<_> = batch
            .par_iter()
            .zip(&trajs)
            .map(|(chunk, traj)| {
                let mut tape = Tape::new(compressor);
                let (logp, values) = evaluate_actions_on_tape(&mut tape, chunk, &traj.action_ids(), cfg.temperature)?;
                let obj = a2c_objective_on_tape(
                    &mut tape,
                    logp,
                    values,
                    &traj.rewards,
                    cfg.gamma,
                    actor_weight,
                    cfg.critic_loss_weight,
                );
                let grads = tape.backward(obj.total);
                let mut scored = traj.clone();
                scored.logprobs = tape.value(logp).data.clone();
                scored.values = tape.value(values).data.clone();
                scored.advantages = obj.advantages;
                Ok::<_, TrainError>((scored, grads))
            })
            .collect::<Result<_, _>>()?;
        let mut c_grads = GradientStore::zeros_like(&self.compressor);
        let (mut actor_sum, mut critic_sum) = (0.0, 0.0);
        for (traj, g) in &per_episode {
            c_grads.add_scaled(g, 1.0 / b);
            actor_sum += actor_loss(traj);
            critic_sum += critic_loss(traj, cfg.gamma);
        }
        if actor_weight == 0.0 {
            let l = &self.compressor.layout;
            c_grads.keep_only(&[l.value_w, l.value_b]);
        }
        if let Some(max) = cfg.max_grad_norm {
            c_grads.clip_global_norm(max);
        }
        adam_step(&mut self.compressor, &c_grads, &mut self.compressor_opt);

        let metrics = StepMetrics {
            step: self.step,
            reconstruction_loss: recon.iter().sum::<f64>() / b,
            mean_compressed_len: trajs.iter().map(|t| t.len() as f64).sum::<f64>() / b,
            actor_loss: actor_sum / b,
            critic_loss: critic_sum / b,
            raw_reward: raw_rewards.iter().sum::<f64>() / b,
            scaled_reward: scaled_rewards.iter().sum::<f64>() / b,
            cost_per_token: cost,
        };
        self.step += 1;
        Ok(metrics)
    }
}
