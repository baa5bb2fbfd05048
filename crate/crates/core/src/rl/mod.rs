//! Identity pre-training and advantage actor-critic training of the compressor,
//! with supervised reconstruction training of the decompressor.

mod losses;
mod pretrain;
mod reward;
mod rollout;
mod run;
mod trainer;
mod trajectory;

use thiserror::Error;

use crate::model::ModelError;

pub use losses::{
    a2c_objective_on_tape, actor_loss, advantages, compute_advantages, critic_loss, td_targets, A2cObjective,
};
pub use pretrain::{
    batch_loss_and_grad, example_loss_and_grad, pretrain_identity, supervised_step, IdentityRole, PretrainConfig,
    Seq2SeqExample,
};
pub use reward::{assign_rewards, scale_reward, uniform_token_bits, RewardNormalizer, RewardSchedule, NORMALIZER_EPS};
pub use rollout::{
    decompressor_source, evaluate_actions_on_tape, greedy_compress, recompute_trajectory, rollout_compress,
    teacher_forced_inputs,
};
pub use run::{train_pair, MetricsLog, RunConfig, TrainOutcome, TrainPlan, METRICS_HEADER};
pub use trainer::{A2cTrainer, ReconstructionUnits, StepMetrics, TrainerConfig};
pub use trajectory::Trajectory;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("invalid trainer config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
