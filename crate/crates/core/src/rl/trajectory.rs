use crate::tokenizer::TokenSequence;

/// One compression episode.
///
/// `actions`, `logprobs` and `values` are filled by a rollout; `rewards`,
/// `advantages` and `episode_reward` by the reward and advantage passes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub actions: TokenSequence,
    pub logprobs: Vec<f64>,
    pub values: Vec<f64>,
    pub rewards: Vec<f64>,
    pub advantages: Vec<f64>,
    pub episode_reward: f64,
}

impl Trajectory {
    /// Episode length `n`, counting a terminating STOP.
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn action_ids(&self) -> Vec<usize> {
        self.actions.ids().collect()
    }
}
