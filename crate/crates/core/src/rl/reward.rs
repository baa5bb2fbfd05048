//! Episode rewards: the per-token cost schedule, the per-step reward split, and
//! running reward normalization.

use super::Trajectory;
use crate::tokenizer::Vocab;

/// `log2 |V|` for the byte-level vocabulary, ≈ 8.0224 bits.
pub fn uniform_token_bits() -> f64 {
    (Vocab::SIZE as f64).log2()
}

/// Linear ramp of the per-token cost from 0 to `final_cost_per_token` over `warmup_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardSchedule {
    pub final_cost_per_token: f64,
    pub warmup_steps: u64,
}

impl Default for RewardSchedule {
    fn default() -> Self {
        Self {
            final_cost_per_token: uniform_token_bits(),
            warmup_steps: 1000,
        }
    }
}

impl RewardSchedule {
    pub fn new(final_cost_per_token: f64, warmup_steps: u64) -> Self {
        Self {
            final_cost_per_token,
            warmup_steps,
        }
    }

    pub fn cost(&self, step: u64) -> f64 {
        if step >= self.warmup_steps {
            self.final_cost_per_token
        } else {
            self.final_cost_per_token * step as f64 / self.warmup_steps as f64
        }
    }
}

/// Splits the episode reward `−(c·n + L_D)` over the steps: every token pays
/// `c`, and the terminal step also pays the reconstruction loss.
pub fn assign_rewards(traj: &mut Trajectory, reconstruction_loss: f64, cost_per_token: f64) {
    let n = traj.len();
    assert!(n >= 1, "trajectory must contain at least one action");
    traj.rewards = vec![-cost_per_token; n];
    traj.rewards[n - 1] -= reconstruction_loss;
    traj.episode_reward = traj.rewards.iter().sum();
}

/// Streaming mean and variance of raw episode rewards (Welford).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RewardNormalizer {
    count: u64,
    mean: f64,
    m2: f64,
}

pub const NORMALIZER_EPS: f64 = 1e-8;

impl RewardNormalizer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Population variance of the rewards seen so far.
    pub fn variance(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.m2 / self.count as f64).max(0.0)
        }
    }

    pub fn std(&self) -> f64 {
        self.variance().sqrt()
    }

    /// The `(shift, scale)` pair currently applied: identity until two rewards were seen.
    pub fn transform(&self) -> (f64, f64) {
        if self.count < 2 {
            (0.0, 1.0)
        } else {
            (self.mean, self.std().max(NORMALIZER_EPS))
        }
    }

    pub fn update(&mut self, r: f64) {
        self.count += 1;
        let delta = r - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (r - self.mean);
    }
}

/// Normalizes `episode_reward` with the statistics seen so far, then folds it into them.
pub fn scale_reward(normalizer: &mut RewardNormalizer, episode_reward: f64) -> f64 {
    let (shift, scale) = normalizer.transform();
    normalizer.update(episode_reward);
    (episode_reward - shift) / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::TokenSequence;

    fn traj(n: usize) -> Trajectory {
        Trajectory {
            actions: TokenSequence(vec![1; n]),
            ..Default::default()
        }
    }

    #[test]
    fn reward_examples() {
        let mut t = traj(1);
        assign_rewards(&mut t, 0.0, 0.0);
        assert_eq!(t.rewards, vec![0.0]);
        assert_eq!(t.episode_reward, 0.0);

        let mut t = traj(4);
        assign_rewards(&mut t, 1.25, 1.0);
        assert_eq!(t.rewards, vec![-1.0, -1.0, -1.0, -2.25]);
        assert_eq!(t.episode_reward, -5.25);
    }

    #[test]
    fn schedule_ramps_to_final_cost() {
        let s = RewardSchedule::new(uniform_token_bits(), 100);
        assert_eq!(s.cost(0), 0.0);
        assert!((s.cost(50) - uniform_token_bits() / 2.0).abs() < 1e-12);
        assert_eq!(s.cost(100), uniform_token_bits());
        assert_eq!(s.cost(10_000), uniform_token_bits());
        assert!((uniform_token_bits() - 8.0224).abs() < 1e-4);
        let mut prev = -1.0;
        for step in 0..=120 {
            assert!(s.cost(step) >= prev);
            prev = s.cost(step);
        }
        assert_eq!(RewardSchedule::new(3.0, 0).cost(0), 3.0);
    }

    #[test]
    fn first_reward_passes_through() {
        let mut n = RewardNormalizer::new();
        assert_eq!(scale_reward(&mut n, -7.5), -7.5);
        assert_eq!(n.count(), 1);
    }

    #[test]
    fn constant_stream_scales_to_zero() {
        let mut n = RewardNormalizer::new();
        let mut last = f64::NAN;
        for _ in 0..50 {
            last = scale_reward(&mut n, -3.0);
        }
        assert_eq!(last, 0.0);
    }

    #[test]
    fn matches_two_pass_statistics() {
        let stream: Vec<f64> = (0..40)
            .map(|i| ((i * 37 % 11) as f64 - 4.0) * 1.7 + i as f64 * 0.1)
            .collect();
        let mut n = RewardNormalizer::new();
        for (k, &r) in stream.iter().enumerate() {
            let got = scale_reward(&mut n, r);
            let seen = &stream[..k];
            let expected = if seen.len() < 2 {
                r
            } else {
                let mean = seen.iter().sum::<f64>() / seen.len() as f64;
                let var = seen.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / seen.len() as f64;
                (r - mean) / var.sqrt().max(NORMALIZER_EPS)
            };
            assert!((got - expected).abs() < 1e-9, "step {k}: {got} vs {expected}");
        }
        assert!(n.variance() >= 0.0);
    }
}
