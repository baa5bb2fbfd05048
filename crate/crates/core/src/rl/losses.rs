//! Advantage estimation and the actor/critic objectives.

use super::Trajectory;
use crate::model::{Tape, Var};

/// `Aₜ = rₜ + γ·v̂ₜ₊₁ − v̂ₜ` with `v̂ₙ = 0`.
pub fn advantages(rewards: &[f64], values: &[f64], gamma: f64) -> Vec<f64> {
    assert_eq!(rewards.len(), values.len());
    td_targets(rewards, values, gamma)
        .iter()
        .zip(values)
        .map(|(target, v)| target - v)
        .collect()
}

/// `rₜ + γ·v̂ₜ₊₁`, the frozen critic target.
pub fn td_targets(rewards: &[f64], values: &[f64], gamma: f64) -> Vec<f64> {
    let n = rewards.len();
    (0..n)
        .map(|t| {
            let next = if t + 1 < n { values[t + 1] } else { 0.0 };
            rewards[t] + gamma * next
        })
        .collect()
}

pub fn compute_advantages(traj: &mut Trajectory, gamma: f64) {
    traj.advantages = advantages(&traj.rewards, &traj.values, gamma);
}

/// Mean of `−log π(aₜ)·Aₜ` with the advantage held constant.
pub fn actor_loss(traj: &Trajectory) -> f64 {
    let n = traj.len() as f64;
    traj.logprobs
        .iter()
        .zip(&traj.advantages)
        .map(|(lp, a)| -lp * a)
        .sum::<f64>()
        / n
}

/// Mean squared TD error.
pub fn critic_loss(traj: &Trajectory, gamma: f64) -> f64 {
    let targets = td_targets(&traj.rewards, &traj.values, gamma);
    let n = traj.len() as f64;
    targets
        .iter()
        .zip(&traj.values)
        .map(|(t, v)| (t - v) * (t - v))
        .sum::<f64>()
        / n
}

/// Scalar nodes of the actor and critic objectives, recorded on `tape`.
pub struct A2cObjective {
    pub actor: Var,
    pub critic: Var,
    pub total: Var,
    pub advantages: Vec<f64>,
}

/// Records `L_actor + critic_weight · L_critic` given teacher-forced
/// log-probabilities `logp` and values `values` (both `n × 1`).
///
/// Advantages and TD targets are read off the current values and enter the
/// graph as constants.
pub fn a2c_objective_on_tape(
    tape: &mut Tape,
    logp: Var,
    values: Var,
    rewards: &[f64],
    gamma: f64,
    actor_weight: f64,
    critic_weight: f64,
) -> A2cObjective {
    let v = tape.value(values).data.clone();
    let n = rewards.len() as f64;
    let targets = td_targets(rewards, &v, gamma);
    let adv: Vec<f64> = targets.iter().zip(&v).map(|(t, v)| t - v).collect();
    let actor_w: Vec<f64> = adv.iter().map(|a| -actor_weight * a / n).collect();
    let actor = tape.weighted_sum(logp, &actor_w);
    let critic = tape.squared_error(values, &targets, &vec![1.0 / n; rewards.len()]);
    let weighted_critic = tape.weighted_sum(critic, &[critic_weight]);
    let total = tape.add(actor, weighted_critic);
    A2cObjective {
        actor,
        critic,
        total,
        advantages: adv,
    }
}
