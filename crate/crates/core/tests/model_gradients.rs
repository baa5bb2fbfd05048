mod common;

use common::{finite_difference_check, tiny_params};
use rltc::model::{decode_on_tape, encode_on_tape, lm_loss_on_tape, ModelParams, Tape};
use rltc::rl::{a2c_objective_on_tape, td_targets};

const SRC: [usize; 5] = [3, 7, 1, 15, 9];
const SRC_VALID: usize = 4;
const DEC: [usize; 5] = [0, 4, 4, 12, 2];
const TARGETS: [usize; 5] = [4, 4, 12, 2, 6];

fn lm_objective(p: &ModelParams, grads: bool) -> (f64, Option<rltc::model::GradientStore>) {
    let mut tape = Tape::new(p);
    let enc = encode_on_tape(&mut tape, &SRC, SRC_VALID).unwrap();
    let (logits, _) = decode_on_tape(&mut tape, enc, SRC_VALID, &DEC).unwrap();
    let loss = lm_loss_on_tape(&mut tape, logits, &TARGETS, Some(6)).unwrap();
    let v = tape.value(loss).data[0];
    (v, grads.then(|| tape.backward(loss)))
}

#[test]
fn lm_loss_gradient_matches_finite_differences() {
    let p = tiny_params(1);
    let (_, g) = lm_objective(&p, true);
    let g = g.unwrap();
    let report = finite_difference_check(&p, &g, 1e-5, |q| lm_objective(q, false).0);
    println!(
        "checked {} entries, max rel err {:e} at {}",
        report.checked, report.max_rel_err, report.worst
    );
    assert!(report.max_rel_err < 1e-4, "{}", report.worst);
}

const ACTIONS: [usize; 4] = [5, 11, 2, 3];
const REWARDS: [f64; 4] = [-0.7, -0.7, -0.7, -3.1];
const GAMMA: f64 = 0.9;
const CRITIC_WEIGHT: f64 = 0.5;

/// Teacher-forced log-probabilities and values of `ACTIONS`, with token 0 standing in for BOS.
fn policy_nodes(tape: &mut Tape) -> (rltc::model::Var, rltc::model::Var) {
    let enc = encode_on_tape(tape, &SRC, SRC_VALID).unwrap();
    let dec = [0, ACTIONS[0], ACTIONS[1], ACTIONS[2]];
    let (logits, values) = decode_on_tape(tape, enc, SRC_VALID, &dec).unwrap();
    (tape.log_prob_pick(logits, &ACTIONS, 1.0), values)
}

/// The composite objective with advantages and TD targets pinned to the values
/// they take at `frozen`, so finite differences see them as constants.
fn frozen_a2c_objective(p: &ModelParams, adv: &[f64], targets: &[f64]) -> f64 {
    let mut tape = Tape::new(p);
    let (logp, values) = policy_nodes(&mut tape);
    let n = ACTIONS.len() as f64;
    let w: Vec<f64> = adv.iter().map(|a| -a / n).collect();
    let actor = tape.weighted_sum(logp, &w);
    let critic = tape.squared_error(values, targets, &[1.0 / n; 4]);
    tape.value(actor).data[0] + CRITIC_WEIGHT * tape.value(critic).data[0]
}

#[test]
fn a2c_objective_gradient_matches_finite_differences() {
    let p = tiny_params(2);
    let mut tape = Tape::new(&p);
    let (logp, values) = policy_nodes(&mut tape);
    let v = tape.value(values).data.clone();
    let obj = a2c_objective_on_tape(&mut tape, logp, values, &REWARDS, GAMMA, 1.0, CRITIC_WEIGHT);
    let g = tape.backward(obj.total);
    let targets = td_targets(&REWARDS, &v, GAMMA);
    let report = finite_difference_check(&p, &g, 1e-5, |q| frozen_a2c_objective(q, &obj.advantages, &targets));
    println!(
        "checked {} entries, max rel err {:e} at {}",
        report.checked, report.max_rel_err, report.worst
    );
    assert!(report.max_rel_err < 1e-4, "{}", report.worst);
}
