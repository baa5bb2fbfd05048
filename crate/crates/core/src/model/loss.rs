use super::tape::{Tape, Var};
use super::tensor::{self, Tensor};
use super::ModelError;

/// Mean token-level cross-entropy in nats over targets other than `ignore`.
pub fn lm_loss(logits: &Tensor, targets: &[usize], ignore: Option<usize>) -> Result<f64, ModelError> {
    if logits.rows != targets.len() {
        return Err(ModelError::ShapeMismatch(format!(
            "{} logits rows for {} targets",
            logits.rows,
            targets.len()
        )));
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for (t, &target) in targets.iter().enumerate() {
        if Some(target) == ignore {
            continue;
        }
        let row = logits.row(t);
        total += tensor::log_sum_exp(row) - row[target];
        count += 1;
    }
    if count == 0 {
        return Err(ModelError::EmptyTarget);
    }
    Ok(total / count as f64)
}

/// Records the same loss as [`lm_loss`] on the tape; returns the scalar node.
pub fn lm_loss_on_tape(
    tape: &mut Tape,
    logits: Var,
    targets: &[usize],
    ignore: Option<usize>,
) -> Result<Var, ModelError> {
    let count = targets.iter().filter(|&&t| Some(t) != ignore).count();
    if count == 0 {
        return Err(ModelError::EmptyTarget);
    }
    let logp = tape.log_prob_pick(logits, targets, 1.0);
    let weights: Vec<f64> = targets
        .iter()
        .map(|&t| if Some(t) == ignore { 0.0 } else { -1.0 / count as f64 })
        .collect();
    Ok(tape.weighted_sum(logp, &weights))
}
