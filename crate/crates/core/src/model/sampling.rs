use rand::Rng;

use super::tensor;

/// Draws a token from `softmax(logits / temperature)`.
pub fn sample_token<R: Rng + ?Sized>(logits: &[f64], temperature: f64, rng: &mut R) -> usize {
    assert!(temperature > 0.0, "temperature must be positive");
    let mut probs: Vec<f64> = logits.iter().map(|l| l / temperature).collect();
    tensor::softmax_in_place(&mut probs);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_nonzero = i;
        }
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding left u above the final cumulative sum
    last_nonzero
}

/// `log softmax(logits / temperature)[token]`
pub fn log_prob(logits: &[f64], temperature: f64, token: usize) -> f64 {
    let scaled: Vec<f64> = logits.iter().map(|l| l / temperature).collect();
    scaled[token] - tensor::log_sum_exp(&scaled)
}
