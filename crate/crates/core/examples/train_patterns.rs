//! Trains a compressor/decompressor pair on chunks built from a small library
//! of repeated 8-byte patterns, then compresses the corpus with the result.
//!
//!     cargo run --release --example train_patterns            # quick demo, under a minute
//!     cargo run --release --example train_patterns -- --full  # the long run, ~2 min

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rltc::codec::compress_stream;
use rltc::model::{self, ModelConfig};
use rltc::rl::{train_pair, uniform_token_bits, PretrainConfig, RewardSchedule, TrainPlan, TrainerConfig};
use rltc::tokenizer::{Chunk, TokenId};

fn corpus(seed: u64) -> Vec<Chunk> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let library: Vec<Vec<TokenId>> = (0..16)
        .map(|_| {
            (0..8)
                .map(|_| TokenId::from(b'a') + rng.random_range(0..16u16))
                .collect()
        })
        .collect();
    (0..512)
        .map(|_| {
            let p = &library[rng.random_range(0..16)];
            Chunk::from_tokens(&(0..32).map(|i| p[i % 8]).collect::<Vec<_>>(), 32)
        })
        .collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let full = std::env::args().any(|a| a == "--full");
    let (pretrain, a2c, ramp) = if full { (1200, 2000, 1700) } else { (400, 300, 250) };
    let chunks = corpus(7);
    let plan = TrainPlan {
        model: ModelConfig::small(),
        seed: 5,
        pretrain: PretrainConfig {
            steps: pretrain,
            batch_size: 16,
            max_grad_norm: Some(1.0),
        },
        pretrain_lr: 1e-3,
        a2c_steps: a2c,
        trainer: TrainerConfig {
            critic_warmup_steps: if full { 200 } else { 50 },
            compressor_lr: 1e-4,
            decompressor_lr: 1e-3,
            ..TrainerConfig::default()
        },
        schedule: RewardSchedule::new(uniform_token_bits(), ramp),
    };

    let out = train_pair(&chunks, &plan, |m| {
        if m.step % 50 == 0 {
            println!(
                "step {:>5}  reconstruction {:.3} nats/token  |c| {:>5.2}  cost {:.2} bits",
                m.step, m.reconstruction_loss, m.mean_compressed_len, m.cost_per_token
            );
        }
        Ok(())
    })?;
    println!(
        "final pre-training losses: compressor {:.4}, decompressor {:.4}",
        out.compressor_pretrain_loss.last().unwrap_or(&f64::NAN),
        out.decompressor_pretrain_loss.last().unwrap_or(&f64::NAN)
    );

    let data: Vec<u8> = chunks[..64]
        .iter()
        .flat_map(|c| c.valid().iter().map(|&t| t as u8))
        .collect();
    let container = compress_stream(&out.compressor, &out.decompressor, &data, 32)?;
    let r = container.size_report();
    let corrections: usize = container.records.iter().map(|r| r.corrections.len()).sum();
    println!(
        "{} bytes -> {} bytes; {:.2} stored tokens and {:.2} corrections per chunk",
        r.original_bytes,
        r.container_bytes,
        container.records.iter().map(|r| r.tokens.len()).sum::<usize>() as f64 / 64.0,
        corrections as f64 / 64.0
    );

    let dir = std::env::temp_dir().join("rltc-train-patterns");
    std::fs::create_dir_all(&dir)?;
    model::save(&out.compressor, &dir.join("compressor.rltm"))?;
    model::save(&out.decompressor, &dir.join("decompressor.rltm"))?;
    println!("checkpoints in {}", dir.display());
    Ok(())
}
