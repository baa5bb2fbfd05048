//! Compression ratio, latency and throughput across chunk sizes, as CSV.
//! A narrow untrained pair keeps this quick; pass checkpoints for real numbers.
//!
//!     cargo run --release --example chunk_sweep -- [COMPRESSOR DECOMPRESSOR]

use rltc::bench::{sweep_chunk_sizes, write_sweep_csv, CorpusSlice, SweepOptions};
use rltc::model::{self, ModelConfig, ModelParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (c, d) = match (args.first(), args.get(1)) {
        (Some(c), Some(d)) => (model::load(c.as_ref())?, model::load(d.as_ref())?),
        _ => {
            let cfg = ModelConfig {
                d_model: 16,
                d_ff: 32,
                n_heads: 2,
                n_layers_enc: 1,
                n_layers_dec: 1,
                ..ModelConfig::default()
            };
            (ModelParams::init(cfg, 1)?, ModelParams::init(cfg, 2)?)
        }
    };
    let text = include_str!("../src/codec/container.rs").repeat(3);
    let slice = CorpusSlice::from_bytes("container.rs x3", text.into_bytes())?;
    let rows = sweep_chunk_sizes(&c, &d, &slice, &[16, 32, 64, 128], &SweepOptions::default())?;
    write_sweep_csv(std::io::stdout().lock(), &rows)?;
    Ok(())
}
