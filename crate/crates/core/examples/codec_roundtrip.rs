//! Compresses a file into a container and restores it. Without checkpoints an
//! untrained pair is used: the output is then mostly corrections, but the round
//! trip is still exact.
//!
//!     cargo run --release --example codec_roundtrip -- [FILE] [COMPRESSOR DECOMPRESSOR]

use rltc::codec::{compress_stream, decompress_stream, CompressedContainer, HEADER_BYTES};
use rltc::model::{self, ModelConfig, ModelParams};

const SAMPLE: &[u8] = b"It is a truth universally acknowledged, that a single man in possession \
of a good fortune, must be in want of a wife.\n";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let data = match args.first() {
        Some(path) => std::fs::read(path)?,
        None => SAMPLE.repeat(4),
    };
    let (c, d) = match (args.get(1), args.get(2)) {
        (Some(c), Some(d)) => (model::load(c.as_ref())?, model::load(d.as_ref())?),
        _ => (
            ModelParams::init(ModelConfig::small(), 1)?,
            ModelParams::init(ModelConfig::small(), 2)?,
        ),
    };

    let container = compress_stream(&c, &d, &data, 32)?;
    let bytes = container.to_bytes()?;
    let r = container.size_report();
    println!("original     {:>8} bytes", r.original_bytes);
    println!("container    {:>8} bytes", r.container_bytes);
    println!("  header     {:>8}", r.header_bytes);
    println!("  tokens     {:>8}", r.token_payload_bytes);
    println!("  corrections{:>8}", r.corrections_bytes);
    println!("header: {}", hex::encode(&bytes[..HEADER_BYTES]));

    let restored = decompress_stream(&d, &CompressedContainer::from_bytes(&bytes)?)?;
    assert_eq!(restored, data);
    println!("round trip exact over {} chunks", container.records.len());
    Ok(())
}
