//! Classic coders and system gzip/xz on a corpus slice, plus the arithmetic
//! check of the published enwik8 figures.
//!
//!     RLTC_CORPUS=/data/enwik8 cargo run --release --example bench_table -- [LIMIT_BYTES]

use rltc::bench::{
    baseline_table, check_published, ingest_corpus, render_published, render_table, CorpusSlice, CORPUS_ENV,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let limit: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(1 << 20);
    let slice = match std::env::var_os(CORPUS_ENV) {
        Some(path) => ingest_corpus(path.as_ref(), limit)?,
        None => {
            eprintln!("{CORPUS_ENV} not set; using this crate's sources as the corpus");
            let text = [
                include_str!("../src/lib.rs"),
                include_str!("../src/baselines/arith.rs"),
                include_str!("../src/codec/pipeline.rs"),
                include_str!("../src/rl/trainer.rs"),
            ]
            .concat();
            CorpusSlice::from_bytes("crate sources", text.into_bytes())?
        }
    };
    let report = baseline_table(&slice, None)?;
    print!("{}", render_table(&slice, &report));
    println!();
    print!("{}", render_published(&check_published()));
    Ok(())
}
