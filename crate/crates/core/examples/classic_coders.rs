//! Arithmetic coding, range coding and LZ77 on one input, next to the order-0
//! entropy bound.
//!
//!     cargo run --release --example classic_coders -- [FILE]

use rltc::baselines::{
    ac_encode, decode_file, encode_file, entropy, lz77_tokenize, range_encode, BaselineCodec, FrequencyModel,
    Lz77Token, DEFAULT_LOOKAHEAD, DEFAULT_WINDOW,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = match std::env::args().nth(1) {
        Some(path) => std::fs::read(path)?,
        None => include_bytes!("classic_coders.rs").to_vec(),
    };

    let mut counts = [0usize; 256];
    data.iter().for_each(|&b| counts[b as usize] += 1);
    let probs: Vec<f64> = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| c as f64 / data.len() as f64)
        .collect();
    let h = entropy(&probs)?;
    println!(
        "{} bytes, order-0 entropy {h:.4} bits/byte, bound {:.0} bytes",
        data.len(),
        h * data.len() as f64 / 8.0
    );

    let ac = ac_encode(&data, &FrequencyModel::adaptive());
    let rc = range_encode(&data, &FrequencyModel::adaptive());
    println!("adaptive arithmetic  {:>8} bytes ({} bits)", ac.bytes.len(), ac.bit_len);
    println!("adaptive range       {:>8} bytes", rc.len());

    let tokens = lz77_tokenize(&data, DEFAULT_WINDOW, DEFAULT_LOOKAHEAD);
    let matches = tokens.iter().filter(|t| matches!(t, Lz77Token::Match { .. })).count();
    println!(
        "lz77                 {:>8} tokens, {matches} back-references",
        tokens.len()
    );
    for t in tokens
        .iter()
        .filter(|t| matches!(t, Lz77Token::Match { length, .. } if *length > 8))
        .take(3)
    {
        println!("  e.g. {t:?}");
    }

    for codec in BaselineCodec::ALL {
        let file = encode_file(codec, &data);
        assert_eq!(decode_file(&file)?, (codec, data.clone()));
        println!(
            "{:<10} file {:>8} bytes, ratio {:.3}",
            codec.name(),
            file.len(),
            data.len() as f64 / file.len() as f64
        );
    }
    Ok(())
}
