use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use super::{compression_ratio, BenchError, CorpusSlice};
use crate::codec::{compress_chunk, compress_stream, decompress_stream, CompressedContainer};
use crate::model::ModelParams;
use crate::tokenizer::{chunk_stream, encode_bytes, MAX_CHUNK_LEN};

pub const SWEEP_HEADER: [&str; 5] = ["chunk_size", "compressed_bytes", "ratio", "latency_s", "throughput_tps"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub chunk_size: usize,
    pub compressed_bytes: u64,
    pub ratio: f64,
    /// Median wall time to compress one batch of chunks.
    pub latency_s: f64,
    /// Tokens compressed per second over the measured batches.
    pub throughput_tps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    /// Chunks per timed batch.
    pub batch: usize,
    pub warmup_batches: usize,
    pub measured_batches: usize,
    /// Compress the chunks of a batch concurrently.
    pub parallel: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            batch: 16,
            warmup_batches: 2,
            measured_batches: 5,
            parallel: false,
        }
    }
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// For each size: compress the whole slice, check the container decodes to the
/// slice, then time batches of chunks. Rows come back in the order of `sizes`.
pub fn sweep_chunk_sizes(
    compressor: &ModelParams,
    decompressor: &ModelParams,
    slice: &CorpusSlice,
    sizes: &[usize],
    opts: &SweepOptions,
) -> Result<Vec<SweepRow>, BenchError> {
    if let Some(&bad) = sizes.iter().find(|&&s| s == 0 || s > MAX_CHUNK_LEN) {
        return Err(BenchError::InvalidChunkSize(bad));
    }
    slice.verify()?;
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let container = compress_stream(compressor, decompressor, &slice.data, size)?;
        let bytes = container.to_bytes()?;
        let decoded = decompress_stream(decompressor, &CompressedContainer::from_bytes(&bytes)?)?;
        if decoded != slice.data {
            return Err(BenchError::VerificationFailed(format!("chunk size {size}")));
        }

        let chunks = chunk_stream(&encode_bytes(&slice.data), size).map_err(|_| BenchError::InvalidChunkSize(size))?;
        let batch = opts.batch.max(1);
        let mut times = Vec::with_capacity(opts.measured_batches);
        let mut tokens = 0usize;
        for k in 0..opts.warmup_batches + opts.measured_batches.max(1) {
            let picked: Vec<_> = (0..batch).map(|j| &chunks[(k * batch + j) % chunks.len()]).collect();
            let start = Instant::now();
            if opts.parallel {
                picked
                    .par_iter()
                    .try_for_each(|c| compress_chunk(compressor, decompressor, c).map(drop))?;
            } else {
                for c in &picked {
                    compress_chunk(compressor, decompressor, c)?;
                }
            }
            let elapsed = start.elapsed().as_secs_f64();
            if k >= opts.warmup_batches {
                times.push(elapsed);
                tokens += picked.iter().map(|c| c.valid_len).sum::<usize>();
            }
        }
        let total: f64 = times.iter().sum();
        rows.push(SweepRow {
            chunk_size: size,
            compressed_bytes: bytes.len() as u64,
            ratio: compression_ratio(slice.len() as u64, bytes.len() as u64)?,
            latency_s: median(&mut times),
            throughput_tps: tokens as f64 / total.max(f64::MIN_POSITIVE),
        });
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            r.chunk_size.to_string(),
            r.compressed_bytes.to_string(),
            format!("{:.4}", r.ratio),
            format!("{:.6}", r.latency_s),
            format!("{:.1}", r.throughput_tps),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelConfig;

    #[test]
    fn median_and_csv() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
        let row = SweepRow {
            chunk_size: 64,
            compressed_bytes: 100,
            ratio: 2.0,
            latency_s: 2.0,
            throughput_tps: 1024.0 / 2.0,
        };
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &[row]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "chunk_size,compressed_bytes,ratio,latency_s,throughput_tps\n64,100,2.0000,2.000000,512.0\n"
        );
    }

    #[test]
    fn small_sweep_is_ordered_and_deterministic() {
        let c = ModelParams::init(ModelConfig::small(), 1).unwrap();
        let d = ModelParams::init(ModelConfig::small(), 2).unwrap();
        let slice = CorpusSlice::from_bytes("mem", b"abcabcabcabd".repeat(20)).unwrap();
        let opts = SweepOptions {
            batch: 2,
            warmup_batches: 1,
            measured_batches: 2,
            parallel: false,
        };
        let a = sweep_chunk_sizes(&c, &d, &slice, &[32, 8, 16], &opts).unwrap();
        let b = sweep_chunk_sizes(&c, &d, &slice, &[32, 8, 16], &opts).unwrap();
        assert_eq!(a.iter().map(|r| r.chunk_size).collect::<Vec<_>>(), vec![32, 8, 16]);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.compressed_bytes, y.compressed_bytes);
            assert!(x.throughput_tps > 0.0 && x.latency_s > 0.0);
        }
        assert!(matches!(
            sweep_chunk_sizes(&c, &d, &slice, &[0], &opts),
            Err(BenchError::InvalidChunkSize(0))
        ));
    }
}
