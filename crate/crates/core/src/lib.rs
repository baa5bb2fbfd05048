//! A desk-scale laboratory for lossless compression with a reinforcement-learned
//! token compressor.
//!
//! A compressor transformer emits a short sequence of discrete tokens for each
//! chunk of input; a decompressor transformer reconstructs the chunk from those
//! tokens. The compressor is trained with advantage actor-critic against a
//! reward that charges for every emitted token and for reconstruction loss.
//! Classic coders (LZ77, arithmetic, range) live alongside for comparison, and
//! a benchmark harness measures ratio, latency and throughput.

pub mod baselines;
pub mod bench;
pub mod cli;
pub mod codec;
pub mod fsutil;
pub mod model;
pub mod rl;
pub mod tokenizer;
