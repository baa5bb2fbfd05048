//! Command-line front end: `train`, `compress`, `decompress`, `bench`, `sweep`.
//!
//! Every output file is written to a temporary sibling and renamed into place,
//! so a failed command never leaves a torn file behind.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::bench::{
    baseline_table, check_published, ingest_corpus, render_published, render_table, sweep_chunk_sizes, write_sweep_csv,
    write_table_csv, BenchError, CorpusSlice, SweepOptions, CORPUS_ENV,
};
use crate::codec::{compress_stream, decompress_stream, CodecError, CompressedContainer};
use crate::fsutil::write_atomic;
use crate::model::{self, ModelConfig, ModelError, ModelParams};
use crate::rl::{
    train_pair, MetricsLog, PretrainConfig, RewardSchedule, RunConfig, TrainError, TrainPlan, TrainerConfig,
};
use crate::tokenizer::{chunk_stream, encode_bytes};

pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const BAD_MAGIC: u8 = 3;
    pub const VOCAB_MISMATCH: u8 = 4;
    pub const CORRUPT_CONTAINER: u8 = 5;
    pub const IO: u8 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Io { .. } | CliError::Model(ModelError::Io(_)) | CliError::Train(TrainError::Io(_)) => exit::IO,
            CliError::Bench(BenchError::FileUnreadable { .. } | BenchError::Io(_)) => exit::IO,
            CliError::Codec(CodecError::BadMagic) => exit::BAD_MAGIC,
            CliError::Codec(CodecError::VocabMismatch { .. }) => exit::VOCAB_MISMATCH,
            CliError::Codec(
                CodecError::CorruptContainer(_)
                | CodecError::VersionUnsupported(_)
                | CodecError::MalformedRecord(_)
                | CodecError::PayloadTruncated { .. }
                | CodecError::TokenOutOfRange { .. },
            ) => exit::CORRUPT_CONTAINER,
            _ => exit::FAILURE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "rltc", version, about = "Reinforcement-learned token compressor")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pre-train both models as identity maps, then train with A2C.
    Train(TrainArgs),
    /// Compress a file into a container.
    Compress(CompressArgs),
    /// Restore a file from a container.
    Decompress(DecompressArgs),
    /// Compare the learned codec with the classic coders on a corpus slice.
    Bench(BenchArgs),
    /// Measure ratio, latency and throughput across chunk sizes.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelSize {
    Small,
    Base,
}

impl ModelSize {
    fn config(self) -> ModelConfig {
        match self {
            ModelSize::Small => ModelConfig::small(),
            ModelSize::Base => ModelConfig::default(),
        }
    }
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Corpus file; falls back to $RLTC_CORPUS.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, default_value_t = 1 << 20)]
    pub limit_bytes: u64,
}

impl CorpusArgs {
    fn load(&self) -> Result<CorpusSlice, CliError> {
        let path = match &self.corpus {
            Some(p) => p.clone(),
            None => std::env::var_os(CORPUS_ENV)
                .map(PathBuf::from)
                .ok_or_else(|| CliError::Usage(format!("no corpus: pass --corpus or set {CORPUS_ENV}")))?,
        };
        if self.limit_bytes == 0 {
            return Err(CliError::Usage("--limit-bytes must be at least 1".into()));
        }
        Ok(ingest_corpus(&path, self.limit_bytes)?)
    }
}

#[derive(Debug, Args)]
pub struct ModelPair {
    #[arg(long)]
    pub compressor: PathBuf,
    #[arg(long)]
    pub decompressor: PathBuf,
}

impl ModelPair {
    fn load(&self) -> Result<(ModelParams, ModelParams), CliError> {
        Ok((load_model(&self.compressor)?, load_model(&self.decompressor)?))
    }
}

fn load_model(path: &Path) -> Result<ModelParams, CliError> {
    model::load(path).map_err(|e| match e {
        ModelError::Io(source) => CliError::Io {
            path: path.to_path_buf(),
            source,
        },
        e => e.into(),
    })
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, default_value_t = 32)]
    pub chunk_len: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// A2C steps after pre-training.
    #[arg(long, default_value_t = 1000)]
    pub steps: u64,
    /// Identity pre-training steps for each model.
    #[arg(long, default_value_t = 500)]
    pub pretrain_steps: usize,
    #[arg(long, default_value_t = 16)]
    pub batch: usize,
    /// Compressor learning rate during A2C.
    #[arg(long, default_value_t = 1e-4)]
    pub lr: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub decompressor_lr: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub pretrain_lr: f64,
    #[arg(long, default_value_t = 0.99)]
    pub gamma: f64,
    /// Steps over which the per-token cost ramps up to log2 of the vocabulary.
    #[arg(long, default_value_t = 1000)]
    pub warmup: u64,
    /// Initial A2C steps that fit only the value head.
    #[arg(long, default_value_t = 100)]
    pub critic_warmup: u64,
    #[arg(long, value_enum, default_value_t = ModelSize::Small)]
    pub model: ModelSize,
    /// Run directory for checkpoints, metrics and config.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    #[command(flatten)]
    pub models: ModelPair,
    #[arg(long, default_value_t = 32)]
    pub chunk_len: usize,
    pub input: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecompressArgs {
    #[arg(long)]
    pub decompressor: PathBuf,
    pub input: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Include the learned codec (needs --decompressor too).
    #[arg(long, requires = "decompressor")]
    pub compressor: Option<PathBuf>,
    #[arg(long, requires = "compressor")]
    pub decompressor: Option<PathBuf>,
    #[arg(long, default_value_t = 32)]
    pub chunk_len: usize,
    /// Write the verified rows as CSV here.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub models: ModelPair,
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,128")]
    pub sizes: Vec<usize>,
    /// Chunks per timed batch.
    #[arg(long, default_value_t = 16)]
    pub batch: usize,
    /// Compress the chunks of each batch concurrently.
    #[arg(long)]
    pub parallel: bool,
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    write_atomic(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn cmd_train(a: &TrainArgs) -> Result<(), CliError> {
    if a.chunk_len == 0 || !a.model.config().supports_chunk_len(a.chunk_len) || a.chunk_len > 128 {
        return Err(CliError::Usage(format!(
            "--chunk-len {} is outside 1..=128",
            a.chunk_len
        )));
    }
    let slice = a.corpus.load()?;
    let chunks = chunk_stream(&encode_bytes(&slice.data), a.chunk_len).expect("chunk length checked");
    let plan = TrainPlan {
        model: a.model.config(),
        seed: a.seed,
        pretrain: PretrainConfig {
            steps: a.pretrain_steps,
            batch_size: a.batch,
            max_grad_norm: Some(1.0),
        },
        pretrain_lr: a.pretrain_lr,
        a2c_steps: a.steps,
        trainer: TrainerConfig {
            gamma: a.gamma,
            batch_size: a.batch,
            compressor_lr: a.lr,
            decompressor_lr: a.decompressor_lr,
            critic_warmup_steps: a.critic_warmup,
            ..TrainerConfig::default()
        },
        schedule: RewardSchedule {
            warmup_steps: a.warmup,
            ..RewardSchedule::default()
        },
    };
    plan.trainer.validate()?;
    std::fs::create_dir_all(&a.out).map_err(|source| CliError::Io {
        path: a.out.clone(),
        source,
    })?;

    let mut config = RunConfig::default();
    config
        .set("corpus", slice.path.display())
        .set("corpus_bytes", slice.len())
        .set("corpus_sha256", slice.hash_hex())
        .set("chunk_len", a.chunk_len)
        .set("seed", a.seed)
        .set("steps", a.steps)
        .set("pretrain_steps", a.pretrain_steps)
        .set("batch", a.batch)
        .set("lr", a.lr)
        .set("decompressor_lr", a.decompressor_lr)
        .set("pretrain_lr", a.pretrain_lr)
        .set("gamma", a.gamma)
        .set("warmup", a.warmup)
        .set("critic_warmup", a.critic_warmup)
        .set("model", format!("{:?}", a.model).to_lowercase());
    config.write(&a.out.join("config.txt"))?;

    let mut log = MetricsLog::open(&a.out.join("metrics.csv"))?;
    let report_every = (a.steps / 20).max(1);
    let outcome = train_pair(&chunks, &plan, |m| {
        if m.step % report_every == 0 || m.step + 1 == a.steps {
            eprintln!(
                "step {:>6}  L_D {:.4}  |c| {:.2}  cost {:.3}",
                m.step, m.reconstruction_loss, m.mean_compressed_len, m.cost_per_token
            );
        }
        log.append(m)
    })?;
    write(&a.out.join("compressor.rltm"), &model::to_bytes(&outcome.compressor))?;
    write(
        &a.out.join("decompressor.rltm"),
        &model::to_bytes(&outcome.decompressor),
    )?;
    eprintln!("wrote {}", a.out.display());
    Ok(())
}

fn cmd_compress(a: &CompressArgs) -> Result<(), CliError> {
    let (c, d) = a.models.load()?;
    let data = read(&a.input)?;
    let container = compress_stream(&c, &d, &data, a.chunk_len)?;
    let bytes = container.to_bytes()?;
    write(&a.out, &bytes)?;
    let r = container.size_report();
    eprintln!(
        "{} -> {} bytes (tokens {}, corrections {}, header {})",
        r.original_bytes, r.container_bytes, r.token_payload_bytes, r.corrections_bytes, r.header_bytes
    );
    Ok(())
}

fn cmd_decompress(a: &DecompressArgs) -> Result<(), CliError> {
    let bytes = read(&a.input)?;
    // parse before loading the model so garbage input is reported as such
    let container = CompressedContainer::from_bytes(&bytes)?;
    let d = load_model(&a.decompressor)?;
    let data = decompress_stream(&d, &container)?;
    if data.len() as u64 != container.original_len {
        return Err(CodecError::CorruptContainer("decoded length differs from header".into()).into());
    }
    write(&a.out, &data)
}

fn cmd_bench(a: &BenchArgs) -> Result<(), CliError> {
    let slice = a.corpus.load()?;
    let models = match (&a.compressor, &a.decompressor) {
        (Some(c), Some(d)) => Some((load_model(c)?, load_model(d)?)),
        _ => None,
    };
    let learned = models.as_ref().map(|(c, d)| (c, d, a.chunk_len));
    let report = baseline_table(&slice, learned)?;
    print!("{}", render_table(&slice, &report));
    println!();
    print!("{}", render_published(&check_published()));
    if let Some(path) = &a.table {
        let mut buf = Vec::new();
        write_table_csv(&mut buf, &report)?;
        write(path, &buf)?;
    }
    Ok(())
}

fn cmd_sweep(a: &SweepArgs) -> Result<(), CliError> {
    let slice = a.corpus.load()?;
    let (c, d) = a.models.load()?;
    let opts = SweepOptions {
        batch: a.batch,
        parallel: a.parallel,
        ..SweepOptions::default()
    };
    let rows = sweep_chunk_sizes(&c, &d, &slice, &a.sizes, &opts)?;
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &rows)?;
    write(&a.out, &buf)?;
    print!("{}", String::from_utf8_lossy(&buf));
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Compress(a) => cmd_compress(a),
        Command::Decompress(a) => cmd_decompress(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}

/// Parses `args`, runs the command on a pool of `--jobs` threads and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        pool = pool.num_threads(j.max(1));
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| run(&cli)),
        Err(e) => Err(CliError::Usage(format!("cannot start worker pool: {e}"))),
    };
    match result {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
