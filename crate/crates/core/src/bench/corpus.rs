use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::BenchError;

/// Environment variable naming the default corpus file.
pub const CORPUS_ENV: &str = "RLTC_CORPUS";

/// A prefix of a corpus file held in memory with its SHA-256.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSlice {
    pub path: PathBuf,
    pub offset: u64,
    pub data: Vec<u8>,
    pub sha256: [u8; 32],
}

impl CorpusSlice {
    /// An in-memory slice, for synthetic corpora.
    pub fn from_bytes(label: impl Into<PathBuf>, data: Vec<u8>) -> Result<Self, BenchError> {
        if data.is_empty() {
            return Err(BenchError::EmptySlice);
        }
        Ok(Self {
            path: label.into(),
            offset: 0,
            sha256: Sha256::digest(&data).into(),
            data,
        })
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn hash_hex(&self) -> String {
        hex::encode(self.sha256)
    }

    pub fn verify(&self) -> Result<(), BenchError> {
        if <[u8; 32]>::from(Sha256::digest(&self.data)) == self.sha256 {
            Ok(())
        } else {
            Err(BenchError::HashMismatch)
        }
    }
}

/// Loads the first `min(limit_bytes, file size)` bytes of `path`.
pub fn ingest_corpus(path: &Path, limit_bytes: u64) -> Result<CorpusSlice, BenchError> {
    let unreadable = |source| BenchError::FileUnreadable {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(unreadable)?;
    let mut data = Vec::new();
    file.take(limit_bytes).read_to_end(&mut data).map_err(unreadable)?;
    CorpusSlice::from_bytes(path, data)
}
