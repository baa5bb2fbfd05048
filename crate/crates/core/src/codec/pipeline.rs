use rayon::prelude::*;

use super::container::{expected_chunks, ChunkRecord, CompressedContainer, Correction};
use super::CodecError;
use crate::model::{argmax, encode_ids, IncrementalDecoder, ModelParams};
use crate::rl::greedy_compress;
use crate::tokenizer::{chunk_stream, encode_bytes, Chunk, TokenId, TokenSequence, Vocab, MAX_CHUNK_LEN};

/// The decompressor's encoder input for stored tokens. A record shorter than
/// the chunk ended with an implied STOP, which the decompressor saw in training.
fn decoder_source(stored: &[TokenId], chunk_len: usize) -> Vec<usize> {
    let mut src: Vec<usize> = stored.iter().map(|&t| t as usize).collect();
    if src.len() < chunk_len {
        src.push(Vocab::STOP as usize);
    }
    src
}

/// Greedy compression of one chunk plus the corrections that make it exact.
///
/// Corrections are found while decoding: at each position the decompressor's
/// argmax is compared with the true token, and the true token is always fed
/// back. The decompressor therefore conditions on the same prefix it saw in
/// training, and one miss does not derail the positions after it.
pub fn compress_chunk(
    compressor: &ModelParams,
    decompressor: &ModelParams,
    chunk: &Chunk,
) -> Result<ChunkRecord, CodecError> {
    let mut stored = greedy_compress(compressor, chunk, chunk.len())?.0;
    if stored.last() == Some(&Vocab::STOP) {
        stored.pop();
    }
    let src = decoder_source(&stored, chunk.len());
    let enc = encode_ids(decompressor, &src, src.len())?;
    let mut dec = IncrementalDecoder::new(decompressor, &enc)?;
    let mut corrections = Vec::new();
    let mut prev = Vocab::BOS as usize;
    for (pos, &truth) in chunk.valid().iter().enumerate() {
        let predicted = argmax(&dec.step(prev)?.logits);
        if predicted != truth as usize {
            corrections.push(Correction {
                pos: pos as u16,
                token: truth,
            });
        }
        prev = truth as usize;
    }
    Ok(ChunkRecord {
        tokens: TokenSequence(stored),
        corrections,
    })
}

fn malformed(msg: String) -> CodecError {
    CodecError::MalformedRecord(msg)
}

/// Rebuilds a chunk of `valid_len` bytes from its record.
pub fn decompress_chunk(
    decompressor: &ModelParams,
    record: &ChunkRecord,
    chunk_len: usize,
    valid_len: usize,
) -> Result<Chunk, CodecError> {
    if record.tokens.len() > chunk_len || valid_len > chunk_len {
        return Err(malformed(format!(
            "{} tokens / {valid_len} bytes in a chunk of {chunk_len}",
            record.tokens.len()
        )));
    }
    let mut last = None;
    for c in &record.corrections {
        if c.pos as usize >= valid_len || last.is_some_and(|p| c.pos <= p) {
            return Err(malformed(format!(
                "correction position {} out of order or range",
                c.pos
            )));
        }
        if !Vocab::is_byte(c.token) {
            return Err(malformed(format!("correction token {} is not a byte", c.token)));
        }
        last = Some(c.pos);
    }

    let src = decoder_source(record.tokens.as_slice(), chunk_len);
    let enc = encode_ids(decompressor, &src, src.len())?;
    let mut dec = IncrementalDecoder::new(decompressor, &enc)?;
    let mut fixes = record.corrections.iter().peekable();
    let mut out: Vec<TokenId> = Vec::with_capacity(valid_len);
    let mut prev = Vocab::BOS as usize;
    for pos in 0..valid_len {
        let predicted = argmax(&dec.step(prev)?.logits);
        let tok = match fixes.next_if(|c| c.pos as usize == pos) {
            Some(c) => c.token,
            None => predicted as TokenId,
        };
        if !Vocab::is_byte(tok) {
            return Err(malformed(format!("position {pos} decodes to non-byte token {tok}")));
        }
        out.push(tok);
        prev = tok as usize;
    }
    Ok(Chunk::from_tokens(&out, chunk_len))
}

fn check_model(params: &ModelParams, vocab: usize, chunk_len: usize) -> Result<(), CodecError> {
    if params.config.vocab != vocab {
        return Err(CodecError::VocabMismatch {
            container: vocab,
            model: params.config.vocab,
        });
    }
    if !params.config.supports_chunk_len(chunk_len) {
        return Err(CodecError::InvalidChunkLen(chunk_len));
    }
    Ok(())
}

/// Compresses `data` chunk by chunk. Chunks run in parallel; records are
/// kept in chunk order, so the container does not depend on scheduling.
pub fn compress_stream(
    compressor: &ModelParams,
    decompressor: &ModelParams,
    data: &[u8],
    chunk_len: usize,
) -> Result<CompressedContainer, CodecError> {
    if chunk_len == 0 || chunk_len > MAX_CHUNK_LEN {
        return Err(CodecError::InvalidChunkLen(chunk_len));
    }
    check_model(compressor, Vocab::SIZE, chunk_len)?;
    check_model(decompressor, Vocab::SIZE, chunk_len)?;
    let chunks = chunk_stream(&encode_bytes(data), chunk_len).map_err(|_| CodecError::InvalidChunkLen(chunk_len))?;
    let records = chunks
        .par_iter()
        .map(|c| compress_chunk(compressor, decompressor, c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CompressedContainer {
        vocab: Vocab::SIZE as u32,
        chunk_len: chunk_len as u16,
        original_len: data.len() as u64,
        records,
    })
}

/// Reconstructs the original bytes of `container`.
pub fn decompress_stream(decompressor: &ModelParams, container: &CompressedContainer) -> Result<Vec<u8>, CodecError> {
    let chunk_len = container.chunk_len as usize;
    check_model(decompressor, container.vocab as usize, chunk_len)?;
    if container.records.len() as u64 != expected_chunks(container.original_len, container.chunk_len) {
        return Err(CodecError::CorruptContainer("chunk count does not match length".into()));
    }
    let chunks = container
        .records
        .par_iter()
        .enumerate()
        .map(|(i, r)| decompress_chunk(decompressor, r, chunk_len, container.valid_len(i)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(chunks.iter().flat_map(|c| c.valid().iter().map(|&t| t as u8)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelConfig;

    fn untrained(seed: u64) -> ModelParams {
        ModelParams::init(ModelConfig::small(), seed).unwrap()
    }

    #[test]
    fn untrained_round_trip() {
        let (c, d) = (untrained(1), untrained(2));
        let data = b"the quick brown fox jumps over the lazy dog, twice: the quick brown fox".to_vec();
        let container = compress_stream(&c, &d, &data, 16).unwrap();
        assert_eq!(container.records.len(), 5);
        let bytes = container.to_bytes().unwrap();
        assert_eq!(container.size_report().container_bytes, bytes.len() as u64);
        let parsed = CompressedContainer::from_bytes(&bytes).unwrap();
        assert_eq!(decompress_stream(&d, &parsed).unwrap(), data);
        assert_eq!(compress_stream(&c, &d, &data, 16).unwrap().to_bytes().unwrap(), bytes);
    }

    #[test]
    fn empty_input_is_header_only() {
        let (c, d) = (untrained(1), untrained(2));
        let container = compress_stream(&c, &d, &[], 32).unwrap();
        assert_eq!(container.to_bytes().unwrap().len(), super::super::HEADER_BYTES);
        assert!(decompress_stream(&d, &container).unwrap().is_empty());
    }

    #[test]
    fn full_corrections_rebuild_any_chunk() {
        let d = untrained(2);
        let truth: Vec<TokenId> = vec![0, 255, 17, 17, 200];
        let record = ChunkRecord {
            tokens: TokenSequence(vec![]),
            corrections: truth
                .iter()
                .enumerate()
                .map(|(i, &t)| Correction {
                    pos: i as u16,
                    token: t,
                })
                .collect(),
        };
        let chunk = decompress_chunk(&d, &record, 8, 5).unwrap();
        assert_eq!(chunk.valid(), truth.as_slice());
    }

    #[test]
    fn bad_records_and_mismatches() {
        let d = untrained(2);
        let rec = |pos: &[u16]| ChunkRecord {
            tokens: TokenSequence(vec![]),
            corrections: pos.iter().map(|&p| Correction { pos: p, token: 1 }).collect(),
        };
        assert!(matches!(
            decompress_chunk(&d, &rec(&[4]), 8, 4),
            Err(CodecError::MalformedRecord(_))
        ));
        assert!(matches!(
            decompress_chunk(&d, &rec(&[2, 1]), 8, 4),
            Err(CodecError::MalformedRecord(_))
        ));
        let mut container = compress_stream(&untrained(1), &d, b"abc", 8).unwrap();
        container.vocab = 300;
        assert!(matches!(
            decompress_stream(&d, &container),
            Err(CodecError::VocabMismatch {
                container: 300,
                model: 260
            })
        ));
        assert!(matches!(
            compress_stream(&d, &d, b"x", 0),
            Err(CodecError::InvalidChunkLen(0))
        ));
        assert!(matches!(
            compress_stream(&d, &d, b"x", 129),
            Err(CodecError::InvalidChunkLen(129))
        ));
    }
}
