use std::fmt::Write as _;
use std::io::{self, Write};
use std::process::{Command, Stdio};

use super::{compression_ratio, round_to, BenchError, CorpusSlice};
use crate::baselines::{decode_file, encode_file, BaselineCodec};
use crate::codec::{compress_stream, decompress_stream, CompressedContainer};
use crate::model::ModelParams;

pub const TABLE_HEADER: [&str; 4] = ["program", "compressed_bytes", "ratio", "verified"];

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub program: String,
    pub compressed_bytes: u64,
    pub ratio: f64,
    pub verified: bool,
}

/// Verified rows plus notes about programs that could not be measured.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TableReport {
    pub rows: Vec<TableRow>,
    pub notes: Vec<String>,
}

/// Pipes `input` through `program args` and returns its stdout.
fn run_filter(program: &str, args: &[&str], input: &[u8]) -> io::Result<Vec<u8>> {
    let mut child = Command::new(program)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()?;
    let mut stdin = child.stdin.take().expect("stdin is piped");
    let output = std::thread::scope(|s| {
        let writer = s.spawn(move || stdin.write_all(input));
        let out = child.wait_with_output();
        writer.join().expect("writer thread panicked")?;
        out
    })?;
    if !output.status.success() {
        return Err(io::Error::other(format!("{program} exited with {}", output.status)));
    }
    Ok(output.stdout)
}

fn row(program: &str, original: usize, compressed: usize) -> Result<TableRow, BenchError> {
    Ok(TableRow {
        program: program.to_string(),
        compressed_bytes: compressed as u64,
        ratio: compression_ratio(original as u64, compressed as u64)?,
        verified: true,
    })
}

/// Measures the native coders, the learned codec when given, and system
/// gzip/xz when installed. Every row has been decoded back to the slice.
pub fn baseline_table(
    slice: &CorpusSlice,
    learned: Option<(&ModelParams, &ModelParams, usize)>,
) -> Result<TableReport, BenchError> {
    slice.verify()?;
    let data = &slice.data;
    let mut report = TableReport::default();

    if let Some((c, d, chunk_len)) = learned {
        let bytes = compress_stream(c, d, data, chunk_len)?.to_bytes()?;
        if decompress_stream(d, &CompressedContainer::from_bytes(&bytes)?)? != *data {
            return Err(BenchError::VerificationFailed("learned codec".into()));
        }
        report
            .rows
            .push(row(&format!("rl-tokens (chunk {chunk_len})"), data.len(), bytes.len())?);
    }

    for codec in BaselineCodec::ALL {
        let file = encode_file(codec, data);
        if decode_file(&file)?.1 != *data {
            return Err(BenchError::VerificationFailed(codec.name().into()));
        }
        report.rows.push(row(codec.name(), data.len(), file.len())?);
    }

    for tool in ["gzip", "xz"] {
        let packed = match run_filter(tool, &["-9", "-c"], data) {
            Ok(p) => p,
            Err(e) => {
                report.notes.push(format!("{tool}: not measured ({e})"));
                continue;
            }
        };
        match run_filter(tool, &["-d", "-c"], &packed) {
            Ok(back) if back == *data => report.rows.push(row(tool, data.len(), packed.len())?),
            Ok(_) => report.notes.push(format!("{tool}: round trip differs, row dropped")),
            Err(e) => report
                .notes
                .push(format!("{tool}: decompression failed ({e}), row dropped")),
        }
    }
    Ok(report)
}

/// Writes only verified rows.
pub fn write_table_csv<W: Write>(out: W, report: &TableReport) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TABLE_HEADER)?;
    for r in report.rows.iter().filter(|r| r.verified) {
        w.write_record([
            r.program.clone(),
            r.compressed_bytes.to_string(),
            format!("{:.4}", r.ratio),
            r.verified.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn render_table(slice: &CorpusSlice, report: &TableReport) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "corpus {} ({} bytes, sha256 {})",
        slice.path.display(),
        slice.len(),
        slice.hash_hex()
    )
    .unwrap();
    writeln!(s, "{:<22} {:>16} {:>7}", "program", "compressed_bytes", "ratio").unwrap();
    for r in &report.rows {
        writeln!(
            s,
            "{:<22} {:>16} {:>7.2}",
            r.program,
            r.compressed_bytes,
            round_to(r.ratio, 2)
        )
        .unwrap();
    }
    for n in &report.notes {
        writeln!(s, "note: {n}").unwrap();
    }
    s
}
