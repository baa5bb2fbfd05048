//! The published enwik8 comparison, re-derived from its byte counts.

use std::fmt::Write;

use super::{compression_ratio, round_to};

/// enwik8 is the first 10^8 bytes of an English Wikipedia dump.
pub const ENWIK8_BYTES: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedRow {
    pub program: &'static str,
    pub compressed_bytes: u64,
    pub reported_ratio: f64,
    /// Decimal places the ratio was reported with.
    pub reported_decimals: u32,
}

pub const PUBLISHED_TABLE: [PublishedRow; 4] = [
    PublishedRow {
        program: "NNCP",
        compressed_bytes: 14_915_298,
        reported_ratio: 6.7,
        reported_decimals: 1,
    },
    PublishedRow {
        program: "RL token compressor",
        compressed_bytes: 24_141_013,
        reported_ratio: 4.12,
        reported_decimals: 2,
    },
    PublishedRow {
        program: "XZ",
        compressed_bytes: 24_865_244,
        reported_ratio: 4.0,
        reported_decimals: 1,
    },
    PublishedRow {
        program: "GZIP",
        compressed_bytes: 36_445_248,
        reported_ratio: 2.7,
        reported_decimals: 1,
    },
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedCheck {
    pub row: PublishedRow,
    pub computed: f64,
    /// The computed ratio rounded to the reported precision equals the reported ratio.
    pub consistent: bool,
}

pub fn check_published() -> Vec<PublishedCheck> {
    PUBLISHED_TABLE
        .iter()
        .map(|&row| {
            let computed = compression_ratio(ENWIK8_BYTES, row.compressed_bytes).expect("nonzero sizes");
            let consistent = round_to(computed, row.reported_decimals) == row.reported_ratio;
            PublishedCheck {
                row,
                computed,
                consistent,
            }
        })
        .collect()
}

/// Plain-text table with every inconsistent row called out.
pub fn render_published(checks: &[PublishedCheck]) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "{:<22} {:>16} {:>9} {:>9}",
        "program", "compressed_bytes", "reported", "computed"
    )
    .unwrap();
    for c in checks {
        writeln!(
            s,
            "{:<22} {:>16} {:>9.*} {:>9.2}{}",
            c.row.program,
            c.row.compressed_bytes,
            c.row.reported_decimals as usize,
            c.row.reported_ratio,
            c.computed,
            if c.consistent { "" } else { "  DISCREPANCY" }
        )
        .unwrap();
    }
    for c in checks.iter().filter(|c| !c.consistent) {
        writeln!(
            s,
            "note: {} / {} = {:.4}, which does not round to the reported {:.*}",
            ENWIK8_BYTES, c.row.compressed_bytes, c.computed, c.row.reported_decimals as usize, c.row.reported_ratio
        )
        .unwrap();
    }
    s
}
