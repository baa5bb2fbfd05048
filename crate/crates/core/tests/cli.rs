mod common;

use std::path::{Path, PathBuf};

use common::{golden_models, GOLDEN_INPUT};
use rltc::cli::{exit, main_with_args};
use rltc::codec::{CompressedContainer, VERSION};
use rltc::model;

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let (c, d) = golden_models();
        model::save(&c, &dir.path().join("c.rltm")).unwrap();
        model::save(&d, &dir.path().join("d.rltm")).unwrap();
        std::fs::write(dir.path().join("in.bin"), GOLDEN_INPUT).unwrap();
        Self { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> u8 {
        let mut full = vec!["rltc".to_string()];
        for a in args {
            // `@name` refers to a file in the fixture directory
            full.push(match a.strip_prefix('@') {
                Some(name) => self.path(name).display().to_string(),
                None => a.to_string(),
            });
        }
        main_with_args(full)
    }

    fn compress(&self, out: &str) -> u8 {
        self.run(&[
            "compress",
            "--compressor",
            "@c.rltm",
            "--decompressor",
            "@d.rltm",
            "--chunk-len",
            "32",
            "@in.bin",
            "-o",
            &format!("@{out}"),
        ])
    }

    fn decompress(&self, input: &str, out: &str) -> u8 {
        self.run(&[
            "decompress",
            "--decompressor",
            "@d.rltm",
            &format!("@{input}"),
            "-o",
            &format!("@{out}"),
        ])
    }
}

fn exists(p: &Path) -> bool {
    p.try_exists().unwrap()
}

#[test]
fn compress_then_decompress_round_trips() {
    let f = Fixture::new();
    assert_eq!(f.compress("x.rltc"), exit::OK);
    assert_eq!(f.decompress("x.rltc", "out.bin"), exit::OK);
    assert_eq!(std::fs::read(f.path("out.bin")).unwrap(), GOLDEN_INPUT);
}

#[test]
fn bad_magic_exits_3_without_output() {
    let f = Fixture::new();
    assert_eq!(f.decompress("in.bin", "out.bin"), exit::BAD_MAGIC);
    assert!(!exists(&f.path("out.bin")));
}

#[test]
fn vocab_mismatch_exits_4() {
    let f = Fixture::new();
    let c = CompressedContainer {
        vocab: 300,
        chunk_len: 32,
        original_len: 0,
        records: vec![],
    };
    std::fs::write(f.path("v.rltc"), c.to_bytes().unwrap()).unwrap();
    assert_eq!(f.decompress("v.rltc", "out.bin"), exit::VOCAB_MISMATCH);
    assert!(!exists(&f.path("out.bin")));
}

#[test]
fn corrupt_containers_exit_5() {
    let f = Fixture::new();
    assert_eq!(f.compress("x.rltc"), exit::OK);
    let good = std::fs::read(f.path("x.rltc")).unwrap();
    let mut bad_version = good.clone();
    bad_version[4] = VERSION + 1;
    let cases = [
        good[..good.len() - 3].to_vec(),
        [good.clone(), vec![0]].concat(),
        bad_version,
    ];
    for (i, bytes) in cases.iter().enumerate() {
        std::fs::write(f.path("bad.rltc"), bytes).unwrap();
        assert_eq!(f.decompress("bad.rltc", "out.bin"), exit::CORRUPT_CONTAINER, "case {i}");
        assert!(!exists(&f.path("out.bin")));
    }
}

#[test]
fn missing_files_exit_6() {
    let f = Fixture::new();
    assert_eq!(f.decompress("nope.rltc", "out.bin"), exit::IO);
    assert_eq!(
        f.run(&[
            "compress",
            "--compressor",
            "@nope",
            "--decompressor",
            "@d.rltm",
            "@in.bin",
            "-o",
            "@x"
        ]),
        exit::IO
    );
}

#[test]
fn usage_errors_exit_2() {
    let f = Fixture::new();
    assert_eq!(f.run(&["frobnicate"]), exit::USAGE);
    assert_eq!(f.run(&["compress", "--compressor", "@c.rltm"]), exit::USAGE);
}

#[test]
fn train_writes_run_directory() {
    let f = Fixture::new();
    let code = f.run(&[
        "--jobs",
        "2",
        "train",
        "--corpus",
        "@in.bin",
        "--chunk-len",
        "16",
        "--steps",
        "2",
        "--pretrain-steps",
        "2",
        "--batch",
        "2",
        "--out",
        "@run",
    ]);
    assert_eq!(code, exit::OK);
    for name in ["compressor.rltm", "decompressor.rltm", "metrics.csv", "config.txt"] {
        assert!(exists(&f.path("run").join(name)), "{name}");
    }
    let metrics = std::fs::read_to_string(f.path("run/metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 3);
}

#[test]
fn bench_writes_verified_table() {
    let f = Fixture::new();
    let code = f.run(&["bench", "--corpus", "@in.bin", "--table", "@t.csv"]);
    assert_eq!(code, exit::OK);
    let table = std::fs::read_to_string(f.path("t.csv")).unwrap();
    assert!(table.starts_with("program,compressed_bytes,ratio,verified"));
    assert!(table.lines().skip(1).all(|l| l.ends_with(",true")));
}
