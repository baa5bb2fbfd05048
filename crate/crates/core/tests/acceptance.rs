//! Acceptance suite. Runs every criterion in order, prints one PASS/FAIL line
//! each, and exits non-zero if any failed.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rltc::baselines::{
    ac_decode, ac_encode, decode_file, encode_file, entropy, lz77_tokenize, range_decode, range_encode, BaselineCodec,
    FrequencyModel, Lz77Token, MAX_TOTAL,
};
use rltc::bench::{
    check_published, compression_ratio, render_published, round_to, sweep_chunk_sizes, write_sweep_csv, CorpusSlice,
    SweepOptions, CORPUS_ENV, SWEEP_HEADER,
};
use rltc::codec::{compress_stream, decompress_stream, CompressedContainer};
use rltc::model::{
    decode_on_tape, encode_ids, encode_on_tape, forward_decoder, greedy_decode, lm_loss_on_tape, Activation,
    ModelConfig, ModelParams, OptimizerState, Tape,
};
use rltc::rl::{
    a2c_objective_on_tape, assign_rewards, pretrain_identity, td_targets, train_pair, uniform_token_bits, IdentityRole,
    PretrainConfig, RewardSchedule, Seq2SeqExample, TrainPlan, TrainerConfig, Trajectory,
};
use rltc::tokenizer::{Chunk, TokenId, TokenSequence, Vocab};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- fuzzing

const FUZZ_CASES: usize = 1000;
const FUZZ_MAX_LEN: usize = 4096;
const EDGE_LENGTHS: [usize; 13] = [0, 1, 15, 16, 17, 31, 32, 33, 127, 128, 129, 4095, 4096];

/// Random, repetitive and adversarial byte strings, cycling through the kinds.
fn fuzz_input(i: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let len = EDGE_LENGTHS
        .get(i)
        .copied()
        .unwrap_or_else(|| rng.random_range(0..=FUZZ_MAX_LEN));
    match i % 8 {
        0 => (0..len).map(|_| rng.random()).collect(),
        1 => vec![rng.random(); len],
        2 => {
            let period: Vec<u8> = (0..rng.random_range(1..=12)).map(|_| rng.random()).collect();
            period.iter().copied().cycle().take(len).collect()
        }
        3 => (0..len)
            .map(|_| if rng.random_bool(0.9) { b'a' } else { b'b' })
            .collect(),
        4 => (0..len).map(|k| if k % 2 == 0 { 0x00 } else { 0xff }).collect(),
        5 => (0..len).map(|k| k as u8).collect(),
        6 => (0..len)
            .map(|_| *[0x00, 0xff, b'\n', 0x80].get(rng.random_range(0..4)).unwrap())
            .collect(),
        _ => {
            // text with occasional long copies from earlier in the string
            let mut v: Vec<u8> = Vec::with_capacity(len);
            while v.len() < len {
                if v.len() > 8 && rng.random_bool(0.3) {
                    let start = rng.random_range(0..v.len());
                    let n = rng.random_range(1..=(v.len() - start)).min(len - v.len());
                    v.extend_from_within(start..start + n);
                } else {
                    v.push(b'a' + rng.random_range(0..26u8));
                }
            }
            v
        }
    }
}

// ---------------------------------------------------------------- 1

const LOSSLESS_BUDGET: Duration = Duration::from_secs(300);

fn criterion_1() -> Verdict {
    let c = ModelParams::init(ModelConfig::small(), 1).unwrap();
    let d = ModelParams::init(ModelConfig::small(), 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1055);
    let t0 = Instant::now();
    let mut bytes = 0;
    for i in 0..FUZZ_CASES {
        let data = fuzz_input(i, &mut rng);
        let chunk_len = [16, 32, 64, 128][i % 4];
        let container = compress_stream(&c, &d, &data, chunk_len).map_err(|e| format!("case {i}: {e}"))?;
        let parsed =
            CompressedContainer::from_bytes(&container.to_bytes().unwrap()).map_err(|e| format!("case {i}: {e}"))?;
        let back = decompress_stream(&d, &parsed).map_err(|e| format!("case {i}: {e}"))?;
        if back != data {
            return Err(format!("case {i} (len {}, chunk {chunk_len}) differs", data.len()));
        }
        bytes += data.len();
    }
    let took = t0.elapsed();
    check(
        took < LOSSLESS_BUDGET,
        format!(
            "{FUZZ_CASES} inputs, {bytes} bytes byte-identical in {:.1}s (budget {}s)",
            took.as_secs_f64(),
            LOSSLESS_BUDGET.as_secs()
        ),
    )
}

// ---------------------------------------------------------------- 2

const FD_STEP: f64 = 1e-5;
const FD_MAX_REL_ERR: f64 = 1e-4;

fn criterion_2() -> Verdict {
    let cfg = common::tiny_config();
    assert_eq!(
        (cfg.d_model, cfg.n_layers_enc, cfg.n_layers_dec, cfg.vocab),
        (8, 1, 1, 16)
    );
    const SRC: [usize; 5] = [3, 7, 1, 15, 9];
    const DEC: [usize; 5] = [0, 4, 4, 12, 2];
    const TARGETS: [usize; 5] = [4, 4, 12, 2, 6];
    const REWARDS: [f64; 5] = [-0.4, -0.4, -0.4, -0.4, -2.9];
    const GAMMA: f64 = 0.95;

    let lm = |p: &ModelParams| {
        let mut tape = Tape::new(p);
        let enc = encode_on_tape(&mut tape, &SRC, 5).unwrap();
        let (logits, _) = decode_on_tape(&mut tape, enc, 5, &DEC).unwrap();
        let loss = lm_loss_on_tape(&mut tape, logits, &TARGETS, None).unwrap();
        (tape.value(loss).data[0], tape.backward(loss))
    };
    let p = common::tiny_params(31);
    let (_, g) = lm(&p);
    let lm_report = common::finite_difference_check(&p, &g, FD_STEP, |q| lm(q).0);

    // actor + 0.5·critic, with advantage and TD target held at their base values
    let nodes = |tape: &mut Tape| {
        let enc = encode_on_tape(tape, &SRC, 5).unwrap();
        let (logits, values) = decode_on_tape(tape, enc, 5, &DEC).unwrap();
        (tape.log_prob_pick(logits, &TARGETS, 1.0), values)
    };
    let p = common::tiny_params(32);
    let mut tape = Tape::new(&p);
    let (logp, values) = nodes(&mut tape);
    let v = tape.value(values).data.clone();
    let obj = a2c_objective_on_tape(&mut tape, logp, values, &REWARDS, GAMMA, 1.0, 0.5);
    let g = tape.backward(obj.total);
    let targets = td_targets(&REWARDS, &v, GAMMA);
    let adv = obj.advantages.clone();
    let a2c_report = common::finite_difference_check(&p, &g, FD_STEP, |q| {
        let mut tape = Tape::new(q);
        let (logp, values) = nodes(&mut tape);
        let w: Vec<f64> = adv.iter().map(|a| -a / 5.0).collect();
        let actor = tape.weighted_sum(logp, &w);
        let critic = tape.squared_error(values, &targets, &[0.2; 5]);
        tape.value(actor).data[0] + 0.5 * tape.value(critic).data[0]
    });
    check(
        lm_report.max_rel_err < FD_MAX_REL_ERR && a2c_report.max_rel_err < FD_MAX_REL_ERR,
        format!(
            "lm: {} entries, max rel err {:.2e}; actor+0.5*critic: {} entries, max rel err {:.2e} (bound {FD_MAX_REL_ERR:.0e})",
            lm_report.checked, lm_report.max_rel_err, a2c_report.checked, a2c_report.max_rel_err
        ),
    )
}

// ---------------------------------------------------------------- 3

const INVARIANT_TRIALS: usize = 100;

fn criterion_3() -> Verdict {
    let mut p = ModelParams::init(ModelConfig::small(), 33).unwrap();
    p.jitter(0.1, 34);
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let n = 32;
    let bytes = |rng: &mut ChaCha8Rng, k: usize| -> Vec<usize> { (0..k).map(|_| rng.random_range(0..256)).collect() };
    let mut causal_ok = 0;
    for _ in 0..INVARIANT_TRIALS {
        let src = bytes(&mut rng, n);
        let enc = encode_ids(&p, &src, n).unwrap();
        let len = rng.random_range(2..=n);
        let mut dec = vec![Vocab::BOS as usize];
        dec.extend(bytes(&mut rng, len - 1));
        let t = rng.random_range(0..len - 1);
        let mut altered = dec.clone();
        for tok in &mut altered[t + 1..] {
            *tok = rng.random_range(0..Vocab::SIZE);
        }
        let (a, va) = forward_decoder(&p, &enc, &dec).unwrap();
        let (b, vb) = forward_decoder(&p, &enc, &altered).unwrap();
        let k = (t + 1) * Vocab::SIZE;
        if a.data[..k] == b.data[..k] && va[..=t] == vb[..=t] {
            causal_ok += 1;
        }
    }
    let mut pad_ok = 0;
    for _ in 0..INVARIANT_TRIALS {
        let valid = rng.random_range(1..n);
        let mut src = bytes(&mut rng, valid);
        src.resize(n, Vocab::PAD as usize);
        let mut noisy = src.clone();
        for tok in &mut noisy[valid..] {
            *tok = rng.random_range(0..Vocab::SIZE);
        }
        let dec: Vec<usize> = std::iter::once(Vocab::BOS as usize)
            .chain(bytes(&mut rng, valid))
            .collect();
        let (a, va) = forward_decoder(&p, &encode_ids(&p, &src, valid).unwrap(), &dec).unwrap();
        let (b, vb) = forward_decoder(&p, &encode_ids(&p, &noisy, valid).unwrap(), &dec).unwrap();
        if a.data == b.data && va == vb {
            pad_ok += 1;
        }
    }
    check(
        causal_ok == INVARIANT_TRIALS && pad_ok == INVARIANT_TRIALS,
        format!("causality {causal_ok}/{INVARIANT_TRIALS} bitwise, PAD-opacity {pad_ok}/{INVARIANT_TRIALS} bitwise"),
    )
}

// ---------------------------------------------------------------- 4

const REWARD_TRAJECTORIES: usize = 10_000;
const REWARD_SUM_TOL: f64 = 1e-12;

/// Neumaier-compensated sum, so the check measures the reward split rather
/// than the rounding of a naive left-to-right sum.
fn compensated_sum(xs: &[f64]) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &x in xs {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
    }
    sum + comp
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let (mut worst, mut naive_worst): (f64, f64) = (0.0, 0.0);
    for _ in 0..REWARD_TRAJECTORIES {
        let n = rng.random_range(1..=129);
        let mut t = Trajectory {
            actions: TokenSequence(vec![0; n]),
            ..Default::default()
        };
        let cost = rng.random_range(0.0..9.0);
        let loss = rng.random_range(0.0..2000.0);
        assign_rewards(&mut t, loss, cost);
        let expect = -(cost * n as f64 + loss);
        worst = worst.max((compensated_sum(&t.rewards) - expect).abs());
        naive_worst = naive_worst.max((t.rewards.iter().sum::<f64>() - expect).abs());
    }
    let schedule = RewardSchedule::default();
    let end = schedule.cost(schedule.warmup_steps);
    let before = schedule.cost(schedule.warmup_steps - 1);
    let target = 260f64.log2();
    check(
        worst <= REWARD_SUM_TOL && end == target && before < end && schedule.cost(0) == 0.0,
        format!(
            "{REWARD_TRAJECTORIES} trajectories, worst gap {worst:.1e} (tol {REWARD_SUM_TOL:.0e}; naive summation {naive_worst:.1e}); cost at warmup end {end:.4} bits, log2(260) = {:.4}",
            uniform_token_bits()
        ),
    )
}

// ---------------------------------------------------------------- 5

const SMOKE_CHUNK: usize = 32;
const SMOKE_BUDGET: Duration = Duration::from_secs(20 * 60);
const SMOKE_MAX_CORRECTION_FRACTION: f64 = 0.10;

/// A library of 16 random 8-byte patterns; each chunk repeats one of them four times.
fn pattern_corpus(n_chunks: usize, seed: u64) -> Vec<Chunk> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let library: Vec<Vec<TokenId>> = (0..16)
        .map(|_| {
            (0..8)
                .map(|_| TokenId::from(b'a') + rng.random_range(0..16u16))
                .collect()
        })
        .collect();
    (0..n_chunks)
        .map(|_| {
            let pattern = &library[rng.random_range(0..library.len())];
            let tokens: Vec<TokenId> = (0..SMOKE_CHUNK).map(|i| pattern[i % 8]).collect();
            Chunk::from_tokens(&tokens, SMOKE_CHUNK)
        })
        .collect()
}

fn criterion_5() -> Verdict {
    let corpus = pattern_corpus(512, 7);
    let plan = TrainPlan {
        model: ModelConfig::small(),
        seed: 5,
        pretrain: PretrainConfig {
            steps: 1200,
            batch_size: 16,
            max_grad_norm: Some(1.0),
        },
        pretrain_lr: 1e-3,
        a2c_steps: 2000,
        trainer: TrainerConfig {
            batch_size: 16,
            critic_warmup_steps: 200,
            compressor_lr: 1e-4,
            decompressor_lr: 1e-3,
            ..TrainerConfig::default()
        },
        schedule: RewardSchedule::new(uniform_token_bits(), 1700),
    };
    let t0 = Instant::now();
    let mut lengths = Vec::new();
    let outcome = train_pair(&corpus, &plan, |m| {
        lengths.push(m.mean_compressed_len);
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    let took = t0.elapsed();

    // corrections as the real codec stores them, on the first 64 chunks
    let eval: Vec<u8> = corpus[..64]
        .iter()
        .flat_map(|c| c.valid().iter().map(|&t| t as u8))
        .collect();
    let container =
        compress_stream(&outcome.compressor, &outcome.decompressor, &eval, SMOKE_CHUNK).map_err(|e| e.to_string())?;
    let n = container.records.len() as f64;
    let corrections = container.records.iter().map(|r| r.corrections.len()).sum::<usize>() as f64 / n;
    let stored = container.records.iter().map(|r| r.tokens.len()).sum::<usize>() as f64 / n;
    let lossless = decompress_stream(&outcome.decompressor, &container).map_err(|e| e.to_string())? == eval;

    let (first, last) = (lengths[0], *lengths.last().unwrap());
    let frac = corrections / SMOKE_CHUNK as f64;
    check(
        last < first && frac < SMOKE_MAX_CORRECTION_FRACTION && lossless && took < SMOKE_BUDGET,
        format!(
            "(a) mean |c| {first:.2} at step 0 -> {last:.2} at step {}; (b) {corrections:.2} corrections per chunk = {:.1}% of {SMOKE_CHUNK} (bound {:.0}%); greedy stored length {stored:.2}; {:.0}s",
            lengths.len() - 1,
            100.0 * frac,
            100.0 * SMOKE_MAX_CORRECTION_FRACTION,
            took.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------- 6

const COPY_LEN: usize = 16;
const COPY_MAX_STEPS: usize = 5000;
const COPY_TARGET_ACCURACY: f64 = 0.99;

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut random_chunks = |n: usize| -> Vec<Chunk> {
        (0..n)
            .map(|_| {
                let toks: Vec<TokenId> = (0..COPY_LEN)
                    .map(|_| TokenId::from(b'a') + rng.random_range(0..16u16))
                    .collect();
                Chunk::from_tokens(&toks, COPY_LEN)
            })
            .collect()
    };
    let train = random_chunks(4096);
    let test = random_chunks(128);
    let accuracy = |p: &ModelParams| {
        let mut hit = 0;
        for c in &test {
            let ex = Seq2SeqExample::identity(c, IdentityRole::Decompressor);
            let enc = encode_ids(p, &ex.source, ex.source_valid).unwrap();
            let out = greedy_decode(p, &enc, Vocab::BOS as usize, ex.target.len()).unwrap();
            hit += out.iter().zip(&ex.target).filter(|(a, b)| a == b).count();
        }
        hit as f64 / (test.len() * COPY_LEN) as f64
    };
    let mut p = ModelParams::init(ModelConfig::small(), 1).unwrap();
    let mut opt = OptimizerState::new(&p, 1e-3);
    let mut train_rng = ChaCha8Rng::seed_from_u64(2);
    let round = PretrainConfig {
        steps: 100,
        batch_size: 16,
        max_grad_norm: Some(1.0),
    };
    let mut steps = 0;
    let mut acc = accuracy(&p);
    while steps < COPY_MAX_STEPS && acc <= COPY_TARGET_ACCURACY {
        pretrain_identity(
            &mut p,
            &mut opt,
            &train,
            IdentityRole::Decompressor,
            &round,
            &mut train_rng,
        )
        .map_err(|e| e.to_string())?;
        steps += round.steps;
        acc = accuracy(&p);
    }
    check(
        acc > COPY_TARGET_ACCURACY,
        format!(
            "greedy token accuracy {:.2}% after {steps} steps (target > {:.0}% within {COPY_MAX_STEPS}), {} parameters",
            100.0 * acc,
            100.0 * COPY_TARGET_ACCURACY,
            p.num_scalars()
        ),
    )
}

// ---------------------------------------------------------------- 7

const BERNOULLI_N: usize = 10_000;
const BERNOULLI_SLACK_BITS: f64 = 64.0;
const ORACLE_CASES: usize = 3000;

fn brute_force_lz77(data: &[u8], window: usize, lookahead: usize) -> Vec<Lz77Token> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < data.len() {
        let limit = lookahead.min(data.len() - i);
        let (mut best_len, mut best_off) = (0, 0);
        for off in 1..=window.min(i) {
            let mut len = 0;
            while len < limit && data[i - off + len] == data[i + len] {
                len += 1;
            }
            if len > best_len {
                best_len = len;
                best_off = off;
            }
        }
        if best_len == 0 {
            out.push(Lz77Token::Literal(data[i]));
            i += 1;
        } else {
            out.push(Lz77Token::Match {
                offset: best_off,
                length: best_len,
            });
            i += best_len;
        }
    }
    out
}

fn criterion_7() -> Verdict {
    // (a)
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a);
    let mut round_trips = 0;
    for i in 0..FUZZ_CASES {
        let data = fuzz_input(i, &mut rng);
        let mut ok = true;
        for codec in BaselineCodec::ALL {
            ok &= decode_file(&encode_file(codec, &data)).ok() == Some((codec, data.clone()));
        }
        ok &= ac_decode(
            &ac_encode(&data, &FrequencyModel::adaptive()).bytes,
            &FrequencyModel::adaptive(),
        )
        .ok()
            == Some(data.clone());
        ok &= range_decode(
            &range_encode(&data, &FrequencyModel::adaptive()),
            &FrequencyModel::adaptive(),
        )
        .ok()
            == Some(data.clone());
        round_trips += ok as usize;
    }

    // (b) seed fixed before the first run
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let symbols: Vec<u8> = (0..BERNOULLI_N).map(|_| u8::from(!rng.random_bool(0.9))).collect();
    let big = MAX_TOTAL - 512;
    let mut counts = vec![1u64; 257];
    counts[0] = big * 9 / 10;
    counts[1] = big / 10;
    let model = FrequencyModel::fixed(&counts);
    let encoded = ac_encode(&symbols, &model);
    let bits = encoded.bit_len as f64;
    let h = entropy(&[0.9, 0.1]).unwrap();
    let bound = BERNOULLI_N as f64 * round_to(h, 3) + BERNOULLI_SLACK_BITS;
    let total = model.total() as f64;
    let ideal: f64 = symbols
        .iter()
        .map(|&s| -(model.count(s as usize) as f64 / total).log2())
        .sum();
    let decoded_ok = ac_decode(&encoded.bytes, &model).ok() == Some(symbols.clone());
    let ones = symbols.iter().filter(|&&s| s == 1).count();

    // (c)
    let mut rng = ChaCha8Rng::seed_from_u64(0x7c);
    let mut oracle_ok = 0;
    for i in 0..ORACLE_CASES {
        let len = if i <= 256 { i } else { rng.random_range(0..=256) };
        let alphabet = [2u8, 4, 16, 255][i % 4];
        let data: Vec<u8> = (0..len).map(|_| rng.random_range(0..=alphabet)).collect();
        let (w, l) = if i % 3 == 0 {
            (4096, 256)
        } else {
            (rng.random_range(1..64), rng.random_range(1..64))
        };
        oracle_ok += (lz77_tokenize(&data, w, l) == brute_force_lz77(&data, w, l)) as usize;
    }

    check(
        round_trips == FUZZ_CASES && bits <= bound && decoded_ok && oracle_ok == ORACLE_CASES,
        format!(
            "(a) {round_trips}/{FUZZ_CASES} round trips on all coders; (b) {bits} bits for {BERNOULLI_N} symbols ({ones} ones), bound {bound:.0}, model code length {ideal:.1}, n*H = {:.1}; (c) {oracle_ok}/{ORACLE_CASES} oracle matches",
            BERNOULLI_N as f64 * h
        ),
    )
}

// ---------------------------------------------------------------- 8

fn criterion_8() -> Verdict {
    let checks = check_published();
    let find = |name: &str| checks.iter().find(|c| c.row.program == name).unwrap();
    let (gzip, nncp, rl) = (find("GZIP"), find("NNCP"), find("RL token compressor"));
    let reproduced = gzip.consistent && nncp.consistent;
    let report = render_published(&checks);
    let surfaced = !rl.consistent && report.contains("DISCREPANCY") && report.contains("4.1423");
    let rl_two = round_to(compression_ratio(100_000_000, 24_141_013).unwrap(), 2);
    check(
        reproduced && surfaced && rl_two == 4.14,
        format!(
            "GZIP {:.4} -> {}, NNCP {:.4} -> {}; 24,141,013 gives {rl_two:.2} vs reported 4.12, flagged in report",
            gzip.computed,
            round_to(gzip.computed, gzip.row.reported_decimals),
            nncp.computed,
            round_to(nncp.computed, nncp.row.reported_decimals)
        ),
    )
}

// ---------------------------------------------------------------- 9

fn criterion_9() -> Verdict {
    let fixture = std::fs::read(common::GOLDEN_CONTAINER_PATH).map_err(|e| e.to_string())?;
    let (c, d) = common::golden_models();
    let container = CompressedContainer::from_bytes(&fixture).map_err(|e| e.to_string())?;
    let exact = decompress_stream(&d, &container).map_err(|e| e.to_string())? == common::GOLDEN_INPUT;
    let a = compress_stream(&c, &d, common::GOLDEN_INPUT, common::GOLDEN_CHUNK_LEN)
        .unwrap()
        .to_bytes()
        .unwrap();
    let b = compress_stream(&c, &d, common::GOLDEN_INPUT, common::GOLDEN_CHUNK_LEN)
        .unwrap()
        .to_bytes()
        .unwrap();
    check(
        exact && a == b && a == fixture,
        format!(
            "fixture ({} bytes) decompresses exactly: {exact}; two serializations identical: {}; match fixture: {}",
            fixture.len(),
            a == b,
            a == fixture
        ),
    )
}

// ---------------------------------------------------------------- 10

const SWEEP_SLICE_BYTES: usize = 256 * 1024;
const SWEEP_SIZES: [usize; 4] = [16, 32, 64, 128];

/// Word salad with a skewed vocabulary, used when no corpus is configured.
fn synthetic_text(n: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<Vec<u8>> = (0..400)
        .map(|_| {
            (0..rng.random_range(2..9))
                .map(|_| b'a' + rng.random_range(0..26u8))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n + 16);
    while out.len() < n {
        let r: f64 = rng.random();
        out.extend_from_slice(&words[(r * r * r * words.len() as f64) as usize]);
        out.push(if rng.random_bool(0.08) { b'\n' } else { b' ' });
    }
    out.truncate(n);
    out
}

fn criterion_10() -> Verdict {
    let slice = match std::env::var_os(CORPUS_ENV) {
        Some(path) => rltc::bench::ingest_corpus(std::path::Path::new(&path), SWEEP_SLICE_BYTES as u64)
            .map_err(|e| e.to_string())?,
        None => CorpusSlice::from_bytes("synthetic", synthetic_text(SWEEP_SLICE_BYTES, 10)).unwrap(),
    };
    let cfg = ModelConfig {
        d_model: 16,
        n_heads: 2,
        n_layers_enc: 1,
        n_layers_dec: 1,
        d_ff: 32,
        activation: Activation::Gelu,
        ..ModelConfig::default()
    };
    let c = ModelParams::init(cfg, 101).unwrap();
    let d = ModelParams::init(cfg, 102).unwrap();
    let t0 = Instant::now();
    let rows = sweep_chunk_sizes(&c, &d, &slice, &SWEEP_SIZES, &SweepOptions::default()).map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &rows).map_err(|e| e.to_string())?;
    let csv = String::from_utf8(buf).unwrap();
    let mut lines = csv.lines();
    let header_ok = lines.next() == Some(SWEEP_HEADER.join(",").as_str());
    let body: Vec<&str> = lines.collect();
    let schema_ok = body.len() == SWEEP_SIZES.len()
        && body.iter().zip(SWEEP_SIZES).all(|(line, size)| {
            let f: Vec<&str> = line.split(',').collect();
            f.len() == 5
                && f[0].parse::<usize>() == Ok(size)
                && f[1].parse::<u64>().is_ok()
                && f[2..]
                    .iter()
                    .all(|x| x.parse::<f64>().is_ok_and(|v| v.is_finite() && v > 0.0))
        });
    // the harness refuses to emit an unverified row; check each one again independently
    let verified = rows.iter().all(|r| {
        let container = compress_stream(&c, &d, &slice.data, r.chunk_size).unwrap();
        let bytes = container.to_bytes().unwrap();
        bytes.len() as u64 == r.compressed_bytes
            && decompress_stream(&d, &CompressedContainer::from_bytes(&bytes).unwrap()).unwrap() == slice.data
    });
    check(
        header_ok && schema_ok && verified && slice.len() == SWEEP_SLICE_BYTES,
        format!(
            "{} slice of {} bytes, sizes {:?}: header {header_ok}, rows schema-conformant {schema_ok}, all round-trip verified {verified}; {:.1}s",
            slice.path.display(),
            slice.len(),
            SWEEP_SIZES,
            t0.elapsed().as_secs_f64()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("unconditional losslessness", criterion_1),
        ("gradient exactness", criterion_2),
        ("causality and PAD-opacity", criterion_3),
        ("reward decomposition", criterion_4),
        ("learning smoke test", criterion_5),
        ("identity pre-training", criterion_6),
        ("baseline codecs", criterion_7),
        ("published table arithmetic", criterion_8),
        ("container golden files", criterion_9),
        ("sweep harness", criterion_10),
    ];
    // `cargo test -- <filter>` runs only criteria whose number or name contains the filter
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let label = format!("{} {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|p| label.contains(p.as_str())) {
            continue;
        }
        ran += 1;
        let verdict = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match verdict {
            Ok(detail) => println!("criterion {label}: PASS  {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {label}: FAIL  {detail}");
            }
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
