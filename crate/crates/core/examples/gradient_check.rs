//! Records a forward pass on the tape, backpropagates, and compares a few
//! gradient entries with central finite differences.

use rltc::model::{decode_on_tape, encode_on_tape, lm_loss_on_tape, Activation, ModelConfig, ModelParams, Tape};

const SRC: [usize; 5] = [3, 7, 1, 15, 9];
const DEC: [usize; 5] = [0, 4, 4, 12, 2];
const TARGETS: [usize; 5] = [4, 4, 12, 2, 6];

fn loss(p: &ModelParams) -> f64 {
    let mut tape = Tape::new(p);
    let enc = encode_on_tape(&mut tape, &SRC, 4).unwrap();
    let (logits, _) = decode_on_tape(&mut tape, enc, 4, &DEC).unwrap();
    let l = lm_loss_on_tape(&mut tape, logits, &TARGETS, None).unwrap();
    tape.value(l).data[0]
}

fn main() {
    let cfg = ModelConfig {
        d_model: 8,
        n_heads: 2,
        n_layers_enc: 1,
        n_layers_dec: 1,
        d_ff: 16,
        vocab: 16,
        max_pos: 8,
        activation: Activation::Gelu,
    };
    let mut p = ModelParams::init(cfg, 3).unwrap();
    p.jitter(0.3, 4);

    let mut tape = Tape::new(&p);
    let enc = encode_on_tape(&mut tape, &SRC, 4).unwrap();
    let (logits, _) = decode_on_tape(&mut tape, enc, 4, &DEC).unwrap();
    let l = lm_loss_on_tape(&mut tape, logits, &TARGETS, None).unwrap();
    println!("loss {:.6} over {} parameters", tape.value(l).data[0], p.num_scalars());
    let grads = tape.backward(l);

    let h = 1e-5;
    for name in [
        "tok_emb",
        "pos_emb",
        "enc.0.attn.wq",
        "dec.0.cross_attn.wv",
        "dec.0.ff.b1",
        "dec.ln_final.gamma",
        "lm_head.b",
    ] {
        let id = p.id_of(name).expect("parameter name");
        let analytic = grads.get(id).data[1];
        let mut q = p.clone();
        q.get_mut(id).data[1] += h;
        let plus = loss(&q);
        q.get_mut(id).data[1] -= 2.0 * h;
        let numeric = (plus - loss(&q)) / (2.0 * h);
        println!("{name:<22} analytic {analytic:+.9e}  numeric {numeric:+.9e}");
    }
}
