//! `RLTM` checkpoint files.
//!
//! Layout: magic `RLTM`, version `u8`, the model config (seven `u32` fields
//! then the activation code `u8`), followed by every tensor in layout order as
//! `(name_len u16, name, element_count u64, f64 × count)`. Integers and floats
//! are little-endian.

use std::io::{Read, Write};
use std::path::Path;

use super::tensor::Tensor;
use super::{Activation, ModelConfig, ModelError, ModelParams};
use crate::fsutil;

pub const MAGIC: &[u8; 4] = b"RLTM";
pub const VERSION: u8 = 1;

pub fn write_checkpoint<W: Write>(params: &ModelParams, mut w: W) -> std::io::Result<()> {
    let c = &params.config;
    w.write_all(MAGIC)?;
    w.write_all(&[VERSION])?;
    for v in [
        c.d_model,
        c.n_heads,
        c.n_layers_enc,
        c.n_layers_dec,
        c.d_ff,
        c.vocab,
        c.max_pos,
    ] {
        w.write_all(&(v as u32).to_le_bytes())?;
    }
    w.write_all(&[c.activation.code()])?;
    for (_, name, t) in params.iter() {
        w.write_all(&(name.len() as u16).to_le_bytes())?;
        w.write_all(name.as_bytes())?;
        w.write_all(&(t.len() as u64).to_le_bytes())?;
        for v in &t.data {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn to_bytes(params: &ModelParams) -> Vec<u8> {
    let mut out = Vec::new();
    write_checkpoint(params, &mut out).expect("writing to a Vec cannot fail");
    out
}

fn bad(msg: impl Into<String>) -> ModelError {
    ModelError::BadCheckpoint(msg.into())
}

fn read_exact<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N], ModelError> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|_| bad("truncated checkpoint"))?;
    Ok(buf)
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<ModelParams, ModelError> {
    let magic: [u8; 4] = read_exact(&mut r)?;
    if &magic != MAGIC {
        return Err(bad("bad magic"));
    }
    let [version] = read_exact::<_, 1>(&mut r)?;
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let mut dims = [0usize; 7];
    for d in &mut dims {
        *d = u32::from_le_bytes(read_exact(&mut r)?) as usize;
    }
    let [act] = read_exact::<_, 1>(&mut r)?;
    let config = ModelConfig {
        d_model: dims[0],
        n_heads: dims[1],
        n_layers_enc: dims[2],
        n_layers_dec: dims[3],
        d_ff: dims[4],
        vocab: dims[5],
        max_pos: dims[6],
        activation: Activation::from_code(act).ok_or_else(|| bad("unknown activation"))?,
    };
    config.validate()?;
    let template = ModelParams::init(config, 0)?;
    let mut named = Vec::with_capacity(template.len());
    for (_, _, shape) in template.iter() {
        let name_len = u16::from_le_bytes(read_exact(&mut r)?) as usize;
        let mut name = vec![0u8; name_len];
        r.read_exact(&mut name).map_err(|_| bad("truncated checkpoint"))?;
        let name = String::from_utf8(name).map_err(|_| bad("tensor name is not UTF-8"))?;
        let count = u64::from_le_bytes(read_exact(&mut r)?) as usize;
        if count != shape.len() {
            return Err(bad(format!(
                "tensor {name} has {count} elements, expected {}",
                shape.len()
            )));
        }
        let mut data = Vec::with_capacity(count);
        for _ in 0..count {
            data.push(f64::from_le_bytes(read_exact(&mut r)?));
        }
        named.push((name, Tensor::from_vec(shape.rows, shape.cols, data)));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest).map_err(|e| bad(e.to_string()))? != 0 {
        return Err(bad("trailing bytes after last tensor"));
    }
    ModelParams::from_named(config, named)
}

pub fn save(params: &ModelParams, path: &Path) -> Result<(), ModelError> {
    fsutil::write_atomic(path, &to_bytes(params))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<ModelParams, ModelError> {
    let bytes = std::fs::read(path)?;
    read_checkpoint(bytes.as_slice())
}
