//! Binary model file.
//!
//! Layout, all integers and floats little-endian:
//!
//! | offset | size      | content                                      |
//! |--------|-----------|----------------------------------------------|
//! | 0      | 8         | magic `REPENMDL`                             |
//! | 8      | 4         | format version (`u32`, currently 1)          |
//! | 12     | 8         | `D`, number of input features (`u64`)        |
//! | 20     | 8         | `M`, representation dimension (`u64`)        |
//! | 28     | 8 · D · M | weights (`f64`), row-major `D x M`           |
//!
//! Entry `(d, k)` is the weight of input feature `d` on output `k`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use repen_core::RepresentationModel;

use crate::{Error, Result};

pub const MODEL_MAGIC: &[u8; 8] = b"REPENMDL";
pub const MODEL_VERSION: u32 = 1;

pub fn write_model<W: Write>(mut w: W, model: &RepresentationModel) -> Result<()> {
    w.write_all(MODEL_MAGIC)?;
    w.write_all(&MODEL_VERSION.to_le_bytes())?;
    w.write_all(&(model.n_features() as u64).to_le_bytes())?;
    w.write_all(&(model.rep_dim() as u64).to_le_bytes())?;
    for v in model.weights() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_model<R: Read>(mut r: R) -> Result<RepresentationModel> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)
        .map_err(|_| Error::ModelFormat("truncated header".into()))?;
    if &magic != MODEL_MAGIC {
        return Err(Error::ModelFormat("bad magic".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)
        .map_err(|_| Error::ModelFormat("truncated header".into()))?;
    let version = u32::from_le_bytes(b4);
    if version != MODEL_VERSION {
        return Err(Error::ModelFormat(format!("unsupported version {version}")));
    }
    let mut read_u64 = |r: &mut R| -> Result<u64> {
        r.read_exact(&mut b8)
            .map_err(|_| Error::ModelFormat("truncated header".into()))?;
        Ok(u64::from_le_bytes(b8))
    };
    let d = read_u64(&mut r)? as usize;
    let m = read_u64(&mut r)? as usize;
    let len = d
        .checked_mul(m)
        .ok_or_else(|| Error::ModelFormat("dimensions overflow".into()))?;
    let mut raw = Vec::new();
    r.read_to_end(&mut raw)?;
    if raw.len() != len * 8 {
        return Err(Error::ModelFormat(format!(
            "expected {} weight bytes, found {}",
            len * 8,
            raw.len()
        )));
    }
    let weights = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok(RepresentationModel::new(d, m, weights)?)
}

pub fn save_model(path: &Path, model: &RepresentationModel) -> Result<()> {
    let file = File::create(path).map_err(Error::io(path))?;
    let mut w = BufWriter::new(file);
    write_model(&mut w, model)?;
    w.flush().map_err(Error::io(path))
}

pub fn load_model(path: &Path) -> Result<RepresentationModel> {
    let file = File::open(path).map_err(Error::io(path))?;
    read_model(BufReader::new(file))
}
