//! JSON tensor file format.
//!
//! ```json
//! { "version": 1, "order": 3, "dim": 2, "entries": [[re, im], …] }
//! ```
//!
//! Entries are in canonical layout (last index fastest). Doubles are written
//! in shortest round-trip form, so write-then-read is bit-identical.

use std::fs;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::CubicTensor;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct TensorFile {
    version: u32,
    order: usize,
    dim: usize,
    // Option so that a `null` (how serde_json writes NaN) is reported as a
    // non-finite entry rather than a generic parse error.
    entries: Vec<[Option<f64>; 2]>,
}

pub fn to_json(t: &CubicTensor) -> String {
    let file = TensorFile {
        version: FORMAT_VERSION,
        order: t.order(),
        dim: t.dim(),
        entries: t.entries().iter().map(|z| [Some(z.re), Some(z.im)]).collect(),
    };
    let mut s = serde_json::to_string(&file).expect("tensor serialization");
    s.push('\n');
    s
}

pub fn from_json(s: &str) -> Result<CubicTensor> {
    let file: TensorFile = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
    if file.version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {}", file.version)));
    }
    let mut entries = Vec::with_capacity(file.entries.len());
    for (offset, pair) in file.entries.iter().enumerate() {
        match pair {
            [Some(re), Some(im)] => entries.push(C64::new(*re, *im)),
            _ => return Err(Error::NonFiniteEntry { offset }),
        }
    }
    CubicTensor::new(file.order, file.dim, entries)
}

pub fn write_tensor(path: impl AsRef<Path>, t: &CubicTensor) -> Result<()> {
    fs::write(path, to_json(t))?;
    Ok(())
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<CubicTensor> {
    from_json(&fs::read_to_string(path)?)
}
