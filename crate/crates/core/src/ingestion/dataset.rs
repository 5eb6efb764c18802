//! Binary dataset container.
//!
//! Layout (all little-endian):
//!
//! | offset | size | field                      |
//! |--------|------|----------------------------|
//! | 0      | 8    | magic `FLOWDATA`           |
//! | 8      | 4    | version (`u32`, 1)         |
//! | 12     | 4    | frame width (`u32`, 0 = n/a) |
//! | 16     | 4    | frame height (`u32`)       |
//! | 20     | 4    | reserved, zero             |
//! | 24     | 8    | `p` (`u64`)                |
//! | 32     | 8    | `n` (`u64`)                |
//! | 40     | 8pn  | `f64` values, column-major |

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::DataMatrix;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const DATASET_MAGIC: &[u8; 8] = b"FLOWDATA";
pub const DATASET_VERSION: u32 = 1;
const HEADER_LEN: usize = 40;

fn encode(data: &DataMatrix) -> Vec<u8> {
    let (w, h) = data.frame_shape().unwrap_or((0, 0));
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * data.dim() * data.len());
    buf.extend_from_slice(DATASET_MAGIC);
    buf.extend_from_slice(&DATASET_VERSION.to_le_bytes());
    buf.extend_from_slice(&(w as u32).to_le_bytes());
    buf.extend_from_slice(&(h as u32).to_le_bytes());
    buf.extend_from_slice(&0u32.to_le_bytes());
    buf.extend_from_slice(&(data.dim() as u64).to_le_bytes());
    buf.extend_from_slice(&(data.len() as u64).to_le_bytes());
    for x in data.matrix().as_slice() {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    buf
}

/// Writes the dataset and returns the SHA-256 of the file contents (hex).
pub fn write_dataset(path: &Path, data: &DataMatrix) -> Result<String> {
    let bytes = encode(data);
    fs::write(path, &bytes)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn read_dataset(path: &Path) -> Result<DataMatrix> {
    let bytes = fs::read(path)?;
    if bytes.len() < HEADER_LEN || &bytes[..8] != DATASET_MAGIC {
        return Err(Error::Format(format!("{} is not a dataset file", path.display())));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let version = u32_at(8);
    if version != DATASET_VERSION {
        return Err(Error::Format(format!("unsupported dataset version {version}")));
    }
    let (w, h) = (u32_at(12) as usize, u32_at(16) as usize);
    let (p, n) = (u64_at(24) as usize, u64_at(32) as usize);
    if bytes.len() != HEADER_LEN + 8 * p * n {
        return Err(Error::Format(format!(
            "dataset payload is {} bytes, header implies {}x{}",
            bytes.len() - HEADER_LEN,
            p,
            n
        )));
    }
    let values: Vec<f64> = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    let matrix = Matrix::new(p, n, values)?;
    if w > 0 && h > 0 {
        DataMatrix::with_frame_shape(matrix, w, h)
    } else {
        Ok(DataMatrix::new(matrix))
    }
}

/// JSON manifest written next to a dataset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub width: usize,
    pub height: usize,
    pub p: usize,
    pub n: usize,
    pub downsample: usize,
    pub files: Vec<String>,
    /// SHA-256 (hex) of the dataset file.
    pub checksum: String,
}

impl DatasetManifest {
    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}
