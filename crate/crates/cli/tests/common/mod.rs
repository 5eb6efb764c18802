#![allow(dead_code)]

use std::fs;
use std::path::Path;

use flowspec::RunConfig;
use flowspec_core::ingestion::{write_dataset, write_pgm, DatasetManifest, DATASET_VERSION};
use flowspec_core::linalg::{gaussian_matrix, qr_thin};
use flowspec_core::{DataMatrix, Matrix};

/// Writes every column of `data` as `NNNN.pgm` into `dir`.
pub fn write_frames(dir: &Path, data: &DataMatrix) {
    fs::create_dir_all(dir).unwrap();
    for j in 0..data.len() {
        let frame = data.frame(j).expect("frame shape");
        write_pgm(&dir.join(format!("{:04}.pgm", j + 1)), &frame).unwrap();
    }
}

/// Places `data` in `dir` as if `ingest` had produced it (no quantization).
pub fn write_ingested(dir: &Path, data: &DataMatrix) {
    fs::create_dir_all(dir).unwrap();
    let checksum = write_dataset(&dir.join("dataset.bin"), data).unwrap();
    let (width, height) = data.frame_shape().unwrap_or((data.dim(), 1));
    DatasetManifest {
        format_version: DATASET_VERSION,
        width,
        height,
        p: data.dim(),
        n: data.len(),
        downsample: 1,
        files: (1..=data.len()).map(|j| format!("{j:04}.pgm")).collect(),
        checksum,
    }
    .save(&dir.join("dataset.json"))
    .unwrap();
}

/// `0.5 + U C` with orthonormal `U` (`p x rank`) and coefficient scales
/// decreasing geometrically: exactly rank `rank` after centering.
pub fn exact_rank_frames(width: usize, height: usize, n: usize, rank: usize, seed: u64) -> DataMatrix {
    let p = width * height;
    let u = qr_thin(&gaussian_matrix(p, rank, seed)).unwrap().q;
    let scales: Vec<f64> = (0..rank).map(|r| 0.5f64.powi(r as i32)).collect();
    let coef = gaussian_matrix(rank, n, seed + 1);
    let coef = Matrix::from_fn(rank, n, |r, j| scales[r] * coef[(r, j)]);
    let signal = u.matmul(&coef).unwrap();
    let values = Matrix::from_fn(p, n, |i, j| 0.5 + signal[(i, j)]);
    DataMatrix::with_frame_shape(values, width, height).unwrap()
}

pub fn config(input: &Path, output: &Path) -> RunConfig {
    RunConfig {
        seed: Some(7),
        ..RunConfig::new(input, output)
    }
}

/// Mean squared error and PSNR (peak 1) between two equally sized slices.
pub fn psnr(a: &[f64], b: &[f64]) -> f64 {
    let mse = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64;
    10.0 * (1.0 / mse).log10()
}
