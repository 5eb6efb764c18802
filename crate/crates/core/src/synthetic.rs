//! Seeded synthetic frame sequences for experiments and tests.

use crate::ingestion::DataMatrix;
use crate::linalg::{GaussianSampler, Matrix};

/// Background gray level of the synthetic frames.
const BACKGROUND: f64 = 0.5;

/// Frames `0.5 + sum_r c_r(t) phi_r + noise`: `rank` random spatial patterns
/// with Gaussian temporal coefficients whose scale decays as
/// `0.1 * 0.75^r`, plus i.i.d. pixel noise of standard deviation `noise`.
pub fn low_rank_frames(
    width: usize,
    height: usize,
    n: usize,
    rank: usize,
    noise: f64,
    seed: u64,
) -> DataMatrix {
    let p = width * height;
    let mut rng = GaussianSampler::new(seed);
    let mut patterns = vec![0.0; p * rank];
    rng.fill(&mut patterns);
    let mut coefs = vec![0.0; rank * n];
    rng.fill(&mut coefs);
    let scales: Vec<f64> = (0..rank).map(|r| 0.1 * 0.75f64.powi(r as i32)).collect();

    let mut data = vec![BACKGROUND; p * n];
    for t in 0..n {
        let col = &mut data[t * p..(t + 1) * p];
        for r in 0..rank {
            let c = scales[r] * coefs[t * rank + r];
            for (x, phi) in col.iter_mut().zip(&patterns[r * p..(r + 1) * p]) {
                *x += c * phi;
            }
        }
        for x in col.iter_mut() {
            *x += noise * rng.next();
        }
    }
    let values = Matrix::new(p, n, data).expect("finite synthetic data");
    DataMatrix::with_frame_shape(values, width, height).expect("consistent frame shape")
}

/// A Gaussian blob (standard deviation `radius` pixels) sliding horizontally
/// at constant speed across a dark background, one step per frame.
pub fn translating_bump(width: usize, height: usize, n: usize, radius: f64) -> DataMatrix {
    let p = width * height;
    let margin = 2.0 * radius;
    let span = (width as f64 - 1.0 - 2.0 * margin).max(0.0);
    let cy = (height as f64 - 1.0) / 2.0;
    let mut data = vec![0.0; p * n];
    for t in 0..n {
        let frac = if n > 1 { t as f64 / (n - 1) as f64 } else { 0.0 };
        let cx = margin + frac * span;
        let col = &mut data[t * p..(t + 1) * p];
        for y in 0..height {
            for x in 0..width {
                let r2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                col[y * width + x] = 0.1 + 0.8 * (-r2 / (2.0 * radius * radius)).exp();
            }
        }
    }
    let values = Matrix::new(p, n, data).expect("finite synthetic data");
    DataMatrix::with_frame_shape(values, width, height).expect("consistent frame shape")
}

/// Adds i.i.d. Gaussian pixel noise of standard deviation `std`.
pub fn with_noise(data: &DataMatrix, std: f64, seed: u64) -> DataMatrix {
    let mut rng = GaussianSampler::new(seed);
    let noisy: Vec<f64> = data
        .matrix()
        .as_slice()
        .iter()
        .map(|&v| v + std * rng.next())
        .collect();
    let values = Matrix::new(data.dim(), data.len(), noisy).expect("finite synthetic data");
    data.with_values(values)
}
