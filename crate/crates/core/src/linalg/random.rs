use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::SplitMix64;

use super::Matrix;

/// Seeded standard-normal source: SplitMix64 (64-bit state) feeding the
/// ziggurat sampler from `rand_distr`.
#[derive(Clone, Debug)]
pub struct GaussianSampler {
    rng: SplitMix64,
}

impl GaussianSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: SplitMix64::seed_from_u64(seed),
        }
    }

    #[inline]
    pub fn next(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = self.next());
    }
}

/// `rows x cols` matrix of i.i.d. standard normal entries, filled in
/// column-major order. The same seed always yields a bit-identical matrix.
pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut sampler = GaussianSampler::new(seed);
    let mut data = vec![0.0; rows * cols];
    sampler.fill(&mut data);
    Matrix::from_col_major(rows, cols, data)
}
