//! Randomized (stochastic) SVD.
//!
//! The range of `A` is sampled with a Gaussian test matrix, orthonormalized,
//! and `A` is projected onto that basis; the small projected matrix is then
//! factored exactly and rotated back.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gaussian_matrix, qr_thin, svd_exact, Matrix, SvdResult};

/// Relative threshold on the singular values of the sampled range used to
/// count its numerical rank.
const RANK_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RsvdConfig {
    pub target_rank: usize,
    /// Extra random samples beyond `target_rank`.
    pub oversampling: usize,
    /// Number of `(A A^T)` power iterations applied to the sample.
    pub power_iterations: usize,
    pub seed: u64,
}

impl RsvdConfig {
    pub fn new(target_rank: usize, seed: u64) -> Self {
        Self {
            target_rank,
            oversampling: 10,
            power_iterations: 0,
            seed,
        }
    }

    pub fn with_oversampling(mut self, oversampling: usize) -> Self {
        self.oversampling = oversampling;
        self
    }

    pub fn with_power_iterations(mut self, power_iterations: usize) -> Self {
        self.power_iterations = power_iterations;
        self
    }

    /// Total number of random samples `l = k + oversampling`.
    pub fn samples(&self) -> usize {
        self.target_rank + self.oversampling
    }

    fn validate(&self, a: &Matrix) -> Result<()> {
        if self.target_rank == 0 {
            return Err(Error::InvalidParameter("target rank must be at least 1".into()));
        }
        let limit = a.rows().min(a.cols());
        if self.samples() > limit {
            return Err(Error::OversampledRange {
                l: self.samples(),
                limit,
            });
        }
        Ok(())
    }
}

/// Orthonormal `m x l` basis for the sampled range of `a`.
pub fn rsvd_range(a: &Matrix, cfg: &RsvdConfig) -> Result<Matrix> {
    cfg.validate(a)?;
    let omega = gaussian_matrix(a.cols(), cfg.samples(), cfg.seed);
    let y = a.matmul(&omega)?;
    let qr = qr_thin(&y)?;

    let achieved = numerical_rank(&qr.r)?;
    if achieved < cfg.target_rank {
        return Err(Error::DegenerateRange {
            achieved,
            target: cfg.target_rank,
        });
    }

    let mut q = qr.q;
    for _ in 0..cfg.power_iterations {
        let z = qr_thin(&a.t_matmul(&q)?)?.q;
        q = qr_thin(&a.matmul(&z)?)?.q;
    }
    Ok(q)
}

/// Approximate leading `k` singular triplets of `a`.
pub fn rsvd(a: &Matrix, cfg: &RsvdConfig) -> Result<SvdResult> {
    Ok(rsvd_full(a, cfg)?.truncate(cfg.target_rank))
}

/// Like [`rsvd`] but keeps all `l` triplets of the projected problem.
pub fn rsvd_full(a: &Matrix, cfg: &RsvdConfig) -> Result<SvdResult> {
    let q = rsvd_range(a, cfg)?;
    let b = q.t_matmul(a)?;
    let small = svd_exact(&b)?;
    Ok(SvdResult {
        u: q.matmul(&small.u)?,
        sigma: small.sigma,
        v: small.v,
    })
}

fn numerical_rank(r: &Matrix) -> Result<usize> {
    let sigma = svd_exact(r)?.sigma;
    let top = sigma.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sigma.iter().filter(|&&s| s > RANK_TOL * top).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::{distance, SubspaceBasis};

    fn low_rank(m: usize, n: usize, sigma: &[f64], seed: u64) -> Matrix {
        let u = qr_thin(&gaussian_matrix(m, sigma.len(), seed)).unwrap().q;
        let v = qr_thin(&gaussian_matrix(n, sigma.len(), seed + 1)).unwrap().q;
        u.scale_columns(sigma).matmul(&v.transpose()).unwrap()
    }

    #[test]
    fn recovers_rank_three() {
        let a = low_rank(40, 30, &[5.0, 2.0, 1.0], 3);
        let cfg = RsvdConfig::new(3, 17).with_oversampling(7);
        let approx = rsvd(&a, &cfg).unwrap();
        let exact = svd_exact(&a).unwrap();
        for i in 0..3 {
            assert!((approx.sigma[i] - exact.sigma[i]).abs() <= 1e-8 * exact.sigma[i]);
        }
        let d = distance(
            &SubspaceBasis::new(approx.u.clone()).unwrap(),
            &SubspaceBasis::new(exact.u.leading_columns(3)).unwrap(),
        )
        .unwrap();
        assert!(d <= 1e-8, "distance {d}");
        assert!(approx.u.orthonormality_error() <= 1e-8);
        assert!(approx.v.orthonormality_error() <= 1e-8);
    }

    #[test]
    fn identity_input() {
        let cfg = RsvdConfig::new(2, 5).with_oversampling(3);
        let out = rsvd(&Matrix::identity(5), &cfg).unwrap();
        assert!((out.sigma[0] - 1.0).abs() <= 1e-12);
        assert!((out.sigma[1] - 1.0).abs() <= 1e-12);
        assert_eq!(out.u.shape(), (5, 2));
        assert!(out.u.orthonormality_error() <= 1e-12);
    }

    #[test]
    fn range_of_rank_one() {
        let x: Vec<f64> = (0..9).map(|i| (i as f64 - 3.5).sin()).collect();
        let y: Vec<f64> = (0..6).map(|j| 1.0 + j as f64).collect();
        let a = Matrix::from_fn(9, 6, |i, j| x[i] * y[j]);
        let cfg = RsvdConfig::new(1, 2).with_oversampling(2);
        let q = rsvd_range(&a, &cfg).unwrap();
        assert_eq!(q.shape(), (9, 3));
        assert!(q.orthonormality_error() <= 1e-10);
        let norm_x = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let unit: Vec<f64> = x.iter().map(|v| v / norm_x).collect();
        let d = distance(
            &SubspaceBasis::new(q.leading_columns(1)).unwrap(),
            &SubspaceBasis::new(Matrix::from_columns(&[unit]).unwrap()).unwrap(),
        )
        .unwrap();
        assert!(d <= 1e-8, "distance {d}");
    }

    #[test]
    fn deterministic() {
        let a = gaussian_matrix(30, 20, 1);
        let cfg = RsvdConfig::new(4, 9).with_power_iterations(2);
        let q1 = rsvd_range(&a, &cfg).unwrap();
        let q2 = rsvd_range(&a, &cfg).unwrap();
        assert_eq!(q1.as_slice(), q2.as_slice());
        let s1 = rsvd(&a, &cfg).unwrap();
        let s2 = rsvd(&a, &cfg).unwrap();
        assert_eq!(s1.sigma, s2.sigma);
        assert_eq!(s1.u.as_slice(), s2.u.as_slice());
        assert_eq!(s1.v.as_slice(), s2.v.as_slice());
    }

    #[test]
    fn too_many_samples() {
        let cfg = RsvdConfig::new(3, 0);
        assert!(matches!(
            rsvd(&Matrix::identity(8), &cfg),
            Err(Error::OversampledRange { l: 13, limit: 8 })
        ));
    }

    #[test]
    fn degenerate_range_names_rank() {
        let a = low_rank(20, 15, &[1.0, 0.5], 4);
        let cfg = RsvdConfig::new(4, 1).with_oversampling(0);
        match rsvd(&a, &cfg) {
            Err(Error::DegenerateRange { achieved, target }) => {
                assert_eq!((achieved, target), (2, 4));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            rsvd(&Matrix::zeros(6, 6), &RsvdConfig::new(1, 0).with_oversampling(1)),
            Err(Error::DegenerateRange { achieved: 0, .. })
        ));
    }

    #[test]
    fn power_iterations_sharpen_slow_spectrum() {
        let sigma: Vec<f64> = (0..40).map(|i| 1.0 / (1.0 + i as f64).sqrt()).collect();
        let a = low_rank(80, 60, &sigma, 8);
        let exact = svd_exact(&a).unwrap();
        let err = |p: usize| {
            let cfg = RsvdConfig::new(5, 3).with_oversampling(2).with_power_iterations(p);
            let s = rsvd(&a, &cfg).unwrap();
            (0..5).map(|i| (s.sigma[i] - exact.sigma[i]).abs()).sum::<f64>()
        };
        assert!(err(3) < err(0));
    }
}
