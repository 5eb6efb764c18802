//! Principal angles, subspace distance and the repeated-run stability study
//! for stochastic PCA.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingestion::DataMatrix;
use crate::linalg::{svd_exact, Matrix};
use crate::pca::{fit, FitMethod};
use crate::rsvd::RsvdConfig;

/// Orthonormality tolerance for [`SubspaceBasis`].
pub const BASIS_TOL: f64 = 1e-8;

/// An orthonormal basis (as columns) of a subspace of `R^m`.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    basis: Matrix,
}

impl SubspaceBasis {
    pub fn new(basis: Matrix) -> Result<Self> {
        let deviation = basis.orthonormality_error();
        if deviation > BASIS_TOL {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self { basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }
}

/// Cosines and sines of the principal angles, both ordered by increasing
/// angle. The cosines come from `F^T G`, the sines from the part of `G`
/// orthogonal to `F`; each is accurate where the other loses digits.
fn cosines_and_sines(f: &SubspaceBasis, g: &SubspaceBasis) -> Result<(Vec<f64>, Vec<f64>)> {
    if f.ambient_dim() != g.ambient_dim() {
        return Err(Error::DimensionMismatch {
            op: "principal_angles",
            left: f.basis.shape(),
            right: g.basis.shape(),
        });
    }
    let gram = f.basis.t_matmul(&g.basis)?;
    let cos: Vec<f64> = svd_exact(&gram)?
        .sigma
        .into_iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect();
    let residual = &g.basis - &f.basis.matmul(&gram)?;
    let mut sin: Vec<f64> = svd_exact(&residual)?
        .sigma
        .into_iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect();
    sin.reverse();
    Ok((cos, sin))
}

fn angle(cos: f64, sin: f64) -> f64 {
    if cos * cos >= 0.5 {
        sin.asin()
    } else {
        cos.acos()
    }
}

/// Principal angles between `f` and `g` (`dim f >= dim g`), nondecreasing.
pub fn principal_angles(f: &SubspaceBasis, g: &SubspaceBasis) -> Result<Vec<f64>> {
    if f.dim() < g.dim() {
        return Err(Error::InvalidParameter(format!(
            "principal_angles expects dim(f) >= dim(g), got {} < {}",
            f.dim(),
            g.dim()
        )));
    }
    let (cos, sin) = cosines_and_sines(f, g)?;
    let mut angles: Vec<f64> = cos.iter().zip(&sin).map(|(&c, &s)| angle(c, s)).collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

/// `sin` of the largest principal angle between two subspaces of equal
/// dimension, i.e. `sqrt(1 - sigma_min^2)`; lies in `[0, 1]`.
///
/// The pair is put in a canonical order before factoring so the result is
/// bit-for-bit symmetric in its arguments.
pub fn distance(f: &SubspaceBasis, g: &SubspaceBasis) -> Result<f64> {
    if f.dim() != g.dim() {
        return Err(Error::InvalidParameter(format!(
            "distance is defined for subspaces of equal dimension, got {} and {}",
            f.dim(),
            g.dim()
        )));
    }
    let (first, second) = match compare_bases(f, g) {
        Ordering::Greater => (g, f),
        _ => (f, g),
    };
    let (cos, sin) = cosines_and_sines(first, second)?;
    let smallest = cos.last().copied().unwrap_or(1.0);
    if smallest * smallest >= 0.5 {
        Ok(sin.last().copied().unwrap_or(0.0))
    } else {
        Ok((1.0 - smallest * smallest).max(0.0).sqrt())
    }
}

fn compare_bases(f: &SubspaceBasis, g: &SubspaceBasis) -> Ordering {
    f.basis
        .as_slice()
        .iter()
        .zip(g.basis.as_slice())
        .map(|(a, b)| a.total_cmp(b))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Spread of the principal subspace across repeated stochastic PCA fits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub runs: usize,
    pub q: usize,
    pub seeds: Vec<u64>,
    /// Distances for every pair `(i, j)`, `i < j`, in lexicographic order.
    pub pairwise_distances: Vec<f64>,
    pub mean: f64,
    /// Sample (n - 1) standard deviation of `pairwise_distances`.
    pub std_dev: f64,
    /// How runs are paired; always `"all_pairs"`.
    pub pairing: String,
}

impl StabilityReport {
    pub fn from_distances(q: usize, seeds: Vec<u64>, pairwise_distances: Vec<f64>) -> Self {
        let (mean, std_dev) = mean_and_sample_std(&pairwise_distances);
        Self {
            runs: seeds.len(),
            q,
            seeds,
            pairwise_distances,
            mean,
            std_dev,
            pairing: "all_pairs".to_string(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub const CSV_HEADER: &'static str = "group,mean,std";

    /// One Table-1 style row: `label,mean,std`.
    pub fn csv_row(&self, label: &str) -> String {
        format!("{label},{},{}", self.mean, self.std_dev)
    }
}

fn mean_and_sample_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Fits stochastic PCA `runs` times with seeds `base.seed + i` and reports all
/// pairwise distances between the resulting `q`-dimensional subspaces.
pub fn stability_study(
    y: &DataMatrix,
    q: usize,
    runs: usize,
    base: &RsvdConfig,
) -> Result<StabilityReport> {
    if runs < 2 {
        return Err(Error::InvalidParameter(format!(
            "stability study needs at least 2 runs, got {runs}"
        )));
    }
    let seeds: Vec<u64> = (0..runs as u64).map(|i| base.seed.wrapping_add(i)).collect();
    let bases = seeds
        .par_iter()
        .map(|&seed| {
            let cfg = RsvdConfig { seed, ..*base };
            let model = fit(y, q, FitMethod::Stochastic, Some(&cfg))?;
            SubspaceBasis::new(model.components)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut distances = Vec::with_capacity(runs * (runs - 1) / 2);
    for i in 0..runs {
        for j in i + 1..runs {
            distances.push(distance(&bases[i], &bases[j])?);
        }
    }
    Ok(StabilityReport::from_distances(q, seeds, distances))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    use super::*;
    use crate::linalg::{gaussian_matrix, qr_thin};

    fn span(cols: &[Vec<f64>]) -> SubspaceBasis {
        SubspaceBasis::new(Matrix::from_columns(cols).unwrap()).unwrap()
    }

    #[test]
    fn equal_subspaces() {
        let f = SubspaceBasis::new(qr_thin(&gaussian_matrix(10, 3, 1)).unwrap().q).unwrap();
        let angles = principal_angles(&f, &f).unwrap();
        assert!(angles.iter().all(|a| a.abs() <= 1e-14));
        assert!(distance(&f, &f).unwrap() <= 1e-14);
    }

    #[test]
    fn orthogonal_lines() {
        let e1 = span(&[vec![1.0, 0.0]]);
        let e2 = span(&[vec![0.0, 1.0]]);
        assert!((principal_angles(&e1, &e2).unwrap()[0] - FRAC_PI_2).abs() <= 1e-15);
        assert_eq!(distance(&e1, &e2).unwrap(), 1.0);
    }

    #[test]
    fn diagonal_line() {
        let e1 = span(&[vec![1.0, 0.0]]);
        let d = span(&[vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]]);
        assert!((principal_angles(&e1, &d).unwrap()[0] - FRAC_PI_4).abs() <= 1e-12);
        assert!((distance(&e1, &d).unwrap() - FRAC_PI_4.sin()).abs() <= 1e-12);
    }

    #[test]
    fn angles_are_sorted_for_unequal_dims() {
        // plane {e1, e2} vs plane {e1, (e2 + e3)/sqrt2} inside a 3-dim space
        let f = span(&[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ]);
        let g = span(&[
            vec![0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
        ]);
        let angles = principal_angles(&f, &g).unwrap();
        assert_eq!(angles.len(), 2);
        assert!(angles[0].abs() <= 1e-12);
        assert!((angles[1] - FRAC_PI_4).abs() <= 1e-12);
        assert!(principal_angles(&g, &f).is_err());
        assert!(distance(&f, &g).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            SubspaceBasis::new(Matrix::from_columns(&[vec![1.0, 1.0]]).unwrap()),
            Err(Error::NotOrthonormal { .. })
        ));
        let a = span(&[vec![1.0, 0.0]]);
        let b = span(&[vec![1.0, 0.0, 0.0]]);
        assert!(matches!(
            principal_angles(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn report_statistics() {
        let r = StabilityReport::from_distances(3, vec![5, 6, 7], vec![0.1, 0.2, 0.3]);
        assert_eq!(r.runs, 3);
        assert!((r.mean - 0.2).abs() <= 1e-15);
        assert!((r.std_dev - 0.1).abs() <= 1e-15);
        assert_eq!(r.csv_row("Group 1"), format!("Group 1,{},{}", r.mean, r.std_dev));
        let back: StabilityReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn study_needs_two_runs() {
        let y = DataMatrix::new(gaussian_matrix(20, 15, 0));
        assert!(stability_study(&y, 2, 1, &RsvdConfig::new(2, 0)).is_err());
    }

    #[test]
    fn study_on_exact_rank_data_is_zero() {
        let u = qr_thin(&gaussian_matrix(30, 2, 4)).unwrap().q;
        let coef = gaussian_matrix(2, 25, 5).scale(3.0);
        let y = DataMatrix::new(u.matmul(&coef).unwrap());
        let report = stability_study(&y, 2, 2, &RsvdConfig::new(2, 100).with_oversampling(5)).unwrap();
        assert_eq!(report.seeds, vec![100, 101]);
        assert_eq!(report.pairwise_distances.len(), 1);
        assert!(report.mean <= 1e-6, "mean {}", report.mean);
    }
}
