//! Diffusion maps.
//!
//! Pairwise heat-kernel similarities `W`, the row-stochastic transition
//! matrix `P = D^-1 W`, its spectrum, and the multiscale embedding
//! `y_j -> (l_1^t psi_1[j], ..., l_q^t psi_q[j])`.
//!
//! `P` is not symmetric, so its eigenpairs are obtained from the conjugate
//! `S = D^-1/2 W D^-1/2`, which shares the spectrum of `P`; right
//! eigenvectors are recovered as `psi = D^-1/2 v`. There is no linear map
//! back from diffusion coordinates to image space.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingestion::DataMatrix;
use crate::linalg::{sym_eig, Matrix};

/// Default diffusion scale `t`.
pub const DEFAULT_SCALE: u32 = 2;

/// Squared Euclidean distances between all pairs of columns. Each entry is
/// accumulated over the pixel index in ascending order and mirrored, so the
/// result is exactly symmetric with a zero diagonal.
pub fn pairwise_sq_distances(y: &DataMatrix) -> Matrix {
    let n = y.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let yi = y.column(i);
            (i + 1..n)
                .map(|j| {
                    yi.iter()
                        .zip(y.column(j))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum()
                })
                .collect()
        })
        .collect();
    let mut d2 = Matrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            let j = i + 1 + off;
            d2[(i, j)] = v;
            d2[(j, i)] = v;
        }
    }
    d2
}

/// Largest pairwise squared distance in a precomputed distance matrix.
pub fn epsilon_from_distances(d2: &Matrix) -> Result<f64> {
    let eps = d2.as_slice().iter().copied().fold(0.0, f64::max);
    if eps <= 0.0 {
        return Err(Error::IdenticalPoints);
    }
    Ok(eps)
}

/// Kernel bandwidth: the largest squared distance between any two points.
pub fn default_epsilon(y: &DataMatrix) -> Result<f64> {
    if y.len() < 2 {
        return Err(Error::InvalidParameter(
            "bandwidth needs at least 2 points".into(),
        ));
    }
    epsilon_from_distances(&pairwise_sq_distances(y))
}

/// `W_ij = exp(-d2_ij / epsilon)`.
pub fn kernel_from_distances(d2: &Matrix, epsilon: f64) -> Result<Matrix> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "kernel bandwidth must be positive, got {epsilon}"
        )));
    }
    let n = d2.rows();
    let mut w = Matrix::identity(n);
    for j in 0..n {
        for i in 0..j {
            let v = (-d2[(i, j)] / epsilon).exp();
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    Ok(w)
}

/// Heat-kernel similarity matrix of the columns of `y`.
pub fn kernel_matrix(y: &DataMatrix, epsilon: f64) -> Result<Matrix> {
    kernel_from_distances(&pairwise_sq_distances(y), epsilon)
}

fn check_kernel(w: &Matrix) -> Result<()> {
    let (r, c) = w.shape();
    if r != c {
        return Err(Error::DimensionMismatch {
            op: "diffusion_matrix",
            left: w.shape(),
            right: w.shape(),
        });
    }
    let scale = w.max_abs().max(1.0);
    for j in 0..c {
        for i in 0..r {
            let x = w[(i, j)];
            if x < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "kernel entry ({i}, {j}) is negative: {x}"
                )));
            }
            if i < j && (x - w[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::NotSymmetric {
                    max_asymmetry: (x - w[(j, i)]).abs(),
                });
            }
        }
    }
    Ok(())
}

fn degrees(w: &Matrix) -> Result<Vec<f64>> {
    let n = w.rows();
    let d: Vec<f64> = (0..n).map(|i| (0..n).map(|j| w[(i, j)]).sum()).collect();
    if let Some((row, &sum)) = d.iter().enumerate().find(|(_, &s)| !(s > 0.0)) {
        return Err(Error::ZeroRowSum { row, sum });
    }
    Ok(d)
}

/// Row-normalizes a kernel: returns `P = D^-1 W` and the degrees `D_ii`.
pub fn diffusion_matrix(w: &Matrix) -> Result<(Matrix, Vec<f64>)> {
    check_kernel(w)?;
    let d = degrees(w)?;
    let n = w.rows();
    let p = Matrix::from_fn(n, n, |i, j| w[(i, j)] / d[i]);
    Ok((p, d))
}

/// Eigenvalues (nonincreasing) and right eigenvectors (columns) of
/// `P = D^-1 W`, through the symmetric conjugate `D^-1/2 W D^-1/2`.
pub fn spectral(w: &Matrix, d: &[f64]) -> Result<(Vec<f64>, Matrix)> {
    check_kernel(w)?;
    let n = w.rows();
    if d.len() != n {
        return Err(Error::DimensionMismatch {
            op: "spectral",
            left: w.shape(),
            right: (d.len(), 1),
        });
    }
    if let Some((row, &sum)) = d.iter().enumerate().find(|(_, &s)| !(s > 0.0)) {
        return Err(Error::ZeroRowSum { row, sum });
    }
    let inv_sqrt: Vec<f64> = d.iter().map(|x| 1.0 / x.sqrt()).collect();
    let mut s = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let v = w[(i, j)] * inv_sqrt[i] * inv_sqrt[j];
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    let eig = sym_eig(&s)?;
    let mut psi = eig.vectors;
    for j in 0..n {
        for (x, k) in psi.col_mut(j).iter_mut().zip(&inv_sqrt) {
            *x *= k;
        }
    }
    Ok((eig.values, psi))
}

/// Spectral decomposition of the diffusion operator on a dataset.
#[derive(Clone, Debug)]
pub struct DiffusionModel {
    pub epsilon: f64,
    /// `lambda_0 = 1 >= lambda_1 >= ...`; negative values are kept as computed.
    pub eigenvalues: Vec<f64>,
    /// Right eigenvectors of `P` as columns (`n x n`).
    pub psi: Matrix,
    /// Kernel matrix `W`.
    pub kernel: Matrix,
    /// Row sums of `W`.
    pub degrees: Vec<f64>,
}

impl DiffusionModel {
    /// Builds the model; `epsilon = None` selects the largest squared
    /// pairwise distance.
    pub fn fit(y: &DataMatrix, epsilon: Option<f64>) -> Result<Self> {
        if y.len() < 2 {
            return Err(Error::InvalidParameter(
                "diffusion maps need at least 2 points".into(),
            ));
        }
        let d2 = pairwise_sq_distances(y);
        let epsilon = match epsilon {
            Some(e) => e,
            None => epsilon_from_distances(&d2)?,
        };
        let kernel = kernel_from_distances(&d2, epsilon)?;
        let (_, degrees) = diffusion_matrix(&kernel)?;
        let (eigenvalues, psi) = spectral(&kernel, &degrees)?;
        Ok(Self {
            epsilon,
            eigenvalues,
            psi,
            kernel,
            degrees,
        })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// The transition matrix `P = D^-1 W`.
    pub fn transition_matrix(&self) -> Matrix {
        let n = self.n();
        Matrix::from_fn(n, n, |i, j| self.kernel[(i, j)] / self.degrees[i])
    }

    /// Nontrivial eigenvalues (`lambda_0` dropped) relative to `lambda_1`.
    pub fn decay(&self, count: usize) -> Result<DecayCurve> {
        eigen_decay(&self.eigenvalues[1..], count)
    }
}

/// Diffusion coordinates, one row per observation.
#[derive(Clone, Debug)]
pub struct Embedding {
    /// `n x q`; row `j` holds the coordinates of observation `j`.
    pub coords: Matrix,
    pub q: usize,
    pub t: u32,
}

/// Diffusion map at scale `t`, keeping the `q` leading nontrivial eigenpairs.
pub fn embed(model: &DiffusionModel, q: usize, t: u32) -> Result<Embedding> {
    let n = model.n();
    if q == 0 || q >= n {
        return Err(Error::InvalidParameter(format!(
            "embedding dimension q = {q} must lie in 1..{n}"
        )));
    }
    if t == 0 {
        return Err(Error::InvalidParameter("diffusion scale t must be positive".into()));
    }
    let scale: Vec<f64> = (1..=q)
        .map(|i| model.eigenvalues[i].powi(t as i32))
        .collect();
    let coords = Matrix::from_fn(n, q, |j, c| scale[c] * model.psi[(j, c + 1)]);
    Ok(Embedding { coords, q, t })
}

/// Leading part of a spectrum relative to its first (largest) value.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayCurve {
    pub values: Vec<f64>,
    /// Set when fewer than the requested number of values were available.
    pub truncated: bool,
}

/// First `count` entries of a nonincreasing spectrum divided by its first entry.
pub fn eigen_decay(values: &[f64], count: usize) -> Result<DecayCurve> {
    let reference = match values.first() {
        Some(&v) if v > 0.0 => v,
        _ => {
            return Err(Error::InvalidParameter(
                "spectrum must start with a positive value".into(),
            ))
        }
    };
    if values.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidParameter("spectrum is not sorted nonincreasing".into()));
    }
    let keep = count.min(values.len());
    Ok(DecayCurve {
        values: values[..keep].iter().map(|v| v / reference).collect(),
        truncated: keep < count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gaussian_matrix;

    fn points(cols: &[Vec<f64>]) -> DataMatrix {
        DataMatrix::new(Matrix::from_columns(cols).unwrap())
    }

    fn naive_max_sq(y: &DataMatrix) -> f64 {
        let mut best = 0.0_f64;
        for i in 0..y.len() {
            for j in 0..y.len() {
                let mut s = 0.0;
                for k in 0..y.dim() {
                    let d = y.column(i)[k] - y.column(j)[k];
                    s += d * d;
                }
                best = best.max(s);
            }
        }
        best
    }

    #[test]
    fn epsilon_cases() {
        assert_eq!(default_epsilon(&points(&[vec![0.0, 0.0], vec![3.0, 0.0]])).unwrap(), 9.0);
        assert_eq!(
            default_epsilon(&points(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]])).unwrap(),
            4.0
        );
        let y = DataMatrix::new(gaussian_matrix(5, 20, 3));
        assert_eq!(default_epsilon(&y).unwrap(), naive_max_sq(&y));
        assert!(matches!(
            default_epsilon(&points(&[vec![1.0], vec![1.0]])),
            Err(Error::IdenticalPoints)
        ));
    }

    #[test]
    fn kernel_entries() {
        let y = points(&[vec![0.0, 0.0], vec![0.0, 2.0]]);
        let w = kernel_matrix(&y, 4.0).unwrap();
        assert_eq!(w[(0, 0)], 1.0);
        assert_eq!(w[(1, 1)], 1.0);
        assert!((w[(0, 1)] - (-1.0f64).exp()).abs() <= 1e-15);
        assert!((w[(0, 1)] - 0.367879).abs() <= 1e-6);
        assert!(kernel_matrix(&y, 0.0).is_err());
        assert!(kernel_matrix(&y, -1.0).is_err());

        let y = DataMatrix::new(gaussian_matrix(4, 9, 5));
        let w = kernel_matrix(&y, 3.0).unwrap();
        assert_eq!(w, w.transpose());
    }

    #[test]
    fn transition_cases() {
        let (p, d) = diffusion_matrix(&Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(p.as_slice(), &[0.5; 4]);
        assert_eq!(d, vec![2.0, 2.0]);

        let (p, _) = diffusion_matrix(&Matrix::identity(3)).unwrap();
        assert_eq!(p, Matrix::identity(3));

        let bad = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(diffusion_matrix(&bad), Err(Error::ZeroRowSum { row: 1, .. })));
        let neg = Matrix::from_row_slice(2, 2, &[1.0, -0.1, -0.1, 1.0]).unwrap();
        assert!(diffusion_matrix(&neg).is_err());
        let asym = Matrix::from_row_slice(2, 2, &[1.0, 0.2, 0.1, 1.0]).unwrap();
        assert!(matches!(diffusion_matrix(&asym), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn spectrum_of_two_identical_points() {
        let w = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        let (_, d) = diffusion_matrix(&w).unwrap();
        let (values, psi) = spectral(&w, &d).unwrap();
        assert!((values[0] - 1.0).abs() <= 1e-14);
        assert!(values[1].abs() <= 1e-14);
        assert!((psi[(0, 0)] - psi[(1, 0)]).abs() <= 1e-14);
    }

    #[test]
    fn spectrum_of_identity_kernel() {
        let w = Matrix::identity(4);
        let (values, _) = spectral(&w, &[1.0; 4]).unwrap();
        assert!(values.iter().all(|&v| (v - 1.0).abs() <= 1e-15));
    }

    #[test]
    fn embed_bounds() {
        let y = DataMatrix::new(gaussian_matrix(3, 6, 8));
        let model = DiffusionModel::fit(&y, None).unwrap();
        assert!(embed(&model, 6, 1).is_err());
        assert!(embed(&model, 0, 1).is_err());
        assert!(embed(&model, 2, 0).is_err());
        let e = embed(&model, 5, 2).unwrap();
        assert_eq!(e.coords.shape(), (6, 5));
        assert_eq!(e.t, 2);
    }

    #[test]
    fn decay_cases() {
        assert_eq!(eigen_decay(&[2.0; 4], 4).unwrap().values, vec![1.0; 4]);
        let r: f64 = 0.7;
        let geo: Vec<f64> = (0..6).map(|i| r.powi(i)).collect();
        assert_eq!(eigen_decay(&geo, 6).unwrap().values, geo);
        let short = eigen_decay(&[3.0, 1.5], 5).unwrap();
        assert_eq!(short.values, vec![1.0, 0.5]);
        assert!(short.truncated);
        assert!(eigen_decay(&[0.0, 0.0], 2).is_err());
        assert!(eigen_decay(&[1.0, 2.0], 2).is_err());
    }
}
