use super::matrix::{axpy, dot, norm};
use super::Matrix;
use crate::error::{Error, Result};

/// Thin QR factorization `A = Q R` of an `m x n` matrix with `m >= n`.
#[derive(Clone, Debug)]
pub struct ThinQr {
    /// `m x n`, orthonormal columns.
    pub q: Matrix,
    /// `n x n` upper triangular with nonnegative diagonal.
    pub r: Matrix,
    /// Columns whose diagonal entry in `r` is negligible, i.e. columns that are
    /// (numerically) linear combinations of the preceding ones.
    pub degenerate_columns: Vec<usize>,
}

/// Householder thin QR.
///
/// Rank-deficient input is accepted: `q` still has orthonormal columns and
/// the affected columns are reported in `degenerate_columns`.
pub fn qr_thin(a: &Matrix) -> Result<ThinQr> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::NotTall {
            op: "qr_thin",
            rows: m,
            cols: n,
        });
    }

    let mut work = a.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut r = Matrix::zeros(n, n);

    for k in 0..n {
        let x = &work.col(k)[k..];
        let x_norm = norm(x);
        let mut v = x.to_vec();
        let alpha = if x[0] >= 0.0 { -x_norm } else { x_norm };
        v[0] -= alpha;
        let v_norm = norm(&v);
        if x_norm == 0.0 || v_norm == 0.0 {
            // column already zero below the diagonal; identity reflector
            v.iter_mut().for_each(|vi| *vi = 0.0);
        } else {
            v.iter_mut().for_each(|vi| *vi /= v_norm);
            for j in k..n {
                let col = &mut work.col_mut(j)[k..];
                let s = 2.0 * dot(&v, col);
                axpy(-s, &v, col);
            }
        }
        for j in k..n {
            r[(k, j)] = work[(k, j)];
        }
        reflectors.push(v);
    }

    // Q = H_0 H_1 ... H_{n-1} applied to the first n columns of I.
    let mut q = Matrix::zeros(m, n);
    for j in 0..n {
        q[(j, j)] = 1.0;
    }
    for (k, v) in reflectors.iter().enumerate().rev() {
        if v.iter().all(|&x| x == 0.0) {
            continue;
        }
        for j in 0..n {
            let col = &mut q.col_mut(j)[k..];
            let s = 2.0 * dot(v, col);
            axpy(-s, v, col);
        }
    }

    // nonnegative diagonal in R
    for k in 0..n {
        if r[(k, k)] < 0.0 {
            for j in k..n {
                r[(k, j)] = -r[(k, j)];
            }
            q.col_mut(k).iter_mut().for_each(|x| *x = -*x);
        }
    }

    let max_diag = (0..n).map(|k| r[(k, k)]).fold(0.0, f64::max);
    let tol = (m as f64) * f64::EPSILON * max_diag;
    let degenerate_columns = (0..n).filter(|&k| r[(k, k)] <= tol).collect();

    Ok(ThinQr {
        q,
        r,
        degenerate_columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gaussian_matrix;

    #[test]
    fn orthonormal_input_is_fixed_point() {
        let base = qr_thin(&gaussian_matrix(12, 4, 3)).unwrap().q;
        let qr = qr_thin(&base).unwrap();
        assert!((&qr.r - &Matrix::identity(4)).max_abs() <= 1e-10);
        for j in 0..4 {
            let same = qr.q.col(j).iter().zip(base.col(j)).all(|(a, b)| (a - b).abs() <= 1e-10);
            let flipped = qr.q.col(j).iter().zip(base.col(j)).all(|(a, b)| (a + b).abs() <= 1e-10);
            assert!(same || flipped);
        }
    }

    #[test]
    fn three_four_five() {
        let a = Matrix::from_row_slice(2, 1, &[3.0, 4.0]).unwrap();
        let qr = qr_thin(&a).unwrap();
        assert!((qr.r[(0, 0)] - 5.0).abs() <= 1e-14);
        assert!((qr.q[(0, 0)] - 0.6).abs() <= 1e-14);
        assert!((qr.q[(1, 0)] - 0.8).abs() <= 1e-14);
    }

    #[test]
    fn random_tall_is_orthonormal_and_reconstructs() {
        let a = gaussian_matrix(50, 10, 5);
        let qr = qr_thin(&a).unwrap();
        assert!(qr.q.orthonormality_error() <= 1e-10);
        let back = qr.q.matmul(&qr.r).unwrap();
        assert!((&back - &a).frobenius_norm() / a.frobenius_norm() <= 1e-10);
        for j in 0..10 {
            for i in j + 1..10 {
                assert_eq!(qr.r[(i, j)], 0.0);
            }
        }
        assert!(qr.degenerate_columns.is_empty());
    }

    #[test]
    fn rank_deficient_columns_are_flagged() {
        let mut a = gaussian_matrix(8, 3, 9);
        let dup: Vec<f64> = a.col(0).iter().zip(a.col(1)).map(|(x, y)| 2.0 * x - y).collect();
        a.col_mut(2).copy_from_slice(&dup);
        let qr = qr_thin(&a).unwrap();
        assert_eq!(qr.degenerate_columns, vec![2]);
        assert!(qr.q.orthonormality_error() <= 1e-10);
        let back = qr.q.matmul(&qr.r).unwrap();
        assert!((&back - &a).frobenius_norm() / a.frobenius_norm() <= 1e-10);
    }

    #[test]
    fn zero_matrix() {
        let qr = qr_thin(&Matrix::zeros(5, 2)).unwrap();
        assert!(qr.q.orthonormality_error() <= 1e-12);
        assert_eq!(qr.degenerate_columns, vec![0, 1]);
    }

    #[test]
    fn wide_input_rejected() {
        assert!(matches!(
            qr_thin(&Matrix::zeros(2, 3)),
            Err(Error::NotTall { .. })
        ));
    }
}
