use super::svd::rotate_columns;
use super::{canonical_sign_flip, Matrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 50;

/// Eigen-decomposition of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct EigResult {
    /// Eigenvalues, nonincreasing.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: Matrix,
}

/// Full spectrum of a symmetric matrix by cyclic Jacobi rotations.
///
/// The input must be symmetric to within `1e-10` (scaled by the largest
/// entry when that exceeds one); it is symmetrized before iterating.
pub fn sym_eig(a: &Matrix) -> Result<EigResult> {
    let (rows, n) = a.shape();
    if rows != n {
        return Err(Error::DimensionMismatch {
            op: "sym_eig",
            left: a.shape(),
            right: a.shape(),
        });
    }
    let mut max_asymmetry = 0.0_f64;
    for j in 0..n {
        for i in j + 1..n {
            max_asymmetry = max_asymmetry.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    if max_asymmetry > 1e-10 * a.max_abs().max(1.0) {
        return Err(Error::NotSymmetric { max_asymmetry });
    }

    let mut w = Matrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let mut v = Matrix::identity(n);
    let scale = w.frobenius_norm();

    let mut converged = false;
    let mut off_norm = 0.0;
    for sweep in 0..MAX_SWEEPS {
        off_norm = off_diagonal_norm(&w);
        if off_norm == 0.0 || off_norm <= 1e-2 * f64::EPSILON * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = w[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = w[(p, p)];
                let aqq = w[(q, q)];
                // After a few sweeps, drop entries that no longer move the
                // diagonal; this makes the off-diagonal reach exactly zero.
                let g = 100.0 * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    w[(p, q)] = 0.0;
                    w[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                rotate_columns(&mut w, p, q, c, s);
                rotate_rows(&mut w, p, q, c, s);
                w[(p, p)] = app - t * apq;
                w[(q, q)] = aqq + t * apq;
                w[(p, q)] = 0.0;
                w[(q, p)] = 0.0;
                rotate_columns(&mut v, p, q, c, s);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            op: "sym_eig",
            sweeps: MAX_SWEEPS,
            off_norm,
        });
    }

    let diag: Vec<f64> = (0..n).map(|i| w[(i, i)]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = v.select_columns(&order);
    for j in 0..n {
        if canonical_sign_flip(vectors.col(j)) {
            vectors.col_mut(j).iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(EigResult { values, vectors })
}

fn off_diagonal_norm(w: &Matrix) -> f64 {
    let n = w.cols();
    let mut s = 0.0;
    for j in 0..n {
        for (i, x) in w.col(j).iter().enumerate() {
            if i != j {
                s += x * x;
            }
        }
    }
    s.sqrt()
}

#[inline]
fn rotate_rows(m: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..m.cols() {
        let a = m[(p, k)];
        let b = m[(q, k)];
        m[(p, k)] = c * a - s * b;
        m[(q, k)] = s * a + c * b;
    }
}
