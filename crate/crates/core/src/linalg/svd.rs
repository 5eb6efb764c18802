use super::matrix::{dot, norm};
use super::{canonical_sign_flip, qr_thin, Matrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 50;

/// Thin singular value decomposition `A = U diag(sigma) V^T`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    /// `m x k`, orthonormal columns.
    pub u: Matrix,
    /// `k` singular values, nonincreasing and nonnegative.
    pub sigma: Vec<f64>,
    /// `n x k`, orthonormal columns.
    pub v: Matrix,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// Keeps the leading `k` singular triplets.
    pub fn truncate(&self, k: usize) -> SvdResult {
        SvdResult {
            u: self.u.leading_columns(k),
            sigma: self.sigma[..k].to_vec(),
            v: self.v.leading_columns(k),
        }
    }

    /// `U diag(sigma) V^T`.
    pub fn reconstruct(&self) -> Matrix {
        self.u
            .scale_columns(&self.sigma)
            .matmul(&self.v.transpose())
            .expect("factor shapes agree")
    }
}

/// Thin SVD by one-sided (Hestenes) Jacobi rotations.
///
/// Tall inputs are first reduced with a Householder QR so the rotations act on
/// an `n x n` triangle; wide inputs are handled through the transpose. The
/// result is deterministic: singular values are sorted, exact-zero singular
/// values get an orthonormal completion in `U`, and each `u_j` has its first
/// nonzero entry nonnegative (with `v_j` flipped alongside).
pub fn svd_exact(a: &Matrix) -> Result<SvdResult> {
    let (m, n) = a.shape();
    if m < n {
        let t = svd_exact(&a.transpose())?;
        let mut out = SvdResult {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        };
        fix_signs(&mut out);
        return Ok(out);
    }

    let mut out = if m > n {
        let qr = qr_thin(a)?;
        let inner = jacobi_square(&qr.r)?;
        SvdResult {
            u: qr.q.matmul(&inner.u)?,
            sigma: inner.sigma,
            v: inner.v,
        }
    } else {
        jacobi_square(a)?
    };
    fix_signs(&mut out);
    Ok(out)
}

fn fix_signs(svd: &mut SvdResult) {
    for j in 0..svd.sigma.len() {
        if canonical_sign_flip(svd.u.col(j)) {
            svd.u.col_mut(j).iter_mut().for_each(|x| *x = -*x);
            svd.v.col_mut(j).iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// One-sided Jacobi on a square matrix.
fn jacobi_square(a: &Matrix) -> Result<SvdResult> {
    let n = a.cols();
    debug_assert_eq!(a.rows(), n);
    let mut w = a.clone();
    let mut v = Matrix::identity(n);
    let tol = (n as f64).max(1.0) * f64::EPSILON;

    let mut converged = n == 1;
    let mut off_norm = 0.0;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        let mut off_sq = 0.0;
        for i in 0..n.saturating_sub(1) {
            for j in i + 1..n {
                let alpha = dot(w.col(i), w.col(i));
                let beta = dot(w.col(j), w.col(j));
                let gamma = dot(w.col(i), w.col(j));
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let rel = gamma.abs() / (alpha * beta).sqrt();
                off_sq += rel * rel;
                if rel <= tol {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut w, i, j, c, s);
                rotate_columns(&mut v, i, j, c, s);
            }
        }
        off_norm = off_sq.sqrt();
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            op: "svd_exact",
            sweeps: MAX_SWEEPS,
            off_norm,
        });
    }

    let norms: Vec<f64> = (0..n).map(|j| norm(w.col(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));

    let sigma_max = norms[order[0]];
    let zero_tol = (n as f64) * f64::EPSILON * sigma_max;

    let mut u = Matrix::zeros(n, n);
    let mut sigma = vec![0.0; n];
    let mut missing = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        if s > zero_tol {
            sigma[dst] = s;
            for (ui, wi) in u.col_mut(dst).iter_mut().zip(w.col(src)) {
                *ui = wi / s;
            }
        } else {
            missing.push(dst);
        }
    }
    complete_orthonormal(&mut u, &missing);

    Ok(SvdResult {
        u,
        sigma,
        v: v.select_columns(&order),
    })
}

#[inline]
pub(crate) fn rotate_columns(m: &mut Matrix, i: usize, j: usize, c: f64, s: f64) {
    let (ci, cj) = m.two_cols_mut(i, j);
    for (xi, xj) in ci.iter_mut().zip(cj.iter_mut()) {
        let (a, b) = (*xi, *xj);
        *xi = c * a - s * b;
        *xj = s * a + c * b;
    }
}

/// Fills the columns listed in `missing` with unit vectors orthogonal to every
/// other column of `u`, choosing among the coordinate axes the one with the
/// largest component outside the current span.
fn complete_orthonormal(u: &mut Matrix, missing: &[usize]) {
    let n = u.rows();
    let mut filled: Vec<bool> = vec![true; u.cols()];
    for &j in missing {
        filled[j] = false;
    }
    for &j in missing {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for axis in 0..n {
            let mut cand = vec![0.0; n];
            cand[axis] = 1.0;
            for _ in 0..2 {
                for k in (0..u.cols()).filter(|&k| filled[k]) {
                    let p = dot(u.col(k), &cand);
                    for (c, uk) in cand.iter_mut().zip(u.col(k)) {
                        *c -= p * uk;
                    }
                }
            }
            let len = norm(&cand);
            if best.as_ref().is_none_or(|(b, _)| len > *b) {
                best = Some((len, cand));
            }
        }
        let (len, cand) = best.expect("at least one axis");
        for (dst, c) in u.col_mut(j).iter_mut().zip(&cand) {
            *dst = c / len;
        }
        filled[j] = true;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gaussian_matrix, sym_eig};

    fn check_factorization(a: &Matrix, svd: &SvdResult) {
        let k = a.rows().min(a.cols());
        assert_eq!(svd.u.shape(), (a.rows(), k));
        assert_eq!(svd.v.shape(), (a.cols(), k));
        assert!(svd.u.orthonormality_error() <= 1e-10);
        assert!(svd.v.orthonormality_error() <= 1e-10);
        assert!(svd.sigma.windows(2).all(|w| w[0] >= w[1]));
        assert!(svd.sigma.iter().all(|&s| s >= 0.0));
        let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
        assert!((&svd.reconstruct() - a).frobenius_norm() / scale <= 1e-10);
    }

    #[test]
    fn diagonal() {
        let a = Matrix::diag(&[3.0, 2.0, 1.0]);
        let svd = svd_exact(&a).unwrap();
        assert_eq!(svd.sigma, vec![3.0, 2.0, 1.0]);
        assert!((&svd.u - &Matrix::identity(3)).max_abs() <= 1e-15);
        assert!((&svd.v - &Matrix::identity(3)).max_abs() <= 1e-15);
    }

    #[test]
    fn unsorted_diagonal_is_sorted() {
        let a = Matrix::diag(&[1.0, -4.0, 2.0]);
        let svd = svd_exact(&a).unwrap();
        assert_eq!(svd.sigma, vec![4.0, 2.0, 1.0]);
        check_factorization(&a, &svd);
    }

    #[test]
    fn rank_one_outer_product() {
        let u = [2.0 / 3.0, -4.0 / 3.0, 4.0 / 3.0, 0.0]; // norm 2
        let v = [0.6, 0.0, -0.8]; // norm 1
        let a = Matrix::from_fn(4, 3, |i, j| u[i] * v[j]);
        let svd = svd_exact(&a).unwrap();
        assert!((svd.sigma[0] - 2.0).abs() <= 1e-12);
        assert!(svd.sigma[1..].iter().all(|&s| s.abs() <= 1e-12));
        check_factorization(&a, &svd);
    }

    #[test]
    fn random_tall_matches_gram_eigenvalues() {
        let a = gaussian_matrix(20, 8, 21);
        let svd = svd_exact(&a).unwrap();
        check_factorization(&a, &svd);
        let eig = sym_eig(&a.t_matmul(&a).unwrap()).unwrap();
        for (s, l) in svd.sigma.iter().zip(&eig.values) {
            assert!((s * s - l).abs() <= 1e-8 * l.abs().max(1.0));
        }
    }

    #[test]
    fn wide_and_square() {
        for (m, n, seed) in [(6, 15, 1), (9, 9, 2), (1, 5, 3), (5, 1, 4)] {
            let a = gaussian_matrix(m, n, seed);
            check_factorization(&a, &svd_exact(&a).unwrap());
        }
    }

    #[test]
    fn zero_matrix_has_orthonormal_factors() {
        let a = Matrix::zeros(4, 3);
        let svd = svd_exact(&a).unwrap();
        assert_eq!(svd.sigma, vec![0.0; 3]);
        assert!(svd.u.orthonormality_error() <= 1e-12);
        assert!(svd.v.orthonormality_error() <= 1e-12);
    }

    #[test]
    fn sign_convention() {
        let a = gaussian_matrix(10, 4, 8);
        let svd = svd_exact(&a).unwrap();
        for j in 0..4 {
            let first = svd.u.col(j).iter().find(|x| x.abs() > 1e-10).unwrap();
            assert!(*first > 0.0);
        }
        let neg = a.scale(-1.0);
        let svd_neg = svd_exact(&neg).unwrap();
        assert!((&svd.u - &svd_neg.u).max_abs() <= 1e-12);
    }
}
