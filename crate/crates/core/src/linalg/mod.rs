//! Dense column-major matrices and deterministic factorizations.
//!
//! Everything here is 64-bit and pure Rust. The factorizations are the exact
//! path used for small problems (the reduced matrix inside the randomized SVD,
//! the principal-angle Gram matrix, the symmetrized diffusion operator) and the
//! brute-force reference the randomized routines are tested against.

mod eig;
mod matrix;
mod qr;
mod random;
mod svd;

pub use eig::{sym_eig, EigResult};
pub use matrix::{matmul, Matrix};
pub use qr::{qr_thin, ThinQr};
pub use random::{gaussian_matrix, GaussianSampler};
pub use svd::{svd_exact, SvdResult};

/// Flips `sign` so that the first entry of `column` whose magnitude exceeds
/// `1e-10` (columns are unit norm) is nonnegative. Returns `true` if flipped.
pub(crate) fn canonical_sign_flip(column: &[f64]) -> bool {
    column
        .iter()
        .find(|x| x.abs() > 1e-10)
        .is_some_and(|&x| x < 0.0)
}
