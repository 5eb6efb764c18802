use flowspec_core::diffusion::{embed, kernel_matrix, DiffusionModel};
use flowspec_core::linalg::gaussian_matrix;
use flowspec_core::{DataMatrix, Matrix};
use proptest::prelude::*;

fn permuted_columns(y: &Matrix, perm: &[usize]) -> Matrix {
    Matrix::from_fn(y.rows(), y.cols(), |i, j| y[(i, perm[j])])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transition_is_stochastic(p in 1usize..10, n in 2usize..40, seed in any::<u64>()) {
        let y = DataMatrix::new(gaussian_matrix(p, n, seed));
        let model = DiffusionModel::fit(&y, None).unwrap();
        let pm = model.transition_matrix();
        for i in 0..n {
            let row: Vec<f64> = (0..n).map(|j| pm[(i, j)]).collect();
            prop_assert!(row.iter().all(|&v| v >= 0.0));
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
        prop_assert!((model.eigenvalues[0] - 1.0).abs() <= 1e-8);
        prop_assert!(model.eigenvalues.iter().all(|l| l.abs() <= 1.0 + 1e-8));
        prop_assert!(model.eigenvalues.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn permutation_equivariance(p in 2usize..6, n in 5usize..25, seed in any::<u64>(), shift in 1usize..24) {
        let base = gaussian_matrix(p, n, seed);
        let perm: Vec<usize> = (0..n).map(|j| (j * (2 * shift + 1) + shift) % n).collect();
        let mut seen = perm.clone();
        seen.sort_unstable();
        prop_assume!(seen.iter().enumerate().all(|(i, &v)| i == v));

        let a = DiffusionModel::fit(&DataMatrix::new(base.clone()), None).unwrap();
        let b = DiffusionModel::fit(&DataMatrix::new(permuted_columns(&base, &perm)), None).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
        let q = 2.min(n - 1);
        // compare only well separated eigenvalues, where eigenvectors are unique up to sign
        let gap_ok = |c: usize| {
            let l = &a.eigenvalues;
            (l[c] - l[c + 1]).abs() > 1e-6 && (c == 0 || (l[c - 1] - l[c]).abs() > 1e-6)
        };
        let ea = embed(&a, q, 1).unwrap().coords;
        let eb = embed(&b, q, 1).unwrap().coords;
        for c in 0..q {
            if !gap_ok(c + 1) {
                continue;
            }
            let dot: f64 = (0..n).map(|j| ea[(perm[j], c)] * eb[(j, c)]).sum();
            let s = dot.signum();
            for j in 0..n {
                prop_assert!((eb[(j, c)] - s * ea[(perm[j], c)]).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn kernel_grows_with_epsilon(p in 1usize..6, n in 2usize..15, seed in any::<u64>(), e in 0.1f64..10.0, factor in 1.01f64..5.0) {
        let y = DataMatrix::new(gaussian_matrix(p, n, seed));
        let small = kernel_matrix(&y, e).unwrap();
        let large = kernel_matrix(&y, e * factor).unwrap();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    prop_assert!(large[(i, j)] > small[(i, j)]);
                }
            }
        }
    }
}
