//! Dense matrices, factorizations and the scalar abstraction shared with jets.

mod decomp;
mod matrix;
mod scalar;

pub use decomp::{
    cholesky, polar_decompose, qr_positive, singular_values, sqrt_inv_sqrt, volume, volume_svd, SymPosDef,
    RANK_TOL,
};
pub(crate) use decomp::cgs2;
pub use matrix::{det, gram_power, gram_schmidt, inverse, Mat, Matrix};
pub use scalar::Scalar;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian_matrix, Stream};
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn gram_volume_matches_singular_values(seed in 0u64..10_000, n in 2usize..7, m in 1usize..4) {
            prop_assume!(m <= n);
            let x = gaussian_matrix(n, m, Stream::new(seed, 0));
            let a = volume(&x);
            let b = volume_svd(&x);
            prop_assert!((a - b).abs() <= 1e-10 * b);
        }

        #[test]
        fn polar_roundtrip(seed in 0u64..10_000, n in 2usize..7, m in 1usize..4) {
            prop_assume!(m <= n);
            let x = gaussian_matrix(n, m, Stream::new(seed, 1));
            let (v, r) = polar_decompose(&x).unwrap();
            let (s, _) = sqrt_inv_sqrt(&r).unwrap();
            let res = v.matrix().matmul(s.matrix()).minus(&x).frobenius() / x.frobenius();
            prop_assert!(res < 1e-10);
        }

        #[test]
        fn lu_det_matches_closed_form(seed in 0u64..10_000) {
            let a = gaussian_matrix(3, 3, Stream::new(seed, 2));
            let closed = det(&a);
            let big = Matrix::block_identity(4, 0, &a);
            prop_assert!((det(&big) - closed).abs() <= 1e-12 * (1.0 + closed.abs()));
        }

        #[test]
        fn inverse_is_inverse(seed in 0u64..10_000, n in 1usize..5) {
            let a = gaussian_matrix(n, n, Stream::new(seed, 3)).plus(&Matrix::identity(n).scaled(3.0));
            let p = a.matmul(&inverse(&a));
            prop_assert!(p.minus(&Matrix::identity(n)).max_abs() < 1e-9);
        }
    }

    #[test]
    fn matrix_new_validates() {
        assert!(Matrix::new(2, 2, vec![1.0, 2.0, 3.0]).is_err());
        assert_eq!(Matrix::new(1, 2, vec![1.0, f64::NAN]), Err(crate::Error::NonFinite));
    }

    #[test]
    fn gram_schmidt_orthonormal() {
        let x = gaussian_matrix(6, 4, Stream::new(9, 0));
        let q = gram_schmidt(&x);
        assert!(q.t_matmul(&q).minus(&Matrix::identity(4)).max_abs() < 1e-12);
    }
}
