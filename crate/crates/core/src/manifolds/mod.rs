//! Stiefel frames, Haar sampling, frame completion and the cosine/sine metrics.

mod complement;
mod frame;
mod metrics;

pub use complement::{
    frame_complement, frame_complement_with, rotation_to_frame, rotation_to_frame_with, Completion, LocalChart,
};
pub use frame::{sample_orthogonal, sample_stiefel, sample_stiefel_from, Frame, Rotation, ORTHO_TOL};
pub use metrics::{average_right, cos_metric, cos_metric_raw, sin_metric, sin_metric_raw};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::mc;
    use crate::rng::{gaussian_matrix, Stream};
    use proptest::prelude::*;

    #[test]
    fn haar_second_moment() {
        for (n, m) in [(3, 1), (4, 2), (3, 3)] {
            let mo = mc::estimate(200_000, |i| sample_stiefel(n, m, Stream::new(77, i as u64)).matrix().get(0, 0).powi(2));
            assert!((mo.mean - 1.0 / n as f64).abs() < 4.0 * mo.stderr(), "n={n} m={m}");
        }
    }

    #[test]
    fn haar_entries_centered_for_square() {
        let mo = mc::estimate(100_000, |i| *sample_stiefel(3, 3, Stream::new(5, i as u64)).matrix().get(1, 2));
        assert!(mo.mean.abs() < 4.0 * mo.stderr());
    }

    #[test]
    fn left_invariance_two_sample() {
        let rho = sample_orthogonal(4, &mut Stream::new(99, 0).rng());
        let a = mc::estimate(100_000, |i| sample_stiefel(4, 1, Stream::new(1, i as u64)).matrix().get(0, 0).powi(4));
        let b = mc::estimate(100_000, |i| {
            rho.matmul(sample_stiefel(4, 1, Stream::new(2, i as u64)).matrix()).get(0, 0).powi(4)
        });
        let s = (a.stderr().powi(2) + b.stderr().powi(2)).sqrt();
        assert!((a.mean - b.mean).abs() < 4.0 * s);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cos_basis_independent(seed in 0u64..100_000) {
            let u = sample_stiefel(6, 3, Stream::new(seed, 0));
            let v = sample_stiefel(6, 2, Stream::new(seed, 1));
            let a = sample_orthogonal(3, &mut Stream::new(seed, 2).rng());
            let b = sample_orthogonal(2, &mut Stream::new(seed, 3).rng());
            let c = cos_metric(&u, &v);
            prop_assert!((cos_metric(&u.right(&a), &v) - c).abs() < 1e-10);
            prop_assert!((cos_metric(&u, &v.right(&b)) - c).abs() < 1e-10);
        }

        #[test]
        fn cos_orthogonal_invariance(seed in 0u64..100_000) {
            let u = sample_stiefel(5, 2, Stream::new(seed, 0));
            let v = sample_stiefel(5, 2, Stream::new(seed, 1));
            let g = sample_orthogonal(5, &mut Stream::new(seed, 2).rng());
            let gu = Frame::new(g.matmul(u.matrix())).unwrap();
            let gv = Frame::new(g.matmul(v.matrix())).unwrap();
            prop_assert!((cos_metric(&gu, &gv) - cos_metric(&u, &v)).abs() < 1e-10);
        }

        #[test]
        fn cos_on_subspaces_ignores_basis_choice(seed in 0u64..100_000) {
            // for a general invertible g, two different orthonormal bases of g·span(u)
            let u = sample_stiefel(5, 2, Stream::new(seed, 0));
            let v = sample_stiefel(5, 2, Stream::new(seed, 1));
            let g = gaussian_matrix(5, 5, Stream::new(seed, 2)).plus(&Matrix::identity(5).scaled(3.0));
            let gu = g.matmul(u.matrix());
            let gv = g.matmul(v.matrix());
            let (pu, _) = crate::linalg::polar_decompose(&gu).unwrap();
            let (pv, _) = crate::linalg::polar_decompose(&gv).unwrap();
            let qu = Frame::orthonormalize(&gu).unwrap();
            let qv = Frame::orthonormalize(&gv).unwrap();
            prop_assert!((cos_metric(&pu, &pv) - cos_metric(&qu, &qv)).abs() < 1e-10);
        }

        #[test]
        fn sin_in_unit_interval(seed in 0u64..100_000) {
            let u = sample_stiefel(6, 2, Stream::new(seed, 0));
            let v = sample_stiefel(6, 2, Stream::new(seed, 1));
            let s = sin_metric(&u, &v);
            prop_assert!((0.0..=1.0).contains(&s));
        }
    }
}
