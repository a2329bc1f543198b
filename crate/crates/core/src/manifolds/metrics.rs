use super::frame::{sample_orthogonal, Frame};
use crate::linalg::{det, Matrix};
use crate::mc;
use crate::rng::Stream;
use crate::transforms::{EstimateParams, TransformEstimate};

/// `|Cos(u, v)| = |u'v|_m = det(v'uu'v)^{1/2}`; zero when `m > k`.
///
/// ```
/// use stiefel::manifolds::{cos_metric, Frame};
/// use stiefel::linalg::Matrix;
/// let t: f64 = 0.3;
/// let u = Frame::new(Matrix::from_rows(&[&[1.0], &[0.0]]).unwrap()).unwrap();
/// let v = Frame::new(Matrix::from_rows(&[&[t.cos()], &[t.sin()]]).unwrap()).unwrap();
/// assert!((cos_metric(&u, &v) - t.cos()).abs() < 1e-15);
/// ```
pub fn cos_metric(u: &Frame, v: &Frame) -> f64 {
    if v.m() > u.m() {
        return 0.0;
    }
    cos_metric_raw(u.matrix(), v.matrix())
}

/// `|u'v|_m` on raw matrices.
pub fn cos_metric_raw(u: &Matrix, v: &Matrix) -> f64 {
    let p = u.t_matmul(v);
    det(&p.t_matmul(&p)).clamp(0.0, 1.0).sqrt()
}

/// `det(I_m - v'uu'v)` for frames of equal size.
pub fn sin_metric(u: &Frame, v: &Frame) -> f64 {
    assert_eq!(u.m(), v.m(), "sin_metric needs equal frame sizes");
    sin_metric_raw(u.matrix(), v.matrix())
}

pub fn sin_metric_raw(u: &Matrix, v: &Matrix) -> f64 {
    let p = u.t_matmul(v);
    let g = Matrix::identity(v.cols()).minus(&p.t_matmul(&p));
    det(&g).clamp(0.0, 1.0)
}

/// Average of `f(v β)` over Haar `β ∈ O(m)`; exact two-point average for `m = 1`.
pub fn average_right<F>(f: F, v: &Frame, stream: Stream, samples: usize) -> TransformEstimate
where
    F: Fn(&Frame) -> f64 + Sync,
{
    let params = EstimateParams { n: v.n(), m: v.m(), ..Default::default() };
    if v.m() == 1 {
        let mean = 0.5 * (f(v) + f(&v.negated()));
        return TransformEstimate::exact(mean, params);
    }
    let m = v.m();
    let mo = mc::estimate(samples, |i| {
        let beta = sample_orthogonal(m, &mut Stream::new(stream.seed, i as u64).rng());
        f(&v.right(&beta))
    });
    TransformEstimate::from_moments(&mo, stream.seed, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::{frame_complement, sample_stiefel};

    #[test]
    fn trivial_values() {
        let u = sample_stiefel(5, 2, Stream::new(1, 0));
        assert!((cos_metric(&u, &u) - 1.0).abs() < 1e-12);
        assert!(sin_metric(&u, &u).abs() < 1e-12);
        let c = frame_complement(&u).unwrap();
        let w = Frame::new(c.matrix().column_block(0, 2)).unwrap();
        assert!(cos_metric(&u, &w) < 1e-7);
        assert!((sin_metric(&u, &w) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sylvester_complement() {
        for s in 0..50 {
            let u = sample_stiefel(5, 2, Stream::new(s, 0));
            let v = sample_stiefel(5, 2, Stream::new(s, 1));
            let uc = frame_complement(&u).unwrap();
            let c = cos_metric(&uc, &v);
            assert!((sin_metric(&u, &v) - c * c).abs() < 1e-10);
        }
    }

    #[test]
    fn average_right_cases() {
        let v = sample_stiefel(4, 1, Stream::new(3, 0));
        let e = average_right(|w| *w.matrix().get(0, 0), &v, Stream::new(1, 0), 10);
        assert_eq!(e.mean, 0.0);
        assert_eq!(e.stderr, 0.0);

        let v = sample_stiefel(4, 2, Stream::new(3, 0));
        let inv = |w: &Frame| w.matrix().t_matmul(w.matrix()).trace();
        let e = average_right(inv, &v, Stream::new(1, 0), 100);
        assert!((e.mean - 2.0).abs() < 1e-12);
        assert!(e.stderr < 1e-12);

        // f(v) = (v_11)^2: two sample sizes agree
        let f = |w: &Frame| w.matrix().get(0, 0).powi(2);
        let a = average_right(f, &v, Stream::new(2, 0), 20_000);
        let b = average_right(f, &v, Stream::new(3, 0), 80_000);
        let exact = 0.5 * (v.matrix().get(0, 0).powi(2) + v.matrix().get(0, 1).powi(2));
        assert!((a.mean - b.mean).abs() < 4.0 * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt());
        assert!((b.mean - exact).abs() < 4.0 * b.stderr);
    }
}
