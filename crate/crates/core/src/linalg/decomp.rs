use nalgebra::{DMatrix, SymmetricEigen};

use super::matrix::{Mat, Matrix};
use crate::error::{Error, Result};
use crate::manifolds::Frame;

/// Relative singular-value threshold below which a matrix counts as rank deficient.
pub const RANK_TOL: f64 = 1e-10;

/// Singular values of `x`, descending.
pub fn singular_values(x: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = x.to_nalgebra().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn rank_gate(x: &Matrix) -> Result<()> {
    let s = singular_values(x);
    let big = s[0];
    let small = *s.last().unwrap();
    if big == 0.0 || small <= RANK_TOL * big {
        return Err(Error::RankDeficient { ratio: if big == 0.0 { 0.0 } else { small / big } });
    }
    Ok(())
}

/// Classical Gram-Schmidt with one reorthogonalization pass. Returns `(Q, R)`
/// with positive diagonal in `R`, or `None` if a column collapses.
pub(crate) fn cgs2(x: &Matrix) -> Option<(Matrix, Matrix)> {
    let (n, k) = x.shape();
    let mut q = Matrix::zeros(n, k);
    let mut r = Matrix::zeros(k, k);
    let mut col = vec![0.0; n];
    let scale = x.max_abs().max(f64::MIN_POSITIVE);
    for j in 0..k {
        for i in 0..n {
            col[i] = *x.get(i, j);
        }
        for _pass in 0..2 {
            for p in 0..j {
                let d: f64 = (0..n).map(|i| q.get(i, p) * col[i]).sum();
                for i in 0..n {
                    col[i] -= d * q.get(i, p);
                }
                let prev = *r.get(p, j);
                r.set(p, j, prev + d);
            }
        }
        let nn = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(nn > RANK_TOL * scale) {
            return None;
        }
        r.set(j, j, nn);
        for i in 0..n {
            q.set(i, j, col[i] / nn);
        }
    }
    Some((q, r))
}

/// QR factorization with strictly positive diagonal in `R`.
///
/// ```
/// use stiefel::linalg::{qr_positive, Matrix};
/// let x = Matrix::identity(3).scaled(2.0);
/// let (q, r) = qr_positive(&x).unwrap();
/// assert_eq!(q, Matrix::identity(3));
/// assert_eq!(r, x);
/// ```
pub fn qr_positive(x: &Matrix) -> Result<(Matrix, Matrix)> {
    if x.rows() < x.cols() {
        return Err(Error::Shape(format!("qr needs rows >= cols, got {}x{}", x.rows(), x.cols())));
    }
    rank_gate(x)?;
    cgs2(x).ok_or(Error::RankDeficient { ratio: 0.0 })
}

/// Symmetric positive definite matrix, stored symmetrized.
#[derive(Clone, Debug, PartialEq)]
pub struct SymPosDef {
    m: Matrix,
}

impl SymPosDef {
    /// Symmetrizes `(a + a')/2` and applies the eigenvalue gate
    /// `min eig > dim * eps * max eig`.
    pub fn new(a: Matrix) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::Shape("SymPosDef must be square".into()));
        }
        let n = a.rows();
        let m = Matrix::from_fn(n, n, |i, j| 0.5 * (a.get(i, j) + a.get(j, i)));
        let eig = SymmetricEigen::new(m.to_nalgebra()).eigenvalues;
        let max = eig.iter().copied().fold(f64::MIN, f64::max);
        let min = eig.iter().copied().fold(f64::MAX, f64::min);
        if !(max > 0.0) || min <= n as f64 * f64::EPSILON * max {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { m })
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix {
        self.m
    }
}

fn spectral_apply(r: &Matrix, f: impl Fn(f64) -> f64) -> Matrix {
    let e = SymmetricEigen::new(r.to_nalgebra());
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(f));
    let out = &e.eigenvectors * d * e.eigenvectors.transpose();
    let n = r.rows();
    Matrix::from_fn(n, n, |i, j| 0.5 * (out[(i, j)] + out[(j, i)]))
}

/// `(r^{1/2}, r^{-1/2})` by eigendecomposition.
pub fn sqrt_inv_sqrt(r: &SymPosDef) -> Result<(SymPosDef, SymPosDef)> {
    let s = spectral_apply(r.matrix(), f64::sqrt);
    let si = spectral_apply(r.matrix(), |v| 1.0 / v.sqrt());
    Ok((SymPosDef { m: s }, SymPosDef { m: si }))
}

/// `x = v r^{1/2}` with `v` a frame and `r = x'x`.
pub fn polar_decompose(x: &Matrix) -> Result<(Frame, SymPosDef)> {
    if x.rows() < x.cols() {
        return Err(Error::Shape("polar decomposition needs rows >= cols".into()));
    }
    rank_gate(x)?;
    let r = SymPosDef::new(x.t_matmul(x))?;
    let (_, ri) = sqrt_inv_sqrt(&r)?;
    let v = x.matmul(ri.matrix());
    Ok((Frame::new(v)?, r))
}

/// `|x|_m` as the product of singular values (independent of the Gram determinant path).
pub fn volume_svd(x: &Matrix) -> f64 {
    singular_values(x).iter().product()
}

/// `|x|_m = det(x'x)^{1/2}`.
pub fn volume(x: &Matrix) -> f64 {
    super::matrix::det(&x.t_matmul(x)).max(0.0).sqrt()
}

/// Lower Cholesky factor of a symmetric positive definite matrix over any scalar.
pub fn cholesky<S: super::Scalar>(a: &Mat<S>) -> Mat<S> {
    let n = a.rows();
    let zero = a.get(0, 0).zero_like();
    let mut l = Mat::from_fn(n, n, |_, _| zero.clone());
    for j in 0..n {
        let mut d = a.get(j, j).clone();
        for p in 0..j {
            d = d.minus(&l.get(j, p).times(l.get(j, p)));
        }
        let djj = d.sqrt();
        let inv = djj.recip();
        l.set(j, j, djj);
        for i in j + 1..n {
            let mut s = a.get(i, j).clone();
            for p in 0..j {
                s = s.minus(&l.get(i, p).times(l.get(j, p)));
            }
            l.set(i, j, s.times(&inv));
        }
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian_matrix, Stream};

    #[test]
    fn qr_identity_and_scaling() {
        let (q, r) = qr_positive(&Matrix::identity(3)).unwrap();
        assert_eq!(q, Matrix::identity(3));
        assert_eq!(r, Matrix::identity(3));
        let (q, r) = qr_positive(&Matrix::identity(2).scaled(2.0)).unwrap();
        assert_eq!(q, Matrix::identity(2));
        assert_eq!(r, Matrix::identity(2).scaled(2.0));
    }

    #[test]
    fn qr_random_invariants() {
        let x = gaussian_matrix(4, 2, Stream::new(7, 0));
        let (q, r) = qr_positive(&x).unwrap();
        assert!(q.t_matmul(&q).minus(&Matrix::identity(2)).max_abs() < 1e-12);
        assert_eq!(*r.get(1, 0), 0.0);
        assert!(*r.get(0, 0) > 0.0 && *r.get(1, 1) > 0.0);
        assert!(q.matmul(&r).minus(&x).max_abs() < 1e-12);
    }

    #[test]
    fn qr_rejects_rank_deficient() {
        let x = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0], &[3.0, 6.0]]).unwrap();
        assert!(matches!(qr_positive(&x), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn qr_idempotent_on_frames() {
        let (q, _) = qr_positive(&gaussian_matrix(5, 3, Stream::new(3, 1))).unwrap();
        let (q2, r2) = qr_positive(&q).unwrap();
        assert!(q2.minus(&q).max_abs() < 1e-12);
        assert!(r2.minus(&Matrix::identity(3)).max_abs() < 1e-12);
    }

    #[test]
    fn sqrt_diag_and_dense() {
        let r = SymPosDef::new(Matrix::diag(&[4.0, 9.0])).unwrap();
        let (s, si) = sqrt_inv_sqrt(&r).unwrap();
        assert!(s.matrix().minus(&Matrix::diag(&[2.0, 3.0])).max_abs() < 1e-14);
        assert!(si.matrix().minus(&Matrix::diag(&[0.5, 1.0 / 3.0])).max_abs() < 1e-14);

        let a = Matrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let r = SymPosDef::new(a.clone()).unwrap();
        let (s, si) = sqrt_inv_sqrt(&r).unwrap();
        assert!(s.matrix().matmul(s.matrix()).minus(&a).max_abs() < 1e-12);
        assert!(s.matrix().matmul(si.matrix()).minus(&Matrix::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn not_positive_definite() {
        let a = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
        assert_eq!(SymPosDef::new(a), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn polar_cases() {
        let v0 = Matrix::top_frame(4, 2);
        let (v, r) = polar_decompose(&v0.scaled(3.0)).unwrap();
        assert!(v.matrix().minus(&v0).max_abs() < 1e-14);
        assert!(r.matrix().minus(&Matrix::identity(2).scaled(9.0)).max_abs() < 1e-12);

        let x = gaussian_matrix(5, 2, Stream::new(11, 0));
        let (v, r) = polar_decompose(&x).unwrap();
        let (s, _) = sqrt_inv_sqrt(&r).unwrap();
        let res = v.matrix().matmul(s.matrix()).minus(&x).frobenius() / x.frobenius();
        assert!(res < 1e-10);
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = Matrix::from_rows(&[&[4.0, 2.0, 0.4], &[2.0, 3.0, 0.5], &[0.4, 0.5, 2.0]]).unwrap();
        let l = cholesky(&a);
        assert!(l.matmul(&l.transpose()).minus(&a).max_abs() < 1e-14);
    }
}
