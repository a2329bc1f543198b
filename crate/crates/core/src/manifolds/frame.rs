use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cgs2, det, Matrix};
use crate::rng::{gaussian_from, Stream};

/// Orthonormality tolerance for frames and rotations.
pub const ORTHO_TOL: f64 = 1e-10;

/// A point of the Stiefel manifold `V(n,m)`: an `n×m` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrameRepr", into = "FrameRepr")]
pub struct Frame {
    matrix: Matrix,
}

#[derive(Serialize, Deserialize)]
struct FrameRepr {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TryFrom<FrameRepr> for Frame {
    type Error = Error;
    fn try_from(r: FrameRepr) -> Result<Self> {
        Frame::new(Matrix::new(r.rows, r.cols, r.data)?)
    }
}

impl From<Frame> for FrameRepr {
    fn from(f: Frame) -> Self {
        FrameRepr { rows: f.n(), cols: f.m(), data: f.matrix.data().to_vec() }
    }
}

fn ortho_defect(x: &Matrix) -> f64 {
    x.t_matmul(x).minus(&Matrix::identity(x.cols())).max_abs()
}

impl Frame {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if matrix.rows() < matrix.cols() {
            return Err(Error::Shape(format!("frame must have m <= n, got {}x{}", matrix.rows(), matrix.cols())));
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        let d = ortho_defect(&matrix);
        if d >= ORTHO_TOL {
            return Err(Error::InvalidParams(format!("columns are not orthonormal (defect {d:.2e})")));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn new_unchecked(matrix: Matrix) -> Self {
        debug_assert!(ortho_defect(&matrix) < 1e-8);
        Self { matrix }
    }

    /// Orthonormal basis of the column span of a full-rank `x` (positive-diagonal QR).
    pub fn orthonormalize(x: &Matrix) -> Result<Self> {
        let (q, _) = crate::linalg::qr_positive(x)?;
        Ok(Self { matrix: q })
    }

    /// `v0 = [I_m; 0]`.
    pub fn top(n: usize, m: usize) -> Self {
        Self { matrix: Matrix::top_frame(n, m) }
    }

    /// `u0 = [0; I_k]`.
    pub fn bottom(n: usize, k: usize) -> Self {
        Self { matrix: Matrix::bottom_frame(n, k) }
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn m(&self) -> usize {
        self.matrix.cols()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    /// Right action `v ↦ v β` for `β ∈ O(m)`.
    pub fn right(&self, beta: &Matrix) -> Self {
        Self { matrix: self.matrix.matmul(beta) }
    }

    pub fn negated(&self) -> Self {
        Self { matrix: self.matrix.scaled(-1.0) }
    }
}

/// An element of `O(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    matrix: Matrix,
    det_sign: f64,
}

impl Rotation {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::Shape("rotation must be square".into()));
        }
        if ortho_defect(&matrix) >= ORTHO_TOL {
            return Err(Error::InvalidParams("matrix is not orthogonal".into()));
        }
        let det_sign = det(&matrix).signum();
        Ok(Self { matrix, det_sign })
    }

    pub(crate) fn new_unchecked(matrix: Matrix) -> Self {
        let det_sign = det(&matrix).signum();
        Self { matrix, det_sign }
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn det_sign(&self) -> f64 {
        self.det_sign
    }

    pub fn apply(&self, v: &Frame) -> Frame {
        Frame { matrix: self.matrix.matmul(&v.matrix) }
    }
}

/// Haar-distributed frame from a Gaussian matrix and positive-diagonal QR.
///
/// ```
/// use stiefel::manifolds::sample_stiefel;
/// use stiefel::rng::Stream;
/// let v = sample_stiefel(5, 2, Stream::new(1, 0));
/// assert_eq!((v.n(), v.m()), (5, 2));
/// ```
pub fn sample_stiefel(n: usize, m: usize, stream: Stream) -> Frame {
    assert!(1 <= m && m <= n, "sample_stiefel needs 1 <= m <= n");
    sample_stiefel_from(n, m, &mut stream.rng())
}

pub fn sample_stiefel_from<R: rand::Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Frame {
    loop {
        let x = gaussian_from(n, m, rng);
        if let Some((q, _)) = cgs2(&x) {
            return Frame { matrix: q };
        }
    }
}

/// Haar element of `O(n)`.
pub fn sample_orthogonal<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    sample_stiefel_from(n, n, rng).into_matrix()
}
