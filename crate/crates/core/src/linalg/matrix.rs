use std::fmt;

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Dense row-major matrix over any [`Scalar`].
///
/// `Mat<f64>` (alias [`Matrix`]) is the public value type; jet-valued
/// matrices appear only inside the differentiation machinery.
#[derive(Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

pub type Matrix = Mat<f64>;

impl<S: fmt::Debug> fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<S> Mat<S> {
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    /// Build without validation. Callers guarantee `data.len() == rows * cols`.
    pub(crate) fn from_parts(rows: usize, cols: usize, data: Vec<S>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }
}

impl<S: Scalar> Mat<S> {
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// `self * o`.
    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matmul shape mismatch");
        Self::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = self.get(i, 0).times(o.get(0, j));
            for l in 1..self.cols {
                acc = acc.plus(&self.get(i, l).times(o.get(l, j)));
            }
            acc
        })
    }

    /// `self' * o`.
    pub fn t_matmul(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows, "t_matmul shape mismatch");
        Self::from_fn(self.cols, o.cols, |i, j| {
            let mut acc = self.get(0, i).times(o.get(0, j));
            for l in 1..self.rows {
                acc = acc.plus(&self.get(l, i).times(o.get(l, j)));
            }
            acc
        })
    }

    pub fn plus(&self, o: &Self) -> Self {
        assert_eq!(self.shape(), o.shape());
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).plus(o.get(i, j)))
    }

    pub fn minus(&self, o: &Self) -> Self {
        assert_eq!(self.shape(), o.shape());
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).minus(o.get(i, j)))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).scale(c))
    }

    pub fn trace(&self) -> S {
        let mut acc = self.get(0, 0).clone();
        for i in 1..self.rows.min(self.cols) {
            acc = acc.plus(self.get(i, i));
        }
        acc
    }

    /// Real-valued projection (constant terms of every entry).
    pub fn values(&self) -> Matrix {
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).value())
    }

    /// `a * self` for a plain float matrix `a`.
    pub fn left_mul_f64(&self, a: &Matrix) -> Self {
        assert_eq!(a.cols, self.rows, "left_mul_f64 shape mismatch");
        let zero = self.data[0].zero_like();
        Self::from_fn(a.rows, self.cols, |i, j| {
            let mut acc = zero.clone();
            for l in 0..a.cols {
                let c = *a.get(i, l);
                if c != 0.0 {
                    acc = acc.plus(&self.get(l, j).scale(c));
                }
            }
            acc
        })
    }

    /// `self * b` for a plain float matrix `b`.
    pub fn right_mul_f64(&self, b: &Matrix) -> Self {
        assert_eq!(self.cols, b.rows, "right_mul_f64 shape mismatch");
        let zero = self.data[0].zero_like();
        Self::from_fn(self.rows, b.cols, |i, j| {
            let mut acc = zero.clone();
            for l in 0..self.cols {
                let c = *b.get(l, j);
                if c != 0.0 {
                    acc = acc.plus(&self.get(i, l).scale(c));
                }
            }
            acc
        })
    }

    pub fn column_block(&self, start: usize, count: usize) -> Self {
        Self::from_fn(self.rows, count, |i, j| self.get(i, start + j).clone())
    }
}

impl Matrix {
    /// Validated constructor: shape must match and all entries be finite.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape("dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "expected {} entries for {}x{}, got {}",
                rows * cols,
                rows,
                cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(r, c, rows.iter().flat_map(|row| row.iter().copied()).collect())
    }

    pub fn diag(d: &[f64]) -> Self {
        Self::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    /// `[I_m; 0]`, the anchor `v0` in V(n,m).
    pub fn top_frame(n: usize, m: usize) -> Self {
        Self::from_fn(n, m, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// `[0; I_k]`, the anchor `u0` in V(n,k).
    pub fn bottom_frame(n: usize, k: usize) -> Self {
        Self::from_fn(n, k, |i, j| if i == n - k + j { 1.0 } else { 0.0 })
    }

    pub fn lift<S: Scalar>(&self, template: &S) -> Mat<S> {
        Mat::from_fn(self.rows, self.cols, |i, j| template.constant_like(*self.get(i, j)))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn hstack(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.rows, o.rows);
        Self::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                *self.get(i, j)
            } else {
                *o.get(i, j - self.cols)
            }
        })
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        Self::from_fn(self.rows, idx.len(), |i, j| *self.get(i, idx[j]))
    }

    /// Place `block` at rows/cols offset `(r0, c0)` inside an identity of size `n`.
    pub fn block_identity(n: usize, r0: usize, block: &Matrix) -> Matrix {
        Self::from_fn(n, n, |i, j| {
            let in_block = i >= r0 && j >= r0 && i < r0 + block.rows && j < r0 + block.cols;
            if in_block {
                *block.get(i - r0, j - r0)
            } else if i == j {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Stack `top` over zero rows to reach `n` rows.
    pub fn pad_rows(top: &Matrix, n: usize) -> Matrix {
        Self::from_fn(n, top.cols, |i, j| if i < top.rows { *top.get(i, j) } else { 0.0 })
    }

    /// Zero rows followed by `bottom`, `n` rows in total.
    pub fn pad_rows_top(bottom: &Matrix, n: usize) -> Matrix {
        let off = n - bottom.rows;
        Self::from_fn(n, bottom.cols, |i, j| if i >= off { *bottom.get(i - off, j) } else { 0.0 })
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &nalgebra::DMatrix<f64>) -> Matrix {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

/// Determinant. Closed forms up to 3x3 (cheap on jets), pivoted LU beyond.
pub fn det<S: Scalar>(a: &Mat<S>) -> S {
    assert_eq!(a.rows, a.cols, "det of non-square matrix");
    let g = |i, j| a.get(i, j);
    match a.rows {
        1 => g(0, 0).clone(),
        2 => g(0, 0).times(g(1, 1)).minus(&g(0, 1).times(g(1, 0))),
        3 => {
            let c0 = g(1, 1).times(g(2, 2)).minus(&g(1, 2).times(g(2, 1)));
            let c1 = g(1, 0).times(g(2, 2)).minus(&g(1, 2).times(g(2, 0)));
            let c2 = g(1, 0).times(g(2, 1)).minus(&g(1, 1).times(g(2, 0)));
            g(0, 0).times(&c0).minus(&g(0, 1).times(&c1)).plus(&g(0, 2).times(&c2))
        }
        n => {
            let mut m = a.clone();
            let mut acc = a.data[0].constant_like(1.0);
            for c in 0..n {
                let p = (c..n)
                    .max_by(|&x, &y| m.get(x, c).value().abs().total_cmp(&m.get(y, c).value().abs()))
                    .unwrap();
                if m.get(p, c).value() == 0.0 {
                    return a.data[0].zero_like();
                }
                if p != c {
                    for j in 0..n {
                        m.data.swap(p * n + j, c * n + j);
                    }
                    acc = acc.negate();
                }
                let piv = m.get(c, c).clone();
                acc = acc.times(&piv);
                let inv = piv.recip();
                for r in c + 1..n {
                    let f = m.get(r, c).times(&inv);
                    for j in c + 1..n {
                        let v = m.get(r, j).minus(&f.times(m.get(c, j)));
                        m.set(r, j, v);
                    }
                }
            }
            acc
        }
    }
}

/// Inverse of a square matrix. Adjugate formulas up to 2x2, Gauss-Jordan beyond.
pub fn inverse<S: Scalar>(a: &Mat<S>) -> Mat<S> {
    let n = a.rows;
    assert_eq!(n, a.cols, "inverse of non-square matrix");
    match n {
        1 => Mat::from_parts(1, 1, vec![a.data[0].recip()]),
        2 => {
            let d = det(a).recip();
            Mat::from_parts(
                2,
                2,
                vec![
                    a.get(1, 1).times(&d),
                    a.get(0, 1).times(&d).negate(),
                    a.get(1, 0).times(&d).negate(),
                    a.get(0, 0).times(&d),
                ],
            )
        }
        _ => {
            let one = a.data[0].constant_like(1.0);
            let zero = a.data[0].zero_like();
            let mut m = a.clone();
            let mut inv = Mat::from_fn(n, n, |i, j| if i == j { one.clone() } else { zero.clone() });
            for c in 0..n {
                let p = (c..n)
                    .max_by(|&x, &y| m.get(x, c).value().abs().total_cmp(&m.get(y, c).value().abs()))
                    .unwrap();
                if p != c {
                    for j in 0..n {
                        m.data.swap(p * n + j, c * n + j);
                        inv.data.swap(p * n + j, c * n + j);
                    }
                }
                let r = m.get(c, c).recip();
                for j in 0..n {
                    let v = m.get(c, j).times(&r);
                    m.set(c, j, v);
                    let w = inv.get(c, j).times(&r);
                    inv.set(c, j, w);
                }
                for i in 0..n {
                    if i == c {
                        continue;
                    }
                    let f = m.get(i, c).clone();
                    for j in 0..n {
                        let v = m.get(i, j).minus(&f.times(m.get(c, j)));
                        m.set(i, j, v);
                        let w = inv.get(i, j).minus(&f.times(inv.get(c, j)));
                        inv.set(i, j, w);
                    }
                }
            }
            inv
        }
    }
}

/// Modified Gram-Schmidt: an orthonormal basis of the column span of `a`,
/// smooth in `a` wherever `a` has full column rank.
pub fn gram_schmidt<S: Scalar>(a: &Mat<S>) -> Mat<S> {
    let (n, k) = a.shape();
    let mut cols: Vec<Vec<S>> = (0..k).map(|j| (0..n).map(|i| a.get(i, j).clone()).collect()).collect();
    for j in 0..k {
        for p in 0..j {
            let mut d = cols[p][0].times(&cols[j][0]);
            for i in 1..n {
                d = d.plus(&cols[p][i].times(&cols[j][i]));
            }
            for i in 0..n {
                let v = cols[j][i].minus(&cols[p][i].times(&d));
                cols[j][i] = v;
            }
        }
        let mut nn = cols[j][0].times(&cols[j][0]);
        for i in 1..n {
            nn = nn.plus(&cols[j][i].times(&cols[j][i]));
        }
        let r = nn.powf(-0.5);
        for i in 0..n {
            let v = cols[j][i].times(&r);
            cols[j][i] = v;
        }
    }
    Mat::from_fn(n, k, |i, j| cols[j][i].clone())
}

/// `|x|_m^p = det(x'x)^{p/2}`.
pub fn gram_power<S: Scalar>(x: &Mat<S>, p: f64) -> S {
    det(&x.t_matmul(x)).powf(p / 2.0)
}
