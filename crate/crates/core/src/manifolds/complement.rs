use super::frame::{Frame, Rotation};
use crate::error::{Error, Result};
use crate::linalg::{gram_schmidt, Mat, Matrix, Scalar};

/// Smallest admissible residual norm of a reference column after projecting
/// out the columns before it.
const COMPLETION_TOL: f64 = 1e-6;

/// Which fixed reference basis feeds the completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Completion {
    /// `e_1, e_2, …, e_n`, subsets in lexicographic order.
    #[default]
    Standard,
    /// `e_n, e_{n-1}, …, e_1`, subsets in lexicographic order.
    Reversed,
}

fn combinations(n: usize, r: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut idx: Vec<usize> = (0..r).collect();
    let mut done = r > n;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = idx.clone();
        let mut i = r;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            if idx[i] < n - r + i {
                idx[i] += 1;
                for t in i + 1..r {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

/// Orthonormal frame spanning the orthogonal complement of `span(u)`, using
/// the standard reference basis.
pub fn frame_complement(u: &Frame) -> Result<Frame> {
    frame_complement_with(u, Completion::Standard)
}

/// Orthogonal complement by Gram-Schmidt of `[u | e_S]` for the first
/// reference subset `S` that is well separated from `span(u)`.
pub fn frame_complement_with(u: &Frame, rule: Completion) -> Result<Frame> {
    let (n, k) = (u.n(), u.m());
    if k >= n {
        return Err(Error::Shape("complement needs k < n".into()));
    }
    let r = n - k;
    let basis = |i: usize| match rule {
        Completion::Standard => i,
        Completion::Reversed => n - 1 - i,
    };
    let um = u.matrix();
    'outer: for combo in combinations(n, r) {
        let mut cols: Vec<Vec<f64>> = (0..k).map(|j| (0..n).map(|i| *um.get(i, j)).collect()).collect();
        for &c in &combo {
            let mut w = vec![0.0; n];
            w[basis(c)] = 1.0;
            for _pass in 0..2 {
                for q in &cols {
                    let d: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi -= d * qi;
                    }
                }
            }
            let nn = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            if nn < COMPLETION_TOL {
                continue 'outer;
            }
            cols.push(w.into_iter().map(|v| v / nn).collect());
        }
        let out = Matrix::from_fn(n, r, |i, j| cols[k + j][i]);
        return Ok(Frame::new_unchecked(out));
    }
    Err(Error::DegenerateCompletion)
}

/// `g ∈ O(n)` with `g · anchor = u`, built as `[u | ũ][a | ã]'`.
///
/// For `u = anchor` this is the identity.
pub fn rotation_to_frame(u: &Frame, anchor: &Frame) -> Result<Rotation> {
    rotation_to_frame_with(u, anchor, Completion::Standard)
}

pub fn rotation_to_frame_with(u: &Frame, anchor: &Frame, rule: Completion) -> Result<Rotation> {
    if u.n() != anchor.n() || u.m() != anchor.m() {
        return Err(Error::Shape("frame and anchor differ in shape".into()));
    }
    if u.m() == u.n() {
        return Ok(Rotation::new_unchecked(u.matrix().matmul(&anchor.matrix().transpose())));
    }
    let uc = frame_complement_with(u, rule)?;
    let ac = frame_complement_with(anchor, rule)?;
    let full_u = u.matrix().hstack(uc.matrix());
    let full_a = anchor.matrix().hstack(ac.matrix());
    Ok(Rotation::new_unchecked(full_u.matmul(&full_a.transpose())))
}

/// A rotation field `v ↦ g(v)` with `g(v) · anchor = v`, smooth near a base frame.
///
/// At the base it coincides with [`rotation_to_frame`]. Near it the complement
/// columns are the Gram-Schmidt frame of the base complement projected off
/// `span(v)`, which is smooth in `v` and works on jets.
#[derive(Debug, Clone)]
pub struct LocalChart {
    complement: Matrix,
    /// `[a | ã]'`.
    anchor_t: Matrix,
}

impl LocalChart {
    pub fn new(base: &Frame, anchor: &Frame) -> Result<Self> {
        if base.n() != anchor.n() || base.m() != anchor.m() || base.m() >= base.n() {
            return Err(Error::Shape("chart needs matching frames with m < n".into()));
        }
        let complement = frame_complement(base)?.into_matrix();
        let ac = frame_complement(anchor)?;
        let anchor_t = anchor.matrix().hstack(ac.matrix()).transpose();
        Ok(Self { complement, anchor_t })
    }

    /// `[v | C(v)]`, an orthogonal matrix over the scalar type of `v`.
    pub fn adapted_basis<S: Scalar>(&self, v: &Mat<S>) -> Mat<S> {
        let vt_c = v.transpose().right_mul_f64(&self.complement);
        let proj = v.matmul(&vt_c);
        let template = v.get(0, 0);
        let m = self.complement.lift(template).minus(&proj);
        let c = gram_schmidt(&m);
        let (n, q) = v.shape();
        Mat::from_fn(n, n, |i, j| if j < q { v.get(i, j).clone() } else { c.get(i, j - q).clone() })
    }

    /// The anchor-side factor `[a | ã]'`; `g(v) w = adapted_basis(v) · ([a|ã]' w)`.
    pub fn anchor_transpose(&self) -> &Matrix {
        &self.anchor_t
    }

    pub fn rotation<S: Scalar>(&self, v: &Mat<S>) -> Mat<S> {
        self.adapted_basis(v).right_mul_f64(&self.anchor_t)
    }
}
