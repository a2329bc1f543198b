use crate::error::{Error, Result};
use crate::linalg::{det, inverse, Mat, Matrix, Scalar};
use crate::manifolds::Frame;

use super::oracle::gegenbauer_monic;

/// Catalog entries. Each is a right-`O(m)`-invariant function on `V(n,m)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind {
    /// `f ≡ 1`.
    Constant,
    /// `f(v) = tr(v'Sv)`.
    TraceQuadratic { s: Matrix },
    /// `f(v) = det(v'Sv)`.
    DetQuadratic { s: Matrix },
    /// `f(v) = |a'v|_m^{2p}`.
    CosinePower { a: Frame, p: u32 },
    /// Even-degree zonal harmonic `H_d(e·v)` on the sphere (`m = 1`).
    SphereHarmonic { d: u32, direction: Vec<f64> },
}

/// A smooth right-invariant function on `V(n,m)` with a closed-form
/// homogeneous extension `E_λ f(x) = |x|_m^λ f(x(x'x)^{-1/2})`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantFunction {
    n: usize,
    m: usize,
    kind: FunctionKind,
    gegenbauer: Vec<f64>,
}

fn symmetric(s: &Matrix, n: usize) -> Result<()> {
    if s.shape() != (n, n) {
        return Err(Error::InvalidParams(format!("S must be {n}x{n}")));
    }
    for i in 0..n {
        for j in 0..i {
            if s.get(i, j) != s.get(j, i) {
                return Err(Error::InvalidParams("S must be symmetric".into()));
            }
        }
    }
    Ok(())
}

/// Build a catalog function on `V(n,m)`, validating parameters.
pub fn make_test_function(n: usize, m: usize, kind: FunctionKind) -> Result<InvariantFunction> {
    if m == 0 || m > n {
        return Err(Error::InvalidParams(format!("need 1 <= m <= n, got n={n}, m={m}")));
    }
    let mut gegenbauer = Vec::new();
    match &kind {
        FunctionKind::Constant => {}
        FunctionKind::TraceQuadratic { s } => symmetric(s, n)?,
        FunctionKind::DetQuadratic { s } => {
            symmetric(s, n)?;
            crate::linalg::SymPosDef::new(s.clone())
                .map_err(|_| Error::InvalidParams("det_quadratic needs positive definite S".into()))?;
        }
        FunctionKind::CosinePower { a, p } => {
            if a.n() != n || a.m() < m {
                return Err(Error::InvalidParams(format!("cosine_power frame must be {n}xk with k >= {m}")));
            }
            if *p == 0 {
                return Err(Error::InvalidParams("cosine_power needs p >= 1".into()));
            }
        }
        FunctionKind::SphereHarmonic { d, direction } => {
            if m != 1 {
                return Err(Error::InvalidParams("sphere_harmonic needs m = 1".into()));
            }
            if d % 2 == 1 {
                return Err(Error::InvalidParams("sphere_harmonic degree must be even".into()));
            }
            if direction.len() != n {
                return Err(Error::InvalidParams("direction has wrong length".into()));
            }
            let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParams("direction must be a unit vector".into()));
            }
            gegenbauer = gegenbauer_monic(n, *d as usize);
        }
    }
    Ok(InvariantFunction { n, m, kind, gegenbauer })
}

impl InvariantFunction {
    pub fn constant(n: usize, m: usize) -> Self {
        make_test_function(n, m, FunctionKind::Constant).expect("constant is always valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    /// Every catalog entry is right-`O(m)`-invariant.
    pub fn right_invariant(&self) -> bool {
        true
    }

    pub fn harmonic_degree(&self) -> Option<u32> {
        match &self.kind {
            FunctionKind::SphereHarmonic { d, .. } => Some(*d),
            FunctionKind::Constant if self.m == 1 => Some(0),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, FunctionKind::Constant)
    }

    /// `f(v)` on a frame, given as its matrix.
    pub fn eval_frame(&self, v: &Matrix) -> f64 {
        match &self.kind {
            FunctionKind::Constant => 1.0,
            FunctionKind::TraceQuadratic { s } => v.t_matmul(&s.matmul(v)).trace(),
            FunctionKind::DetQuadratic { s } => det(&v.t_matmul(&s.matmul(v))),
            FunctionKind::CosinePower { a, p } => {
                let c = a.matrix().t_matmul(v);
                det(&c.t_matmul(&c)).max(0.0).powi(*p as i32)
            }
            FunctionKind::SphereHarmonic { d, direction } => {
                let t: f64 = (0..self.n).map(|i| direction[i] * v.get(i, 0)).sum();
                self.gegenbauer.iter().enumerate().map(|(k, c)| c * t.powi((*d as i32) - 2 * k as i32)).sum()
            }
        }
    }

    pub fn eval(&self, v: &Frame) -> f64 {
        self.eval_frame(v.matrix())
    }

    /// Closed-form homogeneous extension `E_λ f` at a full-rank `x`.
    pub fn eval_extension<S: Scalar>(&self, x: &Mat<S>, lambda: f64) -> S {
        let g = x.t_matmul(x);
        let dg = det(&g);
        match &self.kind {
            FunctionKind::Constant => dg.powf(lambda / 2.0),
            FunctionKind::TraceQuadratic { s } => {
                let h = x.t_matmul(&x.left_mul_f64(s));
                let t = inverse(&g).matmul(&h).trace();
                dg.powf(lambda / 2.0).times(&t)
            }
            FunctionKind::DetQuadratic { s } => {
                let h = x.t_matmul(&x.left_mul_f64(s));
                det(&h).times(&dg.powf(lambda / 2.0 - 1.0))
            }
            FunctionKind::CosinePower { a, p } => {
                let c = x.left_mul_f64(&a.matrix().transpose());
                let dc = det(&c.t_matmul(&c));
                let mut num = dc.clone();
                for _ in 1..*p {
                    num = num.times(&dc);
                }
                num.times(&dg.powf(lambda / 2.0 - *p as f64))
            }
            FunctionKind::SphereHarmonic { d, direction } => {
                let mut t = x.get(0, 0).scale(direction[0]);
                for i in 1..self.n {
                    t = t.plus(&x.get(i, 0).scale(direction[i]));
                }
                let r2 = dg.clone();
                let d = *d as usize;
                let t2 = t.times(&t);
                // Σ c_k t^{d-2k} r^{2k}, Horner in t²
                let mut rp = r2.constant_like(1.0);
                let mut terms = Vec::with_capacity(self.gegenbauer.len());
                for (k, c) in self.gegenbauer.iter().enumerate() {
                    if k > 0 {
                        rp = rp.times(&r2);
                    }
                    terms.push(rp.scale(*c));
                }
                let mut acc = terms[0].clone();
                for k in 1..=d / 2 {
                    acc = acc.times(&t2).plus(&terms[k]);
                }
                acc.times(&r2.powf((lambda - d as f64) / 2.0))
            }
        }
    }
}

/// Anything that can be integrated over a Stiefel manifold.
pub trait FrameFunction: Sync {
    /// Frame size `m` of the domain `V(n,m)`.
    fn cols(&self) -> usize;
    fn eval_frame(&self, v: &Matrix) -> f64;
    fn right_invariant(&self) -> bool;
}

impl FrameFunction for InvariantFunction {
    fn cols(&self) -> usize {
        self.m
    }
    fn eval_frame(&self, v: &Matrix) -> f64 {
        InvariantFunction::eval_frame(self, v)
    }
    fn right_invariant(&self) -> bool {
        true
    }
}

/// A plain closure on frames, for functions outside the catalog.
pub struct ClosureFunction<F> {
    pub cols: usize,
    pub right_invariant: bool,
    pub f: F,
}

impl<F: Fn(&Matrix) -> f64 + Sync> FrameFunction for ClosureFunction<F> {
    fn cols(&self) -> usize {
        self.cols
    }
    fn eval_frame(&self, v: &Matrix) -> f64 {
        (self.f)(v)
    }
    fn right_invariant(&self) -> bool {
        self.right_invariant
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::{sample_orthogonal, sample_stiefel};
    use crate::rng::{gaussian_matrix, Stream};
    use proptest::prelude::*;

    fn catalog(n: usize, m: usize) -> Vec<InvariantFunction> {
        let s = Matrix::from_fn(n, n, |i, j| if i == j { 1.0 + i as f64 } else { 0.1 * (i + j) as f64 });
        let mut v = vec![
            InvariantFunction::constant(n, m),
            make_test_function(n, m, FunctionKind::TraceQuadratic { s: s.clone() }).unwrap(),
            make_test_function(n, m, FunctionKind::DetQuadratic { s }).unwrap(),
            make_test_function(n, m, FunctionKind::CosinePower { a: Frame::bottom(n, m + 1), p: 2 }).unwrap(),
        ];
        if m == 1 {
            let mut e = vec![0.0; n];
            e[0] = 0.6;
            e[1] = 0.8;
            v.push(make_test_function(n, 1, FunctionKind::SphereHarmonic { d: 4, direction: e }).unwrap());
        }
        v
    }

    #[test]
    fn trace_with_identity_is_m() {
        let f = make_test_function(5, 2, FunctionKind::TraceQuadratic { s: Matrix::identity(5) }).unwrap();
        let v = sample_stiefel(5, 2, Stream::new(1, 0));
        assert!((f.eval(&v) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn harmonic_y2_on_s3() {
        let mut e = vec![0.0; 4];
        e[0] = 1.0;
        let f = make_test_function(4, 1, FunctionKind::SphereHarmonic { d: 2, direction: e }).unwrap();
        let v = sample_stiefel(4, 1, Stream::new(2, 0));
        let v1 = *v.matrix().get(0, 0);
        assert!((f.eval(&v) - (v1 * v1 - 0.25)).abs() < 1e-15);
    }

    #[test]
    fn invalid_params() {
        let e = vec![1.0, 0.0, 0.0, 0.0];
        assert!(make_test_function(4, 1, FunctionKind::SphereHarmonic { d: 3, direction: e.clone() }).is_err());
        assert!(make_test_function(4, 2, FunctionKind::SphereHarmonic { d: 2, direction: e }).is_err());
        let s = Matrix::diag(&[1.0, -1.0, 1.0]);
        assert!(make_test_function(3, 1, FunctionKind::DetQuadratic { s }).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn extension_restricts_to_frame(seed in 0u64..10_000, l in -3.0f64..3.0) {
            for (n, m) in [(4, 1), (5, 2), (6, 2), (6, 3)] {
                let v = sample_stiefel(n, m, Stream::new(seed, 0));
                for f in catalog(n, m) {
                    let a = f.eval_frame(v.matrix());
                    let b = f.eval_extension(v.matrix(), l);
                    prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{:?}", f.kind());
                }
            }
        }

        #[test]
        fn extension_homogeneous(seed in 0u64..10_000, c in 0.3f64..3.0, l in -3.0f64..3.0) {
            for (n, m) in [(4, 1), (5, 2), (6, 3)] {
                let x = gaussian_matrix(n, m, Stream::new(seed, 1));
                for f in catalog(n, m) {
                    let a = f.eval_extension(&x.scaled(c), l);
                    let b = c.powf(m as f64 * l) * f.eval_extension(&x, l);
                    prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-300));
                }
            }
        }

        #[test]
        fn right_invariant(seed in 0u64..10_000) {
            for (n, m) in [(4, 1), (5, 2), (6, 3)] {
                let v = sample_stiefel(n, m, Stream::new(seed, 2));
                let beta = sample_orthogonal(m, &mut Stream::new(seed, 3).rng());
                for f in catalog(n, m) {
                    let a = f.eval(&v);
                    let b = f.eval(&v.right(&beta));
                    prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
                }
            }
        }

        #[test]
        fn extension_matches_polar_definition(seed in 0u64..10_000, l in -2.0f64..2.0) {
            for (n, m) in [(4, 1), (5, 2)] {
                let x = gaussian_matrix(n, m, Stream::new(seed, 4));
                let (v, _) = crate::linalg::polar_decompose(&x).unwrap();
                let vol = crate::linalg::volume(&x);
                for f in catalog(n, m) {
                    let a = f.eval_extension(&x, l);
                    let b = vol.powf(l) * f.eval(&v);
                    prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-300));
                }
            }
        }
    }
}
