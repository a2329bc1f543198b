//! Numerical application of `Δ^ℓ` with jets or finite differences.

use serde::{Deserialize, Serialize};

use super::fd::{build_stencil, check_step, Stencil};
use super::jet::{lift_variables, multi_factorial, Jet, JetSpace};
use super::operator::DiffOperator;
use crate::error::{Error, Result};
use crate::linalg::{det, gram_power, Mat, Matrix, Scalar};
use crate::testfuncs::InvariantFunction;

/// How derivatives are computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Backend {
    /// Truncated Taylor arithmetic of the given degree.
    Jets { order: usize },
    /// Central differences with step `h` and Richardson `levels`.
    FiniteDiff { h: f64, levels: usize },
}

impl Backend {
    /// Jets of exactly the operator order.
    pub fn jets_for(op: &DiffOperator) -> Self {
        Backend::Jets { order: op.order() }
    }

    pub const DEFAULT_FD: Backend = Backend::FiniteDiff { h: 1e-2, levels: 2 };

    pub fn validate(&self, op: &DiffOperator) -> Result<()> {
        match *self {
            Backend::Jets { order } if order < op.order() => Err(Error::InvalidParams(format!(
                "jet order {order} is below the operator order {}",
                op.order()
            ))),
            Backend::Jets { .. } => Ok(()),
            Backend::FiniteDiff { h, levels } => check_step(h, levels),
        }
    }
}

/// A scalar function of a full-rank matrix, evaluable on floats and on jets.
pub trait MatrixFunction: Sync {
    fn eval<S: Scalar>(&self, x: &Mat<S>) -> S;
}

/// `|x|_m^p`.
#[derive(Debug, Clone, Copy)]
pub struct GramPower {
    pub p: f64,
}

impl MatrixFunction for GramPower {
    fn eval<S: Scalar>(&self, x: &Mat<S>) -> S {
        gram_power(x, self.p)
    }
}

/// The homogeneous extension `E_λ f`.
#[derive(Debug, Clone, Copy)]
pub struct Extension<'a> {
    pub f: &'a InvariantFunction,
    pub lambda: f64,
}

impl MatrixFunction for Extension<'_> {
    fn eval<S: Scalar>(&self, x: &Mat<S>) -> S {
        self.f.eval_extension(x, self.lambda)
    }
}

/// Cosine kernel `|u'x|_m^μ` for a fixed `u ∈ V(n,k)`.
#[derive(Debug, Clone)]
pub struct CosineKernel {
    pub u_t: Matrix,
    pub mu: f64,
}

impl MatrixFunction for CosineKernel {
    fn eval<S: Scalar>(&self, x: &Mat<S>) -> S {
        gram_power(&x.left_mul_f64(&self.u_t), self.mu)
    }
}

/// Extended sine kernel `det(x'(I - vv')x)^{μ/2}` for a fixed `v ∈ V(n,m)`.
///
/// On frames this is `det(I - v'xx'v)^{μ/2}`, and it is `μ`-homogeneous.
#[derive(Debug, Clone)]
pub struct SineKernel {
    pub proj: Matrix,
    pub mu: f64,
}

impl SineKernel {
    pub fn new(v: &Matrix, mu: f64) -> Self {
        let n = v.rows();
        Self { proj: Matrix::identity(n).minus(&v.matmul(&v.transpose())), mu }
    }
}

impl MatrixFunction for SineKernel {
    fn eval<S: Scalar>(&self, x: &Mat<S>) -> S {
        det(&x.t_matmul(&x.left_mul_f64(&self.proj))).powf(self.mu / 2.0)
    }
}

#[derive(Debug, Clone)]
enum Plan {
    Jets { degree: usize, terms: Vec<(usize, f64)> },
    Fd(Stencil),
}

/// `Δ^ℓ` prepared for one matrix shape and backend.
#[derive(Debug, Clone)]
pub struct CompiledOp {
    pub n: usize,
    pub m: usize,
    pub order: usize,
    plan: Plan,
}

impl CompiledOp {
    pub fn new(op: &DiffOperator, n: usize, backend: Backend) -> Result<Self> {
        backend.validate(op)?;
        if n < op.m {
            return Err(Error::Shape(format!("operator on n x {} matrices needs n >= {}", op.m, op.m)));
        }
        let symbol = op.symbol(n);
        let plan = match backend {
            Backend::Jets { order } => {
                let space = JetSpace::get(n * op.m, order);
                let terms = symbol
                    .iter()
                    .map(|(e, c)| (space.index_of(e).expect("monomial within the jet degree"), c * multi_factorial(e)))
                    .collect();
                Plan::Jets { degree: order, terms }
            }
            Backend::FiniteDiff { h, levels } => Plan::Fd(build_stencil(&symbol, n * op.m, h, levels)?),
        };
        Ok(Self { n, m: op.m, order: op.order(), plan })
    }

    fn check(&self, x: &Matrix) -> Result<()> {
        if x.shape() != (self.n, self.m) {
            return Err(Error::Shape(format!("expected a {}x{} matrix, got {:?}", self.n, self.m, x.shape())));
        }
        Ok(())
    }

    pub fn is_jets(&self) -> bool {
        matches!(self.plan, Plan::Jets { .. })
    }

    /// `x` lifted to jets (jets backend only).
    pub fn lift(&self, x: &Matrix) -> Option<Mat<Jet>> {
        match &self.plan {
            Plan::Jets { degree, .. } => Some(lift_variables(x, *degree)),
            Plan::Fd(_) => None,
        }
    }

    /// `Σ coeff ∂^α` read off a jet expanded at the evaluation point.
    pub fn contract(&self, j: &Jet) -> f64 {
        match &self.plan {
            Plan::Jets { terms, .. } => terms.iter().map(|&(i, c)| c * j.coefficients()[i]).sum(),
            Plan::Fd(_) => f64::NAN,
        }
    }

    /// Stencil points `(x + offset, weight)` (finite-difference backend only).
    pub fn points(&self, x: &Matrix) -> Option<Vec<(Matrix, f64)>> {
        let m = self.m;
        match &self.plan {
            Plan::Fd(s) => Some(
                s.points
                    .iter()
                    .map(|(off, w)| {
                        let mut y = x.clone();
                        for &(v, o) in off {
                            let (i, a) = (v / m, v % m);
                            y.set(i, a, y.get(i, a) + o as f64 * s.step);
                        }
                        (y, *w)
                    })
                    .collect(),
            ),
            Plan::Jets { .. } => None,
        }
    }

    pub fn num_points(&self) -> usize {
        match &self.plan {
            Plan::Fd(s) => s.points.len(),
            Plan::Jets { .. } => 1,
        }
    }

    /// `(Δ^ℓ F)(x)`.
    pub fn apply<F: MatrixFunction + ?Sized>(&self, f: &F, x: &Matrix) -> Result<f64> {
        self.check(x)?;
        let r = match &self.plan {
            Plan::Jets { .. } => self.contract(&f.eval(&self.lift(x).expect("jets plan"))),
            Plan::Fd(_) => self.points(x).expect("fd plan").iter().map(|(y, w)| w * f.eval(y)).sum(),
        };
        if r.is_finite() {
            Ok(r)
        } else {
            Err(Error::NumericalBreakdown)
        }
    }
}

/// `(Δ^ℓ F)(x)` with the chosen backend.
///
/// ```
/// use stiefel::diffops::{apply_diffop, cayley_laplace_expand, Backend, GramPower};
/// use stiefel::linalg::Matrix;
/// // Δ|x|² = 2n on ℝ^n
/// let d = cayley_laplace_expand(1, 1).unwrap();
/// let x = Matrix::new(3, 1, vec![0.3, -1.0, 2.0]).unwrap();
/// let v = apply_diffop(&d, &GramPower { p: 2.0 }, &x, Backend::jets_for(&d)).unwrap();
/// assert!((v - 6.0).abs() < 1e-12);
/// ```
pub fn apply_diffop<F: MatrixFunction + ?Sized>(op: &DiffOperator, f: &F, x: &Matrix, backend: Backend) -> Result<f64> {
    CompiledOp::new(op, x.rows(), backend)?.apply(f, x)
}

/// Tolerance of [`cross_validate`].
pub const CROSS_RTOL: f64 = 1e-3;

/// Both backends; `BackendDisagreement` when they differ by more than `1e-3`
/// relative (with a floor of `1e-6 |F(x)|` for results that vanish).
pub fn cross_validate<F: MatrixFunction + ?Sized>(
    op: &DiffOperator,
    f: &F,
    x: &Matrix,
    h: f64,
    levels: usize,
) -> Result<(f64, f64)> {
    let a = apply_diffop(op, f, x, Backend::jets_for(op))?;
    let b = apply_diffop(op, f, x, Backend::FiniteDiff { h, levels })?;
    let floor = 1e-6 * f.eval(x).abs();
    if (a - b).abs() > CROSS_RTOL * a.abs().max(b.abs()) + floor {
        return Err(Error::BackendDisagreement { a, b });
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffops::cayley_laplace_expand;
    use crate::manifolds::sample_orthogonal;
    use crate::rng::{gaussian_matrix, Stream};
    use crate::special::bernstein_poly;

    struct Linear(Matrix);
    impl MatrixFunction for Linear {
        fn eval<S: Scalar>(&self, x: &Mat<S>) -> S {
            x.left_mul_f64(&self.0.transpose()).trace()
        }
    }

    struct CosTrace(Matrix);
    impl MatrixFunction for CosTrace {
        fn eval<S: Scalar>(&self, x: &Mat<S>) -> S {
            let t = x.left_mul_f64(&self.0.transpose()).trace();
            let a = t.value();
            let d: Vec<f64> = (0..8).map(|k| [a.cos(), -a.sin(), -a.cos(), a.sin()][k % 4]).collect();
            t.compose(&d)
        }
    }

    struct Rotated<F>(Matrix, F);
    impl<F: MatrixFunction> MatrixFunction for Rotated<F> {
        fn eval<S: Scalar>(&self, x: &Mat<S>) -> S {
            self.1.eval(&x.left_mul_f64(&self.0))
        }
    }

    #[test]
    fn bernstein_identity_jets_and_fd() {
        for (m, ell, n) in [(1, 1, 4), (1, 2, 4), (2, 1, 4), (2, 1, 6)] {
            let op = cayley_laplace_expand(m, ell).unwrap();
            let jets = CompiledOp::new(&op, n, Backend::jets_for(&op)).unwrap();
            let fd = CompiledOp::new(&op, n, Backend::DEFAULT_FD).unwrap();
            for lambda in [-2.5, -1.3, 0.7] {
                let b = bernstein_poly(ell, m, n, lambda);
                for s in 0..4 {
                    let x = gaussian_matrix(n, m, Stream::new(40 + s, n as u64));
                    let f = GramPower { p: lambda + 2.0 * ell as f64 };
                    let exact = b * gram_power(&x, lambda);
                    let a = jets.apply(&f, &x).unwrap();
                    assert!((a - exact).abs() < 1e-8 * exact.abs(), "{m} {ell} {n} {lambda}: {a} vs {exact}");
                    let c = fd.apply(&f, &x).unwrap();
                    assert!((c - exact).abs() < 1e-2 * exact.abs(), "fd {m} {ell} {n} {lambda}: {c} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn linear_functions_are_killed() {
        let op = cayley_laplace_expand(2, 1).unwrap();
        let a = gaussian_matrix(4, 2, Stream::new(1, 1));
        let x = gaussian_matrix(4, 2, Stream::new(1, 2));
        assert_eq!(apply_diffop(&op, &Linear(a), &x, Backend::jets_for(&op)).unwrap(), 0.0);
    }

    #[test]
    fn fourier_symbol() {
        for m in [1, 2] {
            let op = cayley_laplace_expand(m, 1).unwrap();
            for s in 0..3 {
                let y = gaussian_matrix(4, m, Stream::new(7, s));
                let x = gaussian_matrix(4, m, Stream::new(8, s));
                let f = CosTrace(y.clone());
                let got = apply_diffop(&op, &f, &x, Backend::jets_for(&op)).unwrap();
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let exact = sign * det(&y.t_matmul(&y)) * f.eval(&x);
                assert!((got - exact).abs() < 1e-9 * exact.abs().max(1.0), "{got} vs {exact}");
            }
        }
    }

    #[test]
    fn left_invariance() {
        let op = cayley_laplace_expand(2, 1).unwrap();
        let mut rng = Stream::new(3, 0).rng();
        let rho = sample_orthogonal(5, &mut rng);
        let x = gaussian_matrix(5, 2, Stream::new(3, 1));
        let f = GramPower { p: 2.7 };
        let a = apply_diffop(&op, &Rotated(rho.clone(), f), &x, Backend::jets_for(&op)).unwrap();
        let b = apply_diffop(&op, &f, &rho.matmul(&x), Backend::jets_for(&op)).unwrap();
        assert!((a - b).abs() < 1e-8 * b.abs());
    }

    #[test]
    fn cross_validation_and_gates() {
        let op = cayley_laplace_expand(1, 1).unwrap();
        let x = gaussian_matrix(4, 1, Stream::new(5, 5));
        let (a, b) = cross_validate(&op, &GramPower { p: 1.5 }, &x, 1e-2, 2).unwrap();
        assert!((a - b).abs() < 1e-6 * a.abs());
        // a coarse step on a sharply curved function trips the disagreement check
        let xs = x.scaled(0.03);
        assert!(matches!(cross_validate(&op, &GramPower { p: -3.5 }, &xs, 1e-2, 1), Err(Error::BackendDisagreement { .. })));
        assert!(CompiledOp::new(&op, 4, Backend::Jets { order: 1 }).is_err());
        assert!(CompiledOp::new(&op, 4, Backend::FiniteDiff { h: 0.5, levels: 2 }).is_err());
    }

    #[test]
    fn kernels_match_closed_forms() {
        let v = crate::manifolds::sample_stiefel(5, 2, Stream::new(2, 2));
        let x = gaussian_matrix(5, 2, Stream::new(2, 3));
        let k = SineKernel::new(v.matrix(), 1.3);
        let q = crate::manifolds::Frame::orthonormalize(&x).unwrap();
        let on_frame = crate::manifolds::sin_metric(&q, &v).powf(1.3 / 2.0);
        assert!((k.eval(&x) - gram_power(&x, 1.3) * on_frame).abs() < 1e-12);
    }
}
