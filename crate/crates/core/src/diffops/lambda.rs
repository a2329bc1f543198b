//! The operators `Δ_{λ,ℓ}` acting through homogeneous extensions.

use serde::{Deserialize, Serialize};

use super::apply::{Backend, CompiledOp, Extension};
use super::operator::cayley_laplace_expand;
use crate::error::{Error, Result};
use crate::manifolds::Frame;
use crate::testfuncs::InvariantFunction;

/// `(-1/4)^{mℓ}`.
pub fn quarter_factor(m: usize, ell: usize) -> f64 {
    (-0.25f64).powi((m * ell) as i32)
}

/// Where and how `Δ_{λ,ℓ}` is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionPoint {
    pub v: Frame,
    pub lambda: f64,
    pub backend: Backend,
}

impl ExtensionPoint {
    /// Validates the backend against the order `2mℓ` it will be asked for.
    pub fn new(v: Frame, lambda: f64, ell: usize, backend: Backend) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::InvalidParams("lambda must be finite".into()));
        }
        if ell > 0 {
            backend.validate(&cayley_laplace_expand(v.m(), ell)?)?;
        }
        Ok(Self { v, lambda, backend })
    }
}

/// `(Δ_{λ,ℓ} f)(v) = (-1/4)^{mℓ} (Δ^ℓ E_{λ+2ℓ} f)(x)|_{x=v}`; `ℓ = 0` returns `f(v)`.
pub fn delta_lambda_ell(f: &InvariantFunction, v: &Frame, lambda: f64, ell: usize, backend: Backend) -> Result<f64> {
    if f.n() != v.n() || f.m() != v.m() {
        return Err(Error::Shape("function and frame live on different Stiefel manifolds".into()));
    }
    if ell == 0 {
        return Ok(f.eval(v));
    }
    let p = ExtensionPoint::new(v.clone(), lambda, ell, backend)?;
    let op = cayley_laplace_expand(p.v.m(), ell)?;
    let c = CompiledOp::new(&op, p.v.n(), p.backend)?;
    let raw = c.apply(&Extension { f, lambda: lambda + 2.0 * ell as f64 }, p.v.matrix())?;
    Ok(quarter_factor(p.v.m(), ell) * raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::manifolds::sample_stiefel;
    use crate::rng::Stream;
    use crate::testfuncs::oracle::delta_lambda_eigenvalue;
    use crate::testfuncs::{make_test_function, FunctionKind};

    fn jets(m: usize, ell: usize) -> Backend {
        Backend::jets_for(&cayley_laplace_expand(m, ell).unwrap())
    }

    #[test]
    fn constant_on_the_sphere() {
        let one = InvariantFunction::constant(4, 1);
        let v = sample_stiefel(4, 1, Stream::new(1, 1));
        let d = delta_lambda_ell(&one, &v, -3.0, 1, jets(1, 1)).unwrap();
        assert!((d - 0.25).abs() < 1e-12);
        assert_eq!(delta_lambda_ell(&one, &v, -3.0, 0, jets(1, 1)).unwrap(), 1.0);
    }

    #[test]
    fn beltrami_eigenvalues() {
        let dir = [0.5, 0.5, 0.5, 0.5];
        for d in [2u32, 4] {
            let f = make_test_function(4, 1, FunctionKind::SphereHarmonic { d, direction: dir.to_vec() }).unwrap();
            for lambda in [-3.0, -1.2, 0.5] {
                let ev = delta_lambda_eigenvalue(4, d as usize, lambda);
                for s in 0..3 {
                    let v = sample_stiefel(4, 1, Stream::new(2, s));
                    let got = delta_lambda_ell(&f, &v, lambda, 1, jets(1, 1)).unwrap();
                    let exact = ev * f.eval(&v);
                    assert!((got - exact).abs() < 1e-8 * exact.abs().max(1e-3), "d={d} λ={lambda}: {got} vs {exact}");
                }
            }
        }
        let f = make_test_function(4, 1, FunctionKind::SphereHarmonic { d: 2, direction: dir.to_vec() }).unwrap();
        assert!((delta_lambda_eigenvalue(4, 2, -3.0) - 2.25).abs() < 1e-15);
        let v = sample_stiefel(4, 1, Stream::new(3, 3));
        let fd = delta_lambda_ell(&f, &v, -3.0, 1, Backend::DEFAULT_FD).unwrap();
        assert!((fd - 2.25 * f.eval(&v)).abs() < 1e-5);
    }

    #[test]
    fn right_invariance() {
        let s = Matrix::diag(&[2.0, 1.0, 0.0, -1.0, 0.5]);
        let f = make_test_function(5, 2, FunctionKind::TraceQuadratic { s }).unwrap();
        let v = sample_stiefel(5, 2, Stream::new(4, 4));
        let beta = crate::manifolds::sample_orthogonal(2, &mut Stream::new(4, 5).rng());
        let a = delta_lambda_ell(&f, &v, -1.7, 1, jets(2, 1)).unwrap();
        let b = delta_lambda_ell(&f, &v.right(&beta), -1.7, 1, jets(2, 1)).unwrap();
        assert!((a - b).abs() < 1e-8 * a.abs().max(1.0));
    }

    #[test]
    fn backend_is_checked() {
        let v = Frame::top(4, 1);
        assert!(ExtensionPoint::new(v.clone(), 0.0, 1, Backend::Jets { order: 1 }).is_err());
        assert!(ExtensionPoint::new(v, 0.0, 1, Backend::FiniteDiff { h: 0.2, levels: 2 }).is_err());
    }
}
