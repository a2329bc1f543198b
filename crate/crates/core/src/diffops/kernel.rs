//! Analytic continuation by order reduction: `Δ_{λ,ℓ} T^{λ+2ℓ} = T^λ`.

use serde::{Deserialize, Serialize};

use super::apply::{Backend, CompiledOp, CosineKernel, MatrixFunction, SineKernel};
use super::field::anchored_moments;
use super::lambda::quarter_factor;
use super::operator::cayley_laplace_expand;
use crate::error::{Error, Result};
use crate::manifolds::Frame;
use crate::mc::{self, Moments};
use crate::special::{check_base, require, sine_mass, ConstParams};
use crate::testfuncs::{FrameFunction, InvariantFunction};
use crate::transforms::{
    delta_factor, finite_or_pole, gamma_factor, normalized_cosine_dual_with, sine_transform_with, AnchorLaw,
    AnchoredSet, EstimateParams, SampleSet, TransformEstimate,
};

/// Extra room kept between the differentiated kernel exponent and non-integrability.
pub const INTEGRABILITY_MARGIN: f64 = 0.5;

fn check_set(set: &SampleSet, n: usize, m: usize) -> Result<()> {
    if set.n != n || set.m != m {
        return Err(Error::Shape(format!("sample set is V({},{}), expected V({n},{m})", set.n, set.m)));
    }
    if set.len == 0 {
        return Err(Error::InvalidParams("sample count must be positive".into()));
    }
    Ok(())
}

fn margin(mu: f64, m: usize, ell: usize, boundary: f64) -> Result<()> {
    let need = (2 * m * ell) as f64 + boundary + INTEGRABILITY_MARGIN;
    if mu < need {
        return Err(Error::SingularKernelDerivative { need, have: mu });
    }
    Ok(())
}

/// `(*C^λ φ)(v)`, normalized, obtained as `Δ_{λ,ℓ}` of the normalized dual transform at `λ + 2ℓ`.
///
/// The kernel `|u'x|_m^{λ+2ℓ}` is differentiated under the integral with jets,
/// one draw `u` at a time.
pub fn kernel_diff_cosine_dual<F: FrameFunction + ?Sized>(
    phi: &F,
    v: &Frame,
    lambda: f64,
    ell: usize,
    set: &SampleSet,
) -> Result<TransformEstimate> {
    let (n, m, k) = (v.n(), v.m(), phi.cols());
    check_base(&ConstParams::nmk(n, m, k))?;
    check_set(set, n, k)?;
    if ell == 0 {
        return normalized_cosine_dual_with(phi, v, lambda, set);
    }
    let mu = lambda + 2.0 * ell as f64;
    let boundary = m as f64 - k as f64 - 1.0;
    if mu <= boundary {
        return Err(Error::OutOfConvergenceRegion { lambda: mu, bound: boundary });
    }
    gamma_factor(n, m, k, lambda)?;
    let g_mu = gamma_factor(n, m, k, mu)?;
    margin(mu, m, ell, boundary)?;
    let op = cayley_laplace_expand(m, ell)?;
    let c = CompiledOp::new(&op, n, Backend::jets_for(&op))?;
    let xj = c.lift(v.matrix()).expect("jets plan");
    let mo = mc::try_estimate(set.len, |i| {
        let u = set.frame(i);
        let kern = CosineKernel { u_t: u.matrix().transpose(), mu };
        Ok(phi.eval_frame(u.matrix()) * c.contract(&kern.eval(&xj)))
    })?;
    let params = EstimateParams::nmk(n, m, k).with_lambda(lambda);
    Ok(TransformEstimate::from_moments(&mo, set.seed, params).scaled(g_mu * quarter_factor(m, ell)))
}

/// How [`kernel_diff_sine`] differentiates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SineMode {
    /// Jets of the sine kernel under the integral.
    Kernel,
    /// Finite differences of the extended common-random-numbers estimate.
    FunctionFd { h: f64, levels: usize },
}

/// `(S^λ f)(u)` obtained as `Δ_{λ,ℓ} S^{λ+2ℓ} f`; at `λ = m - n` this reconstructs `f(u)`.
///
/// Kernel mode needs `λ + 2ℓ ≥ 2mℓ + (2m - 1 - n) + 0.5`. Function mode draws
/// `W` with density proportional to the sine kernel (seeded from `set`) and
/// differentiates `x ↦ |x|^{λ+2ℓ} E f(g(x) W)`.
pub fn kernel_diff_sine(
    f: &InvariantFunction,
    u: &Frame,
    lambda: f64,
    ell: usize,
    set: &SampleSet,
    mode: SineMode,
) -> Result<TransformEstimate> {
    Ok(kernel_diff_sine_many(f, std::slice::from_ref(u), lambda, ell, set, mode)?.remove(0))
}

/// [`kernel_diff_sine`] at several points sharing one set of draws.
pub fn kernel_diff_sine_many(
    f: &InvariantFunction,
    points: &[Frame],
    lambda: f64,
    ell: usize,
    set: &SampleSet,
    mode: SineMode,
) -> Result<Vec<TransformEstimate>> {
    let (n, m) = (f.n(), f.m());
    require(!points.is_empty(), "at least one evaluation point")?;
    require(points.iter().all(|u| u.n() == n && u.m() == m), "f and u live on the same V(n,m)")?;
    require(2 * m <= n, "2m <= n")?;
    check_set(set, n, m)?;
    if ell == 0 {
        return points.iter().map(|u| sine_transform_with(f, u, lambda, set)).collect();
    }
    let mu = lambda + 2.0 * ell as f64;
    let boundary = (2 * m) as f64 - 1.0 - n as f64;
    if mu <= boundary {
        return Err(Error::OutOfConvergenceRegion { lambda: mu, bound: boundary });
    }
    let d_mu = delta_factor(n, m, mu)?;
    let op = cayley_laplace_expand(m, ell)?;
    let q = quarter_factor(m, ell);
    let params = EstimateParams::nmk(n, m, m).with_lambda(lambda);
    let finish = |mo: &Moments, scale: f64| TransformEstimate::from_moments(mo, set.seed, params).scaled(scale);
    match mode {
        SineMode::Kernel => {
            margin(mu, m, ell, boundary)?;
            let c = CompiledOp::new(&op, n, Backend::jets_for(&op))?;
            let lifted: Vec<_> = points.iter().map(|u| c.lift(u.matrix()).expect("jets plan")).collect();
            let mos = mc::try_estimate_vec(set.len, points.len(), |i, out| {
                let v = set.frame(i);
                let kern = SineKernel::new(v.matrix(), mu);
                let fv = f.eval_frame(v.matrix());
                for (o, xj) in out.iter_mut().zip(&lifted) {
                    *o = fv * c.contract(&kern.eval(xj));
                }
                Ok(())
            })?;
            Ok(mos.iter().map(|mo| finish(mo, d_mu * q)).collect())
        }
        SineMode::FunctionFd { h, levels } => {
            let c = CompiledOp::new(&op, n, Backend::FiniteDiff { h, levels })?;
            let mass = finite_or_pole(sine_mass(n, m, mu), mu)?;
            let aset = AnchoredSet::new(AnchorLaw::TiltedSine { mu }, n, m, set.seed, set.len, 1)?.with_scale(d_mu * mass * q);
            Ok(anchored_moments(&c, f, &aset, points, mu)?.iter().map(|mo| finish(mo, 1.0)).collect())
        }
    }
}

/// Both modes of [`kernel_diff_sine`]; `BackendDisagreement` unless they agree
/// within `sigmas` combined standard errors.
#[allow(clippy::too_many_arguments)]
pub fn kernel_diff_sine_cross(
    f: &InvariantFunction,
    u: &Frame,
    lambda: f64,
    ell: usize,
    set: &SampleSet,
    h: f64,
    levels: usize,
    sigmas: f64,
) -> Result<(TransformEstimate, TransformEstimate)> {
    let a = kernel_diff_sine(f, u, lambda, ell, set, SineMode::Kernel)?;
    let b = kernel_diff_sine(f, u, lambda, ell, set, SineMode::FunctionFd { h, levels })?;
    if !a.agrees_with(&b, sigmas) {
        return Err(Error::BackendDisagreement { a: a.mean, b: b.mean });
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::manifolds::sample_stiefel;
    use crate::rng::Stream;
    use crate::special::cosine_mass;
    use crate::testfuncs::{make_test_function, FunctionKind};
    use crate::transforms::{normalized_cosine_dual, sine_transform};

    fn quad(n: usize, m: usize, d: &[f64]) -> InvariantFunction {
        make_test_function(n, m, FunctionKind::TraceQuadratic { s: Matrix::diag(d) }).unwrap()
    }

    #[test]
    fn cosine_per_sample_identity() {
        // on shared draws, the differentiated kernel is B_{ℓ,m,k}(λ)|u'v|^λ exactly
        let phi = quad(4, 2, &[1.0, 0.0, 2.0, 0.5]);
        let v = sample_stiefel(4, 1, Stream::new(1, 1));
        let set = SampleSet::new(4, 2, 5, 4_000);
        let a = kernel_diff_cosine_dual(&phi, &v, -1.5, 1, &set).unwrap();
        let b = normalized_cosine_dual_with(&phi, &v, -1.5, &set).unwrap();
        assert!((a.mean - b.mean).abs() < 1e-9 * b.mean.abs(), "{a:?} {b:?}");
    }

    #[test]
    fn cosine_closed_loop_independent_draws() {
        let phi = quad(4, 2, &[1.0, 0.0, 2.0, 0.5]);
        let one = InvariantFunction::constant(4, 2);
        let v = sample_stiefel(4, 1, Stream::new(2, 1));
        let a = kernel_diff_cosine_dual(&phi, &v, -1.5, 1, &SampleSet::new(4, 2, 6, 40_000)).unwrap();
        let b = normalized_cosine_dual(&phi, &v, -1.5, 40_000, Stream::new(7, 0)).unwrap();
        assert!(a.agrees_with(&b, 4.0), "{a:?} {b:?}");
        let c = kernel_diff_cosine_dual(&one, &v, -1.5, 1, &SampleSet::new(4, 2, 8, 20_000)).unwrap();
        let mass = gamma_factor(4, 1, 2, -1.5).unwrap() * cosine_mass(4, 1, 2, -1.5).finite().unwrap();
        assert!((c.mean - mass).abs() <= 4.0 * c.stderr, "{c:?} vs {mass}");
        let d = kernel_diff_cosine_dual(&phi, &v, -1.5, 0, &SampleSet::new(4, 2, 6, 100)).unwrap();
        assert_eq!(d, normalized_cosine_dual_with(&phi, &v, -1.5, &SampleSet::new(4, 2, 6, 100)).unwrap());
    }

    #[test]
    fn cosine_gates() {
        let phi = quad(4, 2, &[1.0, 0.0, 0.0, 0.0]);
        let v = Frame::top(4, 1);
        let set = SampleSet::new(4, 2, 1, 10);
        assert!(matches!(kernel_diff_cosine_dual(&phi, &v, -1.6, 1, &set), Err(Error::SingularKernelDerivative { .. })));
        assert!(matches!(kernel_diff_cosine_dual(&phi, &v, -4.5, 1, &set), Err(Error::OutOfConvergenceRegion { .. })));
        // γ_{1,k} has a pole at λ = 0
        assert!(matches!(kernel_diff_cosine_dual(&phi, &v, 0.0, 1, &set), Err(Error::PoleAtLambda { .. })));
    }

    #[test]
    fn sine_closed_loop() {
        let f = quad(4, 1, &[1.0, 0.0, 0.0, 0.0]);
        let u = sample_stiefel(4, 1, Stream::new(3, 1));
        let a = kernel_diff_sine(&f, &u, -2.5, 1, &SampleSet::new(4, 1, 9, 40_000), SineMode::Kernel).unwrap();
        let b = sine_transform(&f, &u, -2.5, 40_000, Stream::new(10, 0)).unwrap();
        assert!(a.agrees_with(&b, 4.0), "{a:?} {b:?}");
        assert!(matches!(
            kernel_diff_sine(&f, &u, -3.0, 1, &SampleSet::new(4, 1, 9, 10), SineMode::Kernel),
            Err(Error::SingularKernelDerivative { .. })
        ));
    }

    #[test]
    fn sine_modes_agree() {
        let f = quad(4, 1, &[1.0, 0.0, 0.0, 0.0]);
        let u = sample_stiefel(4, 1, Stream::new(4, 1));
        let (a, b) = kernel_diff_sine_cross(&f, &u, -2.5, 1, &SampleSet::new(4, 1, 11, 20_000), 1e-2, 2, 4.0).unwrap();
        assert!(a.stderr > 0.0 && b.stderr > 0.0);
    }

    #[test]
    fn sphere_reconstruction_by_function_differences() {
        // S^{m-n} f = f
        let f = quad(4, 1, &[1.0, 0.0, 0.0, 0.0]);
        let set = SampleSet::new(4, 1, 12, 20_000);
        for s in 0..3 {
            let u = sample_stiefel(4, 1, Stream::new(5, s));
            let e = kernel_diff_sine(&f, &u, -3.0, 1, &set, SineMode::FunctionFd { h: 1e-2, levels: 2 }).unwrap();
            let exact = f.eval(&u);
            assert!((e.mean - exact).abs() < (4.0 * e.stderr).max(0.05), "{e:?} vs {exact}");
        }
    }
}
