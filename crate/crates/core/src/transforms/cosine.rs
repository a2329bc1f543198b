//! Cosine, sine and Gaussian zeta estimators over plain Haar samples.

use super::estimate::{EstimateParams, TransformEstimate};
use super::sets::{AnchorLaw, AnchoredSet, SampleSet};
use crate::error::{Error, Result};
use crate::linalg::{gram_power, Matrix};
use crate::manifolds::{cos_metric, frame_complement, sin_metric, Completion, Frame};
use crate::mc;
use crate::rng::{gaussian_matrix, Stream};
use crate::special::{check_base, constant, cosine_mass, sine_mass, gaussian_zeta_moment, require, ConstParams, ConstantKind, MeroValue};
use crate::testfuncs::{ClosureFunction, FrameFunction};

pub(crate) fn finite_or_pole(v: MeroValue, lambda: f64) -> Result<f64> {
    match v {
        MeroValue::Finite { value } => Ok(value),
        MeroValue::Pole { order } => Err(Error::PoleAtLambda { lambda, order }),
    }
}

fn region(lambda: f64, bound: f64) -> Result<()> {
    if lambda > bound {
        Ok(())
    } else {
        Err(Error::OutOfConvergenceRegion { lambda, bound })
    }
}

fn check_set(set: &SampleSet, n: usize, m: usize) -> Result<()> {
    if set.n != n || set.m != m {
        return Err(Error::Shape(format!("sample set is V({},{}), expected V({n},{m})", set.n, set.m)));
    }
    if set.len == 0 {
        return Err(Error::InvalidParams("sample count must be positive".into()));
    }
    Ok(())
}

/// `γ_{m,k}(λ)`, or `PoleAtLambda`.
pub fn gamma_factor(n: usize, m: usize, k: usize, lambda: f64) -> Result<f64> {
    finite_or_pole(constant(ConstantKind::GammaMk, &ConstParams { n, m, k, j: 0, lambda })?, lambda)
}

/// `δ_m(λ)`, or `PoleAtLambda`.
pub fn delta_factor(n: usize, m: usize, lambda: f64) -> Result<f64> {
    finite_or_pole(constant(ConstantKind::DeltaM, &ConstParams { n, m, k: 0, j: 0, lambda })?, lambda)
}

/// Unnormalized λ-cosine transform `∫ f(v) |u'v|_m^λ d_*v` at `u ∈ V(n,k)`.
pub fn cosine_transform<F: FrameFunction + ?Sized>(
    f: &F,
    u: &Frame,
    lambda: f64,
    samples: usize,
    stream: Stream,
) -> Result<TransformEstimate> {
    let set = SampleSet::new(u.n(), f.cols(), stream.child("cosine"), samples);
    cosine_transform_with(f, u, lambda, &set)
}

/// [`cosine_transform`] over a shared sample set on `V(n,m)`.
pub fn cosine_transform_with<F: FrameFunction + ?Sized>(
    f: &F,
    u: &Frame,
    lambda: f64,
    set: &SampleSet,
) -> Result<TransformEstimate> {
    let (n, m, k) = (u.n(), f.cols(), u.m());
    check_base(&ConstParams::nmk(n, m, k))?;
    check_set(set, n, m)?;
    region(lambda, m as f64 - k as f64 - 1.0)?;
    let mo = mc::try_estimate(set.len, |i| {
        let v = set.frame(i);
        Ok(f.eval_frame(v.matrix()) * cos_metric(u, &v).powf(lambda))
    })?;
    Ok(TransformEstimate::from_moments(&mo, set.seed, EstimateParams::nmk(n, m, k).with_lambda(lambda)))
}

/// Dual cosine transform `∫ φ(u) |u'v|_m^λ d_*u` at `v ∈ V(n,m)`, `φ` on `V(n,k)`.
pub fn cosine_dual<F: FrameFunction + ?Sized>(
    phi: &F,
    v: &Frame,
    lambda: f64,
    samples: usize,
    stream: Stream,
) -> Result<TransformEstimate> {
    let set = SampleSet::new(v.n(), phi.cols(), stream.child("cosine-dual"), samples);
    cosine_dual_with(phi, v, lambda, &set)
}

/// [`cosine_dual`] over a shared sample set on `V(n,k)`.
pub fn cosine_dual_with<F: FrameFunction + ?Sized>(
    phi: &F,
    v: &Frame,
    lambda: f64,
    set: &SampleSet,
) -> Result<TransformEstimate> {
    let (n, m, k) = (v.n(), v.m(), phi.cols());
    check_base(&ConstParams::nmk(n, m, k))?;
    check_set(set, n, k)?;
    region(lambda, m as f64 - k as f64 - 1.0)?;
    let mo = mc::try_estimate(set.len, |i| {
        let u = set.frame(i);
        Ok(phi.eval_frame(u.matrix()) * cos_metric(&u, v).powf(lambda))
    })?;
    Ok(TransformEstimate::from_moments(&mo, set.seed, EstimateParams::nmk(n, m, k).with_lambda(lambda)))
}

/// `γ_{m,k}(λ) · C^λ_{m,k} f`.
pub fn normalized_cosine<F: FrameFunction + ?Sized>(
    f: &F,
    u: &Frame,
    lambda: f64,
    samples: usize,
    stream: Stream,
) -> Result<TransformEstimate> {
    let g = gamma_factor(u.n(), f.cols(), u.m(), lambda)?;
    Ok(cosine_transform(f, u, lambda, samples, stream)?.scaled(g))
}

pub fn normalized_cosine_with<F: FrameFunction + ?Sized>(
    f: &F,
    u: &Frame,
    lambda: f64,
    set: &SampleSet,
) -> Result<TransformEstimate> {
    let g = gamma_factor(u.n(), f.cols(), u.m(), lambda)?;
    Ok(cosine_transform_with(f, u, lambda, set)?.scaled(g))
}

/// `γ_{m,k}(λ) · C*^λ_{m,k} φ`.
pub fn normalized_cosine_dual<F: FrameFunction + ?Sized>(
    phi: &F,
    v: &Frame,
    lambda: f64,
    samples: usize,
    stream: Stream,
) -> Result<TransformEstimate> {
    let g = gamma_factor(v.n(), v.m(), phi.cols(), lambda)?;
    Ok(cosine_dual(phi, v, lambda, samples, stream)?.scaled(g))
}

pub fn normalized_cosine_dual_with<F: FrameFunction + ?Sized>(
    phi: &F,
    v: &Frame,
    lambda: f64,
    set: &SampleSet,
) -> Result<TransformEstimate> {
    let g = gamma_factor(v.n(), v.m(), phi.cols(), lambda)?;
    Ok(cosine_dual_with(phi, v, lambda, set)?.scaled(g))
}

/// Unnormalized sine integral `∫ det(I - v'uu'v)^{λ/2} f(v) d_*v`, `u, v ∈ V(n,m)`.
pub fn sine_integral<F: FrameFunction + ?Sized>(
    f: &F,
    u: &Frame,
    lambda: f64,
    samples: usize,
    stream: Stream,
) -> Result<TransformEstimate> {
    let set = SampleSet::new(u.n(), f.cols(), stream.child("sine"), samples);
    sine_integral_with(f, u, lambda, &set)
}

pub fn sine_integral_with<F: FrameFunction + ?Sized>(
    f: &F,
    u: &Frame,
    lambda: f64,
    set: &SampleSet,
) -> Result<TransformEstimate> {
    let (n, m) = (u.n(), u.m());
    require(m >= 1 && f.cols() == m, "f and u live on the same V(n,m)")?;
    require(2 * m <= n, "2m <= n")?;
    check_set(set, n, m)?;
    region(lambda, (2 * m) as f64 - 1.0 - n as f64)?;
    let mo = mc::try_estimate(set.len, |i| {
        let v = set.frame(i);
        Ok(f.eval_frame(v.matrix()) * sin_metric(u, &v).powf(lambda / 2.0))
    })?;
    Ok(TransformEstimate::from_moments(&mo, set.seed, EstimateParams::nmk(n, m, m).with_lambda(lambda)))
}

/// Normalized λ-sine transform `δ_m(λ) · ∫ det(I - v'uu'v)^{λ/2} f(v) d_*v`.
pub fn sine_transform<F: FrameFunction + ?Sized>(
    f: &F,
    u: &Frame,
    lambda: f64,
    samples: usize,
    stream: Stream,
) -> Result<TransformEstimate> {
    let d = delta_factor(u.n(), u.m(), lambda)?;
    Ok(sine_integral(f, u, lambda, samples, stream)?.scaled(d))
}

pub fn sine_transform_with<F: FrameFunction + ?Sized>(
    f: &F,
    u: &Frame,
    lambda: f64,
    set: &SampleSet,
) -> Result<TransformEstimate> {
    let d = delta_factor(u.n(), u.m(), lambda)?;
    Ok(sine_integral_with(f, u, lambda, set)?.scaled(d))
}

/// [`sine_transform`] by importance sampling from the law tilted by the kernel itself.
///
/// Finite variance on the whole region `λ > 2m-1-n`, where the plain estimator
/// has infinite variance once `λ ≤ (2m-1-n)/2`.
pub fn sine_transform_tilted<F: FrameFunction + ?Sized>(
    f: &F,
    u: &Frame,
    lambda: f64,
    samples: usize,
    seed: u64,
) -> Result<TransformEstimate> {
    let (n, m) = (u.n(), u.m());
    require(m >= 1 && f.cols() == m, "f and u live on the same V(n,m)")?;
    require(2 * m <= n, "2m <= n")?;
    region(lambda, (2 * m) as f64 - 1.0 - n as f64)?;
    let scale = delta_factor(n, m, lambda)? * finite_or_pole(sine_mass(n, m, lambda), lambda)?;
    let set = AnchoredSet::new(AnchorLaw::TiltedSine { mu: lambda }, n, m, seed, samples, 1)?.with_scale(scale);
    let (mo, _) = set.estimate_at(f, u, Completion::Standard)?;
    Ok(TransformEstimate::from_moments(&mo, seed, EstimateParams::nmk(n, m, m).with_lambda(lambda)))
}

/// [`normalized_cosine_dual`] by importance sampling; `phi` must be right `O(k)`-invariant.
pub fn normalized_cosine_dual_tilted<F: FrameFunction + ?Sized>(
    phi: &F,
    v: &Frame,
    lambda: f64,
    samples: usize,
    seed: u64,
) -> Result<TransformEstimate> {
    let (n, m, k) = (v.n(), v.m(), phi.cols());
    check_base(&ConstParams::nmk(n, m, k))?;
    require(k < n, "k < n")?;
    region(lambda, m as f64 - k as f64 - 1.0)?;
    let scale = gamma_factor(n, m, k, lambda)? * finite_or_pole(cosine_mass(n, m, k, lambda), lambda)?;
    let set = AnchoredSet::new(AnchorLaw::TiltedCosineDual { k, mu: lambda }, n, m, seed, samples, 1)?.with_scale(scale);
    let (mo, _) = set.estimate_at(phi, v, Completion::Standard)?;
    Ok(TransformEstimate::from_moments(&mo, seed, EstimateParams::nmk(n, m, k).with_lambda(lambda)))
}

/// `E |x|_m^λ` over `n×m` matrices with i.i.d. `N(0, 1/2)` entries, with its closed form.
pub fn zeta_gaussian(n: usize, m: usize, lambda: f64, samples: usize, stream: Stream) -> Result<(TransformEstimate, f64)> {
    require(m >= 1 && m <= n, "1 <= m <= n")?;
    region(lambda, m as f64 - 1.0 - n as f64)?;
    let seed = stream.child("zeta");
    let mo = mc::try_estimate(samples, |i| {
        let x = gaussian_matrix(n, m, Stream::new(seed, i as u64)).scaled(std::f64::consts::FRAC_1_SQRT_2);
        Ok(gram_power(&x, lambda))
    })?;
    let exact = finite_or_pole(gaussian_zeta_moment(n, m, lambda), lambda)?;
    let params = EstimateParams { n, m, k: m, j: None, lambda: Some(lambda) };
    Ok((TransformEstimate::from_moments(&mo, seed, params), exact))
}

/// The function `φ_*` on `V(n, n-k)` matched to a right-invariant `φ` on `V(n,k)`:
/// `φ_*(ũ) = φ(u)` for any frame `u` of the orthogonal complement of `span(ũ)`.
pub fn complement_function<'a, F: FrameFunction + ?Sized>(
    phi: &'a F,
    n: usize,
) -> Result<ClosureFunction<impl Fn(&Matrix) -> f64 + Sync + 'a>> {
    if !phi.right_invariant() {
        return Err(Error::NotRightInvariant);
    }
    require(phi.cols() < n, "k <= n-1")?;
    Ok(ClosureFunction {
        cols: n - phi.cols(),
        right_invariant: true,
        f: move |ut: &Matrix| match frame_complement(&Frame::new_unchecked(ut.clone())) {
            Ok(u) => phi.eval_frame(u.matrix()),
            Err(_) => f64::NAN,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::sample_stiefel;
    use crate::special::{cosine_mass, sine_mass};
    use crate::testfuncs::{make_test_function, FunctionKind, InvariantFunction};

    fn within(a: &TransformEstimate, b: f64, s: f64) -> bool {
        (a.mean - b).abs() <= s * a.stderr.max(1e-14)
    }

    #[test]
    fn cosine_mass_examples() {
        let one = InvariantFunction::constant(4, 1);
        let u = Frame::top(4, 1);
        let e = cosine_transform(&one, &u, 2.0, 100_000, Stream::new(1, 0)).unwrap();
        assert!(within(&e, 0.25, 4.0), "{e:?}");
        for (n, m, k, l) in [(5, 2, 3, 0.7), (6, 2, 2, -0.5), (5, 1, 2, 1.5)] {
            let one = InvariantFunction::constant(n, m);
            let u = sample_stiefel(n, k, Stream::new(9, 1));
            let e = cosine_transform(&one, &u, l, 100_000, Stream::new(2, 0)).unwrap();
            assert!(within(&e, cosine_mass(n, m, k, l).finite().unwrap(), 4.0), "{n} {m} {k} {l}: {e:?}");
            let d = cosine_dual(&InvariantFunction::constant(n, k), &sample_stiefel(n, m, Stream::new(9, 2)), l, 100_000, Stream::new(3, 0))
                .unwrap();
            assert!(within(&d, cosine_mass(n, m, k, l).finite().unwrap(), 4.0), "dual {n} {m} {k} {l}: {d:?}");
        }
    }

    #[test]
    fn tilted_estimators_match_plain_ones() {
        let f = make_test_function(6, 2, FunctionKind::TraceQuadratic { s: Matrix::diag(&[2.0, 0.0, 1.0, 0.0, 0.0, 0.5]) }).unwrap();
        let u = sample_stiefel(6, 2, Stream::new(4, 0));
        let a = sine_transform(&f, &u, 0.5, 60_000, Stream::new(5, 0)).unwrap();
        let b = sine_transform_tilted(&f, &u, 0.5, 60_000, 6).unwrap();
        assert!(a.agrees_with(&b, 4.0), "{a:?} {b:?}");
        let phi = make_test_function(5, 2, FunctionKind::TraceQuadratic { s: Matrix::diag(&[1.0, 0.0, 2.0, 0.0, 0.0]) }).unwrap();
        let v = sample_stiefel(5, 1, Stream::new(4, 1));
        let a = normalized_cosine_dual(&phi, &v, 0.5, 60_000, Stream::new(5, 1)).unwrap();
        let b = normalized_cosine_dual_tilted(&phi, &v, 0.5, 60_000, 7).unwrap();
        assert!(a.agrees_with(&b, 4.0), "{a:?} {b:?}");
    }

    #[test]
    fn lambda_zero_is_plain_average() {
        let f = make_test_function(4, 1, FunctionKind::TraceQuadratic { s: Matrix::diag(&[1.0, 0.0, 0.0, 0.0]) }).unwrap();
        let a = cosine_transform(&f, &Frame::top(4, 1), 0.0, 50_000, Stream::new(5, 0)).unwrap();
        let b = cosine_transform(&f, &Frame::bottom(4, 1), 0.0, 50_000, Stream::new(5, 0)).unwrap();
        assert_eq!(a.mean, b.mean);
        assert!(within(&a, 0.25, 4.0));
    }

    #[test]
    fn region_is_strict() {
        let one = InvariantFunction::constant(4, 1);
        let r = cosine_transform(&one, &Frame::top(4, 1), -1.0, 10, Stream::new(1, 0));
        assert!(matches!(r, Err(Error::OutOfConvergenceRegion { .. })));
        let r = sine_integral(&one, &Frame::top(4, 1), -3.0, 10, Stream::new(1, 0));
        assert!(matches!(r, Err(Error::OutOfConvergenceRegion { .. })));
    }

    #[test]
    fn normalized_ratio_is_gamma() {
        let one = InvariantFunction::constant(4, 1);
        let u = Frame::top(4, 1);
        let a = cosine_transform(&one, &u, -0.5, 20_000, Stream::new(1, 0)).unwrap();
        let b = normalized_cosine(&one, &u, -0.5, 20_000, Stream::new(1, 0)).unwrap();
        assert_eq!(b.mean / a.mean, gamma_factor(4, 1, 1, -0.5).unwrap());
        let r = normalized_cosine(&InvariantFunction::constant(5, 2), &Frame::top(5, 3), -1.0, 10, Stream::new(1, 0));
        assert!(matches!(r, Err(Error::PoleAtLambda { .. })));
    }

    #[test]
    fn sine_examples() {
        let one = InvariantFunction::constant(4, 1);
        let u = Frame::top(4, 1);
        let e = sine_integral(&one, &u, 2.0, 100_000, Stream::new(4, 0)).unwrap();
        assert!(within(&e, 0.75, 4.0));
        assert!((sine_mass(4, 1, 2.0).finite().unwrap() - 0.75).abs() < 1e-14);
        assert!(matches!(sine_transform(&one, &u, 0.0, 10, Stream::new(1, 0)), Err(Error::PoleAtLambda { .. })));
    }

    #[test]
    fn sine_equals_normalized_cosine_on_complement() {
        let (n, m) = (6, 2);
        let f = make_test_function(n, m, FunctionKind::TraceQuadratic { s: Matrix::diag(&[3.0, 1.0, 0.0, 0.0, 0.0, 2.0]) }).unwrap();
        let u = sample_stiefel(n, m, Stream::new(3, 3));
        let ut = frame_complement(&u).unwrap();
        let set = SampleSet::new(n, m, 17, 20_000);
        for l in [-1.5, 0.5, 1.5] {
            let a = sine_transform_with(&f, &u, l, &set).unwrap();
            let b = normalized_cosine_with(&f, &ut, l, &set).unwrap();
            assert!((a.mean - b.mean).abs() < 1e-10 * a.mean.abs().max(1.0), "{l}: {} vs {}", a.mean, b.mean);
        }
    }

    #[test]
    fn dual_complement_relation() {
        let (n, m, k, l) = (5, 1, 2, 1.0);
        let phi = make_test_function(n, k, FunctionKind::TraceQuadratic { s: Matrix::diag(&[2.0, 0.0, 1.0, 0.0, 0.0]) }).unwrap();
        let v = sample_stiefel(n, m, Stream::new(8, 0));
        let lhs = cosine_dual(&phi, &v, l, 100_000, Stream::new(10, 0)).unwrap();
        let phi_star = complement_function(&phi, n).unwrap();
        let vt = frame_complement(&v).unwrap();
        let rhs = cosine_transform(&phi_star, &vt, l, 100_000, Stream::new(11, 0)).unwrap();
        assert!(lhs.agrees_with(&rhs, 4.0), "{lhs:?} {rhs:?}");
    }

    #[test]
    fn zeta_closed_form() {
        for (n, m, l) in [(3, 1, 1.0), (4, 2, -1.0), (5, 2, 2.0)] {
            let (e, exact) = zeta_gaussian(n, m, l, 100_000, Stream::new(6, 0)).unwrap();
            assert!(within(&e, exact, 4.0), "{n} {m} {l}: {e:?} vs {exact}");
        }
    }

    #[test]
    fn odd_functions_are_annihilated() {
        let odd = ClosureFunction { cols: 1, right_invariant: false, f: |v: &Matrix| v.get(0, 0).powi(3) + *v.get(1, 0) };
        let u = sample_stiefel(4, 2, Stream::new(2, 2));
        let e = cosine_transform(&odd, &u, 1.0, 50_000, Stream::new(3, 3)).unwrap();
        assert!(within(&e, 0.0, 4.0), "{e:?}");
    }
}
