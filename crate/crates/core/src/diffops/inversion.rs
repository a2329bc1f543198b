//! Inversion of Funk transforms through `Δ_{m-n,ℓ}`.
//!
//! Each formula is evaluated at a frame `v` from frozen draws of the composed
//! transform, so the operator acts on a smooth Monte Carlo field.

use serde::{Deserialize, Serialize};

use super::apply::{Backend, CompiledOp};
use super::field::{anchored_moments, Prepared};
use super::lambda::quarter_factor;
use super::operator::cayley_laplace_expand;
use crate::error::Result;
use crate::manifolds::{rotation_to_frame, Completion, Frame, LocalChart};
use crate::mc;
use crate::rng::derive_seed;
use crate::special::{constant, require, ConstParams, ConstantKind};
use crate::testfuncs::InvariantFunction;
use crate::transforms::{finite_or_pole, AnchorLaw, AnchoredSet, EstimateParams, TransformEstimate};

/// Draw count, seed and differentiation backend shared by the inversion routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InversionSetup {
    pub samples: usize,
    pub seed: u64,
    pub backend: Backend,
}

fn const_value(kind: ConstantKind, p: ConstParams) -> Result<f64> {
    finite_or_pole(constant(kind, &p)?, p.lambda)
}

/// `c · Δ_{m-n,ℓ} [composed transform of f]` at each point, for an anchored composition.
#[allow(clippy::too_many_arguments)]
fn apply_at(
    f: &InvariantFunction,
    points: &[Frame],
    law: AnchorLaw,
    c: f64,
    ell: usize,
    setup: &InversionSetup,
    label: &str,
    params: EstimateParams,
) -> Result<Vec<TransformEstimate>> {
    let (n, m) = (f.n(), f.m());
    let seed = derive_seed(setup.seed, label);
    let set = AnchoredSet::new(law, n, m, seed, setup.samples, 1)?;
    if ell == 0 {
        let set = set.with_scale(c);
        return points
            .iter()
            .map(|v| Ok(TransformEstimate::from_moments(&set.estimate_at(f, v, Completion::Standard)?.0, seed, params)))
            .collect();
    }
    let op = cayley_laplace_expand(m, ell)?;
    let compiled = CompiledOp::new(&op, n, setup.backend)?;
    let mu = (m as f64 - n as f64) + 2.0 * ell as f64;
    let set = set.with_scale(c * quarter_factor(m, ell));
    let mos = anchored_moments(&compiled, f, &set, points, mu)?;
    Ok(mos.iter().map(|mo| TransformEstimate::from_moments(mo, seed, params)).collect())
}

fn check_points(f: &InvariantFunction, points: &[Frame]) -> Result<()> {
    require(!points.is_empty(), "at least one evaluation point")?;
    require(points.iter().all(|v| f.n() == v.n() && f.m() == v.m()), "f and v live on the same V(n,m)")
}

/// Local inversion `f = δ_j Δ_{m-n,ℓ} F*^{(j)} F^{(j)} f`, `ℓ = (n-m+j-k)/2`.
///
/// Requires `m ≤ k ≤ n-m`, `m-n ≤ j-k ≤ min(-m, m-k-1)` and `n-m+j-k` even.
pub fn invert_local(
    f: &InvariantFunction,
    points: &[Frame],
    k: usize,
    j: usize,
    setup: &InversionSetup,
) -> Result<Vec<TransformEstimate>> {
    check_points(f, points)?;
    let (n, m) = (f.n(), f.m());
    let p = ConstParams { n, m, k, j, lambda: 0.0 };
    let delta = const_value(ConstantKind::DeltaJ, p)?;
    let twice = (n + j) as i64 - (m + k) as i64;
    require(twice % 2 == 0, "n-m+j-k even")?;
    let law = if j == 0 { AnchorLaw::FunkDualFunk { k } } else { AnchorLaw::IntermediateDualFunk { k, j } };
    let params = EstimateParams::nmk(n, m, k).with_j(j);
    apply_at(f, points, law, delta, (twice / 2) as usize, setup, "invert-local", params)
}

/// Nonlocal inversion `f = c Δ_{m-n,ℓ} F*^{(1)} F f`, `ℓ = (n-k-m+1)/2`, for `m < k ≤ n-m`, `n-k-m` odd.
pub fn invert_nonlocal(f: &InvariantFunction, points: &[Frame], k: usize, setup: &InversionSetup) -> Result<Vec<TransformEstimate>> {
    check_points(f, points)?;
    let (n, m) = (f.n(), f.m());
    require(m < k, "m < k")?;
    require(k + m <= n, "k <= n-m")?;
    require((n - k - m) % 2 == 1, "n-k-m odd")?;
    let c = const_value(ConstantKind::NonlocalC, ConstParams::nmk(n, m, k))?;
    let params = EstimateParams::nmk(n, m, k).with_j(1);
    apply_at(f, points, AnchorLaw::IntermediateDualFunk { k, j: 1 }, c, (n - k - m).div_ceil(2), setup, "invert-nonlocal", params)
}

/// Order of the two factors in the intertwining inversion `f = D F φ = F D φ`, `φ = F f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intertwining {
    /// `D F φ`.
    OperatorFirst,
    /// `F D φ`.
    FunkFirst,
}

/// Intertwining inversion for `k = m`, `n` even, `D = c Δ_{m-n,(n-2m)/2}`.
pub fn invert_intertwining(
    f: &InvariantFunction,
    points: &[Frame],
    order: Intertwining,
    setup: &InversionSetup,
) -> Result<Vec<TransformEstimate>> {
    check_points(f, points)?;
    let (n, m) = (f.n(), f.m());
    require(2 * m <= n, "m <= n-m")?;
    require(n % 2 == 0, "n even")?;
    let c = const_value(ConstantKind::IntertwiningC, ConstParams::nmk(n, m, m))?;
    let ell = (n - 2 * m) / 2;
    let params = EstimateParams::nmk(n, m, m);
    match order {
        Intertwining::OperatorFirst => apply_at(f, points, AnchorLaw::FunkDualFunk { k: m }, c, ell, setup, "invert-df", params),
        Intertwining::FunkFirst => {
            // outer Funk at v over u = g_v W; at each u, D applied to the inner Funk field
            let seed = derive_seed(setup.seed, "invert-fd");
            let outer = AnchoredSet::new(AnchorLaw::Funk { k: m }, n, m, derive_seed(seed, "outer"), setup.samples, 1)?;
            let inner = AnchoredSet::new(AnchorLaw::Funk { k: m }, n, m, derive_seed(seed, "inner"), setup.samples, 1)?;
            let op = cayley_laplace_expand(m, ell.max(1))?;
            let compiled = CompiledOp::new(&op, n, setup.backend)?;
            let mu = -(m as f64);
            let scale = c * quarter_factor(m, ell);
            points
                .iter()
                .map(|v| {
                    let g = rotation_to_frame(v, outer.anchor())?;
                    let mo = mc::try_estimate(setup.samples, |o| {
                        let (w, _) = outer.draw(o, 0)?;
                        let u = Frame::new_unchecked(g.matrix().matmul(&w));
                        let (w2, _) = inner.draw(o, 0)?;
                        if ell == 0 {
                            let g2 = rotation_to_frame(&u, inner.anchor())?;
                            return Ok(c * f.eval_frame(&g2.matrix().matmul(&w2)));
                        }
                        let chart = LocalChart::new(&u, inner.anchor())?;
                        let prep = Prepared::new(&compiled, &chart, u.matrix(), mu, f)?;
                        Ok(scale * prep.eval(f, &w2))
                    })?;
                    Ok(TransformEstimate::from_moments(&mo, seed, params))
                })
                .collect()
        }
    }
}

/// `δ_j (F*^{(j)} F f)(v)`, which equals the sine transform `S^{j-k} f(v)`.
pub fn sine_via_intermediate(f: &InvariantFunction, v: &Frame, k: usize, j: usize, samples: usize, seed: u64) -> Result<TransformEstimate> {
    check_points(f, std::slice::from_ref(v))?;
    let (n, m) = (v.n(), v.m());
    let delta = const_value(ConstantKind::DeltaJ, ConstParams { n, m, k, j, lambda: 0.0 })?;
    let law = if j == 0 { AnchorLaw::FunkDualFunk { k } } else { AnchorLaw::IntermediateDualFunk { k, j } };
    let seed = derive_seed(seed, "sine-via-intermediate");
    let set = AnchoredSet::new(law, n, m, seed, samples, 1)?.with_scale(delta);
    let (mo, _) = set.estimate_at(f, v, Completion::Standard)?;
    Ok(TransformEstimate::from_moments(&mo, seed, EstimateParams::nmk(n, m, k).with_j(j).with_lambda(j as f64 - k as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::manifolds::sample_stiefel;
    use crate::rng::Stream;
    use crate::testfuncs::{make_test_function, FunctionKind};
    use crate::transforms::sine_transform;

    fn v1sq() -> InvariantFunction {
        make_test_function(4, 1, FunctionKind::TraceQuadratic { s: Matrix::diag(&[1.0, 0.0, 0.0, 0.0]) }).unwrap()
    }

    fn setup(samples: usize, backend: Backend) -> InversionSetup {
        InversionSetup { samples, seed: 21, backend }
    }

    #[test]
    fn sphere_local_inversion() {
        let f = v1sq();
        for (s, backend) in [(0, Backend::Jets { order: 2 }), (1, Backend::DEFAULT_FD)] {
            let v = sample_stiefel(4, 1, Stream::new(6, s));
            let e = invert_local(&f, std::slice::from_ref(&v), 1, 0, &setup(20_000, backend)).unwrap()[0];
            assert!((e.mean - f.eval(&v)).abs() < (4.0 * e.stderr).max(0.03), "{e:?} vs {}", f.eval(&v));
        }
    }

    #[test]
    fn sphere_intertwining_both_orders() {
        let f = v1sq();
        let v = sample_stiefel(4, 1, Stream::new(7, 0));
        for order in [Intertwining::OperatorFirst, Intertwining::FunkFirst] {
            let e = invert_intertwining(&f, std::slice::from_ref(&v), order, &setup(20_000, Backend::Jets { order: 2 })).unwrap()[0];
            assert!((e.mean - f.eval(&v)).abs() < (4.0 * e.stderr).max(0.03), "{order:?}: {e:?} vs {}", f.eval(&v));
        }
    }

    #[test]
    fn admissibility() {
        let f = v1sq();
        let v = Frame::top(4, 1);
        let s = setup(10, Backend::Jets { order: 2 });
        assert!(invert_local(&f, std::slice::from_ref(&v), 2, 0, &s).is_err());
        assert!(invert_nonlocal(&f, std::slice::from_ref(&v), 1, &s).is_err());
        let f5 = make_test_function(5, 1, FunctionKind::Constant).unwrap();
        assert!(invert_intertwining(&f5, &[Frame::top(5, 1)], Intertwining::FunkFirst, &s).is_err());
    }

    #[test]
    fn sine_reduction_identity() {
        // S^{j-k} f = δ_j F*^{(j)} F f at n = 6, m = 2, k = 3, j = 1
        let f = make_test_function(6, 2, FunctionKind::TraceQuadratic { s: Matrix::diag(&[2.0, 0.0, 1.0, 0.0, 0.0, 0.5]) }).unwrap();
        let v = sample_stiefel(6, 2, Stream::new(8, 0));
        let a = sine_via_intermediate(&f, &v, 3, 1, 40_000, 3).unwrap();
        let b = sine_transform(&f, &v, -2.0, 40_000, Stream::new(9, 0)).unwrap();
        assert!(a.agrees_with(&b, 4.0), "{a:?} {b:?}");
    }
}
