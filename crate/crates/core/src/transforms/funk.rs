//! Funk-type transforms, their intermediate generalizations and Grassmannian Radon transforms.

use serde::{Deserialize, Serialize};

use super::estimate::{EstimateParams, TransformEstimate};
use super::sets::{AnchorLaw, AnchoredSet};
use crate::error::{Error, Result};
use crate::manifolds::{frame_complement, sample_stiefel_from, Completion, Frame};
use crate::mc;
use crate::rng::{derive_seed, Stream};
use crate::special::{check_base, check_intermediate, require, ConstParams};
use crate::testfuncs::FrameFunction;

fn anchored<F: FrameFunction + ?Sized>(
    set: &AnchoredSet,
    f: &F,
    p: &Frame,
    rule: Completion,
    params: EstimateParams,
) -> Result<TransformEstimate> {
    let (mo, _) = set.estimate_at(f, p, rule)?;
    Ok(TransformEstimate::from_moments(&mo, set.seed, params))
}

fn funk_admissible(n: usize, m: usize, k: usize) -> Result<()> {
    require(m >= 1 && k >= 1, "1 <= m, 1 <= k")?;
    require(k + m <= n, "k+m <= n")
}

/// Funk transform `(F f)(u)`: average of `f` over `m`-frames orthogonal to `u ∈ V(n,k)`.
pub fn funk_transform<F: FrameFunction + ?Sized>(f: &F, u: &Frame, samples: usize, stream: Stream) -> Result<TransformEstimate> {
    funk_transform_rule(f, u, samples, stream, Completion::Standard)
}

/// [`funk_transform`] with an explicit convention for the rotation `g_u`.
pub fn funk_transform_rule<F: FrameFunction + ?Sized>(
    f: &F,
    u: &Frame,
    samples: usize,
    stream: Stream,
    rule: Completion,
) -> Result<TransformEstimate> {
    let (n, m, k) = (u.n(), f.cols(), u.m());
    funk_admissible(n, m, k)?;
    let set = AnchoredSet::new(AnchorLaw::Funk { k }, n, m, stream.child("funk"), samples, 1)?;
    anchored(&set, f, u, rule, EstimateParams::nmk(n, m, k))
}

/// Dual Funk transform `(F* φ)(v)`: average of `φ` over `k`-frames orthogonal to `v ∈ V(n,m)`.
pub fn funk_dual<F: FrameFunction + ?Sized>(phi: &F, v: &Frame, samples: usize, stream: Stream) -> Result<TransformEstimate> {
    let (n, m, k) = (v.n(), v.m(), phi.cols());
    funk_admissible(n, m, k)?;
    let set = AnchoredSet::new(AnchorLaw::FunkDual { k }, n, m, stream.child("funk-dual"), samples, 1)?;
    anchored(&set, phi, v, Completion::Standard, EstimateParams::nmk(n, m, k))
}

/// Intermediate Funk transform `F^{(j)} f` at `u ∈ V(n,k)`, averaged over
/// `n_outer` rotations `γ ∈ O(k)` and `n_inner` frames `ω ∈ V(n-k+j, m)` each.
pub fn intermediate_funk<F: FrameFunction + ?Sized>(
    f: &F,
    u: &Frame,
    j: usize,
    n_outer: usize,
    n_inner: usize,
    stream: Stream,
) -> Result<TransformEstimate> {
    intermediate_funk_rule(f, u, j, n_outer, n_inner, stream, Completion::Standard)
}

pub fn intermediate_funk_rule<F: FrameFunction + ?Sized>(
    f: &F,
    u: &Frame,
    j: usize,
    n_outer: usize,
    n_inner: usize,
    stream: Stream,
    rule: Completion,
) -> Result<TransformEstimate> {
    let (n, m, k) = (u.n(), f.cols(), u.m());
    check_intermediate(&ConstParams { n, m, k, j, lambda: 0.0 })?;
    let set = AnchoredSet::new(AnchorLaw::Intermediate { k, j }, n, m, stream.child("ifunk"), n_outer, n_inner)?;
    anchored(&set, f, u, rule, EstimateParams::nmk(n, m, k).with_j(j))
}

/// Dual intermediate transform `F*^{(j)} φ` at `v ∈ V(n,m)` for right-invariant `φ` on `V(n,k)`.
pub fn intermediate_funk_dual<F: FrameFunction + ?Sized>(
    phi: &F,
    v: &Frame,
    j: usize,
    n_outer: usize,
    n_inner: usize,
    stream: Stream,
) -> Result<TransformEstimate> {
    if !phi.right_invariant() {
        return Err(Error::NotRightInvariant);
    }
    let (n, m, k) = (v.n(), v.m(), phi.cols());
    check_intermediate(&ConstParams { n, m, k, j, lambda: 0.0 })?;
    let set = AnchoredSet::new(AnchorLaw::IntermediateDual { k, j }, n, m, stream.child("ifunk-dual"), n_outer, n_inner)?;
    anchored(&set, phi, v, Completion::Standard, EstimateParams::nmk(n, m, k).with_j(j))
}

/// `F^{(j)} f` through the Grassmannian composition: average over
/// `(n-k+j)`-subspaces `η ⊃ u^⊥`, then over `m`-subspaces of `η`.
pub fn intermediate_funk_grassmann<F: FrameFunction + ?Sized>(
    f: &F,
    u: &Frame,
    j: usize,
    n_outer: usize,
    n_inner: usize,
    stream: Stream,
) -> Result<TransformEstimate> {
    let (n, m, k) = (u.n(), f.cols(), u.m());
    check_intermediate(&ConstParams { n, m, k, j, lambda: 0.0 })?;
    if n_outer == 0 || n_inner == 0 {
        return Err(Error::InvalidParams("sample counts must be positive".into()));
    }
    let ut = frame_complement(u)?;
    let seed = stream.child("ifunk-grassmann");
    let (so, si) = (derive_seed(seed, "outer"), derive_seed(seed, "inner"));
    let q = n - k + j;
    let mo = mc::try_estimate(n_outer, |o| {
        let eta = if j == 0 {
            ut.matrix().clone()
        } else {
            let theta = sample_stiefel_from(k, j, &mut Stream::new(so, o as u64).rng());
            ut.matrix().hstack(&u.matrix().matmul(theta.matrix()))
        };
        let mut acc = 0.0;
        for i in 0..n_inner {
            let omega = sample_stiefel_from(q, m, &mut Stream::new(si, (o * n_inner + i) as u64).rng());
            acc += f.eval_frame(&eta.matmul(omega.matrix()));
        }
        Ok(acc / n_inner as f64)
    })?;
    Ok(TransformEstimate::from_moments(&mo, seed, EstimateParams::nmk(n, m, k).with_j(j)))
}

/// Auxiliary operator `(A_{k,m} φ)(v)`: average of `φ(g_v diag(a, I_m))` over `a ∈ V(n-m, k-m)`.
pub fn a_km<F: FrameFunction + ?Sized>(phi: &F, v: &Frame, samples: usize, stream: Stream) -> Result<TransformEstimate> {
    if !phi.right_invariant() {
        return Err(Error::NotRightInvariant);
    }
    let (n, m, k) = (v.n(), v.m(), phi.cols());
    check_base(&ConstParams::nmk(n, m, k))?;
    let params = EstimateParams::nmk(n, m, k);
    if k == m {
        return Ok(TransformEstimate::exact(phi.eval_frame(v.matrix()), params));
    }
    let set = AnchoredSet::new(AnchorLaw::Akm { k }, n, m, stream.child("akm"), samples, 1)?;
    anchored(&set, phi, v, Completion::Standard, params)
}

/// Direction of a Grassmannian Radon transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadonDirection {
    /// `R_{p,q}`: from functions of `p`-planes to functions of `q`-planes.
    Forward,
    /// `R*_{p,q}`: from functions of `q`-planes to functions of `p`-planes.
    Dual,
}

/// Grassmannian Radon transform with planes represented by frames.
///
/// Forward: `f` lives on `V(n,p)`, `eta ∈ V(n,q)`; averages `f` over `p`-planes inside `span(eta)`.
/// Dual: `f` lives on `V(n,q)`, `eta ∈ V(n,p)`; averages `f` over `q`-planes containing `span(eta)`.
pub fn grassmann_radon<F: FrameFunction + ?Sized>(
    f: &F,
    eta: &Frame,
    direction: RadonDirection,
    p: usize,
    q: usize,
    samples: usize,
    stream: Stream,
) -> Result<TransformEstimate> {
    let n = eta.n();
    require(1 <= p && p <= q && q < n, "1 <= p <= q <= n-1")?;
    let (fc, ec) = match direction {
        RadonDirection::Forward => (p, q),
        RadonDirection::Dual => (q, p),
    };
    require(f.cols() == fc && eta.m() == ec, "frame sizes match (p, q)")?;
    if !f.right_invariant() {
        return Err(Error::NotRightInvariant);
    }
    let params = EstimateParams::nmk(n, p, q);
    if p == q {
        return Ok(TransformEstimate::exact(f.eval_frame(eta.matrix()), params));
    }
    let seed = stream.child(match direction {
        RadonDirection::Forward => "radon",
        RadonDirection::Dual => "radon-dual",
    });
    let mo = match direction {
        RadonDirection::Forward => mc::try_estimate(samples, |i| {
            let theta = sample_stiefel_from(q, p, &mut Stream::new(seed, i as u64).rng());
            Ok(f.eval_frame(&eta.matrix().matmul(theta.matrix())))
        })?,
        RadonDirection::Dual => {
            let et = frame_complement(eta)?;
            mc::try_estimate(samples, |i| {
                let theta = sample_stiefel_from(n - p, q - p, &mut Stream::new(seed, i as u64).rng());
                Ok(f.eval_frame(&eta.matrix().hstack(&et.matrix().matmul(theta.matrix()))))
            })?
        }
    };
    Ok(TransformEstimate::from_moments(&mo, seed, params))
}
