//! Duality pairings `⟨T f, φ⟩ = ⟨f, T* φ⟩` estimated from both sides.

use serde::{Deserialize, Serialize};

use super::cosine::{cosine_dual, cosine_transform};
use super::estimate::{EstimateParams, TransformEstimate};
use super::funk::{funk_dual, funk_transform, grassmann_radon, intermediate_funk, intermediate_funk_dual, RadonDirection};
use crate::error::{Error, Result};
use crate::manifolds::{sample_stiefel, Frame};
use crate::mc;
use crate::rng::Stream;
use crate::testfuncs::FrameFunction;

/// Transform whose duality is being checked. `f` lives on `V(n,m)` and `φ` on `V(n,k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairingKind {
    Funk,
    Cosine { lambda: f64 },
    Intermediate { j: usize },
    /// `R_{m,k}` between Grassmannians.
    Radon,
}

fn forward<F: FrameFunction + ?Sized>(t: PairingKind, f: &F, u: &Frame, inner: usize, s: Stream) -> Result<TransformEstimate> {
    match t {
        PairingKind::Funk => funk_transform(f, u, inner, s),
        PairingKind::Cosine { lambda } => cosine_transform(f, u, lambda, inner, s),
        PairingKind::Intermediate { j } => intermediate_funk(f, u, j, inner, 1, s),
        PairingKind::Radon => grassmann_radon(f, u, RadonDirection::Forward, f.cols(), u.m(), inner, s),
    }
}

fn backward<F: FrameFunction + ?Sized>(t: PairingKind, phi: &F, v: &Frame, inner: usize, s: Stream) -> Result<TransformEstimate> {
    match t {
        PairingKind::Funk => funk_dual(phi, v, inner, s),
        PairingKind::Cosine { lambda } => cosine_dual(phi, v, lambda, inner, s),
        PairingKind::Intermediate { j } => intermediate_funk_dual(phi, v, j, inner, 1, s),
        PairingKind::Radon => grassmann_radon(phi, v, RadonDirection::Dual, v.m(), phi.cols(), inner, s),
    }
}

/// `(lhs, rhs) = (E_u[(T f)(u) φ(u)], E_v[f(v) (T* φ)(v)])`, each with `n_outer`
/// outer Haar points and `n_inner` samples for the inner transform.
pub fn duality_pairing<F, G>(
    t: PairingKind,
    n: usize,
    f: &F,
    phi: &G,
    n_outer: usize,
    n_inner: usize,
    stream: Stream,
) -> Result<(TransformEstimate, TransformEstimate)>
where
    F: FrameFunction + ?Sized,
    G: FrameFunction + ?Sized,
{
    if n_outer == 0 || n_inner == 0 {
        return Err(Error::InvalidParams("sample counts must be positive".into()));
    }
    let (m, k) = (f.cols(), phi.cols());
    let mut params = EstimateParams::nmk(n, m, k);
    match t {
        PairingKind::Cosine { lambda } => params = params.with_lambda(lambda),
        PairingKind::Intermediate { j } => params = params.with_j(j),
        _ => {}
    }
    let (lo, li) = (stream.child("pairing-lhs"), stream.child("pairing-lhs-inner"));
    let (ro, ri) = (stream.child("pairing-rhs"), stream.child("pairing-rhs-inner"));
    let lhs = mc::try_estimate(n_outer, |o| {
        let u = sample_stiefel(n, k, Stream::new(lo, o as u64));
        let p = phi.eval_frame(u.matrix());
        Ok(forward(t, f, &u, n_inner, Stream::new(li, o as u64))?.mean * p)
    })?;
    let rhs = mc::try_estimate(n_outer, |o| {
        let v = sample_stiefel(n, m, Stream::new(ro, o as u64));
        let x = f.eval_frame(v.matrix());
        Ok(x * backward(t, phi, &v, n_inner, Stream::new(ri, o as u64))?.mean)
    })?;
    Ok((TransformEstimate::from_moments(&lhs, lo, params), TransformEstimate::from_moments(&rhs, ro, params)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::testfuncs::{make_test_function, FunctionKind, InvariantFunction};

    fn quad(n: usize, m: usize, d: &[f64]) -> InvariantFunction {
        make_test_function(n, m, FunctionKind::TraceQuadratic { s: Matrix::diag(d) }).unwrap()
    }

    #[test]
    fn constants_pair_exactly() {
        let one = InvariantFunction::constant(4, 1);
        let (l, r) = duality_pairing(PairingKind::Funk, 4, &one, &one, 50, 3, Stream::new(1, 0)).unwrap();
        assert_eq!((l.mean, r.mean, l.stderr, r.stderr), (1.0, 1.0, 0.0, 0.0));
    }

    #[test]
    fn sphere_funk_pairing() {
        let f = quad(4, 1, &[1.0, 0.0, 0.0, 0.0]);
        let phi = quad(4, 1, &[0.0, 1.0, 0.0, 0.0]);
        let (l, r) = duality_pairing(PairingKind::Funk, 4, &f, &phi, 40_000, 1, Stream::new(2, 0)).unwrap();
        assert!(l.agrees_with(&r, 4.0), "{l:?} {r:?}");
    }

    #[test]
    fn cosine_and_intermediate_pairings() {
        let f = quad(4, 1, &[1.0, 0.0, 0.0, 0.0]);
        let phi = quad(4, 2, &[0.0, 1.0, 2.0, 0.0]);
        let (l, r) = duality_pairing(PairingKind::Cosine { lambda: 1.0 }, 4, &f, &phi, 40_000, 1, Stream::new(3, 0)).unwrap();
        assert!(l.agrees_with(&r, 4.0), "{l:?} {r:?}");
        let f = quad(5, 2, &[1.0, 0.0, 0.0, 3.0, 0.0]);
        let phi = quad(5, 2, &[0.0, 1.0, 2.0, 0.0, 0.0]);
        let (l, r) = duality_pairing(PairingKind::Intermediate { j: 1 }, 5, &f, &phi, 20_000, 1, Stream::new(4, 0)).unwrap();
        assert!(l.agrees_with(&r, 4.0), "{l:?} {r:?}");
        let (l, r) = duality_pairing(PairingKind::Radon, 5, &f, &quad(5, 3, &[0.0, 1.0, 2.0, 0.0, 0.0]), 20_000, 1, Stream::new(5, 0))
            .unwrap();
        assert!(l.agrees_with(&r, 4.0), "{l:?} {r:?}");
    }
}
