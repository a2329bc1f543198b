//! `Δ^ℓ` of Monte Carlo fields `x ↦ |x|_m^μ E[ω f(g(x) W)]` with frozen draws `W`.
//!
//! `g(x)` is the chart rotation at the frame `q(x)` spanning `x`, so for each
//! fixed draw the integrand is a smooth function of `x`. Differentiating
//! draw by draw and then averaging gives the operator applied to the
//! common-random-numbers estimate, with an honest standard error.

use super::apply::CompiledOp;
use super::jet::Jet;
use crate::error::{Error, Result};
use crate::linalg::{gram_power, gram_schmidt, Mat, Matrix, Scalar};
use crate::manifolds::{Frame, LocalChart};
use crate::mc::{self, Moments};
use crate::testfuncs::{FunctionKind, InvariantFunction};
use crate::transforms::AnchoredSet;

/// Everything about the evaluation point that does not depend on the draw.
pub enum Prepared<'a> {
    Jets { op: &'a CompiledOp, rot: Mat<Jet>, weight: Jet },
    Fd { points: Vec<(f64, Matrix)> },
    /// For `f = tr(y'Sy)` the stencil sum `Σ c_p f(R_p W)` equals `tr(W'MW)`
    /// with `M = Σ c_p R_p'SR_p`.
    Quadratic { m: Matrix },
}

impl<'a> Prepared<'a> {
    /// Expand around the frame `x` using a chart whose base is (near) `x`.
    pub fn new(op: &'a CompiledOp, chart: &LocalChart, x: &Matrix, mu: f64, f: &InvariantFunction) -> Result<Self> {
        if op.is_jets() {
            let xj = op.lift(x).expect("jets plan");
            let rot = chart.rotation(&gram_schmidt(&xj));
            let weight = gram_power(&xj, mu);
            return Ok(Prepared::Jets { op, rot, weight });
        }
        let points: Vec<(f64, Matrix)> = op
            .points(x)
            .expect("fd plan")
            .into_iter()
            .map(|(y, w)| (w * gram_power(&y, mu), chart.rotation(&gram_schmidt(&y))))
            .collect();
        if let FunctionKind::TraceQuadratic { s } = f.kind() {
            let n = x.rows();
            let mut m = Matrix::zeros(n, n);
            for (c, r) in &points {
                m = m.plus(&r.t_matmul(&s.matmul(r)).scaled(*c));
            }
            return Ok(Prepared::Quadratic { m });
        }
        Ok(Prepared::Fd { points })
    }

    /// `Δ^ℓ [x ↦ |x|^μ f(g(x) w)]` at the prepared point.
    pub fn eval(&self, f: &InvariantFunction, w: &Matrix) -> f64 {
        match self {
            Prepared::Jets { op, rot, weight } => op.contract(&f.eval_extension(&rot.right_mul_f64(w), 0.0).times(weight)),
            Prepared::Fd { points } => points.iter().map(|(c, r)| c * f.eval_frame(&r.matmul(w))).sum(),
            Prepared::Quadratic { m } => w.t_matmul(&m.matmul(w)).trace(),
        }
    }
}

/// Per-draw moments of `scale · Δ^ℓ [|x|^μ E[ω f(g(x) W)]]` at each base, sharing the draws.
pub fn anchored_moments(
    op: &CompiledOp,
    f: &InvariantFunction,
    set: &AnchoredSet,
    bases: &[Frame],
    mu: f64,
) -> Result<Vec<Moments>> {
    if set.draw_cols() != f.m() || bases.iter().any(|b| b.m() != set.anchor().m() || b.n() != set.n) {
        return Err(Error::Shape("function, set and evaluation points do not fit together".into()));
    }
    let charts = bases.iter().map(|b| LocalChart::new(b, set.anchor())).collect::<Result<Vec<_>>>()?;
    let preps = charts
        .iter()
        .zip(bases)
        .map(|(c, b)| Prepared::new(op, c, b.matrix(), mu, f))
        .collect::<Result<Vec<_>>>()?;
    mc::try_estimate_vec(set.outer, preps.len(), |o, out| {
        out.iter_mut().for_each(|x| *x = 0.0);
        for i in 0..set.inner {
            let (w, om) = set.draw(o, i)?;
            if om != 0.0 {
                for (x, p) in out.iter_mut().zip(&preps) {
                    *x += om * p.eval(f, &w);
                }
            }
        }
        out.iter_mut().for_each(|x| *x *= set.scale / set.inner as f64);
        Ok(())
    })
}
