//! Shared sample sets.
//!
//! Every transform here can be written as `T(p) = scale · E[ω(W) f(g_p W)]`
//! where `g_p` is a rotation taking a fixed anchor frame to the evaluation
//! point `p` and `W` has a law that does not depend on `p`. Freezing the draws
//! of `W` makes the estimate a smooth function of `p`, which is what the
//! differential operators need.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution};

use crate::error::{Error, Result};
use crate::linalg::{cgs2, Matrix};
use crate::manifolds::{
    cos_metric_raw, frame_complement, rotation_to_frame, rotation_to_frame_with, sample_orthogonal, sample_stiefel, sample_stiefel_from,
    sin_metric_raw, Completion, Frame,
};
use crate::mc::{self, Moments};
use crate::rng::{derive_seed, gaussian_from, normal, Stream};
use crate::testfuncs::FrameFunction;

/// Haar frames on `V(n,m)` regenerated from `(seed, index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSet {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub len: usize,
}

impl SampleSet {
    pub fn new(n: usize, m: usize, seed: u64, len: usize) -> Self {
        Self { n, m, seed, len }
    }

    pub fn frame(&self, i: usize) -> Frame {
        sample_stiefel(self.n, self.m, Stream::new(self.seed, i as u64))
    }
}

/// Law of the anchored frame `W`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnchorLaw {
    /// Funk transform: `W = [θ; 0]`, `θ ∈ V(n-k, m)`.
    Funk { k: usize },
    /// Dual Funk transform: `W = [0; θ]`, `θ ∈ V(n-m, k)`.
    FunkDual { k: usize },
    /// Intermediate transform: `W = diag(I_{n-k}, γ)[ω; 0]`, `γ ∈ O(k)`, `ω ∈ V(n-k+j, m)`.
    Intermediate { k: usize, j: usize },
    /// Dual intermediate transform: `W = b̃ ã u0` with `b ∈ O(n-m)`, `a ∈ O(n-k+j)`.
    IntermediateDual { k: usize, j: usize },
    /// Auxiliary operator `A_{k,m}`: `W = diag(a, I_m)`, `a ∈ V(n-m, k-m)`.
    Akm { k: usize },
    /// `F* F`: `W = g_{[0;θ]} [ϑ; 0]`.
    FunkDualFunk { k: usize },
    /// `F*^{(j)} F`: `W = b̃ ã [ϑ; 0]`.
    IntermediateDualFunk { k: usize, j: usize },
    /// Haar `W ∈ V(n,m)` weighted by `|a'W|_m^λ` (cosine transform, anchor `u0`).
    HaarCosine { k: usize, lambda: f64 },
    /// Haar `W ∈ V(n,k)` weighted by `|W'a|_m^λ` (dual cosine transform, anchor `v0`).
    HaarCosineDual { k: usize, lambda: f64 },
    /// Haar `W ∈ V(n,m)` weighted by `det(I - W'aa'W)^{λ/2}` (sine transform, anchor `v0`).
    HaarSine { lambda: f64 },
    /// `W ∈ V(n,m)` with density proportional to `|u0'W|_m^μ`, `u0 = [0; I_k]`;
    /// the cosine transform with exact importance weights (anchor `u0`).
    TiltedCosine { k: usize, mu: f64 },
    /// `W ∈ V(n,m)` with density proportional to `det(I - W'v0v0'W)^{μ/2}`;
    /// the sine transform with exact importance weights (anchor `v0`).
    TiltedSine { mu: f64 },
    /// `W ∈ V(n,k)` with density proportional to `|W'v0|_m^μ`, drawn as the complement
    /// of a tilted `(n-k)`-frame since `|W'v0|_m = |W⊥'v0⊥|_{n-k}`. Only the span of `W`
    /// is determined, so the integrand must be right `O(k)`-invariant.
    TiltedCosineDual { k: usize, mu: f64 },
}

/// Draw from the law of `W` with density proportional to `|[0;I_K]' W|_m^μ`.
///
/// `X = [Y; Z]` with `Y` Gaussian and `Z = Q R`, `Q` Haar on `V(K,m)`,
/// `R` upper triangular with `R_ii ~ χ(K-i+1+μ)` and standard normal entries
/// above the diagonal. The Gaussian law tilted by `|Z|^μ = ∏ R_ii^μ` has
/// exactly this Bartlett form, and the span of `X` then has the required
/// density because `|X|` is independent of its span.
pub fn tilted_frame<R: Rng + ?Sized>(n: usize, m: usize, big_k: usize, mu: f64, rng: &mut R) -> Result<Matrix> {
    if big_k < m || big_k > n {
        return Err(Error::InadmissibleParameters("tilted law needs m <= K <= n".into()));
    }
    if mu <= m as f64 - big_k as f64 - 1.0 {
        return Err(Error::OutOfConvergenceRegion { lambda: mu, bound: m as f64 - big_k as f64 - 1.0 });
    }
    loop {
        let y = gaussian_from(n - big_k, m, rng);
        let q = sample_stiefel_from(big_k, m, rng).into_matrix();
        let mut r = Matrix::zeros(m, m);
        for i in 0..m {
            let dof = (big_k - i) as f64 + mu;
            let chi = ChiSquared::new(dof).map_err(|_| Error::NumericalBreakdown)?.sample(rng).sqrt();
            r.set(i, i, chi);
            for jj in i + 1..m {
                r.set(i, jj, normal(rng));
            }
        }
        let z = q.matmul(&r);
        let x = Matrix::from_fn(n, m, |i, c| if i < n - big_k { *y.get(i, c) } else { *z.get(i - (n - big_k), c) });
        if let Some((w, _)) = cgs2(&x) {
            return Ok(w);
        }
    }
}

fn embed_top(theta: &Matrix, n: usize) -> Matrix {
    Matrix::pad_rows(theta, n)
}

fn embed_bottom(theta: &Matrix, n: usize) -> Matrix {
    Matrix::pad_rows_top(theta, n)
}

/// Frozen draws of an anchored law.
#[derive(Debug, Clone)]
pub struct AnchoredSet {
    pub law: AnchorLaw,
    pub n: usize,
    /// Size of the frames the transformed function lives on.
    pub m: usize,
    pub seed: u64,
    pub outer: usize,
    pub inner: usize,
    pub scale: f64,
    anchor: Frame,
}

impl AnchoredSet {
    /// `m` is the frame size of the function's domain `V(n,m)` in the forward transforms.
    pub fn new(law: AnchorLaw, n: usize, m: usize, seed: u64, outer: usize, inner: usize) -> Result<Self> {
        let anchor = match law {
            AnchorLaw::Funk { k }
            | AnchorLaw::Intermediate { k, .. }
            | AnchorLaw::HaarCosine { k, .. }
            | AnchorLaw::TiltedCosine { k, .. } => Frame::bottom(n, k),
            AnchorLaw::Akm { .. } => Frame::bottom(n, m),
            _ => Frame::top(n, m),
        };
        if outer == 0 || inner == 0 {
            return Err(Error::InvalidParams("sample counts must be positive".into()));
        }
        Ok(Self { law, n, m, seed, outer, inner, scale: 1.0, anchor })
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn anchor(&self) -> &Frame {
        &self.anchor
    }

    /// Column count of the drawn `W` (domain of the integrated function).
    pub fn draw_cols(&self) -> usize {
        match self.law {
            AnchorLaw::FunkDual { k } | AnchorLaw::IntermediateDual { k, .. } | AnchorLaw::Akm { k } => k,
            AnchorLaw::HaarCosineDual { k, .. } | AnchorLaw::TiltedCosineDual { k, .. } => k,
            _ => self.m,
        }
    }

    pub fn len(&self) -> usize {
        self.outer * self.inner
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn outer_rng(&self, o: usize) -> rand_chacha::ChaCha8Rng {
        Stream::new(derive_seed(self.seed, "outer"), o as u64).rng()
    }

    fn inner_rng(&self, o: usize, i: usize) -> rand_chacha::ChaCha8Rng {
        Stream::new(derive_seed(self.seed, "inner"), (o * self.inner + i) as u64).rng()
    }

    /// Draw `(W, ω)` for outer index `o` and inner index `i`.
    pub fn draw(&self, o: usize, i: usize) -> Result<(Matrix, f64)> {
        let n = self.n;
        let m = self.m;
        let mut ir = self.inner_rng(o, i);
        Ok(match self.law {
            AnchorLaw::Funk { k } => (embed_top(sample_stiefel_from(n - k, m, &mut ir).matrix(), n), 1.0),
            AnchorLaw::FunkDual { k } => (embed_bottom(sample_stiefel_from(n - m, k, &mut ir).matrix(), n), 1.0),
            AnchorLaw::Intermediate { k, j } => {
                let gamma = sample_orthogonal(k, &mut self.outer_rng(o));
                let omega = sample_stiefel_from(n - k + j, m, &mut ir);
                let g = Matrix::block_identity(n, n - k, &gamma);
                (g.matmul(&embed_top(omega.matrix(), n)), 1.0)
            }
            AnchorLaw::IntermediateDual { k, j } => {
                let b = sample_orthogonal(n - m, &mut self.outer_rng(o));
                let a = sample_orthogonal(n - k + j, &mut ir);
                let bt = Matrix::block_identity(n, m, &b);
                let at = Matrix::block_identity(n, 0, &a);
                (bt.matmul(&at.matmul(&Matrix::bottom_frame(n, k))), 1.0)
            }
            AnchorLaw::Akm { k } => {
                let w = if k == m {
                    Matrix::bottom_frame(n, m)
                } else {
                    let a = sample_stiefel_from(n - m, k - m, &mut ir).into_matrix();
                    Matrix::from_fn(n, k, |r, c| {
                        if c < k - m {
                            if r < n - m {
                                *a.get(r, c)
                            } else {
                                0.0
                            }
                        } else if r >= n - m && r - (n - m) == c - (k - m) {
                            1.0
                        } else {
                            0.0
                        }
                    })
                };
                (w, 1.0)
            }
            AnchorLaw::FunkDualFunk { k } => {
                let theta = sample_stiefel_from(n - m, k, &mut self.outer_rng(o));
                let u = Frame::new(embed_bottom(theta.matrix(), n))?;
                let g = rotation_to_frame(&u, &Frame::bottom(n, k))?;
                let vt = sample_stiefel_from(n - k, m, &mut ir);
                (g.matrix().matmul(&embed_top(vt.matrix(), n)), 1.0)
            }
            AnchorLaw::IntermediateDualFunk { k, j } => {
                let b = sample_orthogonal(n - m, &mut self.outer_rng(o));
                let a = sample_orthogonal(n - k + j, &mut ir);
                let vt = sample_stiefel_from(n - k, m, &mut ir);
                let bt = Matrix::block_identity(n, m, &b);
                let at = Matrix::block_identity(n, 0, &a);
                (bt.matmul(&at.matmul(&embed_top(vt.matrix(), n))), 1.0)
            }
            AnchorLaw::HaarCosine { lambda, .. } => {
                let w = sample_stiefel_from(n, m, &mut ir).into_matrix();
                let c = cos_metric_raw(self.anchor.matrix(), &w);
                (w, c.powf(lambda))
            }
            AnchorLaw::HaarCosineDual { k, lambda } => {
                let w = sample_stiefel_from(n, k, &mut ir).into_matrix();
                let c = cos_metric_raw(&w, self.anchor.matrix());
                (w, c.powf(lambda))
            }
            AnchorLaw::HaarSine { lambda } => {
                let w = sample_stiefel_from(n, m, &mut ir).into_matrix();
                let s = sin_metric_raw(self.anchor.matrix(), &w);
                (w, s.powf(lambda / 2.0))
            }
            AnchorLaw::TiltedCosine { k, mu } => (tilted_frame(n, m, k, mu, &mut ir)?, 1.0),
            AnchorLaw::TiltedSine { mu } => (tilted_frame(n, m, n - m, mu, &mut ir)?, 1.0),
            AnchorLaw::TiltedCosineDual { k, mu } => {
                if k >= n {
                    return Err(Error::InadmissibleParameters("tilted dual law needs k < n".into()));
                }
                let wt = Frame::new_unchecked(tilted_frame(n, n - k, n - m, mu, &mut ir)?);
                (frame_complement(&wt)?.into_matrix(), 1.0)
            }
        })
    }

    /// All inner draws for one outer index.
    pub fn draw_group(&self, o: usize) -> Result<Vec<(Matrix, f64)>> {
        (0..self.inner).map(|i| self.draw(o, i)).collect()
    }

    /// `scale · E[ω f(g_p W)]` with `g_p` from the given completion rule.
    pub fn estimate_at<F: FrameFunction + ?Sized>(&self, f: &F, p: &Frame, rule: Completion) -> Result<(Moments, f64)> {
        if p.n() != self.n || p.m() != self.anchor.m() {
            return Err(Error::Shape("evaluation point does not match the anchor".into()));
        }
        let g = rotation_to_frame_with(p, &self.anchor, rule)?;
        let mo = mc::try_estimate(self.outer, |o| {
            let mut acc = 0.0;
            for i in 0..self.inner {
                let (w, om) = self.draw(o, i)?;
                if om != 0.0 {
                    acc += om * f.eval_frame(&g.matrix().matmul(&w));
                }
            }
            Ok(self.scale * acc / self.inner as f64)
        })?;
        Ok((mo, self.scale))
    }
}
