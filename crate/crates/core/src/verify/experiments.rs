//! One runner per experiment tag.

use std::f64::consts::PI;

use super::config::{ExperimentSpec, Tag, Tolerance};
use super::report::{Check, Expected, Observed};
use crate::diffops::{
    apply_diffop, cayley_laplace_expand, delta_lambda_ell, invert_intertwining, invert_local, invert_nonlocal,
    kernel_diff_cosine_dual, kernel_diff_sine_many, sine_via_intermediate, Backend, GramPower, Intertwining, InversionSetup,
    SineMode,
};
use crate::error::{Error, Result};
use crate::linalg::{gram_power, Matrix};
use crate::manifolds::{cos_metric, frame_complement, sample_orthogonal, sample_stiefel, sin_metric, Frame, Rotation};
use crate::rng::{derive_seed, gaussian_matrix, Stream};
use crate::special::{bernstein_poly, constant, cosine_mass, siegel_gamma, sine_mass, ConstParams, ConstantKind, MeroValue};
use crate::testfuncs::oracle::{delta_lambda_eigenvalue, funk_hecke_closed, funk_hecke_quadrature};
use crate::testfuncs::{make_test_function, parse_function_key, FunctionKind, InvariantFunction};
use crate::transforms::{
    a_km, cosine_transform, duality_pairing, grassmann_radon, intermediate_funk, intermediate_funk_grassmann,
    normalized_cosine_dual_tilted, sine_integral, sine_transform_tilted, RadonDirection, SampleSet, TransformEstimate,
};

const EXACT_RTOL: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-10;
const JETS_RTOL: f64 = 1e-6;
const FD_RTOL: f64 = 1e-2;

/// Spec plus the resolved seed and default tolerance.
pub(crate) struct Ctx<'a> {
    pub spec: &'a ExperimentSpec,
    pub seed: u64,
    pub tol: Tolerance,
    checks: Vec<Check>,
}

impl<'a> Ctx<'a> {
    pub fn new(spec: &'a ExperimentSpec, seed: u64, default_tol: Tolerance) -> Self {
        Self { spec, seed, tol: spec.tolerance.unwrap_or(default_tol), checks: Vec::new() }
    }

    fn field<T: Copy>(&self, v: Option<T>, name: &str) -> Result<T> {
        v.ok_or_else(|| Error::Config(format!("experiment '{}': missing field '{name}'", self.spec.name)))
    }

    fn n(&self) -> Result<usize> {
        self.field(self.spec.n, "n")
    }
    fn m(&self) -> Result<usize> {
        self.field(self.spec.m, "m")
    }
    fn k(&self) -> Result<usize> {
        self.field(self.spec.k, "k")
    }
    fn j(&self) -> Result<usize> {
        self.field(self.spec.j, "j")
    }
    fn ell(&self) -> Result<usize> {
        self.field(self.spec.ell, "ell")
    }
    fn lambda(&self) -> Result<f64> {
        self.field(self.spec.lambda, "lambda")
    }
    fn samples(&self) -> Result<usize> {
        self.field(self.spec.samples, "samples")
    }

    fn lambdas(&self) -> Result<Vec<f64>> {
        match (&self.spec.lambdas, self.spec.lambda) {
            (Some(l), _) => Ok(l.clone()),
            (None, Some(l)) => Ok(vec![l]),
            _ => Err(Error::Config(format!("experiment '{}': missing field 'lambda|lambdas'", self.spec.name))),
        }
    }

    fn points_or(&self, default: usize) -> usize {
        self.spec.points.unwrap_or(default)
    }

    fn stream(&self, label: &str) -> Stream {
        Stream::new(derive_seed(self.seed, label), 0)
    }

    fn sub_seed(&self, label: &str) -> u64 {
        derive_seed(self.seed, label)
    }

    /// Random evaluation points on `V(n,m)`.
    fn frames(&self, n: usize, m: usize, count: usize) -> Vec<Frame> {
        let s = self.sub_seed("points");
        (0..count).map(|i| sample_stiefel(n, m, Stream::new(s, i as u64))).collect()
    }

    /// `f` from the spec key, or the given default.
    fn function(&self, key: Option<&String>, n: usize, m: usize, default: FunctionKind) -> Result<InvariantFunction> {
        match key {
            Some(k) => parse_function_key(k, n, m),
            None => make_test_function(n, m, default),
        }
    }

    fn push(&mut self, label: impl Into<String>, expected: Expected, observed: Observed, tol: Tolerance) {
        self.checks.push(Check::new(label, expected, observed, &tol));
    }

    /// Deterministic error metric that must not exceed `bound`.
    fn error_metric(&mut self, label: impl Into<String>, err: f64, bound: f64, provenance: &str) {
        let expected = Expected { value: 0.0, stderr: 0.0, provenance: provenance.into() };
        self.push(label, expected, Observed { mean: err, stderr: 0.0 }, Tolerance::absolute(bound));
    }

    /// Estimate against a closed form under the experiment tolerance.
    fn against_exact(&mut self, label: impl Into<String>, exact: f64, est: &TransformEstimate, provenance: &str) {
        let expected = Expected { value: exact, stderr: 0.0, provenance: provenance.into() };
        let tol = self.tol;
        self.push(label, expected, Observed { mean: est.mean, stderr: est.stderr }, tol);
    }

    /// Estimate against an independent estimate under the experiment tolerance.
    fn against_estimate(&mut self, label: impl Into<String>, reference: &TransformEstimate, est: &TransformEstimate, provenance: &str) {
        let expected = Expected { value: reference.mean, stderr: reference.stderr, provenance: provenance.into() };
        let tol = self.tol;
        self.push(label, expected, Observed { mean: est.mean, stderr: est.stderr }, tol);
    }

    /// Per-point checks of `est_i ≈ f(v_i)` plus the sup-norm error relative to `max |f|`.
    fn reconstruction(&mut self, f: &InvariantFunction, points: &[Frame], ests: &[TransformEstimate]) {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (i, (v, e)) in points.iter().zip(ests).enumerate() {
            let exact = f.eval(v);
            worst = worst.max((e.mean - exact).abs());
            scale = scale.max(exact.abs());
            self.against_exact(format!("point {i}"), exact, e, "exact: input function at the point");
        }
        let rel = if scale > 0.0 { worst / scale } else { worst };
        let cap = self.tol.relative_cap;
        self.error_metric("sup-norm error / max |f|", rel, cap, "exact: input function");
    }

    pub fn finish(self) -> Vec<Check> {
        self.checks
    }
}

fn finite(v: MeroValue) -> Result<f64> {
    v.finite().ok_or_else(|| Error::InvalidParams("closed form has a pole at these parameters".into()))
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn diag_1_to(n: usize) -> Matrix {
    Matrix::diag(&(1..=n).map(|i| i as f64).collect::<Vec<_>>())
}

/// Default smooth test function: `tr(v' diag(1..n) v)`.
fn default_trace(n: usize) -> FunctionKind {
    FunctionKind::TraceQuadratic { s: diag_1_to(n) }
}

/// `v ↦ v_1²` on the sphere, or `tr(v' e_1 e_1' v)` in general.
fn first_coordinate(n: usize) -> FunctionKind {
    FunctionKind::TraceQuadratic { s: Matrix::from_fn(n, n, |a, b| if a == 0 && b == 0 { 1.0 } else { 0.0 }) }
}

pub(crate) fn run(ctx: &mut Ctx) -> Result<()> {
    match ctx.spec.tag {
        Tag::SiegelGamma => siegel(ctx),
        Tag::Bernstein => bernstein(ctx),
        Tag::MassCosine => mass_cosine(ctx),
        Tag::MassSine => mass_sine(ctx),
        Tag::IdentitySylvester => sylvester(ctx),
        Tag::IdentityCosBasis => cos_basis(ctx),
        Tag::IdentityCosInvariance => cos_invariance(ctx),
        Tag::IdentityAkm => akm(ctx),
        Tag::IdentityRadonPp => radon_pp(ctx),
        Tag::Duality => duality(ctx),
        Tag::IntermediateEquivalence => intermediate_equivalence(ctx),
        Tag::OrderReductionCosine => order_reduction_cosine(ctx),
        Tag::OrderReductionSine => order_reduction_sine(ctx),
        Tag::InvertLocalSphere => sphere_chain(ctx),
        Tag::ReconstructLocal => reconstruct_local(ctx),
        Tag::Intertwining => intertwining(ctx),
        Tag::ReconstructSine => reconstruct_sine(ctx),
        Tag::InvertNonlocal => nonlocal(ctx),
        Tag::BridgeSineIntermediate => bridge(ctx),
    }
}

/// Poles of `Γ_m` independently: `α - (i-1)/2 ∈ {0, -1, -2, …}` for some `i ≤ m`.
fn siegel_pole_oracle(m: usize, alpha: f64) -> bool {
    (0..m).any(|i| {
        let x = alpha - i as f64 / 2.0;
        x <= 0.0 && (x - x.round()).abs() < 1e-12
    })
}

fn siegel(ctx: &mut Ctx) -> Result<()> {
    let count = ctx.samples().unwrap_or(50);
    let g21 = finite(siegel_gamma(2, 1.0))?;
    ctx.push(
        "Gamma_2(1) = pi",
        Expected { value: PI, stderr: 0.0, provenance: "closed form: Gamma_2(1) = pi^{1/2} Gamma(1) Gamma(1/2)".into() },
        Observed { mean: g21, stderr: 0.0 },
        Tolerance { sigma_multiplier: 0.0, relative_cap: EXACT_RTOL, absolute: 0.0 },
    );
    let mut rng = ctx.stream("alpha").rng();
    for m in 2..=4usize {
        let mut worst: f64 = 0.0;
        let mut taken = 0;
        while taken < count {
            let alpha: f64 = rand::Rng::gen_range(&mut rng, -5.0..6.0);
            // stay away from the half-integer grid that carries the poles
            if ((2.0 * alpha) - (2.0 * alpha).round()).abs() < 2e-3 {
                continue;
            }
            taken += 1;
            let lhs = finite(siegel_gamma(m, alpha))?;
            let rhs = PI.powf((m as f64 - 1.0) / 2.0) * libm::tgamma(alpha) * finite(siegel_gamma(m - 1, alpha - 0.5))?;
            worst = worst.max(rel_err(lhs, rhs));
        }
        ctx.error_metric(
            format!("recursion m={m}, max relative error"),
            worst,
            EXACT_RTOL,
            "recursion Gamma_m(a) = pi^{(m-1)/2} Gamma(a) Gamma_{m-1}(a-1/2) with the classical gamma from libm",
        );
    }
    for m in 1..=4usize {
        let mismatches = (0..=14)
            .map(|i| -5.0 + 0.5 * i as f64)
            .filter(|&a| siegel_gamma(m, a).is_pole() != siegel_pole_oracle(m, a))
            .count();
        ctx.error_metric(
            format!("pole set m={m} on the half-integer grid [-5, 2]"),
            mismatches as f64,
            0.0,
            "oracle: a - (i-1)/2 is a nonpositive integer for some i <= m",
        );
    }
    Ok(())
}

fn bernstein(ctx: &mut Ctx) -> Result<()> {
    let (n, m, ell) = (ctx.n()?, ctx.m()?, ctx.ell()?);
    let lambdas = ctx.spec.lambdas.clone().unwrap_or_else(|| vec![-2.5, -1.3, 0.7]);
    let count = ctx.points_or(20);
    let op = cayley_laplace_expand(m, ell)?;
    let jets = Backend::jets_for(&op);
    let fd = ctx.spec.backend.filter(|b| matches!(b, Backend::FiniteDiff { .. })).unwrap_or(Backend::DEFAULT_FD);
    let s = ctx.sub_seed("x");
    for lambda in lambdas {
        let b = bernstein_poly(ell, m, n, lambda);
        let f = GramPower { p: lambda + 2.0 * ell as f64 };
        let (mut wj, mut wf): (f64, f64) = (0.0, 0.0);
        for i in 0..count {
            let x = gaussian_matrix(n, m, Stream::new(s, i as u64));
            let exact = b * gram_power(&x, lambda);
            wj = wj.max(rel_err(apply_diffop(&op, &f, &x, jets)?, exact));
            wf = wf.max(rel_err(apply_diffop(&op, &f, &x, fd)?, exact));
        }
        let prov = "Bernstein identity: Delta^l |x|^{lambda+2l} = B(lambda) |x|^lambda";
        ctx.error_metric(format!("lambda={lambda} jets max relative error"), wj, JETS_RTOL, prov);
        ctx.error_metric(format!("lambda={lambda} finite differences max relative error"), wf, FD_RTOL, prov);
    }
    Ok(())
}

fn mass_cosine(ctx: &mut Ctx) -> Result<()> {
    let (n, m, k, samples) = (ctx.n()?, ctx.m()?, ctx.k()?, ctx.samples()?);
    let one = InvariantFunction::constant(n, m);
    let u = ctx.frames(n, k, 1).remove(0);
    for lambda in ctx.lambdas()? {
        let est = cosine_transform(&one, &u, lambda, samples, ctx.stream(&format!("mass {lambda}")))?;
        let exact = finite(cosine_mass(n, m, k, lambda))?;
        ctx.against_exact(format!("lambda={lambda}"), exact, &est, "closed form: Siegel-gamma mass of the cosine kernel");
        if m == 1 && k == 1 && lambda == 2.0 {
            let sym = 1.0 / n as f64;
            ctx.against_exact(format!("lambda={lambda} symmetry"), sym, &est, "oracle: E[(u.v)^2] = 1/n by coordinate symmetry");
            ctx.error_metric(
                "closed form vs symmetry value",
                (exact - sym).abs(),
                EXACT_RTOL,
                "oracle: E[(u.v)^2] = 1/n by coordinate symmetry",
            );
        }
    }
    Ok(())
}

fn mass_sine(ctx: &mut Ctx) -> Result<()> {
    let (n, m, samples) = (ctx.n()?, ctx.m()?, ctx.samples()?);
    let one = InvariantFunction::constant(n, m);
    let u = ctx.frames(n, m, 1).remove(0);
    for lambda in ctx.lambdas()? {
        let est = sine_integral(&one, &u, lambda, samples, ctx.stream(&format!("mass {lambda}")))?;
        let exact = finite(sine_mass(n, m, lambda))?;
        ctx.against_exact(format!("lambda={lambda}"), exact, &est, "closed form: Siegel-gamma mass of the sine kernel");
    }
    Ok(())
}

fn random_pairs(ctx: &Ctx, n: usize, ku: usize, mv: usize) -> Vec<(Frame, Frame)> {
    let s = ctx.sub_seed("pairs");
    (0..ctx.points_or(50))
        .map(|i| (sample_stiefel(n, ku, Stream::new(s, 2 * i as u64)), sample_stiefel(n, mv, Stream::new(s, 2 * i as u64 + 1))))
        .collect()
}

fn sylvester(ctx: &mut Ctx) -> Result<()> {
    let (n, m) = (ctx.n()?, ctx.m()?);
    crate::special::require(2 * m <= n, "2m <= n")?;
    let mut worst: f64 = 0.0;
    for (u, v) in random_pairs(ctx, n, m, m) {
        let c = cos_metric(&frame_complement(&u)?, &v);
        worst = worst.max((sin_metric(&u, &v) - c * c).abs());
    }
    ctx.error_metric("max |sin(u,v) - |Cos(u_perp, v)|^2|", worst, IDENTITY_TOL, "Sylvester determinant identity");
    Ok(())
}

fn cos_basis(ctx: &mut Ctx) -> Result<()> {
    let (n, m, k) = (ctx.n()?, ctx.m()?, ctx.k()?);
    crate::special::require(m <= k && k <= n, "m <= k <= n")?;
    let mut rng = ctx.stream("bases").rng();
    let mut worst: f64 = 0.0;
    for (u, v) in random_pairs(ctx, n, k, m) {
        let (a, b) = (sample_orthogonal(k, &mut rng), sample_orthogonal(m, &mut rng));
        worst = worst.max((cos_metric(&u.right(&a), &v.right(&b)) - cos_metric(&u, &v)).abs());
    }
    ctx.error_metric("max ||Cos(u a, v b)| - |Cos(u, v)||", worst, IDENTITY_TOL, "det(b' M b) = det(M) for orthogonal b");
    Ok(())
}

fn cos_invariance(ctx: &mut Ctx) -> Result<()> {
    let (n, m, k) = (ctx.n()?, ctx.m()?, ctx.k()?);
    crate::special::require(m <= k && k <= n, "m <= k <= n")?;
    let mut rng = ctx.stream("rho").rng();
    let mut worst: f64 = 0.0;
    for (u, v) in random_pairs(ctx, n, k, m) {
        let rho = Rotation::new(sample_orthogonal(n, &mut rng))?;
        worst = worst.max((cos_metric(&rho.apply(&u), &rho.apply(&v)) - cos_metric(&u, &v)).abs());
    }
    ctx.error_metric("max ||Cos(ru, rv)| - |Cos(u, v)||", worst, IDENTITY_TOL, "(ru)'(rv) = u'v for orthogonal r");
    Ok(())
}

fn akm(ctx: &mut Ctx) -> Result<()> {
    let (n, m, k) = (ctx.n()?, ctx.m()?, ctx.k()?);
    crate::special::require(k == m, "k = m")?;
    let phi = ctx.function(ctx.spec.phi.as_ref(), n, k, default_trace(n))?;
    let (mut worst, mut se): (f64, f64) = (0.0, 0.0);
    for (i, v) in ctx.frames(n, m, ctx.points_or(20)).iter().enumerate() {
        let e = a_km(&phi, v, 10, Stream::new(ctx.sub_seed("akm"), i as u64))?;
        worst = worst.max((e.mean - phi.eval(v)).abs());
        se = se.max(e.stderr);
    }
    ctx.error_metric("max |A_{m,m} phi - phi|", worst, 0.0, "trivial: A_{k,m} is the identity at k = m");
    ctx.error_metric("max stderr", se, 0.0, "trivial: exact evaluation");
    Ok(())
}

fn radon_pp(ctx: &mut Ctx) -> Result<()> {
    let (n, p) = (ctx.n()?, ctx.m()?);
    let f = ctx.function(ctx.spec.f.as_ref(), n, p, default_trace(n))?;
    let mut worst: f64 = 0.0;
    for (i, u) in ctx.frames(n, p, ctx.points_or(20)).iter().enumerate() {
        let e = grassmann_radon(&f, u, RadonDirection::Forward, p, p, 10, Stream::new(ctx.sub_seed("radon"), i as u64))?;
        worst = worst.max((e.mean - f.eval(u)).abs());
    }
    ctx.error_metric("max |R_{p,p} f - f|", worst, IDENTITY_TOL, "trivial: the only p-plane inside a p-plane is itself");
    Ok(())
}

fn duality(ctx: &mut Ctx) -> Result<()> {
    let (n, m, k, samples) = (ctx.n()?, ctx.m()?, ctx.k()?, ctx.samples()?);
    let t = ctx.field(ctx.spec.transform, "transform")?;
    let f = ctx.function(ctx.spec.f.as_ref(), n, m, default_trace(n))?;
    let rev: Vec<f64> = (1..=n).rev().map(|i| i as f64).collect();
    let phi = ctx.function(ctx.spec.phi.as_ref(), n, k, FunctionKind::DetQuadratic { s: Matrix::diag(&rev) })?;
    let (lhs, rhs) = duality_pairing(t, n, &f, &phi, samples, ctx.spec.inner.unwrap_or(1), ctx.stream("pairing"))?;
    ctx.against_estimate("<T f, phi> vs <f, T* phi>", &rhs, &lhs, "duality: independent estimate of <f, T* phi>");
    Ok(())
}

fn intermediate_equivalence(ctx: &mut Ctx) -> Result<()> {
    let (n, m, k, j, samples) = (ctx.n()?, ctx.m()?, ctx.k()?, ctx.j()?, ctx.samples()?);
    let inner = ctx.field(ctx.spec.inner, "inner")?;
    let f = ctx.function(ctx.spec.f.as_ref(), n, m, FunctionKind::DetQuadratic { s: diag_1_to(n) })?;
    for (i, u) in ctx.frames(n, k, ctx.points_or(3)).iter().enumerate() {
        let a = intermediate_funk(&f, u, j, samples, inner, Stream::new(ctx.sub_seed("stiefel"), i as u64))?;
        let b = intermediate_funk_grassmann(&f, u, j, samples, inner, Stream::new(ctx.sub_seed("grassmann"), i as u64))?;
        ctx.against_estimate(format!("point {i}"), &b, &a, "independent estimate: composition of Grassmannian Radon transforms");
    }
    Ok(())
}

fn order_reduction_cosine(ctx: &mut Ctx) -> Result<()> {
    let (n, m, k, lambda, ell, samples) = (ctx.n()?, ctx.m()?, ctx.k()?, ctx.lambda()?, ctx.ell()?, ctx.samples()?);
    let phi = ctx.function(ctx.spec.phi.as_ref(), n, k, default_trace(n))?;
    let set = SampleSet::new(n, k, ctx.sub_seed("kernel"), samples);
    for (i, v) in ctx.frames(n, m, ctx.points_or(3)).iter().enumerate() {
        let a = kernel_diff_cosine_dual(&phi, v, lambda, ell, &set)?;
        let b = normalized_cosine_dual_tilted(&phi, v, lambda, samples, derive_seed(ctx.sub_seed("direct"), &i.to_string()))?;
        ctx.against_estimate(format!("point {i}"), &b, &a, "independent estimate: dual cosine transform, kernel-tilted sampling");
    }
    Ok(())
}

fn order_reduction_sine(ctx: &mut Ctx) -> Result<()> {
    let (n, m, lambda, ell, samples) = (ctx.n()?, ctx.m()?, ctx.lambda()?, ctx.ell()?, ctx.samples()?);
    let f = ctx.function(ctx.spec.f.as_ref(), n, m, default_trace(n))?;
    let pts = ctx.frames(n, m, ctx.points_or(3));
    let set = SampleSet::new(n, m, ctx.sub_seed("kernel"), samples);
    let ests = kernel_diff_sine_many(&f, &pts, lambda, ell, &set, ctx.spec.mode.unwrap_or(SineMode::Kernel))?;
    for (i, (v, a)) in pts.iter().zip(&ests).enumerate() {
        let b = sine_transform_tilted(&f, v, lambda, samples, derive_seed(ctx.sub_seed("direct"), &i.to_string()))?;
        ctx.against_estimate(format!("point {i}"), &b, a, "independent estimate: sine transform, kernel-tilted sampling");
    }
    Ok(())
}

fn sphere_chain(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.n()?;
    crate::special::require(n == 4, "n = 4 (m = k = 1, l = 1)")?;
    let delta0 = finite(constant(ConstantKind::Delta0, &ConstParams::nmk(4, 1, 1))?)?;
    let v = ctx.frames(4, 1, 1).remove(0);
    for d in ctx.spec.degrees.clone().unwrap_or_else(|| vec![2, 4]) {
        crate::special::require(d % 2 == 0 && d >= 2, "even degree d >= 2")?;
        let du = d as usize;
        let c_closed = funk_hecke_closed(4, du);
        let c_quad = funk_hecke_quadrature(4, du);
        ctx.error_metric(
            format!("d={d}: Funk-Hecke multiplier, closed form vs quadrature"),
            rel_err(c_closed, c_quad),
            IDENTITY_TOL,
            "oracle: 1-D Gegenbauer quadrature",
        );
        let eig = ((d as f64 + 1.0) / 2.0).powi(2);
        ctx.error_metric(
            format!("d={d}: eigenvalue of Delta_(-3,1), rank-one formula vs ((d+1)/2)^2"),
            rel_err(delta_lambda_eigenvalue(4, du, -3.0), eig),
            IDENTITY_TOL,
            "oracle: harmonic eigenvalue algebra",
        );
        let y = make_test_function(4, 1, FunctionKind::SphereHarmonic { d, direction: vec![1.0, 0.0, 0.0, 0.0] })?;
        let op = cayley_laplace_expand(1, 1)?;
        let applied = delta_lambda_ell(&y, &v, -3.0, 1, Backend::jets_for(&op))?;
        ctx.error_metric(
            format!("d={d}: Delta_(-3,1) Y_d / Y_d by jets vs eigenvalue"),
            rel_err(applied / y.eval(&v), eig),
            1e-8,
            "oracle: harmonic eigenvalue algebra",
        );
        ctx.error_metric(
            format!("d={d}: delta_0 * eigenvalue * c_d^2 = 1"),
            (delta0 * eig * c_quad * c_quad - 1.0).abs(),
            IDENTITY_TOL,
            "chain: delta_0 = 4, Beltrami eigenvalue, Funk-Hecke multiplier",
        );
    }
    Ok(())
}

fn setup(ctx: &Ctx, samples: usize) -> InversionSetup {
    InversionSetup { samples, seed: ctx.sub_seed("inversion"), backend: ctx.spec.backend.unwrap_or(Backend::DEFAULT_FD) }
}

fn reconstruct_local(ctx: &mut Ctx) -> Result<()> {
    let (n, m, k, j, samples) = (ctx.n()?, ctx.m()?, ctx.k()?, ctx.j()?, ctx.samples()?);
    let f = ctx.function(ctx.spec.f.as_ref(), n, m, first_coordinate(n))?;
    let pts = ctx.frames(n, m, ctx.points_or(20));
    let ests = invert_local(&f, &pts, k, j, &setup(ctx, samples))?;
    ctx.reconstruction(&f, &pts, &ests);
    Ok(())
}

fn intertwining(ctx: &mut Ctx) -> Result<()> {
    let (n, m, samples) = (ctx.n()?, ctx.m()?, ctx.samples()?);
    let order: Intertwining = ctx.field(ctx.spec.order, "order")?;
    let f = ctx.function(ctx.spec.f.as_ref(), n, m, first_coordinate(n))?;
    let pts = ctx.frames(n, m, ctx.points_or(10));
    let ests = invert_intertwining(&f, &pts, order, &setup(ctx, samples))?;
    ctx.reconstruction(&f, &pts, &ests);
    Ok(())
}

fn reconstruct_sine(ctx: &mut Ctx) -> Result<()> {
    let (n, m, ell, samples) = (ctx.n()?, ctx.m()?, ctx.ell()?, ctx.samples()?);
    let f = ctx.function(ctx.spec.f.as_ref(), n, m, default_trace(n))?;
    let pts = ctx.frames(n, m, ctx.points_or(5));
    let mode = ctx.spec.mode.unwrap_or(SineMode::FunctionFd { h: 1e-2, levels: 2 });
    let set = SampleSet::new(n, m, ctx.sub_seed("sine"), samples);
    let ests = kernel_diff_sine_many(&f, &pts, m as f64 - n as f64, ell, &set, mode)?;
    ctx.reconstruction(&f, &pts, &ests);
    Ok(())
}

fn nonlocal(ctx: &mut Ctx) -> Result<()> {
    let (n, m, k, samples) = (ctx.n()?, ctx.m()?, ctx.k()?, ctx.samples()?);
    let f = ctx.function(ctx.spec.f.as_ref(), n, m, default_trace(n))?;
    let pts = ctx.frames(n, m, ctx.points_or(3));
    let ests = invert_nonlocal(&f, &pts, k, &setup(ctx, samples))?;
    ctx.reconstruction(&f, &pts, &ests);
    Ok(())
}

fn bridge(ctx: &mut Ctx) -> Result<()> {
    let (n, m, k, j, samples) = (ctx.n()?, ctx.m()?, ctx.k()?, ctx.j()?, ctx.samples()?);
    let f = ctx.function(ctx.spec.f.as_ref(), n, m, default_trace(n))?;
    let lambda = j as f64 - k as f64;
    for (i, v) in ctx.frames(n, m, ctx.points_or(3)).iter().enumerate() {
        let a = sine_via_intermediate(&f, v, k, j, samples, derive_seed(ctx.sub_seed("bridge"), &i.to_string()))?;
        let b = sine_transform_tilted(&f, v, lambda, samples, derive_seed(ctx.sub_seed("direct"), &i.to_string()))?;
        ctx.against_estimate(format!("point {i}"), &b, &a, "independent estimate: sine transform at lambda = j - k, kernel-tilted sampling");
    }
    Ok(())
}
