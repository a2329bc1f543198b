//! Command-line front end: constants, transforms, operator checks and the verification suite.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use stiefel::diffops::{
    apply_diffop, cayley_laplace_expand, delta_lambda_ell, kernel_diff_cosine_dual, kernel_diff_sine, Backend, GramPower, SineMode,
};
use stiefel::linalg::{gram_power, Matrix};
use stiefel::manifolds::{sample_orthogonal, sample_stiefel, Frame};
use stiefel::rng::{derive_seed, gaussian_matrix, Stream};
use stiefel::special::{bernstein_poly, constant, ConstParams, ConstantKind, MeroValue};
use stiefel::testfuncs::oracle::delta_lambda_eigenvalue;
use stiefel::testfuncs::{make_test_function, parse_function_key, FunctionKind};
use stiefel::transforms::{
    a_km, cosine_dual, cosine_transform, funk_dual, funk_transform, grassmann_radon, intermediate_funk, intermediate_funk_dual,
    normalized_cosine, normalized_cosine_dual, normalized_cosine_dual_tilted, sine_integral, sine_transform, sine_transform_tilted,
    RadonDirection, SampleSet, TransformEstimate,
};
use stiefel::verify::{list_tags, run_suite, seed_from_env, RunOptions, Suite, DEFAULT_SEED};
use stiefel::{Error, Result};

#[derive(Parser)]
#[command(name = "stiefel", version, about = "Transforms on Stiefel manifolds and their verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a normalizing constant.
    Constants(ConstantsArgs),
    /// Monte Carlo estimate of a transform at one point.
    Transform(TransformArgs),
    /// Numerical checks of the differential operators.
    Diffop(DiffopArgs),
    /// Value of a transform at lambda obtained by order reduction from lambda + 2 ell.
    Continue(ContinueArgs),
    /// Run or list verification experiments.
    Verify {
        #[command(subcommand)]
        action: VerifyAction,
    },
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    j: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    lambda: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformName {
    Cosine,
    CosineDual,
    Sine,
    Funk,
    FunkDual,
    Ifunk,
    IfunkDual,
    Akm,
    Radon,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long, value_enum)]
    name: TransformName,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    j: usize,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Catalog key of the input function.
    #[arg(long, default_value = "constant")]
    f: String,
    /// `anchor` or `seed:<s>`.
    #[arg(long, default_value = "anchor")]
    point: String,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Inner draws for the intermediate transforms.
    #[arg(long, default_value_t = 1)]
    inner: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Apply the gamma (cosine) or delta (sine) normalization.
    #[arg(long)]
    normalized: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Bernstein,
    Beltrami,
    Invariance,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendName {
    Jets,
    Fd,
}

#[derive(Args)]
struct DiffopArgs {
    #[arg(long, value_enum)]
    check: CheckKind,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    ell: usize,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    lambda: f64,
    /// Harmonic degree for the Beltrami check.
    #[arg(long, default_value_t = 2)]
    d: u32,
    #[arg(long, value_enum, default_value = "jets")]
    backend: BackendName,
    #[arg(long, default_value_t = 5)]
    points: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ContinueName {
    Sine,
    CosineDual,
}

#[derive(Args)]
struct ContinueArgs {
    #[arg(long, value_enum, default_value = "sine")]
    name: ContinueName,
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
    #[arg(long)]
    ell: usize,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Frame size of the input for the dual cosine transform.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value = "trace_quadratic:S=e1")]
    f: String,
    #[arg(long, default_value = "anchor")]
    point: String,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Differentiate the kernel (`kernel`) or the estimated function (`fd`); sine only.
    #[arg(long, default_value = "kernel")]
    mode: String,
}

#[derive(Subcommand)]
enum VerifyAction {
    /// Run a suite file and write a JSON report.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the experiment tags and their required fields.
    List,
}

/// `--seed`, then `STIEFEL_SEED`, then the default.
fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    Ok(match flag {
        Some(s) => s,
        None => seed_from_env()?.unwrap_or(DEFAULT_SEED),
    })
}

fn parse_point(spec: &str, n: usize, dim: usize) -> Result<Frame> {
    if spec == "anchor" {
        return Ok(Frame::top(n, dim));
    }
    let s = spec
        .strip_prefix("seed:")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::InvalidParams(format!("--point must be 'anchor' or 'seed:<s>', got '{spec}'")))?;
    Ok(sample_stiefel(n, dim, Stream::new(s, 0)))
}

fn mero_json(v: MeroValue) -> Value {
    match v {
        MeroValue::Finite { value } => json!({ "value": value }),
        MeroValue::Pole { order } => json!({ "pole_order": order }),
    }
}

fn constants(a: &ConstantsArgs) -> Result<Value> {
    let kind: ConstantKind = a.kind.parse()?;
    let p = ConstParams { n: a.n, m: a.m, k: a.k, j: a.j, lambda: a.lambda };
    let v = constant(kind, &p)?;
    let mut out = json!({ "kind": kind.tag(), "params": p });
    out.as_object_mut().unwrap().extend(mero_json(v).as_object().unwrap().clone());
    Ok(out)
}

fn transform(a: &TransformArgs) -> Result<Value> {
    use TransformName::*;
    let seed = resolve_seed(a.seed)?;
    let stream = Stream::new(seed, 0);
    let (n, m) = (a.n, a.m);
    let k = a.k.unwrap_or(m);
    let need_lambda = || a.lambda.ok_or_else(|| Error::InvalidParams("--lambda is required for this transform".into()));
    // dual transforms take a function on V(n,k) and are evaluated on V(n,m)
    let (f_cols, p_cols) = match a.name {
        CosineDual | FunkDual | IfunkDual | Akm => (k, m),
        Sine => (m, m),
        _ => (m, k),
    };
    let f = parse_function_key(&a.f, n, f_cols)?;
    let p = parse_point(&a.point, n, p_cols)?;
    let est: TransformEstimate = match a.name {
        Cosine if a.normalized => normalized_cosine(&f, &p, need_lambda()?, a.samples, stream)?,
        Cosine => cosine_transform(&f, &p, need_lambda()?, a.samples, stream)?,
        CosineDual if a.normalized => normalized_cosine_dual(&f, &p, need_lambda()?, a.samples, stream)?,
        CosineDual => cosine_dual(&f, &p, need_lambda()?, a.samples, stream)?,
        Sine if a.normalized => sine_transform(&f, &p, need_lambda()?, a.samples, stream)?,
        Sine => sine_integral(&f, &p, need_lambda()?, a.samples, stream)?,
        Funk => funk_transform(&f, &p, a.samples, stream)?,
        FunkDual => funk_dual(&f, &p, a.samples, stream)?,
        Ifunk => intermediate_funk(&f, &p, a.j, a.samples, a.inner, stream)?,
        IfunkDual => intermediate_funk_dual(&f, &p, a.j, a.samples, a.inner, stream)?,
        Akm => a_km(&f, &p, a.samples, stream)?,
        Radon => grassmann_radon(&f, &p, RadonDirection::Forward, m, k, a.samples, stream)?,
    };
    Ok(json!({ "mean": est.mean, "stderr": est.stderr, "samples": est.samples, "seed": seed, "params": est.params }))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn diffop(a: &DiffopArgs) -> Result<Value> {
    let seed = resolve_seed(a.seed)?;
    let op = cayley_laplace_expand(a.m, a.ell)?;
    let backend = match a.backend {
        BackendName::Jets => Backend::jets_for(&op),
        BackendName::Fd => Backend::DEFAULT_FD,
    };
    let rtol = if matches!(a.backend, BackendName::Jets) { 1e-6 } else { 1e-2 };
    let mut rows = Vec::new();
    match a.check {
        CheckKind::Bernstein => {
            let b = bernstein_poly(a.ell, a.m, a.n, a.lambda);
            for i in 0..a.points {
                let x = gaussian_matrix(a.n, a.m, Stream::new(seed, i as u64));
                let got = apply_diffop(&op, &GramPower { p: a.lambda + 2.0 * a.ell as f64 }, &x, backend)?;
                let want = b * gram_power(&x, a.lambda);
                rows.push(json!({ "observed": got, "expected": want, "rel_err": rel(got, want) }));
            }
        }
        CheckKind::Beltrami => {
            if a.m != 1 || a.ell != 1 {
                return Err(Error::InvalidParams("the Beltrami check needs m = 1 and ell = 1".into()));
            }
            let mut dir = vec![0.0; a.n];
            dir[0] = 1.0;
            let f = make_test_function(a.n, 1, FunctionKind::SphereHarmonic { d: a.d, direction: dir })?;
            let ev = delta_lambda_eigenvalue(a.n, a.d as usize, a.lambda);
            for i in 0..a.points {
                let v = sample_stiefel(a.n, 1, Stream::new(seed, i as u64));
                let got = delta_lambda_ell(&f, &v, a.lambda, 1, backend)?;
                let want = ev * f.eval(&v);
                rows.push(json!({ "observed": got, "expected": want, "rel_err": rel(got, want) }));
            }
        }
        CheckKind::Invariance => {
            // Δ_{λ,ℓ} commutes with v ↦ ρv and with v ↦ vβ; f = tr(v'Sv) turns into tr(v'ρ'Sρv) under ρ
            let s = Matrix::diag(&(1..=a.n).map(|i| i as f64).collect::<Vec<_>>());
            let f = make_test_function(a.n, a.m, FunctionKind::TraceQuadratic { s: s.clone() })?;
            let mut rng = Stream::new(seed, u64::MAX).rng();
            for i in 0..a.points {
                let v = sample_stiefel(a.n, a.m, Stream::new(seed, i as u64));
                let rho = sample_orthogonal(a.n, &mut rng);
                let beta = sample_orthogonal(a.m, &mut rng);
                let base = delta_lambda_ell(&f, &v, a.lambda, a.ell, backend)?;
                let rv = Frame::new(rho.matmul(v.matrix()))?;
                let rotated = make_test_function(a.n, a.m, FunctionKind::TraceQuadratic { s: rho.t_matmul(&s.matmul(&rho)) })?;
                let left = delta_lambda_ell(&rotated, &v, a.lambda, a.ell, backend)?;
                let left_ref = delta_lambda_ell(&f, &rv, a.lambda, a.ell, backend)?;
                let right = delta_lambda_ell(&f, &v.right(&beta), a.lambda, a.ell, backend)?;
                rows.push(json!({
                    "left": { "observed": left, "expected": left_ref, "rel_err": rel(left, left_ref) },
                    "right": { "observed": right, "expected": base, "rel_err": rel(right, base) },
                }));
            }
        }
    }
    let worst = rows
        .iter()
        .flat_map(|r| match r.get("rel_err") {
            Some(e) => vec![e.as_f64().unwrap_or(f64::INFINITY)],
            None => ["left", "right"].iter().map(|s| r[s]["rel_err"].as_f64().unwrap_or(f64::INFINITY)).collect(),
        })
        .fold(0.0, f64::max);
    Ok(json!({ "check": format!("{}", match a.check { CheckKind::Bernstein => "bernstein", CheckKind::Beltrami => "beltrami", CheckKind::Invariance => "invariance" }),
        "n": a.n, "m": a.m, "ell": a.ell, "lambda": a.lambda, "backend": backend, "seed": seed,
        "points": rows, "max_rel_err": worst, "tolerance": rtol, "pass": worst <= rtol }))
}

fn continue_cmd(a: &ContinueArgs) -> Result<Value> {
    let seed = resolve_seed(a.seed)?;
    let est_json = |e: &TransformEstimate| json!({ "mean": e.mean, "stderr": e.stderr, "samples": e.samples });
    let (continued, direct) = match a.name {
        ContinueName::Sine => {
            let f = parse_function_key(&a.f, a.n, a.m)?;
            let u = parse_point(&a.point, a.n, a.m)?;
            let mode = match a.mode.as_str() {
                "kernel" => SineMode::Kernel,
                "fd" => SineMode::FunctionFd { h: 1e-2, levels: 2 },
                other => return Err(Error::InvalidParams(format!("--mode must be kernel or fd, got '{other}'"))),
            };
            let set = SampleSet::new(a.n, a.m, Stream::new(seed, 0).child("continue"), a.samples);
            let c = kernel_diff_sine(&f, &u, a.lambda, a.ell, &set, mode)?;
            let d = sine_transform_tilted(&f, &u, a.lambda, a.samples, derive_seed(seed, "direct"));
            (c, d.ok())
        }
        ContinueName::CosineDual => {
            let k = a.k.unwrap_or(a.m + 1);
            let phi = parse_function_key(&a.f, a.n, k)?;
            let v = parse_point(&a.point, a.n, a.m)?;
            let set = SampleSet::new(a.n, k, Stream::new(seed, 0).child("continue"), a.samples);
            let c = kernel_diff_cosine_dual(&phi, &v, a.lambda, a.ell, &set)?;
            let d = normalized_cosine_dual_tilted(&phi, &v, a.lambda, a.samples, derive_seed(seed, "direct"));
            (c, d.ok())
        }
    };
    let mut out = json!({ "lambda": a.lambda, "ell": a.ell, "seed": seed, "continued": est_json(&continued) });
    if let Some(d) = direct {
        out["direct"] = est_json(&d);
        out["agree_4sigma"] = json!(continued.agrees_with(&d, 4.0));
    }
    Ok(out)
}

fn verify(action: &VerifyAction) -> Result<(Value, bool)> {
    match action {
        VerifyAction::List => {
            println!("{}", list_tags());
            Ok((Value::Null, true))
        }
        VerifyAction::Run { config, out, csv, threads, seed } => {
            let suite = Suite::from_path(config)?;
            let seed = match seed {
                Some(s) => Some(*s),
                None => seed_from_env()?,
            };
            let report = run_suite(&suite, &RunOptions { threads: *threads, seed })?;
            let text = report.to_json();
            if let Some(path) = out {
                std::fs::write(path, &text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            }
            if let Some(dir) = csv {
                report.write_csv(dir)?;
            }
            for r in &report.experiments {
                eprintln!("{:<40} {:?} ({:.1}s)", r.name, r.status, r.runtime_s);
            }
            let summary = json!({ "schema": report.schema, "seed": report.seed, "pass": report.pass, "passed": report.passed, "failed": report.failed });
            Ok((if out.is_some() { summary } else { serde_json::from_str(&text).unwrap() }, report.pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Constants(a) => constants(a).map(|v| (v, true)),
        Command::Transform(a) => transform(a).map(|v| (v, true)),
        Command::Diffop(a) => diffop(a).map(|v| {
            let ok = v["pass"].as_bool().unwrap_or(false);
            (v, ok)
        }),
        Command::Continue(a) => continue_cmd(a).map(|v| (v, true)),
        Command::Verify { action } => verify(action),
    };
    match result {
        Ok((v, ok)) => {
            if !v.is_null() {
                println!("{}", serde_json::to_string_pretty(&v).unwrap());
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
