//! C interface to the `stiefel` library.
//!
//! Every fallible function returns a [`StiefelStatus`]. On failure the message
//! can be read with [`stiefel_last_error`] from the same thread. Matrices are
//! passed as row-major `double` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stiefel::linalg::Matrix;
use stiefel::manifolds::Frame;
use stiefel::rng::{derive_seed, Stream};
use stiefel::special::{constant, siegel_gamma, ConstParams, ConstantKind, MeroValue};
use stiefel::testfuncs::{parse_function_key, InvariantFunction};
use stiefel::transforms::{cosine_transform, funk_transform, sine_transform_tilted, TransformEstimate};
use stiefel::verify::{run_suite, Report, RunOptions, Suite};
use stiefel::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StiefelStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Inadmissible = 3,
    Pole = 4,
    OutOfRegion = 5,
    Numerical = 6,
    Config = 7,
    Panic = 8,
}

/// A Monte Carlo estimate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiefelEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl From<&TransformEstimate> for StiefelEstimate {
    fn from(e: &TransformEstimate) -> Self {
        Self { mean: e.mean, stderr: e.stderr, samples: e.samples }
    }
}

/// Opaque catalog function on `V(n,m)`.
pub struct StiefelFunction(InvariantFunction);

/// Opaque verification report.
pub struct StiefelReport {
    report: Report,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> StiefelStatus {
    match e {
        Error::InadmissibleParameters(_) => StiefelStatus::Inadmissible,
        Error::PoleAtLambda { .. } => StiefelStatus::Pole,
        Error::OutOfConvergenceRegion { .. } | Error::SingularKernelDerivative { .. } => StiefelStatus::OutOfRegion,
        Error::NumericalBreakdown
        | Error::RankDeficient { .. }
        | Error::NotPositiveDefinite
        | Error::DegenerateCompletion
        | Error::BackendDisagreement { .. } => StiefelStatus::Numerical,
        Error::Config(_) => StiefelStatus::Config,
        _ => StiefelStatus::InvalidArgument,
    }
}

struct Fail(StiefelStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(StiefelStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, records the error message and converts panics into `Panic`.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> StiefelStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            StiefelStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            StiefelStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(StiefelStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn frame_arg(p: *const f64, n: usize, m: usize, what: &str) -> Result<Frame, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    let data = std::slice::from_raw_parts(p, n * m).to_vec();
    Ok(Frame::new(Matrix::new(n, m, data)?)?)
}

unsafe fn func_arg<'a>(f: *const StiefelFunction) -> Result<&'a InvariantFunction, Fail> {
    f.as_ref().map(|f| &f.0).ok_or_else(|| null("function"))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn write_mero(v: MeroValue, value: *mut f64, pole_order: *mut u32) -> Result<(), Fail> {
    let (x, p) = match v {
        MeroValue::Finite { value } => (value, 0),
        MeroValue::Pole { order } => (f64::NAN, order),
    };
    write(value, x, "value")?;
    write(pole_order, p, "pole_order")
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap` bytes) and returns its full length without the NUL.
/// Pass a null `buf` to query the length.
///
/// # Safety
/// `buf` must be null or point to at least `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn stiefel_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// A normalizing constant by tag (`gamma_mk`, `delta_m`, `delta_0`, ...).
/// At a pole `*value` is NaN and `*pole_order` is the order; otherwise `*pole_order` is 0.
///
/// # Safety
/// `kind` must be a NUL-terminated string; `value` and `pole_order` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stiefel_constant(
    kind: *const c_char,
    n: usize,
    m: usize,
    k: usize,
    j: usize,
    lambda: f64,
    value: *mut f64,
    pole_order: *mut u32,
) -> StiefelStatus {
    guard(|| {
        let kind: ConstantKind = str_arg(kind, "kind")?.parse()?;
        let v = constant(kind, &ConstParams { n, m, k, j, lambda })?;
        write_mero(v, value, pole_order)
    })
}

/// Siegel gamma `Γ_m(alpha)`, with the same pole convention as [`stiefel_constant`].
///
/// # Safety
/// `value` and `pole_order` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stiefel_siegel_gamma(m: usize, alpha: f64, value: *mut f64, pole_order: *mut u32) -> StiefelStatus {
    guard(|| {
        if m == 0 {
            return Err(Fail(StiefelStatus::InvalidArgument, "m must be at least 1".into()));
        }
        write_mero(siegel_gamma(m, alpha), value, pole_order)
    })
}

/// Builds a catalog function from its key, e.g. `"trace_quadratic:S=e1"`.
/// Release it with [`stiefel_function_free`].
///
/// # Safety
/// `key` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stiefel_function_new(key: *const c_char, n: usize, m: usize, out: *mut *mut StiefelFunction) -> StiefelStatus {
    guard(|| {
        let f = parse_function_key(str_arg(key, "key")?, n, m)?;
        write(out, Box::into_raw(Box::new(StiefelFunction(f))), "out")
    })
}

/// # Safety
/// `f` must be null or a handle from [`stiefel_function_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stiefel_function_free(f: *mut StiefelFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// `f(v)` at a frame `v` given as `n·m` row-major entries.
///
/// # Safety
/// `f` must be a live handle, `v` must point to `n·m` doubles and `value` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stiefel_function_eval(f: *const StiefelFunction, v: *const f64, value: *mut f64) -> StiefelStatus {
    guard(|| {
        let f = func_arg(f)?;
        let v = frame_arg(v, f.n(), f.m(), "v")?;
        write(value, f.eval(&v), "value")
    })
}

/// Unnormalized cosine transform `∫ f(v) |u'v|_m^λ d_*v` at `u ∈ V(n,k)`.
///
/// # Safety
/// `f` must be a live handle, `u` must point to `n·k` doubles and `out` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stiefel_cosine_transform(
    f: *const StiefelFunction,
    u: *const f64,
    k: usize,
    lambda: f64,
    samples: usize,
    seed: u64,
    out: *mut StiefelEstimate,
) -> StiefelStatus {
    guard(|| {
        let f = func_arg(f)?;
        let u = frame_arg(u, f.n(), k, "u")?;
        let e = cosine_transform(f, &u, lambda, samples, Stream::new(seed, 0))?;
        write(out, StiefelEstimate::from(&e), "out")
    })
}

/// Normalized sine transform at `u ∈ V(n,m)`, sampled from the kernel-tilted law.
///
/// # Safety
/// `f` must be a live handle, `u` must point to `n·m` doubles and `out` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stiefel_sine_transform(
    f: *const StiefelFunction,
    u: *const f64,
    lambda: f64,
    samples: usize,
    seed: u64,
    out: *mut StiefelEstimate,
) -> StiefelStatus {
    guard(|| {
        let f = func_arg(f)?;
        let u = frame_arg(u, f.n(), f.m(), "u")?;
        let e = sine_transform_tilted(f, &u, lambda, samples, derive_seed(seed, "sine"))?;
        write(out, StiefelEstimate::from(&e), "out")
    })
}

/// Funk transform at `u ∈ V(n,k)`.
///
/// # Safety
/// `f` must be a live handle, `u` must point to `n·k` doubles and `out` be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stiefel_funk_transform(
    f: *const StiefelFunction,
    u: *const f64,
    k: usize,
    samples: usize,
    seed: u64,
    out: *mut StiefelEstimate,
) -> StiefelStatus {
    guard(|| {
        let f = func_arg(f)?;
        let u = frame_arg(u, f.n(), k, "u")?;
        let e = funk_transform(f, &u, samples, Stream::new(seed, 0))?;
        write(out, StiefelEstimate::from(&e), "out")
    })
}

/// Runs a suite given as TOML text. `threads = 0` uses the global pool;
/// a null `seed` keeps the suite seed. Release with [`stiefel_report_free`].
///
/// A run whose experiments fail still returns `Ok`; see [`stiefel_report_summary`].
///
/// # Safety
/// `config_toml` must be a NUL-terminated string, `seed` null or valid for reads,
/// and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stiefel_verify_run(
    config_toml: *const c_char,
    threads: usize,
    seed: *const u64,
    out: *mut *mut StiefelReport,
) -> StiefelStatus {
    guard(|| {
        let suite = Suite::from_toml_str(str_arg(config_toml, "config_toml")?)?;
        let opts = RunOptions { threads: (threads > 0).then_some(threads), seed: seed.as_ref().copied() };
        let report = run_suite(&suite, &opts)?;
        let json = CString::new(report.to_json()).map_err(|_| Fail(StiefelStatus::Numerical, "report contains NUL".into()))?;
        write(out, Box::into_raw(Box::new(StiefelReport { report, json })), "out")
    })
}

/// Overall verdict and counts of a report.
///
/// # Safety
/// `r` must be a live handle; the outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stiefel_report_summary(
    r: *const StiefelReport,
    pass: *mut bool,
    passed: *mut usize,
    failed: *mut usize,
) -> StiefelStatus {
    guard(|| {
        let r = &r.as_ref().ok_or_else(|| null("report"))?.report;
        write(pass, r.pass, "pass")?;
        write(passed, r.passed, "passed")?;
        write(failed, r.failed, "failed")
    })
}

/// The report as JSON, owned by the handle; null if `r` is null.
///
/// # Safety
/// `r` must be null or a live handle. The string is valid until the handle is freed.
#[no_mangle]
pub unsafe extern "C" fn stiefel_report_json(r: *const StiefelReport) -> *const c_char {
    r.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// # Safety
/// `r` must be null or a handle from [`stiefel_verify_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stiefel_report_free(r: *mut StiefelReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
