//! C ABI over `cstar-fixpoint`.
//!
//! Problems and solutions cross the boundary as opaque handles owned by the
//! caller and released with the matching `*_free` function. Every fallible
//! call returns a [`CstarStatus`]; on failure a message describing the error
//! is kept per thread and can be fetched with [`cstar_last_error_message`].
//! Out-parameters are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cstar_fixpoint::algebra::{AlgebraElement, ComplexScalar, ToleranceConfig};
use cstar_fixpoint::cli::parse_instance_str;
use cstar_fixpoint::contraction::verify_contraction;
use cstar_fixpoint::instances::{builtin, Problem};
use cstar_fixpoint::metric::{check_axioms, Axiom};
use cstar_fixpoint::solver::{self, picard_solve, BoundInputs};
use cstar_fixpoint::{Error, FixedPointResult};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CstarStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    UnknownBuiltin = 4,
    DimensionMismatch = 5,
    NonFinite = 6,
    NotHermitian = 7,
    CertificateInvalid = 8,
    WeightNotPositive = 9,
    Divergence = 10,
    InvalidInput = 11,
    BufferTooSmall = 12,
    Panic = 13,
}

impl From<&Error> for CstarStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } => Self::DimensionMismatch,
            Error::NonFinite(_) => Self::NonFinite,
            Error::NotHermitian { .. } => Self::NotHermitian,
            Error::CertificateInvalid { .. } => Self::CertificateInvalid,
            Error::WeightNotPositive { .. } => Self::WeightNotPositive,
            Error::Divergence { .. } => Self::Divergence,
            Error::InvalidInput(_) => Self::InvalidInput,
        }
    }
}

/// A metric space, map, certificate, start point and tolerances.
pub struct CstarProblem {
    problem: Problem,
    tol: ToleranceConfig,
}

/// The outcome of a Picard solve.
pub struct CstarSolution {
    result: FixedPointResult,
}

/// Counts from a sampled verification run. `passed` is nonzero when every
/// count of failures is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CstarVerifySummary {
    pub positivity_failures: usize,
    pub identity_failures: usize,
    pub symmetry_failures: usize,
    pub triangle_failures: usize,
    pub axiom_checks: usize,
    pub contraction_checks: usize,
    pub contraction_failures: usize,
    pub passed: bool,
}

struct Failure {
    status: CstarStatus,
    message: String,
}

impl Failure {
    fn new(status: CstarStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::new(CstarStatus::from(&e), e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CstarStatus {
    let outcome = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|payload| {
        let detail = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        Err(Failure::new(CstarStatus::Panic, format!("internal panic: {detail}")))
    });
    match outcome {
        Ok(()) => CstarStatus::Ok,
        Err(f) => {
            set_last_error(&f.message);
            f.status
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure::new(CstarStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    non_null(p, what)?;
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(CstarStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn write<T>(out: *mut T, value: T) {
    out.write(value);
}

/// The message of the most recent failure on this thread, or NULL if there
/// has been none. The caller owns the string and must release it with
/// [`cstar_string_free`].
#[no_mangle]
pub extern "C" fn cstar_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cstar_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance file held in memory.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstar_problem_from_text(text: *const c_char, out: *mut *mut CstarProblem) -> CstarStatus {
    guard(|| {
        non_null(out, "out")?;
        let text = read_str(text, "text")?;
        let spec = parse_instance_str(text).map_err(|e| Failure::new(CstarStatus::Parse, e.to_string()))?;
        let problem = spec.build()?;
        let tol = spec.tolerances.apply(ToleranceConfig::default())?;
        write(out, Box::into_raw(Box::new(CstarProblem { problem, tol })));
        Ok(())
    })
}

/// Loads a built-in instance by name, for example `"scalar-half"`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstar_problem_builtin(name: *const c_char, out: *mut *mut CstarProblem) -> CstarStatus {
    guard(|| {
        non_null(out, "out")?;
        let name = read_str(name, "name")?;
        let problem = builtin(name)
            .ok_or_else(|| Failure::new(CstarStatus::UnknownBuiltin, format!("unknown built-in `{name}`")))??;
        let tol = ToleranceConfig::default();
        write(out, Box::into_raw(Box::new(CstarProblem { problem, tol })));
        Ok(())
    })
}

/// # Safety
/// `problem` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cstar_problem_free(problem: *mut CstarProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Dimension of the points the problem's map acts on, or 0 for NULL.
///
/// # Safety
/// `problem` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cstar_problem_point_dim(problem: *const CstarProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.problem.space.point_dim())
}

/// Size `n` of the matrix algebra `M_n(C)` the metric takes values in, or 0
/// for NULL.
///
/// # Safety
/// `problem` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cstar_problem_algebra_dim(problem: *const CstarProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.problem.space.algebra_dim())
}

/// `||A||` of the problem's certificate, or NaN for NULL.
///
/// # Safety
/// `problem` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cstar_problem_norm_a(problem: *const CstarProblem) -> f64 {
    problem.as_ref().map_or(f64::NAN, |p| p.problem.certificate.norm_a())
}

/// Samples `samples` triples for the metric axioms and `samples` pairs for
/// the contraction condition. A failed verification is reported through
/// `out->passed`, not through the status.
///
/// # Safety
/// `problem` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstar_problem_verify(
    problem: *const CstarProblem,
    seed: u64,
    samples: usize,
    out: *mut CstarVerifySummary,
) -> CstarStatus {
    guard(|| {
        non_null(problem, "problem")?;
        non_null(out, "out")?;
        let CstarProblem { problem, tol } = &*problem;
        let axioms = check_axioms(&problem.space, seed, samples, tol)?;
        let contraction = verify_contraction(&problem.space, &problem.map, &problem.certificate, seed, samples, tol)?;
        let failures = |a| axioms.record(a).failures;
        let summary = CstarVerifySummary {
            positivity_failures: failures(Axiom::Positivity),
            identity_failures: failures(Axiom::Identity),
            symmetry_failures: failures(Axiom::Symmetry),
            triangle_failures: failures(Axiom::Triangle),
            axiom_checks: Axiom::ALL.iter().map(|&a| axioms.record(a).checked).sum(),
            contraction_checks: contraction.checked,
            contraction_failures: contraction.failures,
            passed: axioms.passed() && contraction.passed(),
        };
        write(out, summary);
        Ok(())
    })
}

/// Runs Picard iteration from the problem's start point. A `conv_tol` of 0
/// keeps the problem's own tolerance.
///
/// # Safety
/// `problem` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstar_problem_solve(
    problem: *const CstarProblem,
    conv_tol: f64,
    max_iter: usize,
    out: *mut *mut CstarSolution,
) -> CstarStatus {
    guard(|| {
        non_null(problem, "problem")?;
        non_null(out, "out")?;
        let CstarProblem { problem, tol } = &*problem;
        let tol = if conv_tol == 0.0 { *tol } else { tol.with_conv_tol(conv_tol)? };
        let result = picard_solve(&problem.space, &problem.map, &problem.certificate, &problem.x0, &tol, max_iter)?;
        write(out, Box::into_raw(Box::new(CstarSolution { result })));
        Ok(())
    })
}

/// # Safety
/// `solution` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cstar_solution_free(solution: *mut CstarSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Copies the approximate fixed point into `buf`, which holds `len` doubles.
/// Fails with `BUFFER_TOO_SMALL` if `len` is below the point dimension.
///
/// # Safety
/// `solution` must be a live handle; `buf` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cstar_solution_point(solution: *const CstarSolution, buf: *mut f64, len: usize) -> CstarStatus {
    guard(|| {
        non_null(solution, "solution")?;
        non_null(buf, "buf")?;
        let coords = (*solution).result.point.coords();
        if len < coords.len() {
            return Err(Failure::new(
                CstarStatus::BufferTooSmall,
                format!("point has {} coordinates, buffer holds {len}", coords.len()),
            ));
        }
        ptr::copy_nonoverlapping(coords.as_ptr(), buf, coords.len());
        Ok(())
    })
}

/// Dimension of the fixed point, or 0 for NULL.
///
/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cstar_solution_point_dim(solution: *const CstarSolution) -> usize {
    solution.as_ref().map_or(0, |s| {
        let r = &s.result;
        r.point.dim()
    })
}

/// Number of map applications performed, or 0 for NULL.
///
/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cstar_solution_iterations(solution: *const CstarSolution) -> usize {
    solution.as_ref().map_or(0, |s| {
        let r = &s.result;
        r.iterations
    })
}

/// `||d(x_n, T x_n)||` at the returned point, or NaN for NULL.
///
/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cstar_solution_residual_norm(solution: *const CstarSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| {
        let r = &s.result;
        r.residual_norm
    })
}

/// `||A||^(2n) / (1 - ||A||^2) * ||d(x_0, T x_0)||`, or NaN for NULL.
///
/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cstar_solution_apriori_bound(solution: *const CstarSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| {
        let r = &s.result;
        r.apriori_bound
    })
}

/// `residual / (1 - ||A||^2)`, or NaN for NULL.
///
/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cstar_solution_aposteriori_bound(solution: *const CstarSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| {
        let r = &s.result;
        r.aposteriori_bound
    })
}

/// Whether the residual reached the convergence tolerance.
///
/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cstar_solution_converged(solution: *const CstarSolution) -> bool {
    solution.as_ref().is_some_and(|s| s.result.converged)
}

/// Operator norm of the `dim x dim` complex matrix whose real and imaginary
/// parts are given row-major in `re` and `im` (`im` may be NULL for a real
/// matrix).
///
/// # Safety
/// `re` (and `im` if non-NULL) must hold `dim * dim` readable doubles; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstar_operator_norm(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out: *mut f64,
) -> CstarStatus {
    guard(|| {
        non_null(re, "re")?;
        non_null(out, "out")?;
        let len = dim
            .checked_mul(dim)
            .ok_or_else(|| Failure::new(CstarStatus::InvalidInput, "dimension overflows"))?;
        let re = std::slice::from_raw_parts(re, len);
        let entries = if im.is_null() {
            re.iter().map(|&x| ComplexScalar::new(x, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(im, len);
            re.iter().zip(im).map(|(&x, &y)| ComplexScalar::new(x, y)).collect()
        };
        write(out, AlgebraElement::from_entries(dim, entries)?.operator_norm());
        Ok(())
    })
}

fn bound_inputs(norm_a: f64, d0_norm: f64) -> Result<BoundInputs, Failure> {
    Ok(BoundInputs::new(norm_a, d0_norm)?)
}

/// `(q^n + q^m) / (1 - q) * d0_norm` with `q = norm_a^2`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstar_cauchy_pair_bound(
    norm_a: f64,
    d0_norm: f64,
    n: usize,
    m: usize,
    out: *mut f64,
) -> CstarStatus {
    guard(|| {
        non_null(out, "out")?;
        write(out, solver::cauchy_pair_bound(&bound_inputs(norm_a, d0_norm)?, n, m));
        Ok(())
    })
}

/// `q^n / (1 - q) * d0_norm` with `q = norm_a^2`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstar_apriori_bound(norm_a: f64, d0_norm: f64, n: usize, out: *mut f64) -> CstarStatus {
    guard(|| {
        non_null(out, "out")?;
        write(out, solver::apriori_bound(&bound_inputs(norm_a, d0_norm)?, n));
        Ok(())
    })
}

/// `residual_norm / (1 - norm_a^2)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cstar_aposteriori_bound(norm_a: f64, residual_norm: f64, out: *mut f64) -> CstarStatus {
    guard(|| {
        non_null(out, "out")?;
        if !(residual_norm.is_finite() && residual_norm >= 0.0) {
            return Err(Failure::new(CstarStatus::InvalidInput, "residual norm must be finite and nonnegative"));
        }
        bound_inputs(norm_a, 0.0)?;
        write(out, solver::aposteriori_bound(norm_a, residual_norm));
        Ok(())
    })
}
