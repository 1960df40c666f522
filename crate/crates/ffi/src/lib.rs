//! C ABI for `teleport-witness`.
//!
//! States live behind opaque `TwState` handles created by the `tw_state_*`
//! constructors and released with [`tw_state_free`]. Every fallible call
//! returns a [`TwStatus`]; on failure a description is available from
//! [`tw_last_error`] until the next failing call on the same thread.
//! Matrices cross the boundary as separate row-major real and imaginary
//! `double` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use teleport_witness::fef::{self, FefMethod};
use teleport_witness::states::{self, ValidationFailure};
use teleport_witness::{witness, ComplexMatrix, DensityMatrix, Error, OptimizerConfig, Verdict};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidState = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwVerdict {
    NotDetected = 0,
    UsefulDetected = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwFefMethod {
    None = 0,
    Exact2x2 = 1,
    UnitaryAscent = 2,
    Sampling = 3,
}

impl From<FefMethod> for TwFefMethod {
    fn from(m: FefMethod) -> Self {
        match m {
            FefMethod::Exact2x2 => Self::Exact2x2,
            FefMethod::UnitaryAscent => Self::UnitaryAscent,
            FefMethod::Sampling => Self::Sampling,
        }
    }
}

/// Result of [`tw_classify`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TwReport {
    pub d: usize,
    pub expectation: f64,
    pub verdict: TwVerdict,
    /// `TW_FEF_METHOD_NONE` when no FEF was requested.
    pub fef_method: TwFefMethod,
    pub fef_value: f64,
    pub fef_converged: bool,
}

/// Result of the FEF entry points.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TwFef {
    pub value: f64,
    pub method: TwFefMethod,
    pub restarts_used: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// Opaque validated bipartite state.
pub struct TwState(DensityMatrix);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> TwStatus {
    if ValidationFailure::of(err).is_some() {
        TwStatus::InvalidState
    } else {
        TwStatus::InvalidArgument
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), TwStatus>) -> TwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TwStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("panic inside teleport-witness");
            TwStatus::Panic
        }
    }
}

fn fail(err: Error) -> TwStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn null(name: &str) -> TwStatus {
    set_error(format!("{name} is null"));
    TwStatus::NullPointer
}

unsafe fn state_ref<'a>(state: *const TwState) -> Result<&'a DensityMatrix, TwStatus> {
    // SAFETY: caller passes a live handle from a tw_state_* constructor or null.
    state.as_ref().map(|s| &s.0).ok_or_else(|| null("state"))
}

unsafe fn emit_state(out: *mut *mut TwState, rho: Result<DensityMatrix, Error>) -> Result<(), TwStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    let rho = rho.map_err(fail)?;
    // SAFETY: out checked non-null; caller guarantees it is writable.
    *out = Box::into_raw(Box::new(TwState(rho)));
    Ok(())
}

fn config(restarts: usize, seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        restarts,
        seed,
        ..OptimizerConfig::default()
    }
}

fn fef_out(est: &fef::FefEstimate) -> TwFef {
    TwFef {
        value: est.value,
        method: est.method.into(),
        restarts_used: est.restarts_used,
        iterations: est.iterations,
        converged: est.converged,
    }
}

/// Last error message on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn tw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Validates a `d^2 x d^2` matrix given as row-major real and imaginary parts
/// of length `len = d^4`.
///
/// # Safety
/// `re` and `im` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_state_from_matrix(
    d: usize,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut TwState,
) -> TwStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("matrix data"));
        }
        let n = d * d;
        if len != n * n {
            set_error(format!("expected {} entries for d = {d}, got {len}", n * n));
            return Err(TwStatus::InvalidState);
        }
        // SAFETY: caller guarantees both arrays hold `len` doubles.
        let (re, im) = (std::slice::from_raw_parts(re, len), std::slice::from_raw_parts(im, len));
        let entries: Vec<Complex64> = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let rho = ComplexMatrix::from_row_major(n, n, &entries).and_then(|m| DensityMatrix::new(d, m));
        emit_state(out, rho)
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_state_isotropic(d: usize, beta: f64, out: *mut *mut TwState) -> TwStatus {
    guard(|| emit_state(out, states::isotropic(d, beta)))
}

/// Generalized Werner state with `d` real Schmidt amplitudes.
///
/// # Safety
/// `alphas` must point to `d` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_state_werner(
    d: usize,
    v: f64,
    alphas: *const f64,
    out: *mut *mut TwState,
) -> TwStatus {
    guard(|| {
        if alphas.is_null() {
            return Err(null("alphas"));
        }
        // SAFETY: caller guarantees `d` readable doubles.
        let alphas = std::slice::from_raw_parts(alphas, d);
        emit_state(out, states::generalized_werner(d, v, alphas))
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_state_mems(concurrence: f64, out: *mut *mut TwState) -> TwStatus {
    guard(|| emit_state(out, states::mems(concurrence)))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_state_discord(a: f64, out: *mut *mut TwState) -> TwStatus {
    guard(|| emit_state(out, states::discord_state(a)))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_state_random(d: usize, rank: usize, seed: u64, out: *mut *mut TwState) -> TwStatus {
    guard(|| emit_state(out, states::random_density(d, rank, seed)))
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tw_state_free(state: *mut TwState) {
    if !state.is_null() {
        // SAFETY: handle came from Box::into_raw in emit_state.
        drop(Box::from_raw(state));
    }
}

/// Local dimension of a state, or 0 for null.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tw_state_dim(state: *const TwState) -> usize {
    state.as_ref().map_or(0, |s| s.0.d())
}

/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_witness_expectation(state: *const TwState, out: *mut f64) -> TwStatus {
    guard(|| {
        let rho = state_ref(state)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = witness::witness_expectation(rho);
        Ok(())
    })
}

/// Witness expectation, verdict and optionally the FEF (exact at `d = 2`,
/// optimizer with `restarts` and `seed` otherwise).
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_classify(
    state: *const TwState,
    with_fef: bool,
    restarts: usize,
    seed: u64,
    out: *mut TwReport,
) -> TwStatus {
    guard(|| {
        let rho = state_ref(state)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = witness::classify(rho, with_fef, &config(restarts, seed)).map_err(fail)?;
        *out = TwReport {
            d: r.d,
            expectation: r.expectation,
            verdict: match r.verdict {
                Verdict::UsefulDetected => TwVerdict::UsefulDetected,
                Verdict::NotDetected => TwVerdict::NotDetected,
            },
            fef_method: r.fef_hint.as_ref().map_or(TwFefMethod::None, |f| f.method.into()),
            fef_value: r.fef_hint.as_ref().map_or(f64::NAN, |f| f.value),
            fef_converged: r.fef_hint.as_ref().is_some_and(|f| f.converged),
        };
        Ok(())
    })
}

/// Exact FEF of a two-qubit state.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_fef_exact_2x2(state: *const TwState, out: *mut TwFef) -> TwStatus {
    guard(|| {
        let rho = state_ref(state)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = fef_out(&fef::fef_exact_2x2(rho).map_err(fail)?);
        Ok(())
    })
}

/// Optimizer lower bound on the FEF with default settings except `restarts` and `seed`.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_fef_optimize(
    state: *const TwState,
    restarts: usize,
    seed: u64,
    out: *mut TwFef,
) -> TwStatus {
    guard(|| {
        let rho = state_ref(state)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = fef_out(&fef::fef_optimize(rho, &config(restarts, seed)).map_err(fail)?);
        Ok(())
    })
}

/// Writes `W` for local dimension `d` as row-major parts into buffers of
/// length `len >= d^4`.
///
/// # Safety
/// `re` and `im` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tw_witness_operator(d: usize, re: *mut f64, im: *mut f64, len: usize) -> TwStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("output buffer"));
        }
        let w = witness::witness_operator(d).map_err(fail)?;
        let entries = w.to_row_major();
        if len < entries.len() {
            set_error(format!("buffer holds {len} entries, need {}", entries.len()));
            return Err(TwStatus::BufferTooSmall);
        }
        // SAFETY: caller guarantees `len` writable doubles in each buffer.
        let (re, im) = (
            std::slice::from_raw_parts_mut(re, len),
            std::slice::from_raw_parts_mut(im, len),
        );
        for (k, z) in entries.iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}

unsafe fn write_value(out: *mut f64, value: Result<f64, Error>) -> Result<(), TwStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = value.map_err(fail)?;
    Ok(())
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_isotropic_expectation(d: usize, beta: f64, out: *mut f64) -> TwStatus {
    guard(|| write_value(out, witness::isotropic_expectation(d, beta)))
}

/// # Safety
/// `alphas` must point to `d` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_werner_expectation(d: usize, v: f64, alphas: *const f64, out: *mut f64) -> TwStatus {
    guard(|| {
        if alphas.is_null() {
            return Err(null("alphas"));
        }
        let alphas = std::slice::from_raw_parts(alphas, d);
        write_value(out, witness::werner_expectation(d, v, alphas))
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_mems_expectation(concurrence: f64, out: *mut f64) -> TwStatus {
    guard(|| write_value(out, witness::mems_expectation(concurrence)))
}

/// Lipschitz constant of the FEF under the Frobenius norm, `d^2`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tw_continuity_bound(d: usize, out: *mut f64) -> TwStatus {
    guard(|| write_value(out, fef::continuity_bound(d)))
}
