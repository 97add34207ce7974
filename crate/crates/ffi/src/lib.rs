//! C interface to `sss-core`.
//!
//! Every fallible call returns an [`SssStatus`]; on failure a message is kept
//! per thread and can be read with [`sss_last_error_message`]. Objects are
//! opaque handles created by `*_new` and released by the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sss_core::cli::build_profile;
use sss_core::exponents::{exponent_table, ExponentTable, SolveOptions};
use sss_core::{Error, ProblemParams, SelfSimilarProfile, Sign, SolverSettings, TailKind};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SssStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    SolverFailure = 3,
    Unsupported = 4,
    OutOfRange = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SssTailKind {
    Algebraic = 0,
    Exponential = 1,
    Truncated = 2,
}

/// A self-similar profile `f` on `[0, end)`.
pub struct SssProfile {
    inner: SelfSimilarProfile,
}

/// Eigen-homogeneities `α^±_k`, `k = 1..=max_k`.
pub struct SssExponentTable {
    inner: ExponentTable,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: SssStatus, msg: impl Into<String>) -> SssStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> SssStatus {
    let status = match &e {
        Error::InvalidInput(_) => SssStatus::InvalidArgument,
        Error::Unsupported { .. } => SssStatus::Unsupported,
        _ => SssStatus::SolverFailure,
    };
    fail(status, e.to_string())
}

/// Runs `body`, turning panics into [`SssStatus::Panic`].
fn guarded<F: FnOnce() -> SssStatus>(body: F) -> SssStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(s) => s,
        Err(_) => fail(SssStatus::Panic, "internal panic"),
    }
}

fn sign_of(sign: i32) -> Result<Sign, SssStatus> {
    match sign {
        1 => Ok(Sign::Plus),
        -1 => Ok(Sign::Minus),
        other => Err(fail(SssStatus::InvalidArgument, format!("sign must be +1 or -1, got {other}"))),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sss_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sss_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Clears the stored error message of this thread.
#[no_mangle]
pub extern "C" fn sss_clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Computes `α^{sign}_k` in dimension `dimension` with default tolerances.
///
/// # Safety
/// `out_alpha` must be NULL or point to writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn sss_exponent(dimension: u32, sign: i32, k: u32, out_alpha: *mut f64) -> SssStatus {
    guarded(|| {
        if out_alpha.is_null() {
            return fail(SssStatus::NullPointer, "out_alpha is NULL");
        }
        let sign = match sign_of(sign) {
            Ok(s) => s,
            Err(st) => return st,
        };
        if k == 0 {
            return fail(SssStatus::OutOfRange, "k starts at 1");
        }
        match exponent_table(k as usize, dimension, &SolverSettings::default(), &SolveOptions::default()) {
            Ok(t) => match t.alpha(sign, k as usize) {
                Some(a) => {
                    // SAFETY: checked non-null; caller guarantees validity.
                    unsafe { *out_alpha = a };
                    SssStatus::Ok
                }
                None => fail(SssStatus::SolverFailure, "exponent missing from table"),
            },
            Err(e) => from_error(e),
        }
    })
}

/// Builds the table of `α^±_k` for `k <= max_k`.
///
/// # Safety
/// `out` must be NULL or point to writable memory for one pointer. On success
/// `*out` owns a table to be released with [`sss_exponent_table_free`].
#[no_mangle]
pub unsafe extern "C" fn sss_exponent_table_new(dimension: u32, max_k: u32, out: *mut *mut SssExponentTable) -> SssStatus {
    guarded(|| {
        if out.is_null() {
            return fail(SssStatus::NullPointer, "out is NULL");
        }
        match exponent_table(max_k as usize, dimension, &SolverSettings::default(), &SolveOptions::default()) {
            Ok(inner) => {
                // SAFETY: checked non-null.
                unsafe { *out = Box::into_raw(Box::new(SssExponentTable { inner })) };
                SssStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Reads `α^{sign}_k` from a table.
///
/// # Safety
/// `table` must be NULL or a live handle; `out_alpha` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn sss_exponent_table_alpha(
    table: *const SssExponentTable,
    sign: i32,
    k: u32,
    out_alpha: *mut f64,
) -> SssStatus {
    guarded(|| {
        if table.is_null() || out_alpha.is_null() {
            return fail(SssStatus::NullPointer, "table or out_alpha is NULL");
        }
        let sign = match sign_of(sign) {
            Ok(s) => s,
            Err(st) => return st,
        };
        // SAFETY: checked non-null; caller guarantees a live handle.
        let t = unsafe { &*table };
        match t.inner.alpha(sign, k as usize) {
            Some(a) => {
                unsafe { *out_alpha = a };
                SssStatus::Ok
            }
            None => fail(SssStatus::OutOfRange, format!("no entry for k = {k}")),
        }
    })
}

/// # Safety
/// `table` must be NULL or a handle from [`sss_exponent_table_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sss_exponent_table_free(table: *mut SssExponentTable) {
    if !table.is_null() {
        // SAFETY: caller passes ownership of a handle created by Box::into_raw.
        drop(unsafe { Box::from_raw(table) });
    }
}

/// Shoots the profile with `f(0) = sign`. When `alpha` is an
/// eigen-homogeneity the result carries the algebraic tail.
///
/// # Safety
/// `out` must be NULL or point to writable memory for one pointer. On success
/// `*out` must be released with [`sss_profile_free`].
#[no_mangle]
pub unsafe extern "C" fn sss_profile_new(dimension: u32, alpha: f64, sign: i32, out: *mut *mut SssProfile) -> SssStatus {
    guarded(|| {
        if out.is_null() {
            return fail(SssStatus::NullPointer, "out is NULL");
        }
        let sign = match sign_of(sign) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let params = match ProblemParams::new(dimension, alpha, sign) {
            Ok(p) => p,
            Err(e) => return from_error(e),
        };
        match build_profile(&params, &SolverSettings::default(), 1e-6) {
            Ok(inner) => {
                // SAFETY: checked non-null.
                unsafe { *out = Box::into_raw(Box::new(SssProfile { inner })) };
                SssStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Evaluates `f(s)` and `f'(s)`. Either output pointer may be NULL.
///
/// # Safety
/// `profile` must be NULL or a live handle; outputs NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn sss_profile_eval(profile: *const SssProfile, s: f64, out_f: *mut f64, out_fp: *mut f64) -> SssStatus {
    guarded(|| {
        if profile.is_null() {
            return fail(SssStatus::NullPointer, "profile is NULL");
        }
        // SAFETY: checked non-null; caller guarantees a live handle.
        let p = unsafe { &*profile };
        match p.inner.eval(s) {
            Some([f, fp]) => {
                // SAFETY: each pointer is checked before the write.
                unsafe {
                    if !out_f.is_null() {
                        *out_f = f;
                    }
                    if !out_fp.is_null() {
                        *out_fp = fp;
                    }
                }
                SssStatus::Ok
            }
            None => fail(SssStatus::OutOfRange, format!("s = {s} outside [0, {})", p.inner.end())),
        }
    })
}

/// Right end of the computed range; `+inf` with an algebraic tail, NaN for NULL.
///
/// # Safety
/// `profile` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sss_profile_end(profile: *const SssProfile) -> f64 {
    if profile.is_null() {
        return f64::NAN;
    }
    // SAFETY: checked non-null.
    unsafe { &*profile }.inner.end()
}

/// Number of sign changes; 0 for NULL.
///
/// # Safety
/// `profile` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sss_profile_zero_count(profile: *const SssProfile) -> usize {
    if profile.is_null() {
        return 0;
    }
    // SAFETY: checked non-null.
    unsafe { &*profile }.inner.zeros.len()
}

/// Copies the zeros into `buf`. `*out_len` receives the number of zeros even
/// when `capacity` is too small.
///
/// # Safety
/// `profile` NULL or live; `buf` NULL or writable for `capacity` doubles;
/// `out_len` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn sss_profile_zeros(
    profile: *const SssProfile,
    buf: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> SssStatus {
    guarded(|| {
        if profile.is_null() {
            return fail(SssStatus::NullPointer, "profile is NULL");
        }
        // SAFETY: checked non-null.
        let zeros = &unsafe { &*profile }.inner.zeros;
        if !out_len.is_null() {
            unsafe { *out_len = zeros.len() };
        }
        if zeros.is_empty() {
            return SssStatus::Ok;
        }
        if buf.is_null() {
            return fail(SssStatus::NullPointer, "buf is NULL");
        }
        if capacity < zeros.len() {
            return fail(SssStatus::BufferTooSmall, format!("need {} slots, got {capacity}", zeros.len()));
        }
        // SAFETY: buf holds at least zeros.len() doubles.
        unsafe { ptr::copy_nonoverlapping(zeros.as_ptr(), buf, zeros.len()) };
        SssStatus::Ok
    })
}

/// # Safety
/// `profile` NULL or live; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn sss_profile_tail_kind(profile: *const SssProfile, out: *mut SssTailKind) -> SssStatus {
    if profile.is_null() || out.is_null() {
        return fail(SssStatus::NullPointer, "profile or out is NULL");
    }
    // SAFETY: checked non-null.
    let kind = match unsafe { &*profile }.inner.tail.kind {
        TailKind::Algebraic => SssTailKind::Algebraic,
        TailKind::Exponential => SssTailKind::Exponential,
        TailKind::Truncated => SssTailKind::Truncated,
    };
    unsafe { *out = kind };
    SssStatus::Ok
}

/// # Safety
/// `profile` must be NULL or a handle from [`sss_profile_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sss_profile_free(profile: *mut SssProfile) {
    if !profile.is_null() {
        // SAFETY: caller passes ownership of a handle created by Box::into_raw.
        drop(unsafe { Box::from_raw(profile) });
    }
}

/// Human-readable name of a status code, static.
#[no_mangle]
pub extern "C" fn sss_status_name(status: SssStatus) -> *const c_char {
    let s: &'static CStr = match status {
        SssStatus::Ok => c"ok",
        SssStatus::InvalidArgument => c"invalid argument",
        SssStatus::NullPointer => c"null pointer",
        SssStatus::SolverFailure => c"solver failure",
        SssStatus::Unsupported => c"unsupported",
        SssStatus::OutOfRange => c"out of range",
        SssStatus::BufferTooSmall => c"buffer too small",
        SssStatus::Panic => c"panic",
    };
    s.as_ptr()
}
