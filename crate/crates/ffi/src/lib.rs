//! C ABI over the fibconv engine.
//!
//! Every entry point returns an [`FcStatus`] and writes results through out
//! pointers. Objects cross the boundary as opaque handles that must be
//! released with their matching `*_free` function; strings returned by the
//! library are NUL-terminated decimal text released with [`fc_string_free`].
//! On failure, [`fc_last_error_message`] describes the most recent error on
//! the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fibconv::conjecture::{conjecture_with, ConjectureOptions};
use fibconv::verify::IdentityVerifier;
use fibconv::{
    dsl, eval_term, expansion, fib, lucas, sum_expansions, CollectedWeights, ConjectureStatus,
    Error, IdentityReport, SequenceSpec, SpecSource,
};

/// Result codes shared by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcStatus {
    Ok = 0,
    /// A check ran and did not hold.
    CheckFailed = 1,
    /// Null pointer, bad UTF-8, or an out-of-range argument.
    InvalidArgument = 2,
    /// Spec text did not parse.
    Parse = 3,
    /// The operation is not defined for the given index or spec.
    Domain = 4,
    /// Backward extension needs a non-unit trailing coefficient inverted.
    NonInvertible = 5,
    /// Discovery found no recurrence within the order cap.
    Undetermined = 6,
    /// The library panicked; this is a bug.
    Internal = 7,
}

/// Opaque sequence spec.
pub struct FcSpec(SequenceSpec);

/// Opaque collected weights of the summed expansions.
pub struct FcWeights(CollectedWeights);

/// Opaque identity-check report.
pub struct FcReport(IdentityReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: FcStatus, message: impl Into<String>) -> FcStatus {
    set_error(message);
    status
}

fn status_of(e: &Error) -> FcStatus {
    match e {
        Error::Parse(_) => FcStatus::Parse,
        Error::NonInvertibleStep { .. } => FcStatus::NonInvertible,
        Error::InvalidRange { .. } | Error::InvalidSpec(_) => FcStatus::InvalidArgument,
        Error::Undetermined => FcStatus::Undetermined,
        _ => FcStatus::Domain,
    }
}

fn from_error(e: Error) -> FcStatus {
    let status = status_of(&e);
    fail(status, e.to_string())
}

/// Runs `body`, turning panics into `Internal`.
fn guard(body: impl FnOnce() -> FcStatus) -> FcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(FcStatus::Internal, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, FcStatus> {
    if p.is_null() {
        return Err(fail(FcStatus::InvalidArgument, "null string"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(FcStatus::InvalidArgument, "string is not UTF-8"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> FcStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            FcStatus::Ok
        }
        Err(_) => fail(FcStatus::Internal, "string contains NUL"),
    }
}

unsafe fn write_handle<T>(out: *mut *mut T, value: T) -> FcStatus {
    *out = Box::into_raw(Box::new(value));
    FcStatus::Ok
}

macro_rules! non_null {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            return fail(FcStatus::InvalidArgument, concat!("null pointer: ", stringify!($p)));
        })+
    };
}

/// Message for the last failing call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builtin spec by name: `fib`, `lucas` or `tribonacci`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_spec_builtin(name: *const c_char, out: *mut *mut FcSpec) -> FcStatus {
    guard(|| {
        non_null!(out);
        let name = match read_str(name) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let spec = match name {
            "fib" | "fibonacci" => SequenceSpec::fibonacci(),
            "lucas" => SequenceSpec::lucas(),
            "trib" | "tribonacci" => SequenceSpec::tribonacci(),
            other => {
                return fail(
                    FcStatus::InvalidArgument,
                    format!("unknown builtin `{other}`"),
                )
            }
        };
        write_handle(out, FcSpec(spec))
    })
}

/// Parses spec text holding one `seq` statement.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_spec_parse(text: *const c_char, out: *mut *mut FcSpec) -> FcStatus {
    guard(|| {
        non_null!(out);
        let text = match read_str(text) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match dsl::parse(&SpecSource::inline(text)) {
            Ok(spec) => write_handle(out, FcSpec(spec)),
            Err(e) => fail(FcStatus::Parse, e.to_string()),
        }
    })
}

/// # Safety
/// `spec` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fc_spec_free(spec: *mut FcSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Order of the recurrence, or 0 for NULL.
///
/// # Safety
/// `spec` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_spec_order(spec: *const FcSpec) -> usize {
    spec.as_ref().map_or(0, |s| s.0.order())
}

/// Canonical spec text.
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_spec_format(spec: *const FcSpec, out: *mut *mut c_char) -> FcStatus {
    guard(|| {
        non_null!(spec, out);
        write_string(out, dsl::format(&(*spec).0))
    })
}

/// `F(n)` as decimal text.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_fib(n: i64, out: *mut *mut c_char) -> FcStatus {
    guard(|| {
        non_null!(out);
        match fib(n) {
            Ok(v) => write_string(out, v.to_string()),
            Err(e) => from_error(e),
        }
    })
}

/// `L(n)` as decimal text.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_lucas(n: i64, out: *mut *mut c_char) -> FcStatus {
    guard(|| {
        non_null!(out);
        match lucas(n) {
            Ok(v) => write_string(out, v.to_string()),
            Err(e) => from_error(e),
        }
    })
}

/// Value of `spec` at index `n` (backward extension below the seeds).
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_eval_term(
    spec: *const FcSpec,
    n: i64,
    out: *mut *mut c_char,
) -> FcStatus {
    guard(|| {
        non_null!(spec, out);
        match eval_term(&(*spec).0, n) {
            Ok(v) => write_string(out, v.to_string()),
            Err(e) => from_error(e),
        }
    })
}

/// The expansion after `depth - 1` substitutions, as text such as
/// `F(n) = 3*F(n-3) + 2*F(n-4)`.
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_expand(
    spec: *const FcSpec,
    depth: usize,
    out: *mut *mut c_char,
) -> FcStatus {
    guard(|| {
        non_null!(spec, out);
        match expansion(&(*spec).0, depth) {
            Ok(form) => write_string(out, form.to_string()),
            Err(e) => from_error(e),
        }
    })
}

/// Sums the expansions for target index `n`.
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_collect(
    spec: *const FcSpec,
    n: i64,
    out: *mut *mut FcWeights,
) -> FcStatus {
    guard(|| {
        non_null!(spec, out);
        match sum_expansions(&(*spec).0, n) {
            Ok(w) => write_handle(out, FcWeights(w)),
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `w` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_weights_free(w: *mut FcWeights) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Number of weights, `n - 1`.
///
/// # Safety
/// `w` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_weights_len(w: *const FcWeights) -> usize {
    w.as_ref().map_or(0, |w| w.0.weights().len())
}

/// Weight `a_k` for `1 <= k <= n-1`.
///
/// # Safety
/// `w` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_weights_get(
    w: *const FcWeights,
    k: usize,
    out: *mut *mut c_char,
) -> FcStatus {
    guard(|| {
        non_null!(w, out);
        match (*w).0.weight(k) {
            Some(v) => write_string(out, v.to_string()),
            None => fail(
                FcStatus::InvalidArgument,
                format!("weight index {k} out of range"),
            ),
        }
    })
}

/// Number of residual terms.
///
/// # Safety
/// `w` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_weights_residual_len(w: *const FcWeights) -> usize {
    w.as_ref().map_or(0, |w| w.0.residual().len())
}

/// The `i`-th residual term (0-based, ascending shift).
///
/// # Safety
/// `w` must be a live handle; `shift` and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_weights_residual_get(
    w: *const FcWeights,
    i: usize,
    shift: *mut usize,
    out: *mut *mut c_char,
) -> FcStatus {
    guard(|| {
        non_null!(w, shift, out);
        match (*w).0.residual().iter().nth(i) {
            Some((k, c)) => {
                *shift = *k;
                write_string(out, c.to_string())
            }
            None => fail(
                FcStatus::InvalidArgument,
                format!("residual index {i} out of range"),
            ),
        }
    })
}

/// Checks the identity for every `n` in `lo..=hi`. Returns `OK` when the
/// check ran, whatever its outcome; inspect the report for pass/fail.
/// `jobs = 0` uses the default worker pool.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_check_range(
    lo: i64,
    hi: i64,
    jobs: u32,
    out: *mut *mut FcReport,
) -> FcStatus {
    guard(|| {
        non_null!(out);
        let jobs = (jobs > 0).then_some(jobs as usize);
        match IdentityVerifier::standard()
            .with_jobs(jobs)
            .check_range(lo, hi)
        {
            Ok(r) => write_handle(out, FcReport(r)),
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_report_free(r: *mut FcReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_report_passed(r: *const FcReport) -> bool {
    r.as_ref().is_some_and(|r| r.0.passed())
}

/// Least failing index with both sides as decimal text; `CHECK_FAILED`
/// is never returned here, `INVALID_ARGUMENT` means the report passed.
///
/// # Safety
/// `r` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_report_first_failure(
    r: *const FcReport,
    n: *mut i64,
    lhs: *mut *mut c_char,
    rhs: *mut *mut c_char,
) -> FcStatus {
    guard(|| {
        non_null!(r, n, lhs, rhs);
        let Some(f) = (*r).0.first_failure.as_ref() else {
            return fail(FcStatus::InvalidArgument, "report has no failure");
        };
        *n = f.n;
        let status = write_string(lhs, f.lhs.to_string());
        if status != FcStatus::Ok {
            return status;
        }
        write_string(rhs, f.rhs.to_string())
    })
}

/// Replays the inductive step at `m >= 3`; `CHECK_FAILED` if it does not hold.
#[no_mangle]
pub extern "C" fn fc_inductive_step_check(m: i64) -> FcStatus {
    guard(
        || match IdentityVerifier::standard().inductive_step_check(m) {
            Ok(true) => FcStatus::Ok,
            Ok(false) => fail(
                FcStatus::CheckFailed,
                format!("inductive step fails at m={m}"),
            ),
            Err(e) => from_error(e),
        },
    )
}

/// Discovers and verifies the analogous identity for `spec`, writing it as
/// JSON. Returns `OK` when verified, `CHECK_FAILED` when refuted and
/// `UNDETERMINED` when no recurrence fit; JSON is written in all three cases.
/// `max_order = 0` selects the default cap.
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_conjecture_json(
    spec: *const FcSpec,
    probe_n: i64,
    verify_hi: i64,
    max_order: usize,
    out: *mut *mut c_char,
) -> FcStatus {
    guard(|| {
        non_null!(spec, out);
        let mut options = ConjectureOptions::default();
        if max_order > 0 {
            options.max_order = max_order;
        }
        let c = match conjecture_with(&(*spec).0, probe_n, verify_hi, options) {
            Ok(c) => c,
            Err(e) => return from_error(e),
        };
        let written = write_string(out, c.to_json().to_string());
        if written != FcStatus::Ok {
            return written;
        }
        match c.status {
            ConjectureStatus::Verified => FcStatus::Ok,
            ConjectureStatus::Refuted { n } => fail(
                FcStatus::CheckFailed,
                format!("conjecture refuted at n={n}"),
            ),
            ConjectureStatus::Undetermined { reason } => fail(FcStatus::Undetermined, reason),
        }
    })
}
