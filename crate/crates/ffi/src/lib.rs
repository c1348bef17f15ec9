//! C interface to the checker and the evaluator.
//!
//! Sessions are opaque handles. Strings returned to the caller are owned by
//! the caller and must be released with `foc_string_free`.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use foclite::driver::{corpus, Options, Session, Source};
use foclite::eval::EvalBudget;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FocStatus {
    Ok = 0,
    CheckFailed = 1,
    InvalidArgument = 2,
    ParseError = 3,
    EvalError = 4,
    Panic = 5,
}

/// Load the bundled corpus before the given source.
pub const FOC_WITH_CORPUS: u32 = 1;
/// Discharge proof obligations while loading.
pub const FOC_PROVE: u32 = 2;

pub struct FocSession {
    session: Session,
}

fn guard(f: impl FnOnce() -> FocStatus) -> FocStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(FocStatus::Panic)
}

unsafe fn text<'a>(p: *const c_char) -> Option<&'a str> {
    if p.is_null() {
        return None;
    }
    CStr::from_ptr(p).to_str().ok()
}

fn give(s: String) -> *mut c_char {
    // Interior NULs cannot cross the boundary; none of our outputs contain them.
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Build a session from `source` (may be NULL when `FOC_WITH_CORPUS` is
/// set). The handle is written to `out` even when loading reports errors;
/// the status is `CheckFailed` or `ParseError` in that case.
///
/// # Safety
/// `source` must be NULL or a valid NUL-terminated string, and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn foc_session_new(source: *const c_char, flags: u32, out: *mut *mut FocSession) -> FocStatus {
    guard(|| {
        if out.is_null() {
            return FocStatus::InvalidArgument;
        }
        *out = ptr::null_mut();
        let mut sources = if flags & FOC_WITH_CORPUS != 0 { corpus() } else { Vec::new() };
        match (source.is_null(), text(source)) {
            (true, _) if flags & FOC_WITH_CORPUS != 0 => {}
            (false, Some(t)) => sources.push(Source::new("<input>", t)),
            _ => return FocStatus::InvalidArgument,
        }
        let opts = Options { prove: flags & FOC_PROVE != 0, ..Options::default() };
        let session = Session::run(&sources, &opts);
        let status = if session.diagnostics.iter().any(|d| is_parse_code(&d.code)) {
            FocStatus::ParseError
        } else if session.has_errors() {
            FocStatus::CheckFailed
        } else {
            FocStatus::Ok
        };
        *out = Box::into_raw(Box::new(FocSession { session }));
        status
    })
}

fn is_parse_code(code: &str) -> bool {
    matches!(code, "E-LEX" | "E-SYNTAX" | "E-UNTERMINATED" | "E-DUPLICATE")
}

/// # Safety
/// `s` must be NULL or a handle from `foc_session_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn foc_session_free(s: *mut FocSession) {
    if !s.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(s))));
    }
}

/// Number of diagnostics of any severity.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn foc_session_diagnostic_count(s: *const FocSession) -> usize {
    s.as_ref().map_or(0, |s| s.session.diagnostics.len())
}

/// Report lines, one per line, written to `out`.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn foc_session_report(s: *const FocSession, out: *mut *mut c_char) -> FocStatus {
    guard(|| {
        let (Some(s), false) = (s.as_ref(), out.is_null()) else { return FocStatus::InvalidArgument };
        let mut r = s.session.report_lines(false).join("\n");
        if !r.is_empty() {
            r.push('\n');
        }
        *out = give(r);
        FocStatus::Ok
    })
}

/// Diagnostics as JSON lines, written to `out`.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn foc_session_diagnostics(s: *const FocSession, out: *mut *mut c_char) -> FocStatus {
    guard(|| {
        let (Some(s), false) = (s.as_ref(), out.is_null()) else { return FocStatus::InvalidArgument };
        *out = give(s.session.diagnostics.iter().map(|d| d.to_json() + "\n").collect());
        FocStatus::Ok
    })
}

/// Evaluate `expr` in `collection`. On success `out` receives the value in
/// surface syntax; on `EvalError` it receives the diagnostic text.
///
/// # Safety
/// `s` must be a live handle, the strings NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn foc_eval(
    s: *const FocSession,
    collection: *const c_char,
    expr: *const c_char,
    fuel: u64,
    out: *mut *mut c_char,
) -> FocStatus {
    guard(|| {
        let (Some(s), Some(c), Some(e), false) = (s.as_ref(), text(collection), text(expr), out.is_null()) else {
            return FocStatus::InvalidArgument;
        };
        *out = ptr::null_mut();
        if fuel == 0 {
            return FocStatus::InvalidArgument;
        }
        match s.session.eval(c, e, EvalBudget { fuel }) {
            Ok(v) => {
                *out = give(v.to_string());
                FocStatus::Ok
            }
            Err(d) => {
                *out = give(d.to_string());
                if is_parse_code(&d.code) {
                    FocStatus::ParseError
                } else {
                    FocStatus::EvalError
                }
            }
        }
    })
}

/// # Safety
/// `p` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn foc_string_free(p: *mut c_char) {
    if !p.is_null() {
        drop(CString::from_raw(p));
    }
}
