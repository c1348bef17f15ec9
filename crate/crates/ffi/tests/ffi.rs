use std::ffi::{c_char, CStr, CString};
use std::ptr;

use foclite_ffi::*;

fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { foc_string_free(p) };
    s
}

fn session(src: Option<&str>, flags: u32) -> (FocStatus, *mut FocSession) {
    let c = src.map(|s| CString::new(s).unwrap());
    let mut out = ptr::null_mut();
    let st = unsafe { foc_session_new(c.as_ref().map_or(ptr::null(), |c| c.as_ptr()), flags, &mut out) };
    (st, out)
}

fn eval(s: *const FocSession, coll: &str, expr: &str) -> (FocStatus, String) {
    let (c, e) = (CString::new(coll).unwrap(), CString::new(expr).unwrap());
    let mut out = ptr::null_mut();
    let st = unsafe { foc_eval(s, c.as_ptr(), e.as_ptr(), 1_000_000, &mut out) };
    (st, if out.is_null() { String::new() } else { take(out) })
}

#[test]
fn corpus_checks_and_evaluates() {
    let (st, s) = session(None, FOC_WITH_CORPUS | FOC_PROVE);
    assert_eq!(st, FocStatus::Ok);
    assert_eq!(unsafe { foc_session_diagnostic_count(s) }, 0);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { foc_session_report(s, &mut out) }, FocStatus::Ok);
    let report = take(out);
    assert!(report.lines().all(|l| l.contains(" PROVED ")));
    assert!(report.contains("union_is_left_unique"));
    assert_eq!(eval(s, "IntFiniteParts", "release(from_list([1;2;1]), 1)"), (FocStatus::Ok, "[2]".into()));
    assert_eq!(eval(s, "IntFiniteParts", "cardinal(from_list([]))"), (FocStatus::Ok, "0".into()));
    let (st, msg) = eval(s, "IntFiniteParts", "cardinal(");
    assert_eq!(st, FocStatus::ParseError);
    assert!(msg.contains("E-SYNTAX"));
    let (st, msg) = eval(s, "Nowhere", "1");
    assert_eq!(st, FocStatus::EvalError);
    assert!(msg.contains("E-UNKNOWN-COLLECTION"));
    unsafe { foc_session_free(s) };
}

#[test]
fn errors_are_reported_through_status() {
    let (st, s) = session(Some("species Bad = let x = ;"), 0);
    assert_eq!(st, FocStatus::ParseError);
    assert_eq!(unsafe { foc_session_diagnostic_count(s) }, 1);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { foc_session_diagnostics(s, &mut out) }, FocStatus::Ok);
    let d: serde_json::Value = serde_json::from_str(take(out).lines().next().unwrap()).unwrap();
    assert_eq!(d["code"], "E-SYNTAX");
    unsafe { foc_session_free(s) };

    let (st, s) = session(Some("species Loop = let rec f(l : list(int)) : int = f(l) termination proof = structural l; end;;"), 0);
    assert_eq!(st, FocStatus::CheckFailed);
    unsafe { foc_session_free(s) };

    let redefined = "species Strict (A is Setoid, B is Setoid) = inherit Binary_relations(A, B);\n let equal(x, y) = is_contained(x, y);\nend;;";
    let (st, s) = session(Some(redefined), FOC_WITH_CORPUS | FOC_PROVE);
    assert_eq!(st, FocStatus::CheckFailed);
    let mut out = ptr::null_mut();
    unsafe { foc_session_report(s, &mut out) };
    assert!(take(out).contains("THEOREM Strict.equal_spec invalidated UNPROVED -"));
    unsafe { foc_session_free(s) };
}

#[test]
fn invalid_arguments() {
    let (st, s) = session(None, 0);
    assert_eq!(st, FocStatus::InvalidArgument);
    assert!(s.is_null());
    assert_eq!(unsafe { foc_session_new(ptr::null(), FOC_WITH_CORPUS, ptr::null_mut()) }, FocStatus::InvalidArgument);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { foc_session_report(ptr::null(), &mut out) }, FocStatus::InvalidArgument);
    assert_eq!(unsafe { foc_session_diagnostic_count(ptr::null()) }, 0);
    let (_, s) = session(None, FOC_WITH_CORPUS);
    let c = CString::new("IntSetoid").unwrap();
    assert_eq!(unsafe { foc_eval(s, c.as_ptr(), ptr::null(), 10, &mut out) }, FocStatus::InvalidArgument);
    let e = CString::new("1").unwrap();
    assert_eq!(unsafe { foc_eval(s, c.as_ptr(), e.as_ptr(), 0, &mut out) }, FocStatus::InvalidArgument);
    let bad = [0xffu8, 0];
    assert_eq!(unsafe { foc_eval(s, bad.as_ptr().cast(), e.as_ptr(), 10, &mut out) }, FocStatus::InvalidArgument);
    unsafe {
        foc_session_free(s);
        foc_session_free(ptr::null_mut());
        foc_string_free(ptr::null_mut());
    }
}

#[test]
fn header_lists_the_interface() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/foclite.h")).unwrap();
    for name in [
        "typedef struct FocSession FocSession;",
        "FOC_STATUS_OK = 0",
        "FOC_STATUS_PANIC = 5",
        "foc_session_new(",
        "foc_session_free(",
        "foc_session_report(",
        "foc_session_diagnostics(",
        "foc_eval(",
        "foc_string_free(",
    ] {
        assert!(h.contains(name), "{name}");
    }
}

