//! C ABI over `diracsym`.
//!
//! Every handle is opaque and owned by the caller once returned; release it
//! with the matching `ds_*_free`. Strings returned as `char *` are owned by the
//! caller and released with `ds_string_free`. Functions return a `DsStatus`;
//! on failure `ds_last_error` describes the most recent error on the calling
//! thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use diracsym::cli::{self, RunConfig, RunOutcome};
use diracsym::jet::{Jet, Var};

/// Status codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ConfigError = 3,
    JetError = 4,
    InvalidArgument = 5,
    Panic = 6,
}

/// A parsed, validated run configuration.
pub struct DsConfig(RunConfig);

/// The result of `ds_run`.
pub struct DsOutcome(RunOutcome);

/// A truncated power series in `x1..x3, e1..e3` with Gaussian-rational coefficients.
pub struct DsJet(Jet);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn guard<F: FnOnce() -> Result<(), (DsStatus, String)>>(f: F) -> DsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            DsStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DsStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, (DsStatus, String)> {
    if p.is_null() {
        return Err((DsStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (DsStatus::InvalidUtf8, "string is not UTF-8".into()))
}

fn null(what: &str) -> (DsStatus, String) {
    (DsStatus::NullPointer, format!("null {what}"))
}

fn to_c(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message for the most recent failure on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ds_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ds_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ds_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `key = value` configuration text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_config_parse(text: *const c_char, out: *mut *mut DsConfig) -> DsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = ptr::null_mut();
        let text = read_str(text)?;
        let cfg = cli::parse_config(text).map_err(|e| (DsStatus::ConfigError, e.to_string()))?;
        *out = Box::into_raw(Box::new(DsConfig(cfg)));
        Ok(())
    })
}

/// # Safety
/// `cfg` must come from `ds_config_parse` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ds_config_free(cfg: *mut DsConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Runs the configured mode. A failing check is not an error: inspect
/// `ds_outcome_exit_code`.
///
/// # Safety
/// `cfg` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_run(cfg: *const DsConfig, out: *mut *mut DsOutcome) -> DsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = ptr::null_mut();
        let cfg = cfg.as_ref().ok_or_else(|| null("config"))?;
        *out = Box::into_raw(Box::new(DsOutcome(cli::run(&cfg.0))));
        Ok(())
    })
}

/// Exit code of the run (0 pass, 1 theorem, 2 self-check, 3 quadrature, 4 config);
/// -1 for a null handle.
///
/// # Safety
/// `o` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ds_outcome_exit_code(o: *const DsOutcome) -> i32 {
    o.as_ref().map_or(-1, |o| o.0.exit_code)
}

/// JSON report; free with `ds_string_free`. Null for a null handle.
///
/// # Safety
/// `o` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ds_outcome_report_json(o: *const DsOutcome) -> *mut c_char {
    o.as_ref().map_or(ptr::null_mut(), |o| to_c(&o.0.report_text()))
}

/// Plain-text transcript; free with `ds_string_free`. Null for a null handle.
///
/// # Safety
/// `o` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ds_outcome_transcript(o: *const DsOutcome) -> *mut c_char {
    o.as_ref().map_or(ptr::null_mut(), |o| to_c(&o.0.transcript))
}

/// # Safety
/// `o` must come from `ds_run` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ds_outcome_free(o: *mut DsOutcome) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// Parses a jet such as `1 + x1*e2/3 - i*x3^2` with the given degree budget.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_jet_parse(text: *const c_char, budget: u32, out: *mut *mut DsJet) -> DsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = ptr::null_mut();
        let jet = Jet::parse(read_str(text)?, budget).map_err(|e| (DsStatus::JetError, e.to_string()))?;
        *out = Box::into_raw(Box::new(DsJet(jet)));
        Ok(())
    })
}

unsafe fn binary(
    a: *const DsJet,
    b: *const DsJet,
    out: *mut *mut DsJet,
    op: fn(&Jet, &Jet) -> Result<Jet, diracsym::jet::JetError>,
) -> DsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = ptr::null_mut();
        let (a, b) = (a.as_ref().ok_or_else(|| null("jet"))?, b.as_ref().ok_or_else(|| null("jet"))?);
        let r = op(&a.0, &b.0).map_err(|e| (DsStatus::JetError, e.to_string()))?;
        *out = Box::into_raw(Box::new(DsJet(r)));
        Ok(())
    })
}

/// `a + b`; budgets must agree.
///
/// # Safety
/// `a`, `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_jet_add(a: *const DsJet, b: *const DsJet, out: *mut *mut DsJet) -> DsStatus {
    binary(a, b, out, Jet::checked_add)
}

/// `a · b` truncated to the budget; budgets must agree.
///
/// # Safety
/// `a`, `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_jet_mul(a: *const DsJet, b: *const DsJet, out: *mut *mut DsJet) -> DsStatus {
    binary(a, b, out, Jet::checked_mul)
}

/// `1/a`; fails when the constant term is zero.
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_jet_invert(a: *const DsJet, out: *mut *mut DsJet) -> DsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = ptr::null_mut();
        let a = a.as_ref().ok_or_else(|| null("jet"))?;
        let r = a.0.invert().map_err(|e| (DsStatus::JetError, e.to_string()))?;
        *out = Box::into_raw(Box::new(DsJet(r)));
        Ok(())
    })
}

/// `∂a/∂v` for variable index `v` (0..2 are `x1..x3`, 3..5 are `e1..e3`).
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_jet_derivative(a: *const DsJet, var: u32, out: *mut *mut DsJet) -> DsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = ptr::null_mut();
        let a = a.as_ref().ok_or_else(|| null("jet"))?;
        let v = *Var::ALL
            .get(var as usize)
            .ok_or_else(|| (DsStatus::InvalidArgument, format!("variable index {var} is not in 0..6")))?;
        *out = Box::into_raw(Box::new(DsJet(a.0.derivative(v))));
        Ok(())
    })
}

/// Text form of a jet, parseable by `ds_jet_parse`; free with `ds_string_free`.
///
/// # Safety
/// `a` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ds_jet_to_string(a: *const DsJet) -> *mut c_char {
    a.as_ref().map_or(ptr::null_mut(), |a| to_c(&a.0.to_string()))
}

/// # Safety
/// `a` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ds_jet_free(a: *mut DsJet) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}
