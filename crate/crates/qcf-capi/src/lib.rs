//! C ABI for the qcf workbench: opaque handles, integer status codes, and a
//! thread-local error message. The header `include/qcf.h` is generated by
//! cbindgen at build time.

use qcf::geometry::{parse_code_text, Code, CodeFormat};
use qcf::groups::{code_automorphisms, expand_orbits, orbits_of_words, AutConfig, MatrixGroup};
use qcf::report::{run_battery, BatteryOptions};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Duration;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum QcfStatus {
    QcfOk = 0,
    QcfErrInvalidArgument = 1,
    QcfErrParse = 2,
    QcfErrIo = 3,
    QcfErrBudget = 4,
    QcfErrRange = 5,
    QcfErrInternal = 6,
}

/// Code file formats accepted by the loaders.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum QcfFormat {
    QcfFormatAppendix = 0,
    QcfFormatJson = 1,
}

/// An immutable code handle.
pub struct QcfCode(Code);

/// A closed matrix group handle.
pub struct QcfGroup(MatrixGroup);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(cleaned).unwrap_or_default();
    });
}

fn status_of(e: &qcf::Error) -> QcfStatus {
    use qcf::Error::*;
    match e {
        Parse { .. } | NotRref { .. } | DuplicateWord(_) => QcfStatus::QcfErrParse,
        Io(_) | Json(_) | UnknownData(_) => QcfStatus::QcfErrIo,
        TimeBudgetExceeded
        | OrderCapExceeded { .. }
        | BudgetExceeded(_)
        | ClosureCapExceeded { .. }
        | CentralizerTooLarge { .. } => QcfStatus::QcfErrBudget,
        _ => QcfStatus::QcfErrInvalidArgument,
    }
}

fn guard<F: FnOnce() -> QcfStatus>(f: F) -> QcfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            QcfStatus::QcfErrInternal
        }
    }
}

unsafe fn cstr<'a>(p: *const c_char) -> Option<&'a str> {
    if p.is_null() {
        return None;
    }
    unsafe { CStr::from_ptr(p) }.to_str().ok()
}

/// Message describing the most recent error on this thread. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qcf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Gaussian binomial coefficient for q = 2, written to `out`.
/// Fails with a range error when the value does not fit 64 bits.
/// # Safety
/// `out` must be null or valid for one `u64` write.
#[no_mangle]
pub unsafe extern "C" fn qcf_gaussian_binomial(n: u32, k: u32, out: *mut u64) -> QcfStatus {
    guard(|| {
        if out.is_null() || k > n || n > 63 {
            set_error("need non-null out and 0 <= k <= n <= 63");
            return QcfStatus::QcfErrInvalidArgument;
        }
        let v = qcf::geometry::gaussian_binomial(n as usize, k as usize);
        if v > u64::MAX as u128 {
            set_error("value exceeds 64 bits");
            return QcfStatus::QcfErrRange;
        }
        unsafe { *out = v as u64 };
        QcfStatus::QcfOk
    })
}

fn parse_format(format: QcfFormat) -> CodeFormat {
    match format {
        QcfFormat::QcfFormatAppendix => CodeFormat::Appendix,
        QcfFormat::QcfFormatJson => CodeFormat::Json,
    }
}

/// Parse a code from text. Rows are taken verbatim (no orbit expansion);
/// duplicates are an error.
/// # Safety
/// `text` must be null or a valid NUL-terminated string; `out` must be
/// null or valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn qcf_code_parse(
    text: *const c_char,
    format: QcfFormat,
    out: *mut *mut QcfCode,
) -> QcfStatus {
    guard(|| {
        let (Some(text), false) = (unsafe { cstr(text) }, out.is_null()) else {
            set_error("null argument");
            return QcfStatus::QcfErrInvalidArgument;
        };
        match parse_code_text(text, parse_format(format)).and_then(Code::from_words) {
            Ok(code) => {
                unsafe { *out = Box::into_raw(Box::new(QcfCode(code))) };
                QcfStatus::QcfOk
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Load a code from a file path.
/// # Safety
/// `path` must be null or a valid NUL-terminated string; `out` must be
/// null or valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn qcf_code_load(
    path: *const c_char,
    format: QcfFormat,
    out: *mut *mut QcfCode,
) -> QcfStatus {
    guard(|| {
        let (Some(path), false) = (unsafe { cstr(path) }, out.is_null()) else {
            set_error("null argument");
            return QcfStatus::QcfErrInvalidArgument;
        };
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                set_error(&e.to_string());
                return QcfStatus::QcfErrIo;
            }
        };
        match parse_code_text(&text, parse_format(format)).and_then(Code::from_words) {
            Ok(code) => {
                unsafe { *out = Box::into_raw(Box::new(QcfCode(code))) };
                QcfStatus::QcfOk
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Release a code handle. Null is ignored.
/// # Safety
/// `code` must be null or a handle returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qcf_code_free(code: *mut QcfCode) {
    if !code.is_null() {
        drop(unsafe { Box::from_raw(code) });
    }
}

/// Number of codewords.
/// # Safety
/// `code` must be null or a live handle returned by this library.
#[no_mangle]
pub unsafe extern "C" fn qcf_code_len(code: *const QcfCode) -> usize {
    if code.is_null() {
        return 0;
    }
    unsafe { &*code }.0.len()
}

/// Minimum pairwise subspace distance, or -1 for fewer than two codewords.
/// # Safety
/// `code` must be null or a live handle returned by this library.
#[no_mangle]
pub unsafe extern "C" fn qcf_code_min_distance(code: *const QcfCode) -> i32 {
    if code.is_null() {
        return -1;
    }
    unsafe { &*code }
        .0
        .min_distance()
        .map(|d| d as i32)
        .unwrap_or(-1)
}

/// Load a group from a JSON file path, or resolve a bundled name such as
/// `G_{4,6}`. The group is closed on load.
/// # Safety
/// `name_or_path` must be null or a valid NUL-terminated string; `out`
/// must be null or valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn qcf_group_load(
    name_or_path: *const c_char,
    out: *mut *mut QcfGroup,
) -> QcfStatus {
    guard(|| {
        let (Some(arg), false) = (unsafe { cstr(name_or_path) }, out.is_null()) else {
            set_error("null argument");
            return QcfStatus::QcfErrInvalidArgument;
        };
        match qcf::data::resolve_group(arg).and_then(|f| MatrixGroup::from_group_file(&f)) {
            Ok(g) => {
                unsafe { *out = Box::into_raw(Box::new(QcfGroup(g))) };
                QcfStatus::QcfOk
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Release a group handle. Null is ignored.
/// # Safety
/// `group` must be null or a handle returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qcf_group_free(group: *mut QcfGroup) {
    if !group.is_null() {
        drop(unsafe { Box::from_raw(group) });
    }
}

/// Group order; 0 for a null handle or an unclosed group.
/// # Safety
/// `group` must be null or a live handle returned by this library.
#[no_mangle]
pub unsafe extern "C" fn qcf_group_order(group: *const QcfGroup) -> u64 {
    if group.is_null() {
        return 0;
    }
    unsafe { &*group }
        .0
        .order()
        .and_then(|o| u64::try_from(o).ok())
        .unwrap_or(0)
}

/// Expand orbit representatives into the union of their orbits.
/// # Safety
/// `reps` and `group` must be null or live handles; `out` must be null or
/// valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn qcf_code_expand(
    reps: *const QcfCode,
    group: *const QcfGroup,
    out: *mut *mut QcfCode,
) -> QcfStatus {
    guard(|| {
        if reps.is_null() || group.is_null() || out.is_null() {
            set_error("null argument");
            return QcfStatus::QcfErrInvalidArgument;
        }
        let reps = unsafe { &*reps };
        let group = unsafe { &*group };
        match expand_orbits(reps.0.words(), &group.0) {
            Ok(code) => {
                unsafe { *out = Box::into_raw(Box::new(QcfCode(code))) };
                QcfStatus::QcfOk
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Write the orbit type of a code under a group (e.g. `1^9 2^26 4^68`)
/// into the caller's buffer as a NUL-terminated string.
/// # Safety
/// `code` and `group` must be null or live handles; `buffer` must be null
/// or valid for `capacity` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn qcf_code_orbit_type(
    code: *const QcfCode,
    group: *const QcfGroup,
    buffer: *mut c_char,
    capacity: usize,
) -> QcfStatus {
    guard(|| {
        if code.is_null() || group.is_null() || buffer.is_null() || capacity == 0 {
            set_error("null argument");
            return QcfStatus::QcfErrInvalidArgument;
        }
        let code = unsafe { &*code };
        let group = unsafe { &*group };
        let ty = match orbits_of_words(code.0.words(), &group.0) {
            Ok((orbits, _)) => {
                let sizes: Vec<u64> = orbits.iter().map(|o| o.len() as u64).collect();
                qcf::groups::orbit_type_string(&sizes)
            }
            Err(e) => {
                set_error(&e.to_string());
                return status_of(&e);
            }
        };
        let bytes = ty.as_bytes();
        if bytes.len() + 1 > capacity {
            set_error("buffer too small");
            return QcfStatus::QcfErrRange;
        }
        unsafe {
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buffer as *mut u8, bytes.len());
            *buffer.add(bytes.len()) = 0;
        }
        QcfStatus::QcfOk
    })
}

/// Order of the code's full automorphism group, within a time budget in
/// seconds (0 means unlimited).
/// # Safety
/// `code` must be null or a live handle; `out` must be null or valid for
/// one `u64` write.
#[no_mangle]
pub unsafe extern "C" fn qcf_code_automorphism_order(
    code: *const QcfCode,
    budget_seconds: u64,
    out: *mut u64,
) -> QcfStatus {
    guard(|| {
        if code.is_null() || out.is_null() {
            set_error("null argument");
            return QcfStatus::QcfErrInvalidArgument;
        }
        let code = unsafe { &*code };
        let config = AutConfig {
            time_budget: (budget_seconds > 0).then(|| Duration::from_secs(budget_seconds)),
            parallel: true,
        };
        match code_automorphisms(&code.0, &config) {
            Ok(aut) => {
                let order = aut.order().unwrap_or(0);
                if order > u64::MAX as u128 {
                    set_error("order exceeds 64 bits");
                    return QcfStatus::QcfErrRange;
                }
                unsafe { *out = order as u64 };
                QcfStatus::QcfOk
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Run the reference verification battery; returns Ok only if every check
/// passes. `fast` skips the solver checks beyond the order-127 model.
#[no_mangle]
pub extern "C" fn qcf_verify_paper(fast: bool) -> QcfStatus {
    guard(|| {
        match run_battery(&BatteryOptions {
            fast,
            ..Default::default()
        }) {
            Ok(report) if report.all_passed() => QcfStatus::QcfOk,
            Ok(report) => {
                set_error(&format!("{} checks failed", report.failed()));
                QcfStatus::QcfErrInternal
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}
