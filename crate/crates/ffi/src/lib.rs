//! C ABI over the qkdv engine.
//!
//! Every function returns a `QkdvStatus`; results are written through out-pointers. Objects are
//! opaque handles released with their `_free` function; strings returned to the caller are
//! NUL-terminated UTF-8 released with `qkdv_string_free`. After a failure,
//! `qkdv_last_error` describes it until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qkdv::error::Error;
use qkdv::hierarchy::{densities, DensityTable, Mode};
use qkdv::json;
use qkdv::quantization::quantize;
use qkdv::quasimodular::verify_density;

/// Result code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QkdvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    NotInImage = 3,
    RecursionInconsistent = 4,
    NotRecognized = 5,
    InsufficientOrder = 6,
    DegenerateSpectrum = 7,
    CacheInvalid = 8,
    Json = 9,
    Io = 10,
    Panic = 11,
}

/// Hierarchy selector.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QkdvMode {
    Kdv = 0,
    Ilw = 1,
}

/// Opaque table of Hamiltonian densities `g_k`, `-2 <= k <= k_max`.
pub struct QkdvTable {
    table: DensityTable,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QkdvStatus {
    match e {
        Error::InvalidInput(_) => QkdvStatus::InvalidInput,
        Error::NotInImage => QkdvStatus::NotInImage,
        Error::RecursionInconsistent { .. } => QkdvStatus::RecursionInconsistent,
        Error::NotRecognized { .. } => QkdvStatus::NotRecognized,
        Error::InsufficientOrder { .. } => QkdvStatus::InsufficientOrder,
        Error::DegenerateSpectrum { .. } => QkdvStatus::DegenerateSpectrum,
        Error::CacheInvalid(_) => QkdvStatus::CacheInvalid,
        Error::Json(_) => QkdvStatus::Json,
        Error::Io(_) => QkdvStatus::Io,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (QkdvStatus, String)>) -> QkdvStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QkdvStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal panic".into());
            set_error(message);
            QkdvStatus::Panic
        }
    }
}

fn fail(e: Error) -> (QkdvStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (QkdvStatus, String) {
    (QkdvStatus::NullPointer, format!("{what} is null"))
}

fn invalid(message: String) -> (QkdvStatus, String) {
    (QkdvStatus::InvalidInput, message)
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("rendered output has no NUL bytes").into_raw()
}

fn mode_of(mode: QkdvMode, genus: u32) -> Result<Mode, (QkdvStatus, String)> {
    match mode {
        QkdvMode::Kdv => Ok(Mode::Kdv),
        QkdvMode::Ilw if genus >= 1 => Ok(Mode::Ilw { genus }),
        QkdvMode::Ilw => Err(invalid("genus cutoff must be at least 1".into())),
    }
}

/// Computes densities `g_k` for `-2 <= k <= k_max`; `genus` is the ILW cutoff and is ignored for KdV.
///
/// # Safety
/// `out` must be null or valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn qkdv_table_new(mode: QkdvMode, genus: u32, k_max: i32, out: *mut *mut QkdvTable) -> QkdvStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let table = densities(mode_of(mode, genus)?, k_max).map_err(fail)?;
        // SAFETY: checked non-null above; the caller guarantees validity.
        unsafe { *out = Box::into_raw(Box::new(QkdvTable { table })) };
        Ok(())
    })
}

/// Releases a table; null is ignored.
///
/// # Safety
/// `table` must be null or a pointer returned by `qkdv_table_new` that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn qkdv_table_free(table: *mut QkdvTable) {
    if !table.is_null() {
        // SAFETY: ownership was transferred to the caller by `qkdv_table_new`.
        drop(unsafe { Box::from_raw(table) });
    }
}

/// # Safety
/// Pointers must be null or valid.
unsafe fn table_ref<'a>(table: *const QkdvTable) -> Result<&'a DensityTable, (QkdvStatus, String)> {
    // SAFETY: the caller guarantees `table` is null or a live handle.
    unsafe { table.as_ref() }.map(|t| &t.table).ok_or_else(|| null("table"))
}

/// Largest `k` stored in the table.
///
/// # Safety
/// `table` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qkdv_table_k_max(table: *const QkdvTable, out: *mut i32) -> QkdvStatus {
    guard(|| {
        let t = unsafe { table_ref(table) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        unsafe { *out = t.k_max() };
        Ok(())
    })
}

/// Renders `g_k`: canonical JSON when `as_json` is true, text otherwise.
///
/// # Safety
/// `table` must be a live handle and `out` valid for writing; free the result with `qkdv_string_free`.
#[no_mangle]
pub unsafe extern "C" fn qkdv_table_density(table: *const QkdvTable, k: i32, as_json: bool, out: *mut *mut c_char) -> QkdvStatus {
    guard(|| {
        let t = unsafe { table_ref(table) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let g = t.get(k).ok_or_else(|| invalid(format!("k = {k} outside -2..={}", t.k_max())))?;
        let text = if as_json { json::to_string(&json::diffpoly_to_json(g)) } else { g.render_grouped() };
        unsafe { *out = into_c_string(text) };
        Ok(())
    })
}

/// Coefficients of the q-series of the quantized `g_k` to `q^order`, as canonical JSON.
///
/// # Safety
/// `table` must be a live handle and `out` valid for writing; free the result with `qkdv_string_free`.
#[no_mangle]
pub unsafe extern "C" fn qkdv_table_qseries(table: *const QkdvTable, k: i32, order: u32, out: *mut *mut c_char) -> QkdvStatus {
    guard(|| {
        let t = unsafe { table_ref(table) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let g = t.get(k).ok_or_else(|| invalid(format!("k = {k} outside -2..={}", t.k_max())))?;
        let s = quantize(g).q_series(order as usize);
        unsafe { *out = into_c_string(json::to_string(&json::qseries_to_json(&s))) };
        Ok(())
    })
}

/// Recognizes the q-series of `g_k` as a quasimodular form. `passed` receives whether it is
/// homogeneous of weight `k+2`; `report` (optional) receives the JSON report.
///
/// # Safety
/// `table` must be a live handle, `passed` valid for writing and `report` null or valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qkdv_verify(
    table: *const QkdvTable,
    k: i32,
    order: u32,
    passed: *mut bool,
    report: *mut *mut c_char,
) -> QkdvStatus {
    guard(|| {
        let t = unsafe { table_ref(table) }?;
        if passed.is_null() {
            return Err(null("passed"));
        }
        let r = verify_density(t, k, order as usize).map_err(fail)?;
        unsafe { *passed = r.passed() };
        if !report.is_null() {
            unsafe { *report = into_c_string(json::to_string(&json::report_to_json(&r))) };
        }
        Ok(())
    })
}

/// Message describing the last failure on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn qkdv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn qkdv_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: the string was produced by `CString::into_raw`.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn qkdv_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version has no interior NUL"),
    };
    VERSION.as_ptr()
}
