//! C ABI over the counting engine.
//!
//! Every fallible call returns an `NcStatus`; on failure the message is kept in
//! a thread-local slot readable through `nc_last_error`. Handles are opaque and
//! must be released with their matching `*_free` function. Strings returned to
//! the caller are owned by the caller and released with `nc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nearcurve::asymptotics::{error_bound, scan_grid, ScanTable};
use nearcurve::counting::{count, on_curve_count, CountQuery, Method};
use nearcurve::curves::{Curve, CurveSpec, DualCurve};
use nearcurve::expsums::exp_sum;
use nearcurve::rational::{Delta, Interval};
use nearcurve::Error;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcStatus {
    Ok = 0,
    /// Malformed or out-of-range input.
    InvalidArgument = 1,
    /// A numeric procedure failed to meet its contract.
    Numeric = 2,
    /// A required pointer was null.
    NullPointer = 3,
    /// Reading or writing output failed.
    Io = 4,
    /// An internal panic was caught at the boundary.
    Internal = 5,
}

/// Counting method selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcMethod {
    Naive = 0,
    Fast = 1,
    Exact = 2,
}

impl From<NcMethod> for Method {
    fn from(m: NcMethod) -> Self {
        match m {
            NcMethod::Naive => Method::Naive,
            NcMethod::Fast => Method::Fast,
            NcMethod::Exact => Method::Exact,
        }
    }
}

/// One count with its main term.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NcCount {
    pub q: u64,
    pub delta: f64,
    pub n: u64,
    pub ambiguous: u64,
    pub main_term: f64,
    pub residual: f64,
}

/// A curve together with its working interval.
pub struct NcCurve {
    curve: Curve,
    interval: Interval,
}

/// A completed scan.
pub struct NcScanTable {
    table: ScanTable,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NcStatus {
    match e {
        Error::Io(_) => NcStatus::Io,
        e if e.is_numeric() => NcStatus::Numeric,
        _ => NcStatus::InvalidArgument,
    }
}

enum Failure {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

/// Runs `body`, translating errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> NcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            NcStatus::Ok
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            NcStatus::NullPointer
        }
        Err(_) => {
            set_error("internal error".into());
            NcStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Core(Error::Parse(format!("{what} is not valid UTF-8"))))
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

fn parse_delta(s: &str) -> Result<Delta, Failure> {
    let d: Delta = s.parse()?;
    d.validate()?;
    Ok(d)
}

/// Message of the last failed call on this thread, or null after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn nc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a curve such as `poly:0,0,1` or `cos; interval:-1,1`. `interval`
/// (for example `0,1` or `-1/2,1/2`) may be null when the curve text names one.
///
/// # Safety
/// `spec` and a non-null `interval` must be NUL-terminated strings; `out_curve` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nc_curve_new(spec: *const c_char, interval: *const c_char, out_curve: *mut *mut NcCurve) -> NcStatus {
    guard(|| {
        let slot = out(out_curve, "out_curve")?;
        *slot = ptr::null_mut();
        let spec: CurveSpec = text(spec, "spec")?.parse()?;
        let explicit = if interval.is_null() {
            None
        } else {
            Some(text(interval, "interval")?.parse::<Interval>()?)
        };
        let interval = explicit
            .or(spec.interval)
            .ok_or_else(|| Error::InvalidArgument("no interval given".into()))?;
        let curve = spec.to_curve(Some(interval))?;
        *slot = Box::into_raw(Box::new(NcCurve { curve, interval }));
        Ok(())
    })
}

/// Releases a curve. Null is ignored.
///
/// # Safety
/// `curve` must come from `nc_curve_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn nc_curve_free(curve: *mut NcCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Counts rationals a/q with q <= `q_max` in the interval and ||q f(a/q)|| < delta.
/// `delta` is a decimal (`0.1`) or a fraction (`1/10`); `Exact` needs a fraction.
///
/// # Safety
/// `curve` must be a live handle, `delta` a NUL-terminated string, `result` writable.
#[no_mangle]
pub unsafe extern "C" fn nc_count(
    curve: *const NcCurve,
    q_max: u64,
    delta: *const c_char,
    method: NcMethod,
    result: *mut NcCount,
) -> NcStatus {
    guard(|| {
        let c = handle(curve, "curve")?;
        let slot = out(result, "result")?;
        let delta = parse_delta(text(delta, "delta")?)?;
        let r = count(&c.curve, &CountQuery::new(q_max, delta, c.interval)?, method.into())?;
        *slot = NcCount {
            q: q_max,
            delta: delta.as_f64(),
            n: r.n,
            ambiguous: r.ambiguous,
            main_term: r.main_term,
            residual: r.residual,
        };
        Ok(())
    })
}

/// Counts rationals a/q with q <= `q_max` lying exactly on a polynomial curve.
///
/// # Safety
/// `curve` must be a live handle and `result` writable.
#[no_mangle]
pub unsafe extern "C" fn nc_on_curve_count(curve: *const NcCurve, q_max: u64, result: *mut u64) -> NcStatus {
    guard(|| {
        let c = handle(curve, "curve")?;
        let slot = out(result, "result")?;
        *slot = on_curve_count(&c.curve, &c.interval, q_max)?;
        Ok(())
    })
}

/// Sum of e(k q f(a/q)) over the sequence points with q <= `q_max`.
///
/// # Safety
/// `curve` must be a live handle; `re` and `im` writable.
#[no_mangle]
pub unsafe extern "C" fn nc_exp_sum(curve: *const NcCurve, q_max: u64, k: i64, re: *mut f64, im: *mut f64) -> NcStatus {
    guard(|| {
        let c = handle(curve, "curve")?;
        let (re, im) = (out(re, "re")?, out(im, "im")?);
        let s = exp_sum(&c.curve, &c.interval, q_max, k)?;
        (*re, *im) = (s.re, s.im);
        Ok(())
    })
}

/// Legendre dual of the curve restricted to [lo, hi], evaluated at slope `y`.
///
/// # Safety
/// `curve` must be a live handle and `result` writable.
#[no_mangle]
pub unsafe extern "C" fn nc_dual_eval(curve: *const NcCurve, lo: f64, hi: f64, y: f64, result: *mut f64) -> NcStatus {
    guard(|| {
        let c = handle(curve, "curve")?;
        let slot = out(result, "result")?;
        *slot = DualCurve::new(&c.curve, lo, hi)?.dual_eval(y)?;
        Ok(())
    })
}

/// Error envelope shape for a type-`d` curve. Never fails.
#[no_mangle]
pub extern "C" fn nc_error_bound(d: u32, q: f64, delta: f64, eps: f64) -> f64 {
    error_bound(d, q, delta, eps)
}

/// Counts over the grid `qs` x `deltas` with the given method. `deltas` is a
/// comma-separated list such as `0.1,1/4`. Failed grid points are recorded in
/// the table rather than failing the scan.
///
/// # Safety
/// `curve` must be a live handle, `qs` must point to `n_qs` values, `deltas`
/// must be a NUL-terminated string and `out_table` writable.
#[no_mangle]
pub unsafe extern "C" fn nc_scan(
    curve: *const NcCurve,
    qs: *const u64,
    n_qs: usize,
    deltas: *const c_char,
    method: NcMethod,
    out_table: *mut *mut NcScanTable,
) -> NcStatus {
    guard(|| {
        let c = handle(curve, "curve")?;
        let slot = out(out_table, "out_table")?;
        *slot = ptr::null_mut();
        if qs.is_null() && n_qs > 0 {
            return Err(Failure::Null("qs"));
        }
        let qs = if n_qs == 0 { &[][..] } else { std::slice::from_raw_parts(qs, n_qs) };
        let deltas = text(deltas, "deltas")?
            .split(',')
            .map(|t| t.trim().parse::<Delta>())
            .collect::<Result<Vec<_>, _>>()?;
        let table = scan_grid(&c.curve, &c.interval, qs, &deltas, method.into())?;
        *slot = Box::into_raw(Box::new(NcScanTable { table }));
        Ok(())
    })
}

/// Number of successful rows in a scan table.
///
/// # Safety
/// `table` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn nc_scan_table_len(table: *const NcScanTable) -> usize {
    table.as_ref().map_or(0, |t| t.table.rows.len())
}

/// Number of grid points that failed during the scan.
///
/// # Safety
/// `table` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn nc_scan_table_error_count(table: *const NcScanTable) -> usize {
    table.as_ref().map_or(0, |t| t.table.errors.len())
}

/// Copies row `index` (ordered by Q, then delta).
///
/// # Safety
/// `table` must be a live handle and `row` writable.
#[no_mangle]
pub unsafe extern "C" fn nc_scan_table_row(table: *const NcScanTable, index: usize, row: *mut NcCount) -> NcStatus {
    guard(|| {
        let t = handle(table, "table")?;
        let slot = out(row, "row")?;
        let r = t.table.rows.get(index).ok_or_else(|| {
            Error::InvalidArgument(format!("row {index} out of range 0..{}", t.table.rows.len()))
        })?;
        *slot = NcCount {
            q: r.q,
            delta: r.delta.as_f64(),
            n: r.n,
            ambiguous: r.ambiguous,
            main_term: r.main_term,
            residual: r.residual,
        };
        Ok(())
    })
}

/// Renders the table as CSV with provenance comments. Release with `nc_string_free`.
///
/// # Safety
/// `table` must be a live handle and `csv` writable.
#[no_mangle]
pub unsafe extern "C" fn nc_scan_table_csv(table: *const NcScanTable, csv: *mut *mut c_char) -> NcStatus {
    guard(|| {
        let t = handle(table, "table")?;
        let slot = out(csv, "csv")?;
        *slot = ptr::null_mut();
        let mut bytes = Vec::new();
        t.table.write_csv(&mut bytes, false)?;
        let s = CString::new(bytes).map_err(|_| Error::InvalidArgument("CSV contains NUL".into()))?;
        *slot = s.into_raw();
        Ok(())
    })
}

/// Releases a scan table. Null is ignored.
///
/// # Safety
/// `table` must come from `nc_scan` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn nc_scan_table_free(table: *mut NcScanTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn nc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
