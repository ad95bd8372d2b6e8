use std::ffi::{CStr, CString};
use std::ptr;

use nearcurve_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn curve(spec: &str, interval: Option<&str>) -> *mut NcCurve {
    let spec = c(spec);
    let interval = interval.map(c);
    let mut handle = ptr::null_mut();
    let status = unsafe { nc_curve_new(spec.as_ptr(), interval.as_ref().map_or(ptr::null(), |i| i.as_ptr()), &mut handle) };
    assert_eq!(status, NcStatus::Ok);
    assert!(!handle.is_null());
    handle
}

fn last_error() -> String {
    let p = nc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn count_matches_hand_value() {
    let f = curve("poly:0,0,1", Some("0,1"));
    let delta = c("1/10");
    for method in [NcMethod::Naive, NcMethod::Fast, NcMethod::Exact] {
        let mut r = NcCount::default();
        assert_eq!(unsafe { nc_count(f, 3, delta.as_ptr(), method, &mut r) }, NcStatus::Ok);
        assert_eq!((r.q, r.n, r.ambiguous), (3, 6, 0));
        assert!((r.main_term - 0.9).abs() < 1e-12);
    }
    assert!(nc_last_error().is_null());
    let mut on = 0;
    assert_eq!(unsafe { nc_on_curve_count(f, 4, &mut on) }, NcStatus::Ok);
    assert_eq!(on, 9);
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { nc_exp_sum(f, 3, 1, &mut re, &mut im) }, NcStatus::Ok);
    assert!((re - 4.0).abs() < 1e-12 && (im - 3f64.sqrt()).abs() < 1e-12);
    unsafe { nc_curve_free(f) };
}

#[test]
fn interval_from_curve_text() {
    let f = curve("cos; interval:-1,1", None);
    let delta = c("0.1");
    let mut r = NcCount::default();
    assert_eq!(unsafe { nc_count(f, 20, delta.as_ptr(), NcMethod::Fast, &mut r) }, NcStatus::Ok);
    assert!(r.n > 0);
    unsafe { nc_curve_free(f) };
}

#[test]
fn dual_of_parabola() {
    // f = x^2 has f*(y) = y^2/4 for slopes inside [0.2, 2]
    let f = curve("poly:0,0,1", Some("0,1"));
    let mut v = 0.0;
    assert_eq!(unsafe { nc_dual_eval(f, 0.1, 1.0, 1.0, &mut v) }, NcStatus::Ok);
    assert!((v - 0.25).abs() < 1e-12, "{v}");
    assert_eq!(unsafe { nc_dual_eval(f, 0.1, 1.0, 3.0, &mut v) }, NcStatus::Numeric);
    assert!(last_error().contains("slope interval"));
    unsafe { nc_curve_free(f) };
}

#[test]
fn error_codes() {
    let mut handle = ptr::null_mut();
    let bad = c("poly:");
    let unit = c("0,1");
    assert_eq!(unsafe { nc_curve_new(bad.as_ptr(), unit.as_ptr(), &mut handle) }, NcStatus::InvalidArgument);
    assert!(handle.is_null());
    assert_eq!(unsafe { nc_curve_new(ptr::null(), unit.as_ptr(), &mut handle) }, NcStatus::NullPointer);
    assert!(last_error().contains("spec"));

    let f = curve("poly:0,0,1", Some("0,1"));
    let mut r = NcCount::default();
    let wide = c("0.7");
    assert_eq!(unsafe { nc_count(f, 3, wide.as_ptr(), NcMethod::Fast, &mut r) }, NcStatus::InvalidArgument);
    assert!(last_error().contains("(0, 1/2)"));
    let decimal = c("0.1");
    assert_eq!(unsafe { nc_count(f, 3, decimal.as_ptr(), NcMethod::Exact, &mut r) }, NcStatus::InvalidArgument);
    assert_eq!(unsafe { nc_count(f, 3, decimal.as_ptr(), NcMethod::Fast, ptr::null_mut()) }, NcStatus::NullPointer);
    unsafe { nc_curve_free(f) };

    let cos = curve("cos", Some("-1,1"));
    let mut on = 0;
    assert_eq!(unsafe { nc_on_curve_count(cos, 4, &mut on) }, NcStatus::InvalidArgument);
    unsafe { nc_curve_free(cos) };
    unsafe { nc_curve_free(ptr::null_mut()) };
}

#[test]
fn scan_rows_and_csv() {
    let f = curve("poly:0,0,0,1", Some("-1/2,1/2"));
    let qs = [200u64, 100];
    let deltas = c("1/4,0.1");
    let mut table = ptr::null_mut();
    assert_eq!(unsafe { nc_scan(f, qs.as_ptr(), qs.len(), deltas.as_ptr(), NcMethod::Fast, &mut table) }, NcStatus::Ok);
    assert_eq!(unsafe { nc_scan_table_len(table) }, 4);
    assert_eq!(unsafe { nc_scan_table_error_count(table) }, 0);
    let rows: Vec<NcCount> = (0..4)
        .map(|i| {
            let mut r = NcCount::default();
            assert_eq!(unsafe { nc_scan_table_row(table, i, &mut r) }, NcStatus::Ok);
            r
        })
        .collect();
    assert_eq!(rows.iter().map(|r| (r.q, r.delta)).collect::<Vec<_>>(), [(100, 0.1), (100, 0.25), (200, 0.1), (200, 0.25)]);
    let mut direct = NcCount::default();
    let quarter = c("1/4");
    assert_eq!(unsafe { nc_count(f, 200, quarter.as_ptr(), NcMethod::Fast, &mut direct) }, NcStatus::Ok);
    assert_eq!(rows[3].n, direct.n);

    let mut r = NcCount::default();
    assert_eq!(unsafe { nc_scan_table_row(table, 4, &mut r) }, NcStatus::InvalidArgument);

    let mut csv = ptr::null_mut();
    assert_eq!(unsafe { nc_scan_table_csv(table, &mut csv) }, NcStatus::Ok);
    let text = unsafe { CStr::from_ptr(csv) }.to_str().unwrap().to_owned();
    assert!(text.starts_with("# curve: "));
    assert!(text.contains("\ncurve_id,Q,delta,N,main_term,residual,ambiguous,method,elapsed_ms\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 5);
    unsafe {
        nc_string_free(csv);
        nc_scan_table_free(table);
        nc_curve_free(f);
    }
}

#[test]
fn errors_are_per_thread() {
    let f = curve("poly:0,0,1", Some("0,1"));
    let wide = c("0.9");
    let mut r = NcCount::default();
    assert_eq!(unsafe { nc_count(f, 3, wide.as_ptr(), NcMethod::Fast, &mut r) }, NcStatus::InvalidArgument);
    std::thread::spawn(|| assert!(nc_last_error().is_null())).join().unwrap();
    assert!(!nc_last_error().is_null());
    unsafe { nc_curve_free(f) };
}

#[test]
fn version_and_bound() {
    let v = unsafe { CStr::from_ptr(nc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let b = nc_error_bound(2, 1000.0, 0.25, 0.1);
    assert!(b.is_finite() && b > 0.0);
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/nearcurve.h")).unwrap();
    for name in [
        "nc_curve_new", "nc_curve_free", "nc_count", "nc_on_curve_count", "nc_exp_sum", "nc_dual_eval",
        "nc_error_bound", "nc_scan", "nc_scan_table_len", "nc_scan_table_error_count", "nc_scan_table_row",
        "nc_scan_table_csv", "nc_scan_table_free", "nc_string_free", "nc_last_error", "nc_version",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct NcCurve NcCurve;"));
}
