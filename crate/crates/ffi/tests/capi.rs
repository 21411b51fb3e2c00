use std::ffi::{CStr, CString};
use std::ptr;

use critcoupling_ffi::*;

fn builtin(name: &str) -> *mut CcShape {
    let name = CString::new(name).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { cc_shape_builtin(name.as_ptr(), ptr::null(), ptr::null(), 0, &mut out) };
    assert_eq!(status, CcStatus::Ok);
    assert!(!out.is_null());
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(cc_last_error()) }.to_string_lossy().into_owned()
}

fn empty_bound() -> CcBound {
    CcBound {
        value: f64::NAN,
        error_estimate: f64::NAN,
        kind: CcKind::Lower,
        method: CcMethod::TraceN,
        ell: 0,
        parameter: f64::NAN,
    }
}

#[test]
fn square_well_limits_through_the_c_abi() {
    let sq = builtin("square_well");
    let mut b = empty_bound();
    unsafe {
        assert_eq!(cc_trace_lower_limit(sq, 0, 2, ptr::null(), &mut b), CcStatus::Ok);
        assert!((b.value - 6f64.sqrt()).abs() < 1e-7);
        assert_eq!((b.kind, b.method, b.parameter), (CcKind::Lower, CcMethod::TraceN, 2.0));

        assert_eq!(cc_sufficient_limit(sq, 0, ptr::null(), &mut b), CcStatus::Ok);
        assert_eq!(b.kind, CcKind::Upper);
        assert!((b.parameter - 1.0).abs() < 1e-6);

        let res = cc_resolution_default();
        assert_eq!(cc_critical_coupling_eigen(sq, 1, &res, &mut b), CcStatus::Ok);
        let mut exact = 0.0;
        assert_eq!(cc_square_well_exact(1, &mut exact), CcStatus::Ok);
        assert!(((b.value - exact) / exact).abs() < 1e-5);

        assert_eq!(cc_glaser_limit(sq, 0, ptr::null(), &mut b), CcStatus::Ok);
        assert!((b.value - 2.3593).abs() < 1e-3);
        cc_shape_free(sq);
    }
}

#[test]
fn expression_with_parameters_and_shooting() {
    let text = CString::new("exp(-r/b)").unwrap();
    let key = CString::new("b").unwrap();
    let keys = [key.as_ptr()];
    let values = [1.0];
    let mut shape = ptr::null_mut();
    let mut b = empty_bound();
    unsafe {
        let status = cc_shape_expression(text.as_ptr(), keys.as_ptr(), values.as_ptr(), 1, &mut shape);
        assert_eq!(status, CcStatus::Ok);
        let mut v = 0.0;
        assert_eq!(cc_shape_value(shape, 1.0, &mut v), CcStatus::Ok);
        assert!((v - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(cc_critical_coupling_shooting(shape, 0, &mut b), CcStatus::Ok);
        let z0 = 2.404825557695773f64;
        assert!(((b.value - z0 * z0 / 4.0) / b.value).abs() < 1e-8);
        assert_eq!(b.method, CcMethod::ExactShooting);
        cc_shape_free(shape);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut shape = ptr::null_mut();
    let mut b = empty_bound();
    unsafe {
        let bad = CString::new("2*^3").unwrap();
        let status = cc_shape_expression(bad.as_ptr(), ptr::null(), ptr::null(), 0, &mut shape);
        assert_eq!(status, CcStatus::InvalidPotential);
        assert!(shape.is_null());
        assert!(!last_error().is_empty());

        let unknown = CString::new("lennard_jones").unwrap();
        let status = cc_shape_builtin(unknown.as_ptr(), ptr::null(), ptr::null(), 0, &mut shape);
        assert_eq!(status, CcStatus::InvalidPotential);

        assert_eq!(cc_trace_lower_limit(ptr::null(), 0, 1, ptr::null(), &mut b), CcStatus::NullPointer);

        let exp = builtin("exponential");
        assert_eq!(cc_hoelder_limit(exp, 0, ptr::null(), &mut b), CcStatus::NotApplicable);
        assert_eq!(cc_sufficient_limit(exp, 2, ptr::null(), &mut b), CcStatus::NotApplicable);
        assert_eq!(cc_trace_lower_limit(exp, 0, 0, ptr::null(), &mut b), CcStatus::InvalidArgument);
        let mut res = cc_resolution_default();
        res.points_per_panel = 1;
        assert_eq!(cc_glaser_limit(exp, 0, &res, &mut b), CcStatus::InvalidArgument);
        assert_eq!(cc_glaser_limit(exp, 0, ptr::null(), &mut b), CcStatus::Ok);
        assert!(last_error().is_empty());
        cc_shape_free(exp);
        cc_shape_free(ptr::null_mut());
    }
}

#[test]
fn tabulated_shape_and_version() {
    let y = [0.0, 0.5, 1.0, 2.0];
    let v = [1.0, 0.8, 0.3, 0.0];
    let mut shape = ptr::null_mut();
    let mut b = empty_bound();
    unsafe {
        assert_eq!(cc_shape_table(y.as_ptr(), v.as_ptr(), y.len(), &mut shape), CcStatus::Ok);
        assert_eq!(cc_trace_lower_limit(shape, 0, 1, ptr::null(), &mut b), CcStatus::Ok);
        assert!(b.value > 0.0 && b.value.is_finite());
        cc_shape_free(shape);
        let version = CStr::from_ptr(cc_version()).to_str().unwrap();
        assert_eq!(version, env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/critcoupling.h")).unwrap();
    for name in [
        "cc_version",
        "cc_last_error",
        "cc_resolution_default",
        "cc_shape_builtin",
        "cc_shape_expression",
        "cc_shape_table",
        "cc_shape_free",
        "cc_shape_value",
        "cc_trace_lower_limit",
        "cc_glaser_limit",
        "cc_hoelder_limit",
        "cc_sufficient_limit",
        "cc_critical_coupling_eigen",
        "cc_critical_coupling_shooting",
        "cc_square_well_exact",
        "typedef struct CcShape CcShape;",
        "CC_STATUS_NOT_APPLICABLE = 4",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
