//! C ABI for `critcoupling`.
//!
//! Shapes live behind an opaque `CcShape` handle created by one of the
//! `cc_shape_*` constructors and released with `cc_shape_free`. Every
//! fallible call returns a `CcStatus`; on failure the message is kept per
//! thread and can be read with `cc_last_error`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use critcoupling::exact::{critical_coupling_eigen, critical_coupling_shooting, square_well_exact, ShootingConfig};
use critcoupling::necessary::{optimize_glaser, optimize_hoelder, trace_lower_limit, BoundKind, BoundResult, Detail, Method};
use critcoupling::potentials::{builtin_shape, expression_shape, tabulated_shape, PotentialShape};
use critcoupling::quadrature::Resolution;
use critcoupling::sufficient::sufficient_bound;
use critcoupling::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidPotential = 3,
    NotApplicable = 4,
    NumericalFailure = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcKind {
    Lower = 0,
    Upper = 1,
    Exact = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcMethod {
    TraceN = 0,
    Glaser = 1,
    Hoelder = 2,
    Sufficient = 3,
    ExactEigen = 4,
    ExactShooting = 5,
    ClosedForm = 6,
}

/// Quadrature grid knobs; see `cc_resolution_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcResolution {
    pub panels: u32,
    pub points_per_panel: u32,
    pub origin_panels: u32,
    pub tail_panels: u32,
    pub tail_eps: f64,
}

/// One bound on the critical coupling.
///
/// `parameter` holds the method parameter: the trace order `n`, the
/// optimal exponent `p`, the crossing radius `alpha`, the grid size for
/// the eigen route, or the outer radius for shooting.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcBound {
    pub value: f64,
    pub error_estimate: f64,
    pub kind: CcKind,
    pub method: CcMethod,
    pub ell: u32,
    pub parameter: f64,
}

/// Opaque potential shape.
pub struct CcShape {
    shape: PotentialShape,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let clean = message.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).unwrap_or_default());
}

fn status_for(error: &Error) -> CcStatus {
    match error {
        Error::Syntax { .. }
        | Error::UnknownFunction { .. }
        | Error::UnboundParameter(_)
        | Error::UnknownShape(_)
        | Error::InvalidTable(_)
        | Error::Domain { .. }
        | Error::EmptyShape
        | Error::SlowDecay(_)
        | Error::Divergent(_) => CcStatus::InvalidPotential,
        Error::InvalidParameter(_) | Error::InvalidGrid(_) | Error::TraceOrder(_) | Error::UnsupportedOrder(_) => {
            CcStatus::InvalidArgument
        }
        Error::UnsupportedChannel(_) | Error::NotMonotone => CcStatus::NotApplicable,
        _ => CcStatus::NumericalFailure,
    }
}

/// Runs `f`, recording errors and converting panics into `CcStatus::Panic`.
fn guarded(f: impl FnOnce() -> Result<(), (CcStatus, String)>) -> CcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            CcStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            CcStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (CcStatus, String) {
    (status_for(&e), e.to_string())
}

fn null(what: &str) -> (CcStatus, String) {
    (CcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (CcStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (CcStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn read_params(
    keys: *const *const c_char,
    values: *const f64,
    count: usize,
) -> Result<Vec<(String, f64)>, (CcStatus, String)> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if keys.is_null() || values.is_null() {
        return Err(null("parameter array"));
    }
    let keys = std::slice::from_raw_parts(keys, count);
    let values = std::slice::from_raw_parts(values, count);
    keys.iter()
        .zip(values)
        .map(|(&k, &v)| Ok((read_str(k, "parameter name")?.to_string(), v)))
        .collect()
}

unsafe fn store_shape(out: *mut *mut CcShape, shape: PotentialShape) {
    *out = Box::into_raw(Box::new(CcShape { shape }));
}

unsafe fn shape_ref<'a>(shape: *const CcShape) -> Result<&'a PotentialShape, (CcStatus, String)> {
    shape.as_ref().map(|s| &s.shape).ok_or_else(|| null("shape"))
}

unsafe fn resolution_from(p: *const CcResolution) -> Result<Resolution, (CcStatus, String)> {
    let Some(r) = p.as_ref() else {
        return Ok(Resolution::default());
    };
    let res = Resolution {
        panels: r.panels as usize,
        points_per_panel: r.points_per_panel as usize,
        origin_panels: r.origin_panels as usize,
        tail_panels: r.tail_panels as usize,
        tail_eps: r.tail_eps,
    };
    res.validate().map_err(lib_err)?;
    Ok(res)
}

fn to_c(bound: &BoundResult) -> CcBound {
    let parameter = match bound.detail {
        Detail::TraceOrder { n } => n as f64,
        Detail::Exponent { p, .. } => p,
        Detail::CrossingRadius { alpha } => alpha,
        Detail::Grid { nodes } => nodes as f64,
        Detail::Shooting { r_end, .. } => r_end,
        Detail::None => f64::NAN,
    };
    CcBound {
        value: bound.value,
        error_estimate: bound.error_estimate,
        kind: match bound.kind {
            BoundKind::Lower => CcKind::Lower,
            BoundKind::Upper => CcKind::Upper,
            BoundKind::Exact => CcKind::Exact,
        },
        method: match bound.method {
            Method::TraceN => CcMethod::TraceN,
            Method::Glaser => CcMethod::Glaser,
            Method::Hoelder => CcMethod::Hoelder,
            Method::Sufficient => CcMethod::Sufficient,
            Method::ExactEigen => CcMethod::ExactEigen,
            Method::ExactShooting => CcMethod::ExactShooting,
            Method::ClosedForm => CcMethod::ClosedForm,
        },
        ell: bound.ell,
        parameter,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn cc_resolution_default() -> CcResolution {
    let r = Resolution::default();
    CcResolution {
        panels: r.panels as u32,
        points_per_panel: r.points_per_panel as u32,
        origin_panels: r.origin_panels as u32,
        tail_panels: r.tail_panels as u32,
        tail_eps: r.tail_eps,
    }
}

/// Built-in shape by name (`square_well`, `exponential`, `gaussian`,
/// `wood_saxon`) with `count` named parameters.
#[no_mangle]
pub unsafe extern "C" fn cc_shape_builtin(
    name: *const c_char,
    keys: *const *const c_char,
    values: *const f64,
    count: usize,
    out: *mut *mut CcShape,
) -> CcStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let name = read_str(name, "name")?;
        let params = read_params(keys, values, count)?;
        let refs: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        store_shape(out, builtin_shape(name, &refs).map_err(lib_err)?);
        Ok(())
    })
}

/// Shape from an expression in `r`, e.g. `"exp(-r^2/b)"`.
#[no_mangle]
pub unsafe extern "C" fn cc_shape_expression(
    text: *const c_char,
    keys: *const *const c_char,
    values: *const f64,
    count: usize,
    out: *mut *mut CcShape,
) -> CcStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(text, "text")?;
        let params = read_params(keys, values, count)?;
        let refs: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        store_shape(out, expression_shape(text, &refs).map_err(lib_err)?);
        Ok(())
    })
}

/// Shape interpolated monotonically through `count` samples `(y[i], v[i])`.
#[no_mangle]
pub unsafe extern "C" fn cc_shape_table(y: *const f64, v: *const f64, count: usize, out: *mut *mut CcShape) -> CcStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if y.is_null() || v.is_null() {
            return Err(null("sample array"));
        }
        let ys = std::slice::from_raw_parts(y, count);
        let vs = std::slice::from_raw_parts(v, count);
        let samples: Vec<(f64, f64)> = ys.iter().copied().zip(vs.iter().copied()).collect();
        store_shape(out, tabulated_shape(&samples).map_err(lib_err)?);
        Ok(())
    })
}

/// Releases a shape; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cc_shape_free(shape: *mut CcShape) {
    if !shape.is_null() {
        drop(Box::from_raw(shape));
    }
}

/// `v(y)` of a shape.
#[no_mangle]
pub unsafe extern "C" fn cc_shape_value(shape: *const CcShape, y: f64, out: *mut f64) -> CcStatus {
    guarded(|| {
        let shape = shape_ref(shape)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = shape.try_value(y).map_err(lib_err)?;
        Ok(())
    })
}

unsafe fn bound_call(
    shape: *const CcShape,
    resolution: *const CcResolution,
    out: *mut CcBound,
    f: impl FnOnce(&PotentialShape, &Resolution) -> critcoupling::Result<BoundResult>,
) -> CcStatus {
    guarded(|| {
        let shape = shape_ref(shape)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let res = resolution_from(resolution)?;
        let bound = f(shape, &res).map_err(lib_err)?;
        *out = to_c(&bound);
        Ok(())
    })
}

/// Trace lower limit of order `n`. `resolution` may be null for defaults.
#[no_mangle]
pub unsafe extern "C" fn cc_trace_lower_limit(
    shape: *const CcShape,
    ell: u32,
    n: u32,
    resolution: *const CcResolution,
    out: *mut CcBound,
) -> CcStatus {
    bound_call(shape, resolution, out, |s, r| trace_lower_limit(s, ell, n as usize, &r.grid(s)?))
}

/// Glaser-type moment limit at the optimal exponent.
#[no_mangle]
pub unsafe extern "C" fn cc_glaser_limit(
    shape: *const CcShape,
    ell: u32,
    resolution: *const CcResolution,
    out: *mut CcBound,
) -> CcStatus {
    bound_call(shape, resolution, out, |s, r| optimize_glaser(s, ell, &r.grid(s)?))
}

/// Hölder-type moment limit at the optimal exponent; `ell >= 1`.
#[no_mangle]
pub unsafe extern "C" fn cc_hoelder_limit(
    shape: *const CcShape,
    ell: u32,
    resolution: *const CcResolution,
    out: *mut CcBound,
) -> CcStatus {
    bound_call(shape, resolution, out, |s, r| optimize_hoelder(s, ell, &r.grid(s)?))
}

/// Upper limit for monotone shapes, `ell = 0` only.
#[no_mangle]
pub unsafe extern "C" fn cc_sufficient_limit(
    shape: *const CcShape,
    ell: u32,
    resolution: *const CcResolution,
    out: *mut CcBound,
) -> CcStatus {
    bound_call(shape, resolution, out, |s, r| sufficient_bound(s, ell, &r.grid(s)?))
}

/// `g_c` from the dominant kernel eigenvalue.
#[no_mangle]
pub unsafe extern "C" fn cc_critical_coupling_eigen(
    shape: *const CcShape,
    ell: u32,
    resolution: *const CcResolution,
    out: *mut CcBound,
) -> CcStatus {
    bound_call(shape, resolution, out, |s, r| critical_coupling_eigen(s, ell, &r.grid(s)?))
}

/// `g_c` from zero-energy shooting with default settings.
#[no_mangle]
pub unsafe extern "C" fn cc_critical_coupling_shooting(shape: *const CcShape, ell: u32, out: *mut CcBound) -> CcStatus {
    bound_call(shape, ptr::null(), out, |s, _| {
        critical_coupling_shooting(s, ell, &ShootingConfig::default())
    })
}

/// Closed-form `g_c` of the unit square well.
#[no_mangle]
pub unsafe extern "C" fn cc_square_well_exact(ell: u32, out: *mut f64) -> CcStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = square_well_exact(ell).map_err(lib_err)?;
        Ok(())
    })
}
