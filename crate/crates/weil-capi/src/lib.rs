//! C ABI for the kernel: opaque expression handles, status codes, and
//! string-returning entry points for derivatives, Taylor checks, diagram
//! verdicts, strong differences and Lie brackets.
//!
//! Conventions: functions return a [`WeilStatus`]; results come back through
//! out-pointers. Strings returned through `char**` are heap-allocated and
//! must be released with [`weil_string_free`]; expression handles with
//! [`weil_expr_free`]. Passing a null required pointer yields
//! `WEIL_STATUS_NULL_POINTER`, never undefined behavior.

use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use weil::calculus::{check_taylor, derivative_at, Expr};
use weil::parse::{
    expr_to_poly, parse_diagram, parse_rational, parse_state_expr, parse_unary_expr, print_expr,
};
use weil::poly::{format_rat, state_names};
use weil::quasicolim::Failure;
use weil::vectorfield::{bracket, VectorField};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeilStatus {
    /// Success.
    Ok = 0,
    /// The input text failed to parse.
    ParseError = 1,
    /// The input parsed but violated a validity requirement.
    ValidationError = 2,
    /// A required pointer argument was null.
    NullPointer = 3,
    /// An input/output error (for example an unreadable diagram file).
    IoError = 4,
}

/// Opaque handle to a parsed expression.
pub struct WeilExpr {
    expr: Expr,
}

/// Quasi-colimit verdict as plain C data. `failure` is 0 for none, 1 for
/// not-injective, 2 for not-surjective; `gap` is the dimension defect.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeilVerdict {
    pub is_quasi_colimit: bool,
    pub apex_dim: usize,
    pub limit_dim: usize,
    pub image_dim: usize,
    pub failure: u8,
    pub gap: usize,
}

fn to_cstring(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `text` must be a valid NUL-terminated string.
unsafe fn read_str<'a>(text: *const c_char) -> Option<&'a str> {
    if text.is_null() {
        return None;
    }
    CStr::from_ptr(text).to_str().ok()
}

/// Parses a unary expression in `x`. On success writes a fresh handle to
/// `out`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn weil_expr_parse(
    text: *const c_char,
    out: *mut *mut WeilExpr,
) -> WeilStatus {
    if out.is_null() {
        return WeilStatus::NullPointer;
    }
    let Some(src) = read_str(text) else {
        return WeilStatus::NullPointer;
    };
    match parse_unary_expr(src) {
        Ok(expr) => {
            *out = Box::into_raw(Box::new(WeilExpr { expr }));
            WeilStatus::Ok
        }
        Err(_) => WeilStatus::ParseError,
    }
}

/// Releases an expression handle. Null is ignored.
///
/// # Safety
/// `expr` must be a handle from [`weil_expr_parse`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn weil_expr_free(expr: *mut WeilExpr) {
    if !expr.is_null() {
        drop(Box::from_raw(expr));
    }
}

/// Renders the expression; reparsing the result reproduces it.
///
/// # Safety
/// `expr` must be a live handle; `out` a valid pointer. The returned string
/// must be freed with [`weil_string_free`].
#[no_mangle]
pub unsafe extern "C" fn weil_expr_to_string(
    expr: *const WeilExpr,
    out: *mut *mut c_char,
) -> WeilStatus {
    if expr.is_null() || out.is_null() {
        return WeilStatus::NullPointer;
    }
    let e = &(*expr).expr;
    let names = state_names(e.arity().max(1));
    *out = to_cstring(print_expr(e, &names));
    WeilStatus::Ok
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must originate from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn weil_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Exact n-th derivative of the expression at a rational point (e.g. "2",
/// "-3/4"). The result is written as exact rational text.
///
/// # Safety
/// `expr` must be a live handle; `at` a valid string; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn weil_derive(
    expr: *const WeilExpr,
    at: *const c_char,
    order: usize,
    out: *mut *mut c_char,
) -> WeilStatus {
    if expr.is_null() || out.is_null() {
        return WeilStatus::NullPointer;
    }
    let Some(at_src) = read_str(at) else {
        return WeilStatus::NullPointer;
    };
    let Ok(x0) = parse_rational(at_src) else {
        return WeilStatus::ParseError;
    };
    let v = derivative_at(&(*expr).expr, &x0, order);
    *out = to_cstring(format_rat(&v));
    WeilStatus::Ok
}

/// Verifies the infinitesimal Taylor expansion of the expression at the
/// given order; writes the verdict to `out_holds`.
///
/// # Safety
/// `expr` must be a live handle; `at` a valid string; `out_holds` valid.
#[no_mangle]
pub unsafe extern "C" fn weil_taylor_check(
    expr: *const WeilExpr,
    at: *const c_char,
    order: usize,
    out_holds: *mut bool,
) -> WeilStatus {
    if expr.is_null() || out_holds.is_null() {
        return WeilStatus::NullPointer;
    }
    let Some(at_src) = read_str(at) else {
        return WeilStatus::NullPointer;
    };
    let Ok(x0) = parse_rational(at_src) else {
        return WeilStatus::ParseError;
    };
    *out_holds = check_taylor(&(*expr).expr, &x0, order);
    WeilStatus::Ok
}

/// Parses a diagram file and decides the quasi-colimit property, filling
/// `out` with the exact dimensions.
///
/// # Safety
/// `path` must be a valid string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn weil_check_diagram(
    path: *const c_char,
    out: *mut WeilVerdict,
) -> WeilStatus {
    if out.is_null() {
        return WeilStatus::NullPointer;
    }
    let Some(p) = read_str(path) else {
        return WeilStatus::NullPointer;
    };
    let Ok(text) = std::fs::read_to_string(Path::new(p)) else {
        return WeilStatus::IoError;
    };
    let cocone = match parse_diagram(&text) {
        Ok(c) => c,
        Err(_) => return WeilStatus::ParseError,
    };
    let verdict = match cocone.check_quasi_colimit() {
        Ok(v) => v,
        Err(_) => return WeilStatus::ValidationError,
    };
    let (failure, gap) = match verdict.failure {
        None => (0, 0),
        Some(Failure::NotInjective { gap }) => (1, gap),
        Some(Failure::NotSurjective { gap }) => (2, gap),
    };
    *out = WeilVerdict {
        is_quasi_colimit: verdict.is_quasi_colimit,
        apex_dim: verdict.apex_dim,
        limit_dim: verdict.limit_dim,
        image_dim: verdict.image_dim,
        failure,
        gap,
    };
    WeilStatus::Ok
}

/// Lie bracket of two polynomial fields on Q^dim. Fields are given as
/// `dim` components separated by `;` (brackets optional), in `x1..xdim`
/// (`x` for dimension one). Writes the bracket components in the same
/// format.
///
/// # Safety
/// `x_field`, `y_field` must be valid strings; `out` valid. Free the result
/// with [`weil_string_free`].
#[no_mangle]
pub unsafe extern "C" fn weil_bracket(
    dim: usize,
    x_field: *const c_char,
    y_field: *const c_char,
    out: *mut *mut c_char,
) -> WeilStatus {
    if out.is_null() {
        return WeilStatus::NullPointer;
    }
    let (Some(xs), Some(ys)) = (read_str(x_field), read_str(y_field)) else {
        return WeilStatus::NullPointer;
    };
    let parse_field = |text: &str| -> Result<VectorField, WeilStatus> {
        let comps = weil::parse::split_components(text);
        if comps.len() != dim {
            return Err(WeilStatus::ValidationError);
        }
        let mut polys = Vec::new();
        for c in &comps {
            let e = parse_state_expr(c, dim).map_err(|_| WeilStatus::ParseError)?;
            polys.push(expr_to_poly(&e, dim));
        }
        Ok(VectorField::new(polys))
    };
    let xf = match parse_field(xs) {
        Ok(f) => f,
        Err(s) => return s,
    };
    let yf = match parse_field(ys) {
        Ok(f) => f,
        Err(s) => return s,
    };
    let u = bracket(&xf, &yf);
    let names = state_names(dim);
    let rendered: Vec<String> = u
        .components()
        .iter()
        .map(|p| p.display_with(&names).to_string())
        .collect();
    *out = to_cstring(format!("[{}]", rendered.join("; ")));
    WeilStatus::Ok
}
