//! C ABI over `revgeo`. Objects cross the boundary as opaque handles; every call returns a
//! status code and leaves a message for `revgeo_last_error_message` on failure.

use revgeo::geodesic::finsler_norm;
use revgeo::measures::{bh_area, contact_volume_direct, ht_area, riemannian_area};
use revgeo::return_map::{build_generating_table, first_return};
use revgeo::systole::{systolic_report, AnalysisOptions};
use revgeo::{Error, FamilySpec, GeneratingTable, GridSpec, NavigationParams, ProfileCurve};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

pub const REVGEO_OK: i32 = 0;
pub const REVGEO_ERR_NULL: i32 = 1;
pub const REVGEO_ERR_INVALID_ARGUMENT: i32 = 2;
pub const REVGEO_ERR_CONFIG: i32 = 3;
pub const REVGEO_ERR_NUMERICAL: i32 = 4;
pub const REVGEO_ERR_IO: i32 = 5;
pub const REVGEO_ERR_PANIC: i32 = 6;

/// A sphere of revolution.
pub struct RevgeoProfile(ProfileCurve);

/// A generating-function table of a profile.
pub struct RevgeoTable(GeneratingTable);

/// One node of a generating-function table. `f`, `tau` and `winding` are NaN at η = ±1.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RevgeoRow {
    pub eta: f64,
    pub big_f: f64,
    pub f: f64,
    pub tau: f64,
    pub winding: f64,
}

/// Areas and contact volume for one wind strength.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RevgeoAreas {
    pub riemannian: f64,
    pub contact_volume: f64,
    pub bh: f64,
    pub ht: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Fail {
    Null(&'static str),
    Arg(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Json(_) => REVGEO_ERR_CONFIG,
        Error::Io(_) => REVGEO_ERR_IO,
        e if e.is_input_error() => REVGEO_ERR_INVALID_ARGUMENT,
        _ => REVGEO_ERR_NUMERICAL,
    }
}

/// Run `body`, translating errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            REVGEO_OK
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            REVGEO_ERR_NULL
        }
        Ok(Err(Fail::Arg(msg))) => {
            set_error(&msg);
            REVGEO_ERR_INVALID_ARGUMENT
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            code_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            REVGEO_ERR_PANIC
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Arg(format!("{what} is not UTF-8")))
}

fn grid(nodes: usize) -> GridSpec {
    if nodes == 0 {
        GridSpec::default()
    } else {
        GridSpec { nodes, ..GridSpec::default() }
    }
}

/// Build a profile from `{"family": name, "params": {...}}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out_profile` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn revgeo_profile_from_family_json(
    json: *const c_char,
    out_profile: *mut *mut RevgeoProfile,
) -> i32 {
    guard(|| {
        let text = str_arg(json, "json")?;
        let slot = out(out_profile, "out_profile")?;
        let spec: FamilySpec = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let p = ProfileCurve::from_family(&spec)?;
        *slot = Box::into_raw(Box::new(RevgeoProfile(p)));
        Ok(())
    })
}

/// Build a profile from a CSV of samples with header `s,r,z`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out_profile` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn revgeo_profile_from_csv(path: *const c_char, out_profile: *mut *mut RevgeoProfile) -> i32 {
    guard(|| {
        let path = str_arg(path, "path")?;
        let slot = out(out_profile, "out_profile")?;
        let p = ProfileCurve::from_csv(Path::new(path))?;
        *slot = Box::into_raw(Box::new(RevgeoProfile(p)));
        Ok(())
    })
}

/// # Safety
/// `profile` must come from a `revgeo_profile_*` constructor and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn revgeo_profile_free(profile: *mut RevgeoProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Meridian length M, minimal equator radius and maximal radius.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn revgeo_profile_dimensions(
    profile: *const RevgeoProfile,
    meridian_length: *mut f64,
    r_min: *mut f64,
    r_max: *mut f64,
) -> i32 {
    guard(|| {
        let p = &deref(profile, "profile")?.0;
        *out(meridian_length, "meridian_length")? = p.meridian_length();
        *out(r_min, "r_min")? = p.r_min();
        *out(r_max, "r_max")? = p.r_max();
        Ok(())
    })
}

/// r(s), r′(s) and z(s) at arc length `s` in [0, M/2].
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn revgeo_profile_eval(
    profile: *const RevgeoProfile,
    s: f64,
    r: *mut f64,
    dr: *mut f64,
    z: *mut f64,
) -> i32 {
    guard(|| {
        let p = &deref(profile, "profile")?.0;
        if !(0.0..=p.half_length()).contains(&s) {
            return Err(Fail::Arg(format!("s = {s} outside [0, {}]", p.half_length())));
        }
        let q = p.point(s);
        *out(r, "r")? = q.r;
        *out(dr, "dr")? = q.dr;
        *out(z, "z")? = q.z;
        Ok(())
    })
}

/// Riemannian, Busemann–Hausdorff and Holmes–Thompson areas and the contact volume at wind `a`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn revgeo_areas(profile: *const RevgeoProfile, a: f64, areas: *mut RevgeoAreas) -> i32 {
    guard(|| {
        let p = &deref(profile, "profile")?.0;
        let slot = out(areas, "areas")?;
        let nav = NavigationParams::new(a);
        nav.validate(p)?;
        *slot = RevgeoAreas {
            riemannian: riemannian_area(p)?,
            contact_volume: contact_volume_direct(p, &nav)?,
            bh: bh_area(p, &nav)?,
            ht: ht_area(p, &nav)?,
        };
        Ok(())
    })
}

/// First return to the equatorial annulus from height η ∈ (−1, 1): return time and winding number.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn revgeo_first_return(
    profile: *const RevgeoProfile,
    eta: f64,
    tol: f64,
    tau: *mut f64,
    winding: *mut f64,
) -> i32 {
    guard(|| {
        let p = &deref(profile, "profile")?.0;
        if tol.is_nan() || tol <= 0.0 {
            return Err(Fail::Arg(format!("tol must be positive, got {tol}")));
        }
        let fr = first_return(eta, p, tol)?;
        *out(tau, "tau")? = fr.tau;
        *out(winding, "winding")? = fr.winding;
        Ok(())
    })
}

/// Zermelo norm of the tangent vector A∂θ + B∂s at height `s` under wind `a`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn revgeo_finsler_norm(
    profile: *const RevgeoProfile,
    a: f64,
    s: f64,
    theta_component: f64,
    s_component: f64,
    norm: *mut f64,
) -> i32 {
    guard(|| {
        let p = &deref(profile, "profile")?.0;
        let slot = out(norm, "norm")?;
        let nav = NavigationParams::new(a);
        nav.validate(p)?;
        *slot = finsler_norm(p, &nav, s, theta_component, s_component)?;
        Ok(())
    })
}

/// Generating-function table on `nodes` points of [−1, 1] (0 selects the default of 201).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn revgeo_table_build(
    profile: *const RevgeoProfile,
    nodes: usize,
    out_table: *mut *mut RevgeoTable,
) -> i32 {
    guard(|| {
        let p = &deref(profile, "profile")?.0;
        let slot = out(out_table, "out_table")?;
        let t = build_generating_table(p, &grid(nodes))?;
        *slot = Box::into_raw(Box::new(RevgeoTable(t)));
        Ok(())
    })
}

/// Number of rows; 0 for a null table.
///
/// # Safety
/// `table` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn revgeo_table_len(table: *const RevgeoTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.rows.len())
}

/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn revgeo_table_row(table: *const RevgeoTable, index: usize, row: *mut RevgeoRow) -> i32 {
    guard(|| {
        let t = &deref(table, "table")?.0;
        let slot = out(row, "row")?;
        let r =
            t.rows.get(index).ok_or_else(|| Fail::Arg(format!("row {index} out of range ({} rows)", t.rows.len())))?;
        *slot = RevgeoRow { eta: r.eta, big_f: r.big_f, f: r.f, tau: r.tau, winding: r.winding };
        Ok(())
    })
}

/// # Safety
/// `table` must come from `revgeo_table_build` and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn revgeo_table_free(table: *mut RevgeoTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Full analysis report as JSON; free the string with `revgeo_string_free`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn revgeo_report_json(
    profile: *const RevgeoProfile,
    a: f64,
    nodes: usize,
    json: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let p = &deref(profile, "profile")?.0;
        let slot = out(json, "json")?;
        let opts = AnalysisOptions { grid: grid(nodes), ..AnalysisOptions::default() };
        let report = systolic_report(p, &NavigationParams::new(a), &opts)?;
        let text = serde_json::to_string(&report).map_err(Error::from)?;
        *slot = CString::new(text).map_err(|e| Fail::Arg(e.to_string()))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn revgeo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated, truncated to `len`).
/// Returns the full message length including the terminator, so a short buffer can be resized.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn revgeo_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let bytes = e.borrow();
        let bytes = bytes.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}
