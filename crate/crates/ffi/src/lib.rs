//! C interface to the discrete highest density region solver.
//!
//! Handles are opaque. Every fallible call returns an [`HdrStatus`] and
//! writes its product through an out pointer; on failure a message is
//! available from [`hdr_last_error_message`] on the same thread.
//! Strings returned by the library must be released with [`hdr_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use discrete_hdr::cli::render_json;
use discrete_hdr::verify::search_set;
use discrete_hdr::{
    check_certificate, compute_cscr, parse_dist_spec, render_text, HdrError, MassFunction,
    SequenceFunction, SolverOptions, Support,
};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HdrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    InvalidMass = 4,
    NotTerminated = 5,
    BufferTooSmall = 6,
    Io = 7,
    Panic = 99,
}

/// A probability mass function over the integers.
pub struct HdrDistribution {
    mf: MassFunction,
}

/// A computed region together with its search metadata.
pub struct HdrRegion {
    result: discrete_hdr::HdrResult,
}

/// Mass callback: returns P(X = x). `user_data` is passed through untouched.
pub type HdrMassCallback = Option<unsafe extern "C" fn(x: i64, user_data: *mut c_void) -> f64>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &HdrError) -> HdrStatus {
    match err {
        HdrError::Parse { .. } | HdrError::Table { .. } | HdrError::DuplicateKey { .. } => {
            HdrStatus::ParseError
        }
        HdrError::InvalidMass { .. } | HdrError::ImproperPmf(_) => HdrStatus::InvalidMass,
        HdrError::TerminationNotReached { .. } => HdrStatus::NotTerminated,
        HdrError::Io(_) => HdrStatus::Io,
        _ => HdrStatus::InvalidArgument,
    }
}

fn fail(err: HdrError) -> HdrStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

/// Runs `f`, converting panics into [`HdrStatus::Panic`].
fn guard(f: impl FnOnce() -> HdrStatus) -> HdrStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            HdrStatus::Panic
        }
    }
}

fn null(what: &str) -> HdrStatus {
    set_error(format!("{what} is null"));
    HdrStatus::NullPointer
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Copies `src` into `buf` when it fits. `written` always receives the
/// number of elements required.
unsafe fn copy_out(src: &[i64], buf: *mut i64, cap: usize, written: *mut usize) -> HdrStatus {
    if written.is_null() {
        return null("written");
    }
    *written = src.len();
    if src.is_empty() {
        return HdrStatus::Ok;
    }
    if cap < src.len() {
        set_error(format!("buffer holds {cap} elements, {} needed", src.len()));
        return HdrStatus::BufferTooSmall;
    }
    if buf.is_null() {
        return null("buf");
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    HdrStatus::Ok
}

/// Parses a distribution spec such as `binom(10, 0.5)`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hdr_distribution_parse(
    spec: *const c_char,
    out: *mut *mut HdrDistribution,
) -> HdrStatus {
    guard(|| {
        if spec.is_null() {
            return null("spec");
        }
        if out.is_null() {
            return null("out");
        }
        let Ok(text) = CStr::from_ptr(spec).to_str() else {
            set_error("spec is not valid UTF-8");
            return HdrStatus::InvalidArgument;
        };
        match parse_dist_spec(text) {
            Ok(mf) => {
                *out = Box::into_raw(Box::new(HdrDistribution { mf }));
                HdrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Builds a distribution from `len` parallel arrays of support points and
/// masses. Masses must sum to one.
///
/// # Safety
/// `xs` and `masses` must each point to `len` readable values.
#[no_mangle]
pub unsafe extern "C" fn hdr_distribution_from_table(
    xs: *const i64,
    masses: *const f64,
    len: usize,
    out: *mut *mut HdrDistribution,
) -> HdrStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        if len > 0 && (xs.is_null() || masses.is_null()) {
            return null("xs or masses");
        }
        let mut table = std::collections::BTreeMap::new();
        for i in 0..len {
            let (x, m) = (*xs.add(i), *masses.add(i));
            if table.insert(x, m).is_some() {
                return fail(HdrError::DuplicateKey { x, line: i + 1 });
            }
        }
        match MassFunction::from_table(table, false) {
            Ok(mf) => {
                *out = Box::into_raw(Box::new(HdrDistribution { mf }));
                HdrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

struct Callback {
    f: unsafe extern "C" fn(i64, *mut c_void) -> f64,
    user_data: *mut c_void,
}

// The caller promises the callback and its data outlive the handle and are
// not used concurrently from other threads.
unsafe impl Send for Callback {}
unsafe impl Sync for Callback {}

/// Wraps a mass callback. Bounds are used only where the matching
/// `has_min` / `has_max` flag is set; otherwise that side is unbounded.
///
/// # Safety
/// `callback` must stay callable with `user_data` until the handle is freed.
#[no_mangle]
pub unsafe extern "C" fn hdr_distribution_from_callback(
    callback: HdrMassCallback,
    user_data: *mut c_void,
    has_min: bool,
    min: i64,
    has_max: bool,
    max: i64,
    out: *mut *mut HdrDistribution,
) -> HdrStatus {
    guard(|| {
        let Some(f) = callback else {
            return null("callback");
        };
        if out.is_null() {
            return null("out");
        }
        let support = Support::new(has_min.then_some(min), has_max.then_some(max));
        if let (Some(lo), Some(hi)) = (support.min, support.max) {
            if lo > hi {
                return fail(HdrError::EmptySupport {
                    min: lo as f64,
                    max: hi as f64,
                });
            }
        }
        let cb = Callback { f, user_data };
        let mf = MassFunction::custom("callback", support, move |x| {
            let cb = &cb;
            unsafe { (cb.f)(x, cb.user_data) }
        });
        *out = Box::into_raw(Box::new(HdrDistribution { mf }));
        HdrStatus::Ok
    })
}

/// Evaluates the mass at `x`.
///
/// # Safety
/// `dist` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hdr_distribution_mass(
    dist: *const HdrDistribution,
    x: i64,
    out: *mut f64,
) -> HdrStatus {
    guard(|| {
        let (Some(dist), false) = (dist.as_ref(), out.is_null()) else {
            return null("dist or out");
        };
        match dist.mf.mass(x) {
            Ok(m) => {
                *out = m;
                HdrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `dist` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hdr_distribution_free(dist: *mut HdrDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// Computes the smallest region with mass at least `cover_prob`.
/// `iter_cap` of zero uses the default limit.
///
/// # Safety
/// `dist` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hdr_compute(
    dist: *const HdrDistribution,
    cover_prob: f64,
    iter_cap: u64,
    out: *mut *mut HdrRegion,
) -> HdrStatus {
    guard(|| {
        let Some(dist) = dist.as_ref() else {
            return null("dist");
        };
        if out.is_null() {
            return null("out");
        }
        let mut opts = SolverOptions::default();
        if iter_cap > 0 {
            opts.iter_cap = iter_cap;
        }
        match compute_cscr(&dist.mf, cover_prob, None, &opts) {
            Ok(result) => {
                *out = Box::into_raw(Box::new(HdrRegion { result }));
                HdrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `region` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hdr_region_free(region: *mut HdrRegion) {
    if !region.is_null() {
        drop(Box::from_raw(region));
    }
}

/// Number of elements in the region, or 0 for a null handle.
///
/// # Safety
/// `region` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hdr_region_size(region: *const HdrRegion) -> usize {
    region.as_ref().map_or(0, |r| r.result.region_size)
}

/// Total mass of the region, or NaN for a null handle.
///
/// # Safety
/// `region` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hdr_region_coverage(region: *const HdrRegion) -> f64 {
    region.as_ref().map_or(f64::NAN, |r| r.result.coverage)
}

/// Number of support elements visited by the search.
///
/// # Safety
/// `region` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hdr_region_search_set_size(region: *const HdrRegion) -> u64 {
    region.as_ref().map_or(0, |r| r.result.search_set_size)
}

/// Copies the region's elements, ascending, into `buf`.
///
/// # Safety
/// `buf` must hold `cap` values; `written` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hdr_region_elements(
    region: *const HdrRegion,
    buf: *mut i64,
    cap: usize,
    written: *mut usize,
) -> HdrStatus {
    guard(|| match region.as_ref() {
        Some(r) => copy_out(&r.result.region, buf, cap, written),
        None => null("region"),
    })
}

/// Copies the elements tied with the region's smallest mass.
///
/// # Safety
/// `buf` must hold `cap` values; `written` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hdr_region_variation_set(
    region: *const HdrRegion,
    buf: *mut i64,
    cap: usize,
    written: *mut usize,
) -> HdrStatus {
    guard(|| match region.as_ref() {
        Some(r) => copy_out(&r.result.variation_set, buf, cap, written),
        None => null("region"),
    })
}

/// Checks the optimality certificate of `region` against `dist` over the
/// visited elements and stores the verdict in `ok`.
///
/// # Safety
/// Both handles must be live, and `region` must come from `dist`.
#[no_mangle]
pub unsafe extern "C" fn hdr_region_certify(
    dist: *const HdrDistribution,
    region: *const HdrRegion,
    ok: *mut bool,
) -> HdrStatus {
    guard(|| {
        let (Some(dist), Some(region), false) = (dist.as_ref(), region.as_ref(), ok.is_null())
        else {
            return null("dist, region or ok");
        };
        let r = &region.result;
        let certified = SequenceFunction::for_support(dist.mf.support()).and_then(|seq| {
            check_certificate(&dist.mf, &r.region, r.cover_prob, &search_set(r, &seq))
        });
        match certified {
            Ok(report) => {
                *ok = report.all_ok();
                HdrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Text report. Free with [`hdr_string_free`]. Null on a null handle.
///
/// # Safety
/// `region` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hdr_region_render_text(region: *const HdrRegion) -> *mut c_char {
    match region.as_ref() {
        Some(r) => into_c_string(render_text(&r.result)),
        None => ptr::null_mut(),
    }
}

/// JSON report. Free with [`hdr_string_free`]. Null on failure.
///
/// # Safety
/// `region` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hdr_region_render_json(region: *const HdrRegion) -> *mut c_char {
    let Some(r) = region.as_ref() else {
        return ptr::null_mut();
    };
    match render_json(&r.result) {
        Ok(s) => into_c_string(s),
        Err(e) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hdr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn hdr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn hdr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
