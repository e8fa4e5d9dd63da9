//! C ABI over the hyptrace library.
//!
//! Backends and elements are opaque heap handles released with their
//! `_free` function. Every fallible call returns an [`HtStatus`]; on failure
//! [`ht_last_error`] describes the most recent error on the calling thread.
//! Strings returned through out-parameters are owned by the caller and
//! released with [`ht_string_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use hyptrace::conjugacy::{class_profile, Exactness};
use hyptrace::enumerate::enumerate_ball_within;
use hyptrace::group::make_backend;
use hyptrace::length::word_length;
use hyptrace::traces::{trace_space_basis, vanishing_certificate};
use hyptrace::{presets, Error, GroupBackend, GroupElement};

/// Status codes; 1 through 5 match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HtStatus {
    Ok = 0,
    Failed = 1,
    BudgetExceeded = 2,
    InvalidInput = 3,
    WrongRegime = 4,
    InsufficientData = 5,
    NullPointer = 6,
    /// A caller-supplied buffer is shorter than the result.
    BufferTooSmall = 7,
    Panic = 8,
}

/// A group backend.
pub struct HtBackend(Arc<GroupBackend>);

/// A group element, tied to the backend that created it.
pub struct HtElement(GroupElement);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Fail {
    Lib(Error),
    Null(&'static str),
    Buffer { needed: usize },
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn status_of(e: &Error) -> HtStatus {
    match e.exit_code() {
        2 => HtStatus::BudgetExceeded,
        3 => HtStatus::InvalidInput,
        4 => HtStatus::WrongRegime,
        5 => HtStatus::InsufficientData,
        _ => HtStatus::Failed,
    }
}

/// Runs `body`, converting errors and panics into a status and a message.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> HtStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => HtStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            HtStatus::NullPointer
        }
        Ok(Err(Fail::Buffer { needed })) => {
            set_error(format!("buffer too small: need {needed} entries"));
            HtStatus::BufferTooSmall
        }
        Err(_) => {
            set_error("internal panic".into());
            HtStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or a valid pointer for the duration of the call.
unsafe fn reference<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    unsafe { p.as_ref() }.ok_or(Fail::Null(what))
}

/// # Safety
/// `p` is null or a NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Fail::Lib(Error::InvalidArgument(format!("{what} is not UTF-8"))))
}

/// # Safety
/// `out` is null or writable.
unsafe fn put<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    unsafe { out.write(value) };
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior NULs removed").into_raw()
}

fn copy_out(values: &[u64], out: *mut u64, capacity: usize, out_len: *mut usize) -> Result<(), Fail> {
    unsafe { put(out_len, values.len(), "out_len")? };
    if values.len() > capacity {
        return Err(Fail::Buffer { needed: values.len() });
    }
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    // SAFETY: the caller provides `capacity` writable slots at `out`.
    unsafe { ptr::copy_nonoverlapping(values.as_ptr(), out, values.len()) };
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ht_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` is null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ht_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Builds a preset backend (`free2`, `z`, `z3xz3`, `z3xfree2`,
/// `paper-example-3`, `s3`).
///
/// # Safety
/// `name` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ht_backend_preset(name: *const c_char, out: *mut *mut HtBackend) -> HtStatus {
    guard(|| {
        let b = presets::preset(unsafe { text(name, "name")? })?;
        unsafe { put(out, Box::into_raw(Box::new(HtBackend(b))), "out") }
    })
}

/// Builds a backend from a description such as `free(3)` or
/// `direct_product(cyclic(3),free(2))`.
///
/// # Safety
/// `spec` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ht_backend_parse(spec: *const c_char, out: *mut *mut HtBackend) -> HtStatus {
    guard(|| {
        let spec = unsafe { text(spec, "spec")? }.parse()?;
        let b = make_backend(&spec)?;
        unsafe { put(out, Box::into_raw(Box::new(HtBackend(b))), "out") }
    })
}

/// # Safety
/// `b` is null or a backend handle not yet freed. Elements created from it
/// stay valid after it is freed but can no longer be used with it.
#[no_mangle]
pub unsafe extern "C" fn ht_backend_free(b: *mut HtBackend) {
    if !b.is_null() {
        drop(unsafe { Box::from_raw(b) });
    }
}

/// # Safety
/// `b` is a live backend; `word` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ht_element_parse(b: *const HtBackend, word: *const c_char, out: *mut *mut HtElement) -> HtStatus {
    guard(|| {
        let b = unsafe { reference(b, "backend")? };
        let g = b.0.parse_element(unsafe { text(word, "word")? })?;
        unsafe { put(out, Box::into_raw(Box::new(HtElement(g))), "out") }
    })
}

/// # Safety
/// `g` is null or an element handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ht_element_free(g: *mut HtElement) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

/// Writes a parseable word for `g`, `e` for the identity.
///
/// # Safety
/// `b` and `g` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ht_element_format(b: *const HtBackend, g: *const HtElement, out: *mut *mut c_char) -> HtStatus {
    guard(|| {
        let (b, g) = unsafe { (reference(b, "backend")?, reference(g, "element")?) };
        if g.0.backend_id() != b.0.id() {
            return Err(Error::BackendMismatch.into());
        }
        unsafe { put(out, owned_string(b.0.format_element(&g.0)), "out") }
    })
}

/// # Safety
/// All handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ht_multiply(
    b: *const HtBackend,
    g: *const HtElement,
    h: *const HtElement,
    out: *mut *mut HtElement,
) -> HtStatus {
    guard(|| {
        let (b, g, h) = unsafe { (reference(b, "backend")?, reference(g, "g")?, reference(h, "h")?) };
        let gh = b.0.multiply(&g.0, &h.0)?;
        unsafe { put(out, Box::into_raw(Box::new(HtElement(gh))), "out") }
    })
}

/// # Safety
/// All handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ht_invert(b: *const HtBackend, g: *const HtElement, out: *mut *mut HtElement) -> HtStatus {
    guard(|| {
        let (b, g) = unsafe { (reference(b, "backend")?, reference(g, "g")?) };
        let inv = b.0.invert(&g.0)?;
        unsafe { put(out, Box::into_raw(Box::new(HtElement(inv))), "out") }
    })
}

/// Word length with respect to the backend's generating set.
///
/// # Safety
/// All handles are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ht_word_length(b: *const HtBackend, g: *const HtElement, out: *mut usize) -> HtStatus {
    guard(|| {
        let (b, g) = unsafe { (reference(b, "backend")?, reference(g, "g")?) };
        let l = word_length(&b.0, &g.0)?;
        unsafe { put(out, l, "out") }
    })
}

/// Sphere sizes n_0..n_radius. `out_len` receives radius + 1 even when the
/// buffer is too small.
///
/// # Safety
/// `b` is live; `out` has `capacity` writable slots; `out_len` is writable.
#[no_mangle]
pub unsafe extern "C" fn ht_sphere_sizes(
    b: *const HtBackend,
    radius: usize,
    budget_bytes: u64,
    out: *mut u64,
    capacity: usize,
    out_len: *mut usize,
) -> HtStatus {
    guard(|| {
        let b = unsafe { reference(b, "backend")? };
        let counts = enumerate_ball_within(&b.0, radius, budget_bytes)?.sphere_sizes().counts;
        copy_out(&counts, out, capacity, out_len)
    })
}

/// Class counts |C(g) ∩ S_l| for l = 0..horizon. `out_exact` is set to
/// false when the counts are lower bounds.
///
/// # Safety
/// As [`ht_sphere_sizes`]; `g` is live; `out_exact` is writable.
#[no_mangle]
pub unsafe extern "C" fn ht_class_counts(
    b: *const HtBackend,
    g: *const HtElement,
    horizon: usize,
    out: *mut u64,
    capacity: usize,
    out_len: *mut usize,
    out_exact: *mut bool,
) -> HtStatus {
    guard(|| {
        let (b, g) = unsafe { (reference(b, "backend")?, reference(g, "g")?) };
        let profile = class_profile(&b.0, &g.0, horizon)?;
        unsafe { put(out_exact, profile.exactness == Exactness::Exact, "out_exact")? };
        copy_out(&profile.counts.counts, out, capacity, out_len)
    })
}

/// Number of finite conjugacy classes meeting the ball of radius `horizon`.
///
/// # Safety
/// `b` is live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ht_trace_space_dimension(
    b: *const HtBackend,
    horizon: usize,
    budget_bytes: u64,
    out: *mut usize,
) -> HtStatus {
    guard(|| {
        let b = unsafe { reference(b, "backend")? };
        let space = trace_space_basis(&b.0, horizon, budget_bytes)?;
        unsafe { put(out, space.dimension(), "out") }
    })
}

/// Vanishing certificate for the class of `g` as a JSON document.
///
/// # Safety
/// `b` and `g` are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ht_certificate_json(
    b: *const HtBackend,
    g: *const HtElement,
    s: f64,
    horizon: usize,
    out: *mut *mut c_char,
) -> HtStatus {
    guard(|| {
        let (b, g) = unsafe { (reference(b, "backend")?, reference(g, "g")?) };
        let cert = vanishing_certificate(&b.0, &g.0, s, horizon)?;
        unsafe { put(out, owned_string(cert.to_json().to_string()), "out") }
    })
}
