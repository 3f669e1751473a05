//! C ABI over `normpart`.
//!
//! Spaces are opaque `NpSpace` handles created from a JSON descriptor and released with
//! `np_space_free`. Every fallible function returns an `NP_*` status code and writes results
//! through out-pointers; `np_last_error` describes the most recent failure on the calling
//! thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use normpart::geometry::{psi, volume_exact, volume_mc};
use normpart::partition::{padding_prob_exact, separation_prob_mc};
use normpart::space::decompose::loglacunary_decompose;
use normpart::{Error, NormedSpace};

pub const NP_OK: i32 = 0;
/// A required pointer argument was null.
pub const NP_ERR_NULL: i32 = 1;
/// Malformed input: bad descriptor, wrong length, invalid parameter.
pub const NP_ERR_INPUT: i32 = 2;
/// The space lacks a capability the operation needs.
pub const NP_ERR_UNSUPPORTED: i32 = 3;
/// Mathematically undefined request, such as a gradient at the origin.
pub const NP_ERR_DOMAIN: i32 = 4;
/// Sampler diagnostics, internal failures and caught panics.
pub const NP_ERR_INTERNAL: i32 = 5;

/// Opaque handle to a normed space.
pub struct NpSpace {
    inner: NormedSpace,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn code(e: &Error) -> i32 {
    match e {
        Error::Input { .. } => NP_ERR_INPUT,
        Error::Unsupported { .. } => NP_ERR_UNSUPPORTED,
        Error::Domain(_) => NP_ERR_DOMAIN,
        Error::Diagnostic(_) => NP_ERR_INTERNAL,
    }
}

struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail(code(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(NP_ERR_NULL, format!("null pointer: {what}"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            NP_OK
        }
        Ok(Err(Fail(c, msg))) => {
            set_error(&msg);
            c
        }
        Err(_) => {
            set_error("internal panic");
            NP_ERR_INTERNAL
        }
    }
}

unsafe fn space<'a>(s: *const NpSpace) -> Result<&'a NormedSpace, Fail> {
    s.as_ref().map(|s| &s.inner).ok_or_else(|| null("space"))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write<T>(p: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(v);
    Ok(())
}

fn check_len(space: &NormedSpace, len: usize) -> Result<(), Fail> {
    if len != space.dim() {
        return Err(Fail(NP_ERR_INPUT, format!("length {len} differs from dimension {}", space.dim())));
    }
    Ok(())
}

/// Message for the last failure on this thread; empty after a success. Valid until the next
/// call on the same thread.
#[no_mangle]
pub extern "C" fn np_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parse a JSON descriptor into a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn np_space_new(json: *const c_char, out: *mut *mut NpSpace) -> i32 {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Fail(NP_ERR_INPUT, "descriptor is not UTF-8".into()))?;
        let inner = NormedSpace::from_json(text)?;
        out.write(Box::into_raw(Box::new(NpSpace { inner })));
        Ok(())
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `s` must come from `np_space_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn np_space_free(s: *mut NpSpace) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn np_space_dim(s: *const NpSpace, out: *mut usize) -> i32 {
    guard(|| write(out, space(s)?.dim(), "out"))
}

/// ‖x‖_X.
///
/// # Safety
/// `x` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn np_norm(s: *const NpSpace, x: *const f64, len: usize, out: *mut f64) -> i32 {
    guard(|| {
        let sp = space(s)?;
        let x = slice(x, len, "x")?;
        write(out, sp.norm_eval(x)?, "out")
    })
}

/// Gradient of the norm at x into `grad` (length `len`). `nonsmooth` receives 1 when x is a
/// non-smooth point and the result is a subgradient.
///
/// # Safety
/// `x` and `grad` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn np_gradient(
    s: *const NpSpace,
    x: *const f64,
    len: usize,
    grad: *mut f64,
    nonsmooth: *mut i32,
) -> i32 {
    guard(|| {
        let sp = space(s)?;
        let x = slice(x, len, "x")?;
        check_len(sp, len)?;
        if grad.is_null() {
            return Err(null("grad"));
        }
        let g = sp.norm_gradient(x)?;
        std::slice::from_raw_parts_mut(grad, len).copy_from_slice(&g.g);
        if !nonsmooth.is_null() {
            nonsmooth.write(g.nonsmooth as i32);
        }
        Ok(())
    })
}

/// Exact volume of the unit ball.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn np_volume_exact(s: *const NpSpace, out: *mut f64) -> i32 {
    guard(|| write(out, volume_exact(space(s)?)?, "out"))
}

/// Hit-or-miss volume estimate.
///
/// # Safety
/// `value` must be writable; `stderr_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn np_volume_mc(s: *const NpSpace, trials: u64, seed: u64, value: *mut f64, stderr_out: *mut f64) -> i32 {
    guard(|| {
        let e = volume_mc(space(s)?, trials as usize, seed, false)?;
        if !stderr_out.is_null() {
            stderr_out.write(e.stderr);
        }
        write(value, e.value, "value")
    })
}

/// ψ(w) = ‖w‖_{Π*X}/vol(B_X).
///
/// # Safety
/// `w` must point to `len` doubles; `value` writable; `stderr_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn np_psi(
    s: *const NpSpace,
    w: *const f64,
    len: usize,
    samples: u64,
    seed: u64,
    value: *mut f64,
    stderr_out: *mut f64,
) -> i32 {
    guard(|| {
        let sp = space(s)?;
        let w = slice(w, len, "w")?;
        let e = psi(sp, w, samples as usize, seed)?;
        if !stderr_out.is_null() {
            stderr_out.write(e.stderr);
        }
        write(value, e.value, "value")
    })
}

/// ((1−ρ)/(1+ρ))ⁿ.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn np_padding_prob_exact(s: *const NpSpace, rho: f64, out: *mut f64) -> i32 {
    guard(|| write(out, padding_prob_exact(space(s)?, rho)?, "out"))
}

/// Monte Carlo probability that a diameter-`delta` partition separates u and v.
///
/// # Safety
/// `u` and `v` must point to `len` doubles; `value` writable; `stderr_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn np_separation_prob_mc(
    s: *const NpSpace,
    u: *const f64,
    v: *const f64,
    len: usize,
    delta: f64,
    trials: u64,
    seed: u64,
    value: *mut f64,
    stderr_out: *mut f64,
) -> i32 {
    guard(|| {
        let sp = space(s)?;
        let u = slice(u, len, "u")?;
        let v = slice(v, len, "v")?;
        let e = separation_prob_mc(sp, u, v, delta, trials as usize, seed)?;
        if !stderr_out.is_null() {
            stderr_out.write(e.stderr);
        }
        write(value, e.value, "value")
    })
}

/// n = n_1⋯n_k + remainder. Writes up to `cap` factors; `count` always receives k, and the call
/// fails with `NP_ERR_INPUT` if k > cap.
///
/// # Safety
/// `factors` must have room for `cap` values; `count` and `remainder` must be writable.
#[no_mangle]
pub unsafe extern "C" fn np_loglacunary_decompose(
    n: u64,
    factors: *mut u64,
    cap: usize,
    count: *mut usize,
    remainder: *mut u64,
) -> i32 {
    guard(|| {
        let d = loglacunary_decompose(n)?;
        write(count, d.factors.len(), "count")?;
        write(remainder, d.remainder, "remainder")?;
        if d.factors.len() > cap {
            return Err(Fail(NP_ERR_INPUT, format!("{} factors do not fit in {cap}", d.factors.len())));
        }
        if factors.is_null() {
            return Err(null("factors"));
        }
        std::slice::from_raw_parts_mut(factors, d.factors.len()).copy_from_slice(&d.factors);
        Ok(())
    })
}
