//! C ABI over the perco library. All entry points are panic-safe, return an
//! integer status (0 = ok, 1 = invalid input, 2 = numerical failure,
//! 3 = null pointer / bad UTF-8, 4 = internal panic) and keep a thread-local
//! description of the last error. Deep-subnormal magnitudes travel as
//! (ln|v|, sign) pairs; structured reports travel as JSON strings that must be
//! released with perco_string_free.

use perco::assumptions::assumption_report;
use perco::diagrams::{diagram_value, normalized_diagram, DiagramId};
use perco::error::Error;
use perco::expansion::{expansion_terms, model_corollary};
use perco::kernels::{build_kernel, Kernel, KernelSpec};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

pub const PERCO_OK: i32 = 0;
pub const PERCO_EINVAL: i32 = 1;
pub const PERCO_ENUMERIC: i32 = 2;
pub const PERCO_ENULL: i32 = 3;
pub const PERCO_EPANIC: i32 = 4;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> i32 {
    match e.exit_code() {
        1 => PERCO_EINVAL,
        _ => PERCO_ENUMERIC,
    }
}

/// Opaque kernel handle.
pub struct PercoKernel {
    inner: Kernel,
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, i32> {
    if p.is_null() {
        set_error("null string pointer");
        return Err(PERCO_ENULL);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        PERCO_ENULL
    })
}

fn guarded<F: FnOnce() -> i32>(f: F) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic");
            PERCO_EPANIC
        }
    }
}

/// Build a kernel from a KernelSpec JSON document.
///
/// # Safety
/// `spec_json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn perco_kernel_new(
    spec_json: *const c_char,
    out: *mut *mut PercoKernel,
) -> i32 {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return PERCO_ENULL;
        }
        let json = match read_str(spec_json) {
            Ok(s) => s,
            Err(code) => return code,
        };
        let spec: KernelSpec = match serde_json::from_str(json) {
            Ok(s) => s,
            Err(e) => {
                set_error(&format!("bad kernel spec: {e}"));
                return PERCO_EINVAL;
            }
        };
        match build_kernel(spec) {
            Ok(k) => {
                *out = Box::into_raw(Box::new(PercoKernel { inner: k }));
                PERCO_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// # Safety
/// `k` must come from perco_kernel_new and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn perco_kernel_free(k: *mut PercoKernel) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

unsafe fn with_kernel<F: FnOnce(&Kernel) -> i32>(k: *const PercoKernel, f: F) -> i32 {
    if k.is_null() {
        set_error("null kernel handle");
        return PERCO_ENULL;
    }
    f(&(*k).inner)
}

unsafe fn diagram_common(
    k: *const PercoKernel,
    id: *const c_char,
    normalized: bool,
    ln_abs: *mut f64,
    sign: *mut i32,
) -> i32 {
    with_kernel(k, |kernel| {
        if ln_abs.is_null() || sign.is_null() {
            set_error("null output pointer");
            return PERCO_ENULL;
        }
        let id: DiagramId = match read_str(id).and_then(|s| {
            s.parse().map_err(|e: Error| {
                set_error(&e.to_string());
                PERCO_EINVAL
            })
        }) {
            Ok(v) => v,
            Err(code) => return code,
        };
        let r = if normalized {
            normalized_diagram(kernel, id)
        } else {
            diagram_value(kernel, id)
        };
        match r {
            Ok(v) => {
                *ln_abs = v.value.ln_abs;
                *sign = v.value.sign as i32;
                PERCO_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Evaluate a diagram ("loopN" / "thetaABC"); writes ln|v| and sign.
///
/// # Safety
/// All pointers must be valid; `id` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn perco_diagram(
    k: *const PercoKernel,
    id: *const c_char,
    ln_abs: *mut f64,
    sign: *mut i32,
) -> i32 {
    guarded(|| diagram_common(k, id, false, ln_abs, sign))
}

/// Same, but normalized by the scale-invariant power of the kernel mass.
///
/// # Safety
/// All pointers must be valid; `id` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn perco_diagram_normalized(
    k: *const PercoKernel,
    id: *const c_char,
    ln_abs: *mut f64,
    sign: *mut i32,
) -> i32 {
    guarded(|| diagram_common(k, id, true, ln_abs, sign))
}

/// φ(x) for a d-vector x.
///
/// # Safety
/// `x` must point to `len` doubles equal to the kernel dimension.
#[no_mangle]
pub unsafe extern "C" fn perco_kernel_eval(
    k: *const PercoKernel,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> i32 {
    guarded(|| {
        with_kernel(k, |kernel| {
            if x.is_null() || out.is_null() {
                set_error("null pointer");
                return PERCO_ENULL;
            }
            if len != kernel.d() as usize {
                set_error("vector length does not match the kernel dimension");
                return PERCO_EINVAL;
            }
            *out = kernel.eval(std::slice::from_raw_parts(x, len));
            PERCO_OK
        })
    })
}

fn emit_json<T: serde::Serialize>(value: &T, out: *mut *mut c_char) -> i32 {
    let s = match serde_json::to_string(value) {
        Ok(s) => s,
        Err(e) => {
            set_error(&format!("serialization failed: {e}"));
            return PERCO_ENUMERIC;
        }
    };
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            PERCO_OK
        }
        Err(_) => {
            set_error("report contained a NUL byte");
            PERCO_ENUMERIC
        }
    }
}

/// Critical-intensity series report as a JSON string (perco_string_free it).
///
/// # Safety
/// `k` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn perco_expansion_json(
    k: *const PercoKernel,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        with_kernel(k, |kernel| {
            if out.is_null() {
                set_error("null output pointer");
                return PERCO_ENULL;
            }
            match expansion_terms(kernel) {
                Ok(r) => emit_json(&r, out),
                Err(e) => {
                    set_error(&e.to_string());
                    status_of(&e)
                }
            }
        })
    })
}

/// Closed-form per-family series report as JSON, from a KernelSpec JSON.
///
/// # Safety
/// `spec_json` must be NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn perco_corollary_json(
    spec_json: *const c_char,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return PERCO_ENULL;
        }
        let json = match read_str(spec_json) {
            Ok(s) => s,
            Err(code) => return code,
        };
        let spec: KernelSpec = match serde_json::from_str(json) {
            Ok(s) => s,
            Err(e) => {
                set_error(&format!("bad kernel spec: {e}"));
                return PERCO_EINVAL;
            }
        };
        match model_corollary(&spec) {
            Ok(r) => emit_json(&r, out),
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Decay/Fourier diagnostics report as JSON. `user_g <= 0` means "not given";
/// `exp_decay != 0` declares exponential profile decay.
///
/// # Safety
/// `k` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn perco_assumptions_json(
    k: *const PercoKernel,
    b: f64,
    sample_budget: usize,
    exp_decay: i32,
    user_g: f64,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        with_kernel(k, |kernel| {
            if out.is_null() {
                set_error("null output pointer");
                return PERCO_ENULL;
            }
            let g = if user_g > 0.0 { Some(user_g) } else { None };
            match assumption_report(&kernel.spec, b, sample_budget, exp_decay != 0, g) {
                Ok(r) => emit_json(&r, out),
                Err(e) => {
                    set_error(&e.to_string());
                    status_of(&e)
                }
            }
        })
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn perco_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Description of the most recent error on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn perco_last_error() -> *const c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map(|c| c.as_ptr())
            .unwrap_or(ptr::null())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn cube_spec(d: u32) -> CString {
        CString::new(format!(
            r#"{{"family":"hyper_cube","params":{{"side":1.0}},"d":{d}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn build_eval_and_diagram() {
        unsafe {
            let mut k: *mut PercoKernel = ptr::null_mut();
            assert_eq!(perco_kernel_new(cube_spec(5).as_ptr(), &mut k), PERCO_OK);
            let x = [0.1f64, 0.2, 0.0, 0.4, 0.49];
            let mut v = 0.0;
            assert_eq!(perco_kernel_eval(k, x.as_ptr(), 5, &mut v), PERCO_OK);
            assert_eq!(v, 1.0);
            let id = CString::new("loop3").unwrap();
            let (mut ln, mut sign) = (0.0f64, 0i32);
            assert_eq!(
                perco_diagram_normalized(k, id.as_ptr(), &mut ln, &mut sign),
                PERCO_OK
            );
            assert!((ln - 5.0 * (0.75f64).ln()).abs() < 1e-12);
            assert_eq!(sign, 1);
            perco_kernel_free(k);
        }
    }

    #[test]
    fn error_paths_set_messages() {
        unsafe {
            let mut k: *mut PercoKernel = ptr::null_mut();
            let bad = CString::new("{\"nope\":1}").unwrap();
            assert_eq!(perco_kernel_new(bad.as_ptr(), &mut k), PERCO_EINVAL);
            let msg = perco_last_error();
            assert!(!msg.is_null());
            assert!(CStr::from_ptr(msg).to_str().unwrap().contains("spec"));
            assert_eq!(
                perco_kernel_new(ptr::null(), &mut k),
                PERCO_ENULL
            );
            // wrong vector length
            assert_eq!(perco_kernel_new(cube_spec(2).as_ptr(), &mut k), PERCO_OK);
            let mut v = 0.0;
            let x = [0.0f64; 3];
            assert_eq!(perco_kernel_eval(k, x.as_ptr(), 3, &mut v), PERCO_EINVAL);
            perco_kernel_free(k);
        }
    }

    #[test]
    fn expansion_json_round_trips() {
        unsafe {
            let mut k: *mut PercoKernel = ptr::null_mut();
            assert_eq!(perco_kernel_new(cube_spec(8).as_ptr(), &mut k), PERCO_OK);
            let mut s: *mut c_char = ptr::null_mut();
            assert_eq!(perco_expansion_json(k, &mut s), PERCO_OK);
            let doc = CStr::from_ptr(s).to_str().unwrap();
            let parsed: perco::expansion::ExpansionReport = serde_json::from_str(doc).unwrap();
            assert_eq!(parsed.d, 8);
            assert!(parsed.lambda_c_times_q > 1.0);
            perco_string_free(s);
            perco_kernel_free(k);
        }
    }
}
