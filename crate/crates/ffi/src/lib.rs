//! C ABI over `etale-kit`.
//!
//! Groupoids and homomorphism matrices cross the boundary as opaque handles
//! that the caller frees. Every function returns an [`EkStatus`]; on failure
//! [`ek_last_error`] describes what went wrong on the calling thread. Strings
//! handed out by the library are released with [`ek_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use etale_kit::algebra::{reduced_norm, AlgebraElement};
use etale_kit::decomposition::{decompose, quotient_star_hom, HomMatrix};
use etale_kit::families::{make_family, FamilySpec};
use etale_kit::groupoid::{validate, FiniteGroupoid};
use etale_kit::io::{load_groupoid, to_canonical_json, GroupoidDocument};
use etale_kit::semigroup::enumerate_bisections;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::json;

/// Result codes. The first four match the exit codes of the command-line tool.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EkStatus {
    Ok = 0,
    /// Unreadable input: bad JSON, bad UTF-8, wrong lengths.
    Parse = 1,
    /// The input is readable but fails a hypothesis (axioms, *-hom checks, caps).
    Invalid = 2,
    /// Internal consistency check failed.
    Inconsistent = 3,
    NullArgument = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
}

/// A finite groupoid.
pub struct EkGroupoid {
    inner: Arc<FiniteGroupoid>,
}

/// A linear map between reduced groupoid C*-algebras in the delta bases.
pub struct EkHom {
    inner: HomMatrix,
}

struct Failure(EkStatus, String);

impl Failure {
    fn new(status: EkStatus, message: impl std::fmt::Display) -> Failure {
        Failure(status, message.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

/// Run `body`, recording any failure and converting panics.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> EkStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => EkStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("panic inside etale-kit");
            EkStatus::Panic
        }
    }
}

fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: callers promise that non-null pointers are valid for reads.
    unsafe { p.as_ref() }.ok_or_else(|| Failure::new(EkStatus::NullArgument, format!("{what} is null")))
}

fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: callers promise that non-null out-pointers are valid for writes.
    unsafe { p.as_mut() }.ok_or_else(|| Failure::new(EkStatus::NullArgument, format!("{what} is null")))
}

fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    non_null(p, what)?;
    // SAFETY: non-null and, per the caller, NUL-terminated.
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|e| Failure::new(EkStatus::Parse, format!("{what}: {e}")))
}

fn give_string(text: String) -> *mut c_char {
    CString::new(text).expect("JSON has no NUL bytes").into_raw()
}

fn give_groupoid(g: Arc<FiniteGroupoid>) -> *mut EkGroupoid {
    Box::into_raw(Box::new(EkGroupoid { inner: g }))
}

fn read_complex(re: *const f64, im: *const f64, len: usize) -> Result<Vec<Complex64>, Failure> {
    if len == 0 {
        return Ok(Vec::new());
    }
    non_null(re, "re")?;
    // SAFETY: non-null and, per the caller, `len` readable doubles.
    let re = unsafe { std::slice::from_raw_parts(re, len) };
    let im = if im.is_null() {
        vec![0.0; len]
    } else {
        // SAFETY: as above.
        unsafe { std::slice::from_raw_parts(im, len) }.to_vec()
    };
    Ok(re.iter().zip(im).map(|(&x, y)| Complex64::new(x, y)).collect())
}

/// Message for the last failure on this thread, or NULL. The pointer stays
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn ek_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Release a string returned by the library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn ek_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: produced by `CString::into_raw` in `give_string`.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parse a groupoid document and check the axioms.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ek_groupoid_from_json(json: *const c_char, out: *mut *mut EkGroupoid) -> EkStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let text = read_str(json, "json")?;
        let (_, g) = load_groupoid(text).map_err(|e| Failure::new(status_of_io(e.exit_code()), e))?;
        *out = give_groupoid(g);
        Ok(())
    })
}

fn status_of_io(code: i32) -> EkStatus {
    if code == 2 {
        EkStatus::Invalid
    } else {
        EkStatus::Parse
    }
}

/// Build a standard family from a spec such as `{"family":"pair","params":3}`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ek_groupoid_from_family(spec: *const c_char, out: *mut *mut EkGroupoid) -> EkStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let spec: FamilySpec =
            serde_json::from_str(read_str(spec, "spec")?).map_err(|e| Failure::new(EkStatus::Parse, e))?;
        let g = make_family(&spec).map_err(|e| Failure::new(EkStatus::Invalid, e))?;
        *out = give_groupoid(Arc::new(g));
        Ok(())
    })
}

/// # Safety
/// `g` must come from this library and not have been freed already. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn ek_groupoid_free(g: *mut EkGroupoid) {
    if !g.is_null() {
        // SAFETY: produced by `Box::into_raw` in `give_groupoid`.
        drop(unsafe { Box::from_raw(g) });
    }
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ek_groupoid_arrow_count(g: *const EkGroupoid, out: *mut usize) -> EkStatus {
    guard(|| {
        *out_ptr(out, "out")? = non_null(g, "groupoid")?.inner.arrow_count();
        Ok(())
    })
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ek_groupoid_unit_count(g: *const EkGroupoid, out: *mut usize) -> EkStatus {
    guard(|| {
        *out_ptr(out, "out")? = non_null(g, "groupoid")?.inner.units().len();
        Ok(())
    })
}

/// Whether the isotropy interior is just the unit space.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ek_groupoid_is_effective(g: *const EkGroupoid, out: *mut bool) -> EkStatus {
    guard(|| {
        *out_ptr(out, "out")? = non_null(g, "groupoid")?.inner.is_effective();
        Ok(())
    })
}

/// Canonical JSON document of the groupoid. Free with [`ek_string_free`].
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ek_groupoid_to_json(g: *const EkGroupoid, out: *mut *mut c_char) -> EkStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = give_string(GroupoidDocument::from_groupoid(&non_null(g, "groupoid")?.inner, None).to_json());
        Ok(())
    })
}

/// Check raw tables against the axioms. Returns `EK_STATUS_INVALID` when any
/// axiom fails; `report` (may be NULL) receives the list of violations.
///
/// # Safety
/// `json` must be a NUL-terminated string; `report` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn ek_validate_json(json: *const c_char, report: *mut *mut c_char) -> EkStatus {
    guard(|| {
        let doc = GroupoidDocument::parse(read_str(json, "json")?).map_err(|e| Failure::new(EkStatus::Parse, e))?;
        let (passed, body) = match validate(&doc.tables) {
            Ok(r) => (r.passed(), json!({ "structural": null, "violations": r.violations })),
            Err(e) => (false, json!({ "structural": e.to_string(), "violations": [] })),
        };
        if !report.is_null() {
            // SAFETY: non-null and writable per the caller.
            unsafe { *report = give_string(to_canonical_json(&body)) };
        }
        if passed {
            Ok(())
        } else {
            Err(Failure::new(EkStatus::Invalid, "groupoid axioms fail"))
        }
    })
}

/// Number of bisections, the empty one included. Fails with
/// `EK_STATUS_INVALID` above `cap` arrows.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ek_bisection_count(g: *const EkGroupoid, cap: usize, out: *mut usize) -> EkStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let bis = enumerate_bisections(&non_null(g, "groupoid")?.inner, cap)
            .map_err(|e| Failure::new(EkStatus::Invalid, e))?;
        *out = bis.len();
        Ok(())
    })
}

/// Reduced norm of the element with coefficients `re + i·im` (one per arrow).
/// `im` may be NULL for a real element.
///
/// # Safety
/// `g` must be a live handle; `re` (and `im` unless NULL) must hold `len`
/// doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ek_reduced_norm(
    g: *const EkGroupoid,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut f64,
) -> EkStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let g = non_null(g, "groupoid")?;
        let f = AlgebraElement::new(g.inner.clone(), read_complex(re, im, len)?)
            .map_err(|e| Failure::new(EkStatus::Parse, e))?;
        *out = reduced_norm(&f);
        Ok(())
    })
}

/// A map `C*_r(source) → C*_r(target)` from row-major entries, one row per
/// target arrow. `im` may be NULL.
///
/// # Safety
/// Both groupoids must be live handles; `re` (and `im` unless NULL) must hold
/// `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ek_hom_new(
    source: *const EkGroupoid,
    target: *const EkGroupoid,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut EkHom,
) -> EkStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let (g, h) = (&non_null(source, "source")?.inner, &non_null(target, "target")?.inner);
        let (rows, cols) = (h.arrow_count(), g.arrow_count());
        if len != rows * cols {
            return Err(Failure::new(EkStatus::Parse, format!("expected {rows}x{cols} entries, got {len}")));
        }
        let values = read_complex(re, im, len)?;
        let m = HomMatrix::new(g.clone(), h.clone(), DMatrix::from_row_slice(rows, cols, &values))
            .map_err(|e| Failure::new(EkStatus::Parse, e))?;
        *out = Box::into_raw(Box::new(EkHom { inner: m }));
        Ok(())
    })
}

/// # Safety
/// `m` must come from this library and not have been freed already. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn ek_hom_free(m: *mut EkHom) {
    if !m.is_null() {
        // SAFETY: produced by `Box::into_raw`.
        drop(unsafe { Box::from_raw(m) });
    }
}

/// Recover `(F, Phi, c)` from a *-homomorphism into an effective groupoid.
/// On success `out` receives a JSON object with keys `F`, `Phi`, `c` and
/// `sigma`; free it with [`ek_string_free`].
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ek_decompose(m: *const EkHom, out: *mut *mut c_char) -> EkStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let data = decompose(&non_null(m, "hom")?.inner).map_err(|e| {
            let status = match e.exit_code() {
                1 => EkStatus::Parse,
                3 => EkStatus::Inconsistent,
                _ => EkStatus::Invalid,
            };
            Failure::new(status, e)
        })?;
        let body = json!({
            "F": data.f().members(),
            "sigma": data.sigma(),
            "Phi": data.phi_table(),
            "c": data.cocycle_table().into_iter().map(|(a, p)| json!([a, p.to_string()])).collect::<Vec<_>>(),
        });
        *out = give_string(to_canonical_json(&body));
        Ok(())
    })
}

/// The quotient `H/Iso(H)°` and the fibre-summing map onto it.
///
/// # Safety
/// `h` must be a live handle; both out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ek_quotient_star_hom(
    h: *const EkGroupoid,
    quotient: *mut *mut EkGroupoid,
    hom: *mut *mut EkHom,
) -> EkStatus {
    guard(|| {
        let quotient = out_ptr(quotient, "quotient")?;
        let hom = out_ptr(hom, "hom")?;
        let (q, m) = quotient_star_hom(&non_null(h, "groupoid")?.inner);
        *quotient = give_groupoid(q.groupoid);
        *hom = Box::into_raw(Box::new(EkHom { inner: m }));
        Ok(())
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ek_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
