//! C interface to `hcs-core`.
//!
//! Every function returns an [`HcsStatus`]; on failure the out-parameters are
//! left untouched and [`hcs_last_error`] describes what went wrong on the
//! calling thread. States are opaque handles released with
//! [`hcs_state_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hcs_core::algebra::{check_commutators, FockSpace};
use hcs_core::basis::{eigenstate, QuantumNumbers};
use hcs_core::coherent::{evolve, overlap_params, CoherentState};
use hcs_core::geometry::{CVec3, ParabolicPoint};
use hcs_core::observables::{expect_position, expect_r};
use hcs_core::specfun::laguerre;
use hcs_core::Error;
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Inadmissible = 3,
    Singular = 4,
    NotConverged = 5,
    NumericalFailure = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HcsComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for HcsComplex {
    fn from(c: Complex64) -> Self {
        HcsComplex { re: c.re, im: c.im }
    }
}

/// A normalized coherent state.
pub struct HcsState {
    inner: CoherentState,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

fn status_of(err: &Error) -> HcsStatus {
    match err {
        Error::Inadmissible(_) | Error::InadmissibleSample { .. } => HcsStatus::Inadmissible,
        Error::SingularParameter { .. } => HcsStatus::Singular,
        Error::NotConverged { .. } => HcsStatus::NotConverged,
        Error::RootFinding { .. } | Error::Overflow { .. } => HcsStatus::NumericalFailure,
        _ => HcsStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

/// Runs `body`, converting errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> HcsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            HcsStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(&format!("null pointer passed as {what}"));
            HcsStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let text = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("internal panic: {text}"));
            HcsStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(ptr: *const T, what: &'static str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out<'a, T>(ptr: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    ptr.as_mut().ok_or(Failure::Null(what))
}

unsafe fn read_array<const N: usize>(ptr: *const f64, what: &'static str) -> Result<[f64; N], Failure> {
    if ptr.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::array::from_fn(|i| *ptr.add(i)))
}

unsafe fn write_array<const N: usize>(ptr: *mut f64, what: &'static str, values: [f64; N]) -> Result<(), Failure> {
    if ptr.is_null() {
        return Err(Failure::Null(what));
    }
    std::ptr::copy_nonoverlapping(values.as_ptr(), ptr, N);
    Ok(())
}

fn point(x: f64, y: f64, z: f64) -> Result<ParabolicPoint, Failure> {
    if !(x.is_finite() && y.is_finite() && z.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite point ({x}, {y}, {z})")).into());
    }
    Ok(ParabolicPoint::from_cartesian(x, y, z))
}

fn boxed(inner: CoherentState, handle: &mut *mut HcsState) {
    *handle = Box::into_raw(Box::new(HcsState { inner }));
}

/// Creates the state with parameter `u = u_re + i u_im`.
///
/// # Safety
/// `u_re` and `u_im` must point to three doubles; `out_state` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hcs_state_new(u_re: *const f64, u_im: *const f64, out_state: *mut *mut HcsState) -> HcsStatus {
    guard(|| {
        let re = read_array::<3>(u_re, "u_re")?;
        let im = read_array::<3>(u_im, "u_im")?;
        let handle = out(out_state, "out_state")?;
        if re.iter().chain(&im).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite component of u".into()).into());
        }
        boxed(CoherentState::new(CVec3::from_parts(re, im))?, handle);
        Ok(())
    })
}

/// Releases a state. Null is ignored.
///
/// # Safety
/// `state` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hcs_state_free(state: *mut HcsState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// `ψ_u(x, y, z)`.
///
/// # Safety
/// `state` must be a live handle; `out_*` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hcs_state_amplitude(
    state: *const HcsState,
    x: f64,
    y: f64,
    z: f64,
    out_value: *mut HcsComplex,
) -> HcsStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let dst = out(out_value, "out_value")?;
        *dst = s.inner.amplitude(&point(x, y, z)?).into();
        Ok(())
    })
}

/// The four-vector `w = Im l`.
///
/// # Safety
/// `state` must be a live handle; `out_*` must point to four writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hcs_state_w(state: *const HcsState, out_w: *mut f64) -> HcsStatus {
    guard(|| {
        let s = deref(state, "state")?;
        write_array(out_w, "out_w", *s.inner.param().w())
    })
}

/// `w·w`.
///
/// # Safety
/// `state` must be a live handle; `out_*` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hcs_state_ww(state: *const HcsState, out_ww: *mut f64) -> HcsStatus {
    guard(|| {
        let s = deref(state, "state")?;
        *out(out_ww, "out_ww")? = s.inner.param().ww();
        Ok(())
    })
}

/// `⟨x⟩`.
///
/// # Safety
/// `state` must be a live handle; `out_*` must point to three writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hcs_state_expect_position(state: *const HcsState, out_x: *mut f64) -> HcsStatus {
    guard(|| {
        let s = deref(state, "state")?;
        if out_x.is_null() {
            return Err(Failure::Null("out_x"));
        }
        write_array(out_x, "out_x", expect_position(s.inner.param().u())?)
    })
}

/// `⟨r⟩` as `2w⁰/(w·w)`.
///
/// # Safety
/// `state` must be a live handle; `out_*` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hcs_state_expect_r(state: *const HcsState, out_r: *mut f64) -> HcsStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let dst = out(out_r, "out_r")?;
        *dst = expect_r(s.inner.param().u())?;
        Ok(())
    })
}

/// New state evolved by fictitious time `eps`; the input is unchanged.
///
/// # Safety
/// `state` must be a live handle; `out_state` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hcs_state_evolve(state: *const HcsState, eps: f64, out_state: *mut *mut HcsState) -> HcsStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let handle = out(out_state, "out_state")?;
        if !eps.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite time {eps}")).into());
        }
        boxed(CoherentState::new(evolve(s.inner.param().u(), eps))?, handle);
        Ok(())
    })
}

/// `⟨a|b⟩`.
///
/// # Safety
/// `a` and `b` must be live handles; `out_*` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hcs_overlap(a: *const HcsState, b: *const HcsState, out_value: *mut HcsComplex) -> HcsStatus {
    guard(|| {
        let a = deref(a, "a")?;
        let b = deref(b, "b")?;
        *out(out_value, "out_value")? = overlap_params(a.inner.param(), b.inner.param()).into();
        Ok(())
    })
}

/// `L_n^α(x)`.
///
/// # Safety
/// `out_*` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hcs_laguerre(n: u32, alpha: u32, x: f64, out_value: *mut f64) -> HcsStatus {
    guard(|| {
        let dst = out(out_value, "out_value")?;
        if !x.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite argument {x}")).into());
        }
        *dst = laguerre(n, alpha, x);
        Ok(())
    })
}

/// `⟨x|n₁ n₂ m⟩`.
///
/// # Safety
/// `out_*` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hcs_eigenstate(
    n1: u32,
    n2: u32,
    m: i32,
    x: f64,
    y: f64,
    z: f64,
    out_value: *mut HcsComplex,
) -> HcsStatus {
    guard(|| {
        let dst = out(out_value, "out_value")?;
        *dst = eigenstate(&QuantumNumbers::new(n1, n2, m), &point(x, y, z)?).into();
        Ok(())
    })
}

/// Largest commutation-relation residual over all generator pairs at the
/// given Fock cutoff.
///
/// # Safety
/// `out_*` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hcs_commutator_max_residual(cutoff: u32, out_value: *mut f64) -> HcsStatus {
    guard(|| {
        let dst = out(out_value, "out_value")?;
        if cutoff > 24 {
            return Err(Error::InvalidArgument(format!("cutoff {cutoff} exceeds 24")).into());
        }
        *dst = check_commutators(&FockSpace::new(cutoff))?.max_residual();
        Ok(())
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn hcs_status_message(status: HcsStatus) -> *const c_char {
    let text: &'static [u8] = match status {
        HcsStatus::Ok => b"ok\0",
        HcsStatus::NullPointer => b"null pointer argument\0",
        HcsStatus::InvalidArgument => b"invalid argument\0",
        HcsStatus::Inadmissible => b"inadmissible coherent-state parameter\0",
        HcsStatus::Singular => b"singular parameter\0",
        HcsStatus::NotConverged => b"not converged\0",
        HcsStatus::NumericalFailure => b"numerical failure\0",
        HcsStatus::Panic => b"internal panic\0",
    };
    text.as_ptr().cast()
}

/// Message for the last call on this thread; empty after a success. Valid
/// until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn hcs_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}
