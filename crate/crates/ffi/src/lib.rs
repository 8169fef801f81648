//! C ABI over `hybrid_cv`.
//!
//! Every fallible call returns an [`HcvStatus`]; on failure a message is kept
//! per thread and can be read with [`hcv_last_error`]. States are opaque
//! handles created by `hcv_state_*` constructors and released with
//! [`hcv_state_free`]. Strings returned to the caller are released with
//! [`hcv_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hybrid_cv::entanglement::{closed_form_criterion, duan_criterion, LoModel, MeasurementCombination};
use hybrid_cv::observables::Dof;
use hybrid_cv::states::{build, verify_factorization, Construction, CylindricalStateSpec};
use hybrid_cv::vector_modes::{schmidt_of_matrix, CylindricalKind};
use hybrid_cv::{Error, GaussianState};
use libc::c_char;
use nalgebra::Matrix2;
use num_complex::Complex64;

pub const HCV_KIND_RADIAL: u32 = 0;
pub const HCV_KIND_AZIMUTHAL: u32 = 1;

pub const HCV_DOF_POL: u32 = 0;
pub const HCV_DOF_SPA: u32 = 1;

pub const HCV_CONSTRUCTION_COMPOSITE: u32 = 0;
pub const HCV_CONSTRUCTION_FACTORED: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcvStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    TruncationNotConverged = 3,
    Unsupported = 4,
    CriterionDegenerate = 5,
    UndefinedReference = 6,
    UnreachableTarget = 7,
    Json = 8,
    Io = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

/// Opaque Gaussian state.
pub struct HcvGaussianState {
    inner: GaussianState,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HcvDuanReport {
    /// Normalized criterion value; below 1 means entangled.
    pub lhs: f64,
    /// Mean over both arms of `|<S_kappa>|`.
    pub stokes_cov_bound: f64,
    pub entangled: bool,
    pub warn_asymmetric: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> HcvStatus {
    match e {
        Error::InvalidArgument(_) => HcvStatus::InvalidArgument,
        Error::TruncationNotConverged { .. } => HcvStatus::TruncationNotConverged,
        Error::Unsupported(_) => HcvStatus::Unsupported,
        Error::CriterionDegenerate => HcvStatus::CriterionDegenerate,
        Error::UndefinedReference(_) => HcvStatus::UndefinedReference,
        Error::UnreachableTarget { .. } => HcvStatus::UnreachableTarget,
        Error::Json(_) => HcvStatus::Json,
        Error::Io(_) => HcvStatus::Io,
    }
}

/// Runs `f`, records any error or panic, and maps it to a status.
fn guard<F>(f: F) -> HcvStatus
where
    F: FnOnce() -> Result<(), HcvFail>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            HcvStatus::Ok
        }
        Ok(Err(HcvFail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HcvStatus::Panic
        }
    }
}

struct HcvFail(HcvStatus, String);

impl From<Error> for HcvFail {
    fn from(e: Error) -> Self {
        HcvFail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> HcvFail {
    HcvFail(HcvStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> HcvFail {
    HcvFail(HcvStatus::InvalidArgument, msg.into())
}

fn kind_of(kind: u32) -> Result<CylindricalKind, HcvFail> {
    match kind {
        HCV_KIND_RADIAL => Ok(CylindricalKind::Radial),
        HCV_KIND_AZIMUTHAL => Ok(CylindricalKind::Azimuthal),
        other => Err(invalid(format!("unknown mode kind {other}"))),
    }
}

fn dof_of(dof: u32) -> Result<Dof, HcvFail> {
    match dof {
        HCV_DOF_POL => Ok(Dof::Pol),
        HCV_DOF_SPA => Ok(Dof::Spa),
        other => Err(invalid(format!("unknown degree of freedom {other}"))),
    }
}

unsafe fn state_ref<'a>(state: *const HcvGaussianState) -> Result<&'a HcvGaussianState, HcvFail> {
    // SAFETY: non-null handles come from Box::into_raw in this crate
    unsafe { state.as_ref() }.ok_or_else(|| null("state"))
}

unsafe fn state_mut<'a>(state: *mut HcvGaussianState) -> Result<&'a mut HcvGaussianState, HcvFail> {
    // SAFETY: as above, and the caller holds the only reference
    unsafe { state.as_mut() }.ok_or_else(|| null("state"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), HcvFail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: checked non-null; caller provides writable storage
    unsafe { out.write(value) };
    Ok(())
}

fn into_handle(state: GaussianState) -> *mut HcvGaussianState {
    Box::into_raw(Box::new(HcvGaussianState { inner: state }))
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn hcv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hcv_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: the caller guarantees `s` came from CString::into_raw
        drop(unsafe { CString::from_raw(s) });
    }
}

/// # Safety
/// `state` must be NULL or a handle returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hcv_state_free(state: *mut HcvGaussianState) {
    if !state.is_null() {
        // SAFETY: the caller guarantees `state` came from Box::into_raw
        drop(unsafe { Box::from_raw(state) });
    }
}

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn hcv_state_vacuum(num_modes: usize, out: *mut *mut HcvGaussianState) -> HcvStatus {
    guard(|| {
        let state = GaussianState::vacuum(num_modes)?;
        unsafe { write_out(out, into_handle(state)) }
    })
}

/// Parses `{"num_modes": n, "mean": [...], "cov": [[...], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn hcv_state_from_json(json: *const c_char, out: *mut *mut HcvGaussianState) -> HcvStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        // SAFETY: the caller guarantees a NUL-terminated string
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .map_err(|e| HcvFail(HcvStatus::Json, format!("json is not UTF-8: {e}")))?;
        let state = GaussianState::from_json(text)?;
        unsafe { write_out(out, into_handle(state)) }
    })
}

/// JSON form of the state; free it with [`hcv_string_free`].
///
/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hcv_state_to_json(state: *const HcvGaussianState, out: *mut *mut c_char) -> HcvStatus {
    guard(|| {
        let s = unsafe { state_ref(state) }?;
        let text = CString::new(s.inner.to_json()).map_err(|e| HcvFail(HcvStatus::Json, e.to_string()))?;
        unsafe { write_out(out, text.into_raw()) }
    })
}

/// Number of modes, or 0 for a NULL handle.
///
/// # Safety
/// `state` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hcv_state_num_modes(state: *const HcvGaussianState) -> usize {
    unsafe { state.as_ref() }.map_or(0, |s| s.inner.num_modes())
}

/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hcv_state_displace(state: *mut HcvGaussianState, mode: usize, re: f64, im: f64) -> HcvStatus {
    guard(|| {
        let s = unsafe { state_mut(state) }?;
        s.inner = s.inner.displace(mode, Complex64::new(re, im))?;
        Ok(())
    })
}

/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hcv_state_squeeze(state: *mut HcvGaussianState, mode: usize, re: f64, im: f64) -> HcvStatus {
    guard(|| {
        let s = unsafe { state_mut(state) }?;
        s.inner = s.inner.squeeze(mode, Complex64::new(re, im))?;
        Ok(())
    })
}

/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hcv_state_two_mode_squeeze(
    state: *mut HcvGaussianState,
    mode_i: usize,
    mode_j: usize,
    re: f64,
    im: f64,
) -> HcvStatus {
    guard(|| {
        let s = unsafe { state_mut(state) }?;
        s.inner = s.inner.two_mode_squeeze(mode_i, mode_j, Complex64::new(re, im))?;
        Ok(())
    })
}

/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hcv_state_attenuate(state: *mut HcvGaussianState, mode: usize, eta: f64) -> HcvStatus {
    guard(|| {
        let s = unsafe { state_mut(state) }?;
        s.inner = s.inner.attenuate(mode, eta)?;
        Ok(())
    })
}

/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hcv_state_is_physical(state: *const HcvGaussianState, tol: f64, out: *mut bool) -> HcvStatus {
    guard(|| {
        let s = unsafe { state_ref(state) }?;
        unsafe { write_out(out, s.inner.is_physical(tol)) }
    })
}

/// Copies the `2n` means `(x0, p0, x1, p1, ...)` into `buf`.
///
/// # Safety
/// `state` must be a live handle and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hcv_state_mean(state: *const HcvGaussianState, buf: *mut f64, len: usize) -> HcvStatus {
    guard(|| {
        let s = unsafe { state_ref(state) }?;
        unsafe { copy_out(s.inner.mean().as_slice(), buf, len) }
    })
}

/// Copies the `2n × 2n` covariance matrix into `buf`, row-major.
///
/// # Safety
/// `state` must be a live handle and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hcv_state_cov(state: *const HcvGaussianState, buf: *mut f64, len: usize) -> HcvStatus {
    guard(|| {
        let s = unsafe { state_ref(state) }?;
        // the covariance is symmetric, so column-major storage reads row-major
        unsafe { copy_out(s.inner.cov().as_slice(), buf, len) }
    })
}

unsafe fn copy_out(values: &[f64], buf: *mut f64, len: usize) -> Result<(), HcvFail> {
    if buf.is_null() {
        return Err(null("buffer"));
    }
    if len < values.len() {
        return Err(HcvFail(
            HcvStatus::BufferTooSmall,
            format!("buffer holds {len} values, need {}", values.len()),
        ));
    }
    // SAFETY: caller guarantees `len` writable doubles at `buf`
    unsafe { ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len()) };
    Ok(())
}

/// Bright squeezed cylindrical state on its two constituent modes.
///
/// # Safety
/// `out` must be a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn hcv_state_build_cylindrical(
    kind: u32,
    alpha_re: f64,
    alpha_im: f64,
    zeta_re: f64,
    zeta_im: f64,
    construction: u32,
    out: *mut *mut HcvGaussianState,
) -> HcvStatus {
    guard(|| {
        let construction = match construction {
            HCV_CONSTRUCTION_COMPOSITE => Construction::Composite,
            HCV_CONSTRUCTION_FACTORED => Construction::Factored,
            other => return Err(invalid(format!("unknown construction {other}"))),
        };
        let spec = CylindricalStateSpec::new(
            kind_of(kind)?,
            Complex64::new(alpha_re, alpha_im),
            Complex64::new(zeta_re, zeta_im),
            construction,
        );
        let state = build(&spec)?;
        unsafe { write_out(out, into_handle(state)) }
    })
}

/// Largest element-wise gap between the composite and factored constructions.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hcv_verify_factorization(
    kind: u32,
    alpha_re: f64,
    alpha_im: f64,
    zeta_re: f64,
    zeta_im: f64,
    out: *mut f64,
) -> HcvStatus {
    guard(|| {
        let d = verify_factorization(
            kind_of(kind)?,
            Complex64::new(alpha_re, alpha_im),
            Complex64::new(zeta_re, zeta_im),
        )?;
        unsafe { write_out(out, d) }
    })
}

/// `e^{-s} cosh s`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hcv_closed_form(s: f64, out: *mut f64) -> HcvStatus {
    guard(|| {
        let v = closed_form_criterion(s)?;
        unsafe { write_out(out, v) }
    })
}

/// Strong-auxiliary inseparability criterion on a two-mode signal state,
/// auxiliary phases locked to a beam of `kind`.
///
/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn hcv_duan_linearized(
    state: *const HcvGaussianState,
    kind: u32,
    mu: u8,
    nu: u8,
    dof_a: u32,
    dof_b: u32,
    lo_amplitude: f64,
    out: *mut HcvDuanReport,
) -> HcvStatus {
    guard(|| {
        let s = unsafe { state_ref(state) }?;
        let comb = MeasurementCombination::new(mu, nu, dof_of(dof_a)?, dof_of(dof_b)?)?;
        let r = duan_criterion(&s.inner, &comb, &LoModel::linearized(kind_of(kind)?, lo_amplitude))?;
        unsafe {
            write_out(
                out,
                HcvDuanReport {
                    lhs: r.lhs,
                    stokes_cov_bound: r.stokes_cov_bound,
                    entangled: r.entangled,
                    warn_asymmetric: r.warn_asymmetric,
                },
            )
        }
    })
}

/// Schmidt weights of a 2×2 (polarization × spatial) amplitude matrix given
/// as 8 doubles `re, im` row-major. Writes two weights in non-increasing
/// order and the Schmidt number.
///
/// # Safety
/// `coeffs` must hold 8 doubles, `lambdas` room for 2, `rank` one.
#[no_mangle]
pub unsafe extern "C" fn hcv_schmidt(coeffs: *const f64, lambdas: *mut f64, rank: *mut f64) -> HcvStatus {
    guard(|| {
        if coeffs.is_null() {
            return Err(null("coeffs"));
        }
        if lambdas.is_null() {
            return Err(null("lambdas"));
        }
        // SAFETY: caller guarantees 8 readable doubles
        let c = unsafe { std::slice::from_raw_parts(coeffs, 8) };
        let m = Matrix2::from_fn(|p, s| Complex64::new(c[2 * (2 * p + s)], c[2 * (2 * p + s) + 1]));
        let d = schmidt_of_matrix(&m)?;
        unsafe { copy_out(&d.lambdas, lambdas, 2) }?;
        unsafe { write_out(rank, d.schmidt_rank) }
    })
}
