//! C ABI over the resolventlab core. Every fallible call returns an `RlStatus`;
//! on failure the message is kept per thread and read back with
//! `rl_last_error_message`. Models are opaque handles released by
//! `rl_model_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use resolventlab::cplx::C64;
use resolventlab::probe::l2_resolvent_norm;
use resolventlab::region::{dist_to_sector_boundary, xi_membership, SectorParams};
use resolventlab::residue::fourier_transform_mz;
use resolventlab::spectra::{build_torus_model, build_zoll_model, counting_function, ModelSpectrum, ZollParams};
use resolventlab::symbol::Symbol;
use resolventlab::LabError;

/// Status codes. Values 1 to 9 match the library error kinds.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlStatus {
    Ok = 0,
    InvalidParameter = 1,
    OutsideSector = 2,
    SpectralCollision = 3,
    CutoffProximity = 4,
    NoEigenfunctions = 5,
    NoSymbol = 6,
    QuadratureNonConvergence = 7,
    Parse = 8,
    Io = 9,
    NullPointer = 10,
    Panic = 11,
}

impl From<&LabError> for RlStatus {
    fn from(e: &LabError) -> Self {
        match e.code() {
            1 => RlStatus::InvalidParameter,
            2 => RlStatus::OutsideSector,
            3 => RlStatus::SpectralCollision,
            4 => RlStatus::CutoffProximity,
            5 => RlStatus::NoEigenfunctions,
            6 => RlStatus::NoSymbol,
            7 => RlStatus::QuadratureNonConvergence,
            8 => RlStatus::Parse,
            _ => RlStatus::Io,
        }
    }
}

/// Opaque model spectrum.
pub struct RlModel {
    inner: ModelSpectrum,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), (RlStatus, String)>) -> RlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RlStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RlStatus::Panic
        }
    }
}

fn lab(e: LabError) -> (RlStatus, String) {
    (RlStatus::from(&e), e.to_string())
}

fn null(what: &str) -> (RlStatus, String) {
    (RlStatus::NullPointer, format!("{what} is null"))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (truncated,
/// always NUL-terminated). Returns the full message length, 0 if none.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null.
#[no_mangle]
pub unsafe extern "C" fn rl_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            0
        }
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Fourier transform of `1/(tau^m - z^m)` at time `t`.
///
/// # Safety
/// `out_re` and `out_im` must be valid writable pointers.
#[no_mangle]
pub unsafe extern "C" fn rl_residue_transform(
    t: f64,
    z_re: f64,
    z_im: f64,
    m: u32,
    out_re: *mut f64,
    out_im: *mut f64,
) -> RlStatus {
    guard(|| {
        if out_re.is_null() || out_im.is_null() {
            return Err(null("output"));
        }
        let v = fourier_transform_mz(t, C64::new(z_re, z_im), m).map_err(lab)?;
        *out_re = v.re;
        *out_im = v.im;
        Ok(())
    })
}

/// Membership in the delta-region of the sector and distance to its boundary.
///
/// # Safety
/// `out_member` and `out_dist` must be valid writable pointers.
#[no_mangle]
pub unsafe extern "C" fn rl_region_member(
    m: u32,
    delta: f64,
    z_re: f64,
    z_im: f64,
    out_member: *mut bool,
    out_dist: *mut f64,
) -> RlStatus {
    guard(|| {
        if out_member.is_null() || out_dist.is_null() {
            return Err(null("output"));
        }
        let z = C64::new(z_re, z_im);
        let params = SectorParams::new(m, delta).map_err(lab)?;
        *out_member = xi_membership(z, params);
        *out_dist = dist_to_sector_boundary(z, m).map_err(lab)?;
        Ok(())
    })
}

fn store(out: *mut *mut RlModel, model: ModelSpectrum) {
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(RlModel { inner: model })) };
}

/// Flat torus with the Euclidean symbol, eigenvalues of `Q` up to `cutoff`.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_model_torus(n: usize, m: u32, cutoff: f64, out: *mut *mut RlModel) -> RlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let model = build_torus_model(n, m, Symbol::Euclid, cutoff, None).map_err(lab)?;
        store(out, model);
        Ok(())
    })
}

/// Zoll model with clusters `0..=k_max`.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_model_zoll(n: usize, m: u32, k_max: usize, out: *mut *mut RlModel) -> RlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let model = build_zoll_model(ZollParams::new(n, m, k_max)).map_err(lab)?;
        store(out, model);
        Ok(())
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from a constructor above and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rl_model_free(model: *mut RlModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Eigenvalue count with multiplicity, `#{mu_j < alpha}`.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_model_count(model: *const RlModel, alpha: f64, out: *mut u64) -> RlStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = counting_function(&model.inner, alpha);
        Ok(())
    })
}

/// Exact L2 operator norm of the resolvent at `z^m`.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rl_l2_resolvent_norm(
    model: *const RlModel,
    z_re: f64,
    z_im: f64,
    out: *mut f64,
) -> RlStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = l2_resolvent_norm(&model.inner, C64::new(z_re, z_im)).map_err(lab)?.value;
        Ok(())
    })
}

/// Parses a complex literal such as `"1+2i"`.
///
/// # Safety
/// `text` must be a NUL-terminated string; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_parse_complex(text: *const c_char, out_re: *mut f64, out_im: *mut f64) -> RlStatus {
    guard(|| {
        if text.is_null() || out_re.is_null() || out_im.is_null() {
            return Err(null("argument"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| (RlStatus::Parse, "input is not UTF-8".to_string()))?;
        let z = resolventlab::cplx::parse_complex(s).map_err(lab)?;
        *out_re = z.re;
        *out_im = z.im;
        Ok(())
    })
}
