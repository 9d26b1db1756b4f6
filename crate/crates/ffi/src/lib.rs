//! C ABI for tfdyn.
//!
//! Every entry point returns a [`TfdStatus`]. On failure, the message is
//! available from `tfd_last_error_message` on the same thread. Handles are
//! opaque and must be released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tfdyn::gaussian::{self, Covariance4, SqueezeSpec};
use tfdyn::scenario::{self, SweepConfig, SweepRow};
use tfdyn::su11::{self, SU11Coeffs};
use tfdyn::{hartree_fock, Error, C64};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfdStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    Config = 3,
    Numerical = 4,
    Unphysical = 5,
    UnstableRegime = 6,
    Degenerate = 7,
    TruncationOverflow = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfdSweepKind {
    Negativity = 0,
    MutualInfo = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TfdComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for TfdComplex {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<TfdComplex> for C64 {
    fn from(z: TfdComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TfdSweepRow {
    pub t: f64,
    pub r_mag: f64,
    pub phi: f64,
    pub d_minus_tilde: f64,
    pub e_n: f64,
    pub i_m: f64,
}

impl From<&SweepRow> for TfdSweepRow {
    fn from(r: &SweepRow) -> Self {
        Self {
            t: r.t,
            r_mag: r.r_mag,
            phi: r.phi,
            d_minus_tilde: r.d_minus_tilde,
            e_n: r.e_n,
            i_m: r.i_m,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TfdGammaFactors {
    pub gamma_plus: TfdComplex,
    pub gamma3: TfdComplex,
    pub gamma_minus: TfdComplex,
    pub phi: TfdComplex,
    pub log_gamma3: TfdComplex,
}

/// Parsed, validated sweep configuration.
pub struct TfdSweepConfig(SweepConfig);

/// Rows of a finished sweep.
pub struct TfdSweepResult(Vec<SweepRow>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TfdStatus {
    match e {
        Error::Config(_) => TfdStatus::Config,
        Error::InvalidArgument(_)
        | Error::NonSquare { .. }
        | Error::DimensionMismatch { .. }
        | Error::NotHermitian { .. } => TfdStatus::InvalidArgument,
        Error::NumericalFailure(_) => TfdStatus::Numerical,
        Error::UnphysicalCovariance(_) => TfdStatus::Unphysical,
        Error::UnstableRegime { .. } => TfdStatus::UnstableRegime,
        Error::DegenerateFactorization { .. } => TfdStatus::Degenerate,
        Error::TruncationOverflow { .. } => TfdStatus::TruncationOverflow,
    }
}

struct Fail(TfdStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(TfdStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TfdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TfdStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            TfdStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn read_cov(sigma: *const f64) -> Result<Covariance4, Fail> {
    if sigma.is_null() {
        return Err(null("sigma"));
    }
    let flat = std::slice::from_raw_parts(sigma, 16);
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row.copy_from_slice(&flat[4 * i..4 * i + 4]);
    }
    Ok(Covariance4::new(m)?)
}

unsafe fn write_cov(sigma: &Covariance4, out: *mut f64) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    let flat = std::slice::from_raw_parts_mut(out, 16);
    for (i, row) in sigma.entries().iter().enumerate() {
        flat[4 * i..4 * i + 4].copy_from_slice(row);
    }
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn tfd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parse a JSON sweep configuration.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tfd_sweep_config_from_json(json: *const c_char, out: *mut *mut TfdSweepConfig) -> TfdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Fail(TfdStatus::InvalidArgument, format!("json is not UTF-8: {e}")))?;
        let cfg = SweepConfig::from_json(text)?;
        *out = Box::into_raw(Box::new(TfdSweepConfig(cfg)));
        Ok(())
    })
}

/// # Safety
/// `cfg` must come from `tfd_sweep_config_from_json` (or be NULL) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tfd_sweep_config_free(cfg: *mut TfdSweepConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Run a sweep over the configured time grid.
///
/// # Safety
/// `cfg` must be a live config handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tfd_sweep_run(
    cfg: *const TfdSweepConfig,
    kind: TfdSweepKind,
    out: *mut *mut TfdSweepResult,
) -> TfdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let cfg = &cfg.as_ref().ok_or_else(|| null("cfg"))?.0;
        let rows = match kind {
            TfdSweepKind::Negativity => scenario::run_negativity_sweep(cfg)?,
            TfdSweepKind::MutualInfo => scenario::run_mutualinfo_sweep(cfg)?,
        };
        *out = Box::into_raw(Box::new(TfdSweepResult(rows)));
        Ok(())
    })
}

/// Number of rows, 0 for NULL.
///
/// # Safety
/// `res` must be a live result handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn tfd_sweep_result_len(res: *const TfdSweepResult) -> usize {
    res.as_ref().map_or(0, |r| r.0.len())
}

/// # Safety
/// `res` must be a live result handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tfd_sweep_result_row(
    res: *const TfdSweepResult,
    index: usize,
    out: *mut TfdSweepRow,
) -> TfdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let rows = &res.as_ref().ok_or_else(|| null("res"))?.0;
        let row = rows.get(index).ok_or_else(|| {
            Fail(
                TfdStatus::InvalidArgument,
                format!("row {index} out of range ({} rows)", rows.len()),
            )
        })?;
        *out = row.into();
        Ok(())
    })
}

/// # Safety
/// `res` must come from `tfd_sweep_run` (or be NULL) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tfd_sweep_result_free(res: *mut TfdSweepResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

/// Two-mode squeezed vacuum covariance, row-major into `out[16]`.
///
/// # Safety
/// `out` must point to 16 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tfd_cov_two_mode_squeezed(r: f64, phi: f64, out: *mut f64) -> TfdStatus {
    guard(|| write_cov(&gaussian::cov_two_mode_squeezed(&SqueezeSpec::new(r, phi)?), out))
}

/// Covariance of two single-mode squeezed modes, row-major into `out[16]`.
///
/// # Safety
/// `out` must point to 16 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tfd_cov_two_single_mode_squeezed(r: f64, phi: f64, out: *mut f64) -> TfdStatus {
    guard(|| write_cov(&gaussian::cov_two_single_mode_squeezed(&SqueezeSpec::new(r, phi)?), out))
}

/// # Safety
/// `sigma` must point to 16 doubles (row-major); the outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn tfd_symplectic_eigs(
    sigma: *const f64,
    transposed: bool,
    d_plus: *mut f64,
    d_minus: *mut f64,
) -> TfdStatus {
    guard(|| {
        let (p, m) = (out_ref(d_plus, "d_plus")?, out_ref(d_minus, "d_minus")?);
        (*p, *m) = gaussian::symplectic_eigs(&read_cov(sigma)?, transposed)?;
        Ok(())
    })
}

/// # Safety
/// `sigma` must point to 16 doubles (row-major); `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tfd_log_negativity(sigma: *const f64, out: *mut f64) -> TfdStatus {
    guard(|| {
        *out_ref(out, "out")? = gaussian::log_negativity(&read_cov(sigma)?)?;
        Ok(())
    })
}

/// # Safety
/// `sigma` must point to 16 doubles (row-major); `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tfd_mutual_information(sigma: *const f64, out: *mut f64) -> TfdStatus {
    guard(|| {
        *out_ref(out, "out")? = gaussian::mutual_information(&read_cov(sigma)?)?;
        Ok(())
    })
}

/// Factor exp(ξ₃K₃ + ξ₊K₊ + ξ₋K₋) into normal order.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tfd_disentangle(
    xi3: TfdComplex,
    xi_plus: TfdComplex,
    xi_minus: TfdComplex,
    out: *mut TfdGammaFactors,
) -> TfdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let g = su11::disentangle(&SU11Coeffs::new(xi3.into(), xi_plus.into(), xi_minus.into()))?;
        *out = TfdGammaFactors {
            gamma_plus: g.gamma_plus.into(),
            gamma3: g.gamma3.into(),
            gamma_minus: g.gamma_minus.into(),
            phi: g.phi.into(),
            log_gamma3: g.log_gamma3.into(),
        };
        Ok(())
    })
}

/// Normalized Bogoliubov coefficients μ = m/√(m² − n²), ν = n/√(m² − n²).
///
/// # Safety
/// `mu` and `nu` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tfd_bogoliubov(
    m: TfdComplex,
    n: TfdComplex,
    mu: *mut TfdComplex,
    nu: *mut TfdComplex,
) -> TfdStatus {
    guard(|| {
        let (mu, nu) = (out_ref(mu, "mu")?, out_ref(nu, "nu")?);
        let (a, b) = hartree_fock::bogoliubov_coeffs(m.into(), n.into())?;
        (*mu, *nu) = (a.into(), b.into());
        Ok(())
    })
}

/// Run the oracle checks; `*out` receives a JSON report to be released with
/// `tfd_string_free`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tfd_oracle_validate(truncation: usize, r: f64, seed: u64, out: *mut *mut c_char) -> TfdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let report = scenario::run_oracle_validation(truncation, r, seed)?;
        let json = serde_json::to_string(&report).expect("report serializes");
        *out = CString::new(json).expect("json has no nul").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library (or be NULL) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tfd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
