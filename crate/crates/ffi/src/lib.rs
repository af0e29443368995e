//! C ABI for `yamabe_core`.
//!
//! Every fallible function returns a [`YamabeStatus`]. On anything but
//! `YAMABE_STATUS_OK` the message is available from [`yamabe_last_error`] on the
//! calling thread until the next failing call there. Handles are opaque, owned by
//! the caller and released with the matching `_free` function; `_free` accepts
//! NULL.
//!
//! Pointer contract for all functions: handle arguments are NULL or were returned
//! by this library and not yet freed; output pointers are NULL or point to
//! writable storage of the stated type; buffers hold at least `len` doubles.
//! NULL where a value is required yields `YAMABE_STATUS_NULL_POINTER`.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use yamabe_core::analysis::{self, AsymptoticReport, Status};
use yamabe_core::geometry::{self, GeometryCurves};
use yamabe_core::params::{self, BlowupCase, SolitonKind, SolitonParams};
use yamabe_core::profile::{self, ProfileStatus, RadialProfile, SolverSettings};
use yamabe_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YamabeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    OutsideTheorems = 3,
    NotBlowupRegime = 4,
    NotSoliton = 5,
    InvalidArgument = 6,
    OutOfRange = 7,
    Solver = 8,
    Io = 9,
    Serialization = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

impl From<&Error> for YamabeStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParams(_) => YamabeStatus::InvalidParams,
            Error::OutsideTheorems(_) => YamabeStatus::OutsideTheorems,
            Error::NotBlowupRegime { .. } => YamabeStatus::NotBlowupRegime,
            Error::NotSoliton(_) => YamabeStatus::NotSoliton,
            Error::InvalidArgument(_) | Error::Config(_) => YamabeStatus::InvalidArgument,
            Error::OutOfRange { .. } => YamabeStatus::OutOfRange,
            Error::TooFewPoints { .. } | Error::Solver { .. } => YamabeStatus::Solver,
            Error::Io { .. } => YamabeStatus::Io,
            Error::Csv(_) | Error::Json(_) => YamabeStatus::Serialization,
        }
    }
}

struct Failure(YamabeStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(YamabeStatus::from(&e), e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> YamabeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => YamabeStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            YamabeStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(YamabeStatus::NullPointer, format!("{name} is NULL"))
}

unsafe fn get<'a, T>(p: *const T, name: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn put<T>(out: *mut T, value: T, name: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_handle<T>(out: *mut *mut T, value: T) -> FfiResult<()> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

unsafe fn free_handle<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

unsafe fn copy_column(src: &[f64], buf: *mut f64, len: usize) -> FfiResult<()> {
    if buf.is_null() {
        return Err(null("buf"));
    }
    if len < src.len() {
        return Err(Failure(
            YamabeStatus::BufferTooSmall,
            format!("buffer holds {len} values, need {}", src.len()),
        ));
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// Message of the last failure on this thread, or NULL. Owned by the library.
#[no_mangle]
pub extern "C" fn yamabe_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn yamabe_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn yamabe_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/* parameters */

pub struct YamabeParams(SolitonParams);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YamabeParamValues {
    pub n: u32,
    pub m: f64,
    pub alpha: f64,
    pub beta: f64,
    /// NaN when `has_rho` is false.
    pub rho: f64,
    pub has_rho: bool,
    pub eta: f64,
}

unsafe fn new_params(p: SolitonParams, out: *mut *mut YamabeParams) -> YamabeStatus {
    guard(|| {
        let p = p.validated()?;
        put_handle(out, YamabeParams(p))
    })
}

/// Soliton with `m = (n-2)/(n+2)` and `alpha = (2 beta + rho)/(1-m)`.
#[no_mangle]
pub unsafe extern "C" fn yamabe_params_soliton(
    n: u32,
    beta: f64,
    rho: f64,
    eta: f64,
    out: *mut *mut YamabeParams,
) -> YamabeStatus {
    new_params(SolitonParams::soliton(n, beta, rho, eta), out)
}

/// Soliton given `alpha` instead of `rho`.
#[no_mangle]
pub unsafe extern "C" fn yamabe_params_soliton_from_alpha(
    n: u32,
    alpha: f64,
    beta: f64,
    eta: f64,
    out: *mut *mut YamabeParams,
) -> YamabeStatus {
    new_params(SolitonParams::soliton_from_alpha(n, alpha, beta, eta), out)
}

/// Any exponent `0 < m <= (n-2)/n`; no soliton constant.
#[no_mangle]
pub unsafe extern "C" fn yamabe_params_general(
    n: u32,
    m: f64,
    alpha: f64,
    beta: f64,
    eta: f64,
    out: *mut *mut YamabeParams,
) -> YamabeStatus {
    new_params(SolitonParams::general(n, m, alpha, beta, eta), out)
}

#[no_mangle]
pub unsafe extern "C" fn yamabe_params_values(p: *const YamabeParams, out: *mut YamabeParamValues) -> YamabeStatus {
    guard(|| {
        let p = get(p, "params")?.0;
        let values = YamabeParamValues {
            n: p.n,
            m: p.m,
            alpha: p.alpha,
            beta: p.beta,
            rho: p.rho.unwrap_or(f64::NAN),
            has_rho: p.rho.is_some(),
            eta: p.eta,
        };
        put(out, values, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn yamabe_params_free(p: *mut YamabeParams) {
    free_handle(p)
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YamabeSolitonKind {
    Shrinking,
    Steady,
    Expanding,
    NonSoliton,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct YamabeClass {
    pub kind: YamabeSolitonKind,
    /// Whether the asymptotic theorems apply.
    pub covered: bool,
}

#[no_mangle]
pub unsafe extern "C" fn yamabe_classify(p: *const YamabeParams, out: *mut YamabeClass) -> YamabeStatus {
    guard(|| {
        let class = params::classify(&get(p, "params")?.0);
        let kind = match class.variant {
            SolitonKind::Shrinking => YamabeSolitonKind::Shrinking,
            SolitonKind::Steady => YamabeSolitonKind::Steady,
            SolitonKind::Expanding => YamabeSolitonKind::Expanding,
            SolitonKind::NonSoliton => YamabeSolitonKind::NonSoliton,
        };
        put(
            out,
            YamabeClass {
                kind,
                covered: class.is_covered(),
            },
            "out",
        )
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YamabeBlowupCase {
    Case1,
    Case2,
    Case3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YamabeCertificate {
    pub case_tag: YamabeBlowupCase,
    /// False for Case 3; `c1` and `radius_bound` are then NaN.
    pub has_bound: bool,
    pub c1: f64,
    pub radius_bound: f64,
}

/// Certified blow-up radius; `YAMABE_STATUS_NOT_BLOWUP_REGIME` unless
/// `alpha < 0` and `beta <= 0`.
#[no_mangle]
pub unsafe extern "C" fn yamabe_blowup_certificate(
    p: *const YamabeParams,
    out: *mut YamabeCertificate,
) -> YamabeStatus {
    guard(|| {
        let cert = params::blowup_certificate(&get(p, "params")?.0)?;
        let case_tag = match cert.case_tag {
            BlowupCase::Case1 => YamabeBlowupCase::Case1,
            BlowupCase::Case2 => YamabeBlowupCase::Case2,
            BlowupCase::Case3 => YamabeBlowupCase::Case3,
        };
        let value = YamabeCertificate {
            case_tag,
            has_bound: cert.radius_bound.is_some(),
            c1: cert.c1.unwrap_or(f64::NAN),
            radius_bound: cert.radius_bound.unwrap_or(f64::NAN),
        };
        put(out, value, "out")
    })
}

/* profiles */

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YamabeSettings {
    pub rtol: f64,
    pub atol: f64,
    /// Start radius is `r0_scale * eta^((m-1)/2)`.
    pub r0_scale: f64,
    /// Steps never exceed `max_step_frac * r`.
    pub max_step_frac: f64,
}

#[no_mangle]
pub extern "C" fn yamabe_settings_default() -> YamabeSettings {
    let d = SolverSettings::default();
    YamabeSettings {
        rtol: d.rtol,
        atol: d.atol,
        r0_scale: d.r0_scale,
        max_step_frac: d.max_step_frac,
    }
}

unsafe fn settings(s: *const YamabeSettings) -> FfiResult<SolverSettings> {
    let Some(s) = s.as_ref() else {
        return Ok(SolverSettings::default());
    };
    let out = SolverSettings {
        rtol: s.rtol,
        atol: s.atol,
        r0_scale: s.r0_scale,
        max_step_frac: s.max_step_frac,
        ..SolverSettings::default()
    };
    out.check()?;
    Ok(out)
}

pub struct YamabeProfile(RadialProfile);

/// Integrates the profile on `[0, r_max]`. `settings` may be NULL for defaults.
/// Blow-up is a successful result; see `yamabe_profile_status`.
#[no_mangle]
pub unsafe extern "C" fn yamabe_solve(
    p: *const YamabeParams,
    r_max: f64,
    settings_ptr: *const YamabeSettings,
    out: *mut *mut YamabeProfile,
) -> YamabeStatus {
    guard(|| {
        let p = get(p, "params")?.0;
        let prof = profile::solve_profile(&p, r_max, &settings(settings_ptr)?)?;
        put_handle(out, YamabeProfile(prof))
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YamabeProfileKind {
    Global,
    BlowUp,
    StepFailure,
}

/// Outcome and the radius it refers to (`r_max`, `r*` or the failure radius).
#[no_mangle]
pub unsafe extern "C" fn yamabe_profile_status(
    prof: *const YamabeProfile,
    kind: *mut YamabeProfileKind,
    radius: *mut f64,
) -> YamabeStatus {
    guard(|| {
        let status = &get(prof, "profile")?.0.status;
        let k = match status {
            ProfileStatus::Global { .. } => YamabeProfileKind::Global,
            ProfileStatus::BlowUp { .. } => YamabeProfileKind::BlowUp,
            ProfileStatus::StepFailure { .. } => YamabeProfileKind::StepFailure,
        };
        put(kind, k, "kind")?;
        put(radius, status.radius(), "radius")
    })
}

#[no_mangle]
pub unsafe extern "C" fn yamabe_profile_len(prof: *const YamabeProfile, out: *mut usize) -> YamabeStatus {
    guard(|| put(out, get(prof, "profile")?.0.len(), "out"))
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YamabeProfileColumn {
    R,
    V,
    Dv,
}

/// Copies one column of the samples; `len` must be at least `yamabe_profile_len`.
#[no_mangle]
pub unsafe extern "C" fn yamabe_profile_column(
    prof: *const YamabeProfile,
    column: YamabeProfileColumn,
    buf: *mut f64,
    len: usize,
) -> YamabeStatus {
    guard(|| {
        let prof = &get(prof, "profile")?.0;
        let src = match column {
            YamabeProfileColumn::R => &prof.r,
            YamabeProfileColumn::V => &prof.v,
            YamabeProfileColumn::Dv => &prof.dv,
        };
        copy_column(src, buf, len)
    })
}

/// `v(r)` and `v'(r)` from the dense output, `0 <= r <= r_last`.
#[no_mangle]
pub unsafe extern "C" fn yamabe_profile_eval(
    prof: *const YamabeProfile,
    r: f64,
    v: *mut f64,
    dv: *mut f64,
) -> YamabeStatus {
    guard(|| {
        let jet = get(prof, "profile")?.0.eval(r)?;
        put(v, jet.f, "v")?;
        put(dv, jet.df, "dv")
    })
}

#[no_mangle]
pub unsafe extern "C" fn yamabe_profile_free(prof: *mut YamabeProfile) {
    free_handle(prof)
}

/* geometry */

pub struct YamabeGeometry(GeometryCurves);

/// Curvature curves on the profile grid; soliton parameters with `beta != 0` only.
#[no_mangle]
pub unsafe extern "C" fn yamabe_geometry(prof: *const YamabeProfile, out: *mut *mut YamabeGeometry) -> YamabeStatus {
    guard(|| {
        let curves = geometry::geometry(&get(prof, "profile")?.0)?;
        put_handle(out, YamabeGeometry(curves))
    })
}

/// Solve to `min(r_max, 1e3)` and continue in the log variable to `r_max`.
#[no_mangle]
pub unsafe extern "C" fn yamabe_geometry_stitched(
    p: *const YamabeParams,
    r_max: f64,
    settings_ptr: *const YamabeSettings,
    out: *mut *mut YamabeGeometry,
) -> YamabeStatus {
    guard(|| {
        let p = get(p, "params")?.0;
        let (_, curves, _) = analysis::solve_and_stitch(&p, r_max, &settings(settings_ptr)?)?;
        put_handle(out, YamabeGeometry(curves))
    })
}

#[no_mangle]
pub unsafe extern "C" fn yamabe_geometry_len(geo: *const YamabeGeometry, out: *mut usize) -> YamabeStatus {
    guard(|| put(out, get(geo, "geometry")?.0.len(), "out"))
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YamabeGeometryColumn {
    R,
    V,
    W,
    ScalarCurvature,
    K0,
    K1,
    PsiS,
}

#[no_mangle]
pub unsafe extern "C" fn yamabe_geometry_column(
    geo: *const YamabeGeometry,
    column: YamabeGeometryColumn,
    buf: *mut f64,
    len: usize,
) -> YamabeStatus {
    guard(|| {
        let c = &get(geo, "geometry")?.0;
        let src = match column {
            YamabeGeometryColumn::R => &c.r,
            YamabeGeometryColumn::V => &c.v,
            YamabeGeometryColumn::W => &c.w,
            YamabeGeometryColumn::ScalarCurvature => &c.scalar,
            YamabeGeometryColumn::K0 => &c.k0,
            YamabeGeometryColumn::K1 => &c.k1,
            YamabeGeometryColumn::PsiS => &c.psi_s,
        };
        copy_column(src, buf, len)
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YamabeOriginValues {
    pub scalar_curvature: f64,
    pub k0: f64,
    pub k1: f64,
    /// Largest disagreement of the two K0 routes.
    pub k0_crosscheck_defect: f64,
}

#[no_mangle]
pub unsafe extern "C" fn yamabe_geometry_origin(
    geo: *const YamabeGeometry,
    out: *mut YamabeOriginValues,
) -> YamabeStatus {
    guard(|| {
        let c = &get(geo, "geometry")?.0;
        let value = YamabeOriginValues {
            scalar_curvature: c.scalar_at_origin,
            k0: c.k0_at_origin,
            k1: c.k1_at_origin,
            k0_crosscheck_defect: c.k0_crosscheck_defect,
        };
        put(out, value, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn yamabe_geometry_free(geo: *mut YamabeGeometry) {
    free_handle(geo)
}

/* verification */

pub struct YamabeReport(AsymptoticReport);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YamabeVerdict {
    Pass,
    Inconclusive,
    Fail,
}

/// Asymptotic verification to `r_max >= 100`. Without `formal`, parameters outside
/// the covered regimes give `YAMABE_STATUS_OUTSIDE_THEOREMS`.
#[no_mangle]
pub unsafe extern "C" fn yamabe_verify(
    p: *const YamabeParams,
    r_max: f64,
    settings_ptr: *const YamabeSettings,
    formal: bool,
    out: *mut *mut YamabeReport,
) -> YamabeStatus {
    guard(|| {
        let p = get(p, "params")?.0;
        let s = settings(settings_ptr)?;
        let report = if formal {
            analysis::verify_formal(&p, r_max, &s)?
        } else {
            analysis::verify(&p, r_max, &s)?
        };
        put_handle(out, YamabeReport(report))
    })
}

#[no_mangle]
pub unsafe extern "C" fn yamabe_report_overall(rep: *const YamabeReport, out: *mut YamabeVerdict) -> YamabeStatus {
    guard(|| {
        let v = match get(rep, "report")?.0.overall {
            Status::Pass => YamabeVerdict::Pass,
            Status::Inconclusive => YamabeVerdict::Inconclusive,
            Status::Fail => YamabeVerdict::Fail,
        };
        put(out, v, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn yamabe_report_failed_invariants(rep: *const YamabeReport, out: *mut usize) -> YamabeStatus {
    guard(|| put(out, get(rep, "report")?.0.failed_invariants().count(), "out"))
}

/// Full report as JSON; release with `yamabe_string_free`.
#[no_mangle]
pub unsafe extern "C" fn yamabe_report_json(rep: *const YamabeReport, out: *mut *mut c_char) -> YamabeStatus {
    guard(|| {
        let json = get(rep, "report")?.0.to_json()?;
        let c = CString::new(json).map_err(|e| Failure(YamabeStatus::Serialization, e.to_string()))?;
        put(out, c.into_raw(), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn yamabe_report_free(rep: *mut YamabeReport) {
    free_handle(rep)
}
