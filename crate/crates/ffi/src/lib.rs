//! C ABI over `opsplit`.
//!
//! Every function returns an [`OpsplitStatus`]; results go through out
//! pointers. On failure the message is kept per thread and can be read with
//! [`opsplit_last_error`]. Experiment runs are returned as opaque
//! [`OpsplitExperiment`] handles and must be released with
//! [`opsplit_experiment_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use opsplit::experiments::{run_denoise, run_restore, DenoiseConfig, RestoreConfig, Scheme, SchemeRun};
use opsplit::rates::{self, Algorithm, ProblemParams, Setting};
use opsplit::regions::{self, RegionId, RegionPoint, Winner};
use opsplit::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpsplitStatus {
    Ok = 0,
    InvalidArgument = 1,
    Domain = 2,
    StepSize = 3,
    NoOptimum = 4,
    NullPointer = 5,
    NotFound = 6,
    BufferTooSmall = 7,
    Runtime = 8,
    Io = 9,
    Panic = 10,
}

/// Values accepted by the `algorithm` parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpsplitAlgorithm {
    Ea = 0,
    Ppa = 1,
    FbsGradFProxG = 2,
    FbsGradGProxF = 3,
    Prs = 4,
    Drs = 5,
    EaSingle = 6,
    ProxSingle = 7,
}

/// Values accepted by the `setting` parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpsplitSetting {
    Cocoercive = 0,
    Optimization = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpsplitWinner {
    FbsProxF = 0,
    Drs = 1,
    Prs = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpsplitRegion {
    Omega1 = 0,
    Omega2 = 1,
    Complement = 2,
}

/// Benchmark schemes; bit `1 << value` selects a scheme in `scheme_mask`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpsplitScheme {
    Ea = 0,
    Fbs = 1,
    Fbs2 = 2,
    Fbs3 = 3,
    Prs = 4,
    Drs = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct OpsplitDenoiseConfig {
    pub n: usize,
    pub n_segments: usize,
    pub noise_sigma: f64,
    pub chi: f64,
    pub mu: f64,
    pub scheme_mask: u32,
    pub max_iter: usize,
    pub stop_tol: f64,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct OpsplitRestoreConfig {
    pub n_pixels: usize,
    pub m_rows: usize,
    pub chi: f64,
    pub mu: f64,
    pub wavelet_levels: usize,
    pub scheme_mask: u32,
    pub noise_sigma: f64,
    pub max_iter: usize,
    pub stop_tol: f64,
    pub seed: u64,
}

/// Result of a denoising or restoration run.
pub struct OpsplitExperiment {
    runs: Vec<SchemeRun>,
    solution: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(OpsplitStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parameter(_) => OpsplitStatus::InvalidArgument,
            Error::Domain(_) => OpsplitStatus::Domain,
            Error::StepSize { .. } => OpsplitStatus::StepSize,
            Error::NoOptimum(_) => OpsplitStatus::NoOptimum,
            Error::Io { .. } | Error::Json(_) => OpsplitStatus::Io,
            _ => OpsplitStatus::Runtime,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: OpsplitStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> OpsplitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_error();
            OpsplitStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside opsplit".into());
            OpsplitStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or valid for writes.
unsafe fn write<T>(p: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(fail(OpsplitStatus::NullPointer, format!("{name} is null")));
    }
    p.write(value);
    Ok(())
}

fn algorithm(code: i32) -> Result<Algorithm, Failure> {
    usize::try_from(code)
        .ok()
        .and_then(|i| Algorithm::ALL.get(i).copied())
        .ok_or_else(|| fail(OpsplitStatus::InvalidArgument, format!("unknown algorithm code {code}")))
}

fn setting(code: i32) -> Result<Setting, Failure> {
    match code {
        0 => Ok(Setting::Cocoercive),
        1 => Ok(Setting::Optimization),
        _ => Err(fail(OpsplitStatus::InvalidArgument, format!("unknown setting code {code}"))),
    }
}

const SCHEMES: [Scheme; 6] = [Scheme::Ea, Scheme::Fbs, Scheme::Fbs2, Scheme::Fbs3, Scheme::Prs, Scheme::Drs];

fn scheme(code: i32) -> Result<Scheme, Failure> {
    usize::try_from(code)
        .ok()
        .and_then(|i| SCHEMES.get(i).copied())
        .ok_or_else(|| fail(OpsplitStatus::InvalidArgument, format!("unknown scheme code {code}")))
}

fn schemes_from_mask(mask: u32) -> Vec<Scheme> {
    SCHEMES
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, s)| *s)
        .collect()
}

fn mask_from_schemes(schemes: &[Scheme]) -> u32 {
    schemes
        .iter()
        .map(|s| 1u32 << SCHEMES.iter().position(|k| k == s).unwrap())
        .fold(0, |a, b| a | b)
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn opsplit_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn opsplit_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Lipschitz constant of `algorithm` at step-size `tau`. Pass
/// `beta = INFINITY` for `B = 0`.
///
/// # Safety
/// `out_rate` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn opsplit_rate(
    setting_code: i32,
    algorithm_code: i32,
    alpha: f64,
    beta: f64,
    rho: f64,
    tau: f64,
    out_rate: *mut f64,
) -> OpsplitStatus {
    guard(|| {
        let params = ProblemParams::new(alpha, beta, rho)?;
        let r = rates::rate(setting(setting_code)?, algorithm(algorithm_code)?, &params, tau)?;
        write(out_rate, r.rate, "out_rate")
    })
}

/// Optimal step-size and the rate it attains.
///
/// # Safety
/// `out_tau` and `out_rate` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn opsplit_optimal(
    setting_code: i32,
    algorithm_code: i32,
    alpha: f64,
    beta: f64,
    rho: f64,
    out_tau: *mut f64,
    out_rate: *mut f64,
) -> OpsplitStatus {
    guard(|| {
        let params = ProblemParams::new(alpha, beta, rho)?;
        let c = rates::optimal(setting(setting_code)?, algorithm(algorithm_code)?, &params)?;
        write(out_tau, c.tau_star, "out_tau")?;
        write(out_rate, c.rate_star, "out_rate")
    })
}

/// Averagedness constant of `algorithm` when `rho = 0`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn opsplit_averaged_constant(
    algorithm_code: i32,
    alpha: f64,
    beta: f64,
    tau: f64,
    out: *mut f64,
) -> OpsplitStatus {
    guard(|| {
        let mu = rates::averaged_constant(algorithm(algorithm_code)?, alpha, beta, tau)?;
        write(out, mu, "out")
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn opsplit_eta(beta: f64, out: *mut f64) -> OpsplitStatus {
    guard(|| write(out, regions::eta(beta)?, "out"))
}

/// Most efficient scheme at the normalized point `(beta, rho)`; writes an
/// [`OpsplitWinner`] and an [`OpsplitRegion`] value.
///
/// # Safety
/// `out_winner` and `out_region` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn opsplit_classify(
    beta: f64,
    rho: f64,
    out_winner: *mut i32,
    out_region: *mut i32,
) -> OpsplitStatus {
    guard(|| {
        let label = regions::classify(&RegionPoint::new(beta, rho)?);
        let winner = match label.winner {
            Winner::FbsProxF => OpsplitWinner::FbsProxF,
            Winner::Drs => OpsplitWinner::Drs,
            Winner::Prs => OpsplitWinner::Prs,
        };
        let region = match label.region {
            RegionId::Omega1 => OpsplitRegion::Omega1,
            RegionId::Omega2 => OpsplitRegion::Omega2,
            RegionId::Complement => OpsplitRegion::Complement,
        };
        write(out_winner, winner as i32, "out_winner")?;
        write(out_region, region as i32, "out_region")
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn opsplit_denoise_default_config(out: *mut OpsplitDenoiseConfig) -> OpsplitStatus {
    guard(|| {
        let d = DenoiseConfig::default();
        let cfg = OpsplitDenoiseConfig {
            n: d.n,
            n_segments: d.n_segments,
            noise_sigma: d.noise_sigma,
            chi: d.chi,
            mu: d.mu,
            scheme_mask: mask_from_schemes(&d.algorithms),
            max_iter: d.max_iter,
            stop_tol: d.stop_tol,
            seed: d.seed,
        };
        write(out, cfg, "out")
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn opsplit_restore_default_config(out: *mut OpsplitRestoreConfig) -> OpsplitStatus {
    guard(|| {
        let d = RestoreConfig::default();
        let cfg = OpsplitRestoreConfig {
            n_pixels: d.n_pixels,
            m_rows: d.m_rows,
            chi: d.chi,
            mu: d.mu,
            wavelet_levels: d.wavelet_levels,
            scheme_mask: mask_from_schemes(&d.algorithms),
            noise_sigma: d.noise_sigma,
            max_iter: d.max_iter,
            stop_tol: d.stop_tol,
            seed: d.seed,
        };
        write(out, cfg, "out")
    })
}

fn into_handle(runs: Vec<SchemeRun>, solution: Vec<f64>) -> *mut OpsplitExperiment {
    Box::into_raw(Box::new(OpsplitExperiment { runs, solution }))
}

/// Run the denoising benchmark. On success `*out` owns a new handle.
///
/// # Safety
/// `cfg` must point to a valid config and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn opsplit_denoise_run(
    cfg: *const OpsplitDenoiseConfig,
    out: *mut *mut OpsplitExperiment,
) -> OpsplitStatus {
    guard(|| {
        let c = cfg.as_ref().ok_or_else(|| fail(OpsplitStatus::NullPointer, "cfg is null"))?;
        if out.is_null() {
            return Err(fail(OpsplitStatus::NullPointer, "out is null"));
        }
        let config = DenoiseConfig {
            n: c.n,
            n_segments: c.n_segments,
            noise_sigma: c.noise_sigma,
            chi: c.chi,
            mu: c.mu,
            algorithms: schemes_from_mask(c.scheme_mask),
            max_iter: c.max_iter,
            stop_tol: c.stop_tol,
            seed: c.seed,
            observation: None,
        };
        let r = run_denoise(&config)?;
        write(out, into_handle(r.runs, r.reference.as_slice().to_vec()), "out")
    })
}

/// Run the restoration benchmark. On success `*out` owns a new handle.
///
/// # Safety
/// `cfg` must point to a valid config and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn opsplit_restore_run(
    cfg: *const OpsplitRestoreConfig,
    out: *mut *mut OpsplitExperiment,
) -> OpsplitStatus {
    guard(|| {
        let c = cfg.as_ref().ok_or_else(|| fail(OpsplitStatus::NullPointer, "cfg is null"))?;
        if out.is_null() {
            return Err(fail(OpsplitStatus::NullPointer, "out is null"));
        }
        let config = RestoreConfig {
            n_pixels: c.n_pixels,
            m_rows: c.m_rows,
            chi: c.chi,
            mu: c.mu,
            wavelet_levels: c.wavelet_levels,
            algorithms: schemes_from_mask(c.scheme_mask),
            noise_sigma: c.noise_sigma,
            max_iter: c.max_iter,
            stop_tol: c.stop_tol,
            seed: c.seed,
        };
        let r = run_restore(&config)?;
        write(out, into_handle(r.runs, r.reference.as_slice().to_vec()), "out")
    })
}

unsafe fn find_run<'a>(h: *const OpsplitExperiment, code: i32) -> Result<&'a SchemeRun, Failure> {
    let h = h.as_ref().ok_or_else(|| fail(OpsplitStatus::NullPointer, "handle is null"))?;
    let s = scheme(code)?;
    h.runs
        .iter()
        .find(|r| r.scheme == s)
        .ok_or_else(|| fail(OpsplitStatus::NotFound, format!("{s} was not run")))
}

/// Step-size, theoretical rate and first iteration with error at most
/// `1e-3 * error_0` (`-1` if never reached) of one scheme.
///
/// # Safety
/// `h` must be a live handle; out pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn opsplit_experiment_scheme_info(
    h: *const OpsplitExperiment,
    scheme_code: i32,
    out_tau: *mut f64,
    out_rate: *mut f64,
    out_iterations_to_1e3: *mut i64,
) -> OpsplitStatus {
    guard(|| {
        let run = find_run(h, scheme_code)?;
        if let Some(f) = &run.failure {
            return Err(fail(OpsplitStatus::Runtime, f.clone()));
        }
        write(out_tau, run.tau, "out_tau")?;
        write(out_rate, run.rate, "out_rate")?;
        let k = run.iterations_to_1e3.map_or(-1, |k| k as i64);
        write(out_iterations_to_1e3, k, "out_iterations_to_1e3")
    })
}

/// Number of recorded errors of one scheme (iterations run plus one).
///
/// # Safety
/// `h` must be a live handle; `out_len` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn opsplit_experiment_trace_len(
    h: *const OpsplitExperiment,
    scheme_code: i32,
    out_len: *mut usize,
) -> OpsplitStatus {
    guard(|| {
        let run = find_run(h, scheme_code)?;
        let n = run.trace.as_ref().map_or(0, |t| t.errors.len());
        write(out_len, n, "out_len")
    })
}

fn copy_out(src: &[f64], buf: *mut f64, capacity: usize) -> Result<(), Failure> {
    if src.len() > capacity {
        return Err(fail(
            OpsplitStatus::BufferTooSmall,
            format!("need {} values, buffer holds {capacity}", src.len()),
        ));
    }
    if !src.is_empty() {
        if buf.is_null() {
            return Err(fail(OpsplitStatus::NullPointer, "buf is null"));
        }
        // SAFETY: the caller guarantees `capacity` writable values at `buf`.
        unsafe { ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len()) };
    }
    Ok(())
}

/// Copy the error trace of one scheme into `buf`.
///
/// # Safety
/// `h` must be a live handle and `buf` valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn opsplit_experiment_trace_copy(
    h: *const OpsplitExperiment,
    scheme_code: i32,
    buf: *mut f64,
    capacity: usize,
) -> OpsplitStatus {
    guard(|| {
        let run = find_run(h, scheme_code)?;
        let errors: &[f64] = run.trace.as_ref().map_or(&[], |t| t.errors.as_slice());
        copy_out(errors, buf, capacity)
    })
}

/// # Safety
/// `h` must be a live handle; `out_len` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn opsplit_experiment_solution_len(
    h: *const OpsplitExperiment,
    out_len: *mut usize,
) -> OpsplitStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| fail(OpsplitStatus::NullPointer, "handle is null"))?;
        write(out_len, h.solution.len(), "out_len")
    })
}

/// Copy the reference solution into `buf`.
///
/// # Safety
/// `h` must be a live handle and `buf` valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn opsplit_experiment_solution_copy(
    h: *const OpsplitExperiment,
    buf: *mut f64,
    capacity: usize,
) -> OpsplitStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| fail(OpsplitStatus::NullPointer, "handle is null"))?;
        copy_out(&h.solution, buf, capacity)
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn opsplit_experiment_free(h: *mut OpsplitExperiment) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;

    fn last_error() -> String {
        let p = opsplit_last_error();
        assert!(!p.is_null());
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }

    #[test]
    fn codes_match_library_order() {
        for (i, alg) in Algorithm::ALL.iter().enumerate() {
            assert_eq!(algorithm(i as i32).ok(), Some(*alg));
        }
        assert_eq!(OpsplitAlgorithm::Prs as usize, 4);
        assert_eq!(mask_from_schemes(&[Scheme::Prs, Scheme::Drs]), 0b110000);
        assert_eq!(schemes_from_mask(0b110000), vec![Scheme::Prs, Scheme::Drs]);
    }

    #[test]
    fn error_message_is_kept_until_next_success() {
        let mut r = 0.0;
        let st = unsafe { opsplit_rate(0, 99, 1.0, 1.0, 0.3, 1.0, &mut r) };
        assert_eq!(st, OpsplitStatus::InvalidArgument);
        assert!(last_error().contains("99"));
        let st = unsafe { opsplit_rate(0, 0, 1.0, 1.0, 0.3, 0.5, &mut r) };
        assert_eq!(st, OpsplitStatus::Ok);
        assert!(opsplit_last_error().is_null());
    }
}
