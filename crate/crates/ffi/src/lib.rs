//! C ABI for the dzhcp engine.
//!
//! - Opaque `DzhcpModel` handles created by `dzhcp_model_new` and released by
//!   `dzhcp_model_free`.
//! - Every fallible call returns a `DzhcpStatus` and writes its result
//!   through an out-pointer.
//! - `dzhcp_last_error_message` holds the message of the last failed call on
//!   the calling thread.
//!
//! ```c
//! DzhcpParams p;
//! dzhcp_params_default(&p);
//! DzhcpModel *m = NULL;
//! if (dzhcp_model_new(&p, &m) != DZHCP_STATUS_OK) {
//!     fprintf(stderr, "%s\n", dzhcp_last_error_message());
//! }
//! double g;
//! dzhcp_asymptotic_gain(m, DZHCP_PROCESS_TYPE_II, &g);
//! dzhcp_model_free(m);
//! ```

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dzhcp::analytics;
use dzhcp::montecarlo::{self, EstimateWithCI};
use dzhcp::quadrature::QuadratureSpec;
use dzhcp::sampling::SimulationWindow;
use dzhcp::{Error, NetworkParams, PairConfiguration, ProcessType};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DzhcpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonConvergence = 3,
    ResourceLimit = 4,
    AcceptanceTooLow = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DzhcpProcess {
    TypeI = 0,
    TypeII = 1,
    MaternI = 2,
    MaternII = 3,
}

impl From<DzhcpProcess> for ProcessType {
    fn from(p: DzhcpProcess) -> Self {
        match p {
            DzhcpProcess::TypeI => ProcessType::TypeI,
            DzhcpProcess::TypeII => ProcessType::TypeII,
            DzhcpProcess::MaternI => ProcessType::MaternI,
            DzhcpProcess::MaternII => ProcessType::MaternII,
        }
    }
}

/// Model parameters in linear SI units. `r0 <= 0` selects the link distance.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DzhcpParams {
    pub lambda_p: f64,
    pub r_tx: f64,
    pub r_cs: f64,
    pub d: f64,
    pub p_t: f64,
    pub path_loss_const: f64,
    pub alpha: f64,
    pub threshold: f64,
    pub r0: f64,
}

impl From<DzhcpParams> for NetworkParams {
    fn from(p: DzhcpParams) -> Self {
        NetworkParams {
            lambda_p: p.lambda_p,
            r_tx: p.r_tx,
            r_cs: p.r_cs,
            d: p.d,
            p_t: p.p_t,
            path_loss_const: p.path_loss_const,
            alpha: p.alpha,
            threshold: p.threshold,
            r0: (p.r0 > 0.0).then_some(p.r0),
        }
    }
}

impl From<NetworkParams> for DzhcpParams {
    fn from(p: NetworkParams) -> Self {
        DzhcpParams {
            lambda_p: p.lambda_p,
            r_tx: p.r_tx,
            r_cs: p.r_cs,
            d: p.d,
            p_t: p.p_t,
            path_loss_const: p.path_loss_const,
            alpha: p.alpha,
            threshold: p.threshold,
            r0: p.r0.unwrap_or(0.0),
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DzhcpInterference {
    pub mean_interference: f64,
    pub misr: f64,
    pub gain: f64,
    pub quad_error: f64,
    pub tail: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DzhcpEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_effective: u64,
    pub seed: u64,
}

impl From<EstimateWithCI> for DzhcpEstimate {
    fn from(e: EstimateWithCI) -> Self {
        DzhcpEstimate {
            mean: e.mean,
            std_error: e.std_error,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            n_effective: e.n_effective as u64,
            seed: e.seed,
        }
    }
}

/// Validated parameters plus the quadrature settings used by the integral calls.
pub struct DzhcpModel {
    params: NetworkParams,
    spec: QuadratureSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> DzhcpStatus {
    match err {
        Error::Domain(_) | Error::InvalidConfig { .. } => DzhcpStatus::InvalidArgument,
        Error::NonConvergence { .. } => DzhcpStatus::NonConvergence,
        Error::Resource { .. } => DzhcpStatus::ResourceLimit,
        Error::AcceptanceTooLow { .. } => DzhcpStatus::AcceptanceTooLow,
    }
}

/// Run `f`, store its value through `out`, and map errors and panics to a status.
fn guarded<T>(out: *mut T, f: impl FnOnce() -> Result<T, Error>) -> DzhcpStatus {
    if out.is_null() {
        set_last_error("output pointer is null");
        return DzhcpStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            // SAFETY: checked non-null; the caller provides a writable T.
            unsafe { out.write(v) };
            DzhcpStatus::Ok
        }
        Ok(Err(e)) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic");
            DzhcpStatus::Panic
        }
    }
}

unsafe fn model_ref<'a>(model: *const DzhcpModel) -> Result<&'a DzhcpModel, Error> {
    model
        .as_ref()
        .ok_or_else(|| Error::Domain("model handle is null".into()))
}

/// Message of the last failed call on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dzhcp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dzhcp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be null or point to writable memory for one `DzhcpParams`.
#[no_mangle]
pub unsafe extern "C" fn dzhcp_params_default(out: *mut DzhcpParams) -> DzhcpStatus {
    guarded(out, || Ok(NetworkParams::baseline().into()))
}

/// Validate `params` and allocate a model handle.
///
/// # Safety
/// `params` must be null or point to a readable `DzhcpParams`; `out` must be
/// null or point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn dzhcp_model_new(
    params: *const DzhcpParams,
    out: *mut *mut DzhcpModel,
) -> DzhcpStatus {
    guarded(out, || {
        let p: NetworkParams = params
            .as_ref()
            .copied()
            .ok_or_else(|| Error::Domain("params pointer is null".into()))?
            .into();
        p.validate()?;
        let model = DzhcpModel {
            params: p,
            spec: QuadratureSpec::for_params(&p),
        };
        Ok(Box::into_raw(Box::new(model)))
    })
}

/// # Safety
/// `model` must be null or a handle from `dzhcp_model_new` that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn dzhcp_model_free(model: *mut DzhcpModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dzhcp_model_params(
    model: *const DzhcpModel,
    out: *mut DzhcpParams,
) -> DzhcpStatus {
    guarded(out, || Ok(model_ref(model)?.params.into()))
}

/// Set the relative tolerance and truncation radius of the interference
/// integral. `r_max <= 0` keeps the current radius.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dzhcp_model_set_quadrature(
    model: *mut DzhcpModel,
    rel_tol: f64,
    r_max: f64,
) -> DzhcpStatus {
    let mut unit = ();
    guarded(&mut unit, || {
        let m = model
            .as_mut()
            .ok_or_else(|| Error::Domain("model handle is null".into()))?;
        let mut spec = m.spec.with_rel_tol(rel_tol);
        if r_max > 0.0 {
            spec = spec.with_r_max(r_max);
        }
        spec.validate_for(&m.params)?;
        m.spec = spec;
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dzhcp_exclusion_area(
    model: *const DzhcpModel,
    process: DzhcpProcess,
    out: *mut f64,
) -> DzhcpStatus {
    guarded(out, || {
        Ok(analytics::exclusion_area(
            process.into(),
            &model_ref(model)?.params,
        ))
    })
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dzhcp_intensity(
    model: *const DzhcpModel,
    process: DzhcpProcess,
    out: *mut f64,
) -> DzhcpStatus {
    guarded(out, || {
        Ok(analytics::intensity(
            process.into(),
            &model_ref(model)?.params,
        ))
    })
}

/// Two-pair retention probability at distance `r`, bearing `beta` and
/// orientation `theta` of the second pair.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dzhcp_kernel(
    model: *const DzhcpModel,
    process: DzhcpProcess,
    r: f64,
    beta: f64,
    theta: f64,
    out: *mut f64,
) -> DzhcpStatus {
    guarded(out, || {
        let m = model_ref(model)?;
        let config = PairConfiguration::new(r, beta, theta)?;
        Ok(analytics::kernel(&config, &m.params, process.into()))
    })
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dzhcp_eta(model: *const DzhcpModel, v: f64, out: *mut f64) -> DzhcpStatus {
    guarded(out, || analytics::eta(v, &model_ref(model)?.params))
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dzhcp_mean_interference(
    model: *const DzhcpModel,
    process: DzhcpProcess,
    out: *mut DzhcpInterference,
) -> DzhcpStatus {
    guarded(out, || {
        let m = model_ref(model)?;
        let r = analytics::mean_interference(&m.params, process.into(), &m.spec)?;
        Ok(DzhcpInterference {
            mean_interference: r.mean_interference,
            misr: r.misr,
            gain: r.gain,
            quad_error: r.quad_error,
            tail: r.tail,
        })
    })
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dzhcp_asymptotic_gain(
    model: *const DzhcpModel,
    process: DzhcpProcess,
    out: *mut f64,
) -> DzhcpStatus {
    guarded(out, || {
        let m = model_ref(model)?;
        analytics::asymptotic_gain(&m.params, process.into(), &m.spec)
    })
}

/// Success probability approximation at the linear SIR threshold `threshold`.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dzhcp_success_prob(
    model: *const DzhcpModel,
    process: DzhcpProcess,
    threshold: f64,
    out: *mut f64,
) -> DzhcpStatus {
    guarded(out, || {
        let m = model_ref(model)?;
        analytics::success_prob_dzhcp(threshold, &m.params, process.into(), &m.spec)
    })
}

/// Poisson reference success probability.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn dzhcp_success_prob_ppp(
    threshold: f64,
    alpha: f64,
    out: *mut f64,
) -> DzhcpStatus {
    guarded(out, || analytics::success_prob_ppp(threshold, alpha))
}

/// Monte Carlo intensity over a square observation window of side
/// `window_side` with the minimal guard margin.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dzhcp_estimate_intensity(
    model: *const DzhcpModel,
    process: DzhcpProcess,
    window_side: f64,
    n_reps: u64,
    seed: u64,
    out: *mut DzhcpEstimate,
) -> DzhcpStatus {
    guarded(out, || {
        let m = model_ref(model)?;
        let w = SimulationWindow::square_for(window_side, &m.params);
        Ok(
            montecarlo::estimate_intensity(&m.params, process.into(), &w, n_reps as usize, seed)?
                .into(),
        )
    })
}

/// Palm Monte Carlo mean interference over a disk observation window of
/// radius `radius`, with `n_reps` accepted replications.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dzhcp_palm_interference(
    model: *const DzhcpModel,
    process: DzhcpProcess,
    radius: f64,
    n_reps: u64,
    seed: u64,
    out: *mut DzhcpEstimate,
) -> DzhcpStatus {
    guarded(out, || {
        let m = model_ref(model)?;
        let w = SimulationWindow::disk_for(radius, &m.params);
        let est =
            montecarlo::palm_interference(&m.params, process.into(), &w, n_reps as usize, seed)?;
        Ok(est.estimate.into())
    })
}

/// Empirical SIR ccdf at `n_thresholds` linear thresholds; writes one
/// estimate per threshold into `out`.
///
/// # Safety
/// `model` must be a live handle, `thresholds` readable for `n_thresholds`
/// values and `out` writable for as many estimates.
#[no_mangle]
pub unsafe extern "C" fn dzhcp_estimate_success_prob(
    model: *const DzhcpModel,
    process: DzhcpProcess,
    thresholds: *const f64,
    n_thresholds: usize,
    radius: f64,
    n_reps: u64,
    seed: u64,
    out: *mut DzhcpEstimate,
) -> DzhcpStatus {
    if n_thresholds > 0 && thresholds.is_null() {
        set_last_error("thresholds pointer is null");
        return DzhcpStatus::NullPointer;
    }
    let mut unit = ();
    guarded(&mut unit, || {
        if out.is_null() {
            return Err(Error::Domain("output pointer is null".into()));
        }
        let m = model_ref(model)?;
        let ts = if n_thresholds == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(thresholds, n_thresholds)
        };
        let w = SimulationWindow::disk_for(radius, &m.params);
        let est = montecarlo::estimate_success_prob(
            &m.params,
            process.into(),
            ts,
            &w,
            n_reps as usize,
            seed,
        )?;
        for (i, e) in est.into_iter().enumerate() {
            ptr::write(out.add(i), e.into());
        }
        Ok(())
    })
}
