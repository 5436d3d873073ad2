//! C ABI for the band-sharing analysis library.
//!
//! The surface follows the usual opaque-handle pattern: build a
//! [`BandallocModel`] from explicit parameters or scenario text, query it,
//! and free it. Every fallible call returns a [`BandallocStatus`]; the
//! thread-local message behind [`bandalloc_last_error_message`] carries the
//! detail of the most recent failure on the calling thread.
//!
//! The generated header lands in `include/bandalloc.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bandalloc::error::Error;
use bandalloc::model::{Scheme, SystemParams};
use bandalloc::scenario::Scenario;
use bandalloc::sim::{simulate, SimConfig};
use bandalloc::solver::{blocking_probabilities, solve_exact, solve_iterative};
use bandalloc::space::StateSpace;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandallocStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Scenario text could not be parsed.
    ParseError = 3,
    /// A parameter violates its domain constraints.
    InvalidParameter = 4,
    /// The configuration admits an unbounded traffic class.
    UnboundedStateSpace = 5,
    /// The iterative solver hit its sweep limit before settling; outputs
    /// are still written and usable as approximations.
    NotConverged = 6,
    /// The balance system was singular (internal invariant violation).
    SingularSystem = 7,
    /// An index argument was out of range.
    OutOfRange = 8,
    /// Unexpected internal failure.
    Internal = 9,
}

/// Scheme selector mirroring the library's variants.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandallocScheme {
    Proposed = 0,
    Overlay = 1,
    Underlay = 2,
}

impl From<BandallocScheme> for Scheme {
    fn from(s: BandallocScheme) -> Scheme {
        match s {
            BandallocScheme::Proposed => Scheme::Proposed,
            BandallocScheme::Overlay => Scheme::Overlay,
            BandallocScheme::Underlay => Scheme::Underlay,
        }
    }
}

/// Scenario parameters; field meanings match the scenario-file keys.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BandallocParams {
    pub lambda_total: f64,
    pub rho: f64,
    pub lambda_wifi: f64,
    pub mu: f64,
    pub r_l_dd: f64,
    pub r_up_cc: f64,
    pub r_dw_cc: f64,
    pub r_u_dd: f64,
    pub r_u_wf: f64,
    pub cap_dd: f64,
    pub cap_up: f64,
    pub cap_dw: f64,
    pub cap_u: f64,
    pub theta_u: f64,
    pub theta_l: f64,
}

impl From<BandallocParams> for SystemParams {
    fn from(p: BandallocParams) -> SystemParams {
        SystemParams {
            lambda_total: p.lambda_total,
            rho: p.rho,
            lambda_wifi: p.lambda_wifi,
            mu: p.mu,
            r_l_dd: p.r_l_dd,
            r_up_cc: p.r_up_cc,
            r_dw_cc: p.r_dw_cc,
            r_u_dd: p.r_u_dd,
            r_u_wf: p.r_u_wf,
            cap_dd: p.cap_dd,
            cap_up: p.cap_up,
            cap_dw: p.cap_dw,
            cap_u: p.cap_u,
            theta_u: p.theta_u,
            theta_l: p.theta_l,
        }
    }
}

impl From<SystemParams> for BandallocParams {
    fn from(p: SystemParams) -> BandallocParams {
        BandallocParams {
            lambda_total: p.lambda_total,
            rho: p.rho,
            lambda_wifi: p.lambda_wifi,
            mu: p.mu,
            r_l_dd: p.r_l_dd,
            r_up_cc: p.r_up_cc,
            r_dw_cc: p.r_dw_cc,
            r_u_dd: p.r_u_dd,
            r_u_wf: p.r_u_wf,
            cap_dd: p.cap_dd,
            cap_up: p.cap_up,
            cap_dw: p.cap_dw,
            cap_u: p.cap_u,
            theta_u: p.theta_u,
            theta_l: p.theta_l,
        }
    }
}

/// One chain state: in-service packet counts per class.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BandallocState {
    pub i: u32,
    pub j: u32,
    pub m: u32,
    pub n: u32,
}

/// Blocking triple plus solve diagnostics.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BandallocBlocking {
    pub p_block_d2d: f64,
    pub p_block_cc: f64,
    pub p_block_wifi: f64,
    /// Maximum absolute global-balance violation of the solution.
    pub residual: f64,
    /// Sweeps performed (zero for the direct solver).
    pub iterations: u64,
    pub converged: bool,
}

/// Aggregated simulation statistics.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BandallocSimStats {
    pub d2d_offered: u64,
    pub d2d_blocked: u64,
    pub d2d_estimate: f64,
    pub d2d_half_width: f64,
    pub cc_offered: u64,
    pub cc_blocked: u64,
    pub cc_estimate: f64,
    pub cc_half_width: f64,
    pub wifi_offered: u64,
    pub wifi_blocked: u64,
    pub wifi_estimate: f64,
    pub wifi_half_width: f64,
    /// Time-weighted mean occupancy per dimension `(i, j, m, n)`.
    pub mean_occupancy: [f64; 4],
}

/// Opaque model handle: parameters, scheme, and the enumerated state space.
pub struct BandallocModel {
    params: SystemParams,
    scheme: Scheme,
    space: StateSpace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let cstring = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error message unavailable").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn status_of(err: &Error) -> BandallocStatus {
    match err {
        Error::ScenarioParse { .. } | Error::ScenarioIncomplete(_) => BandallocStatus::ParseError,
        Error::InvalidParameter { .. }
        | Error::InvalidTolerance(_)
        | Error::InvalidSimConfig(_) => BandallocStatus::InvalidParameter,
        Error::UnboundedStateSpace(_) => BandallocStatus::UnboundedStateSpace,
        Error::SingularSystem => BandallocStatus::SingularSystem,
        Error::Io(_) => BandallocStatus::Internal,
    }
}

fn fail(err: &Error) -> BandallocStatus {
    set_last_error(err.to_string());
    status_of(err)
}

fn guarded<F: FnOnce() -> BandallocStatus>(f: F) -> BandallocStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic".to_string());
            BandallocStatus::Internal
        }
    }
}

/// Fills `out` with the bundled default scenario parameters.
///
/// # Safety
/// `out` must point to writable memory for one `BandallocParams`.
#[no_mangle]
pub unsafe extern "C" fn bandalloc_default_params(out: *mut BandallocParams) -> BandallocStatus {
    if out.is_null() {
        return BandallocStatus::NullArgument;
    }
    out.write(SystemParams::default().into());
    BandallocStatus::Ok
}

/// Builds a model from explicit parameters, enumerating its state space.
/// On success `*out` owns the model; release it with [`bandalloc_model_free`].
///
/// # Safety
/// `params` must point to a valid `BandallocParams`; `out` must point to
/// writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn bandalloc_model_new(
    params: *const BandallocParams,
    scheme: BandallocScheme,
    out: *mut *mut BandallocModel,
) -> BandallocStatus {
    if params.is_null() || out.is_null() {
        return BandallocStatus::NullArgument;
    }
    let params = SystemParams::from(*params);
    guarded(|| match StateSpace::enumerate(&params, scheme.into()) {
        Ok(space) => {
            let model = Box::new(BandallocModel {
                params,
                scheme: scheme.into(),
                space,
            });
            out.write(Box::into_raw(model));
            BandallocStatus::Ok
        }
        Err(err) => fail(&err),
    })
}

/// Builds a model from scenario text (the `key = value` format of the CLI's
/// scenario files). The scenario's scheme is honored; its run settings are
/// not carried along — solver and simulator knobs are per-call arguments.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` as in
/// [`bandalloc_model_new`].
#[no_mangle]
pub unsafe extern "C" fn bandalloc_model_from_scenario(
    text: *const c_char,
    out: *mut *mut BandallocModel,
) -> BandallocStatus {
    if text.is_null() || out.is_null() {
        return BandallocStatus::NullArgument;
    }
    let Ok(text) = CStr::from_ptr(text).to_str() else {
        set_last_error("scenario text is not valid UTF-8".to_string());
        return BandallocStatus::InvalidUtf8;
    };
    guarded(|| {
        let scenario = match Scenario::parse_str(text) {
            Ok(sc) => sc,
            Err(err) => return fail(&err),
        };
        if let Err(err) = scenario.validate() {
            return fail(&err);
        }
        match StateSpace::enumerate(&scenario.params, scenario.scheme) {
            Ok(space) => {
                let model = Box::new(BandallocModel {
                    params: scenario.params,
                    scheme: scenario.scheme,
                    space,
                });
                out.write(Box::into_raw(model));
                BandallocStatus::Ok
            }
            Err(err) => fail(&err),
        }
    })
}

/// Releases a model created by the constructors. Null is a no-op.
///
/// # Safety
/// `model` must be null or a pointer previously returned by a constructor
/// and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bandalloc_model_free(model: *mut BandallocModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of states in the model's reachable state space.
///
/// # Safety
/// `model` must be a live model pointer; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bandalloc_model_state_count(
    model: *const BandallocModel,
    out: *mut usize,
) -> BandallocStatus {
    if model.is_null() || out.is_null() {
        return BandallocStatus::NullArgument;
    }
    out.write((*model).space.len());
    BandallocStatus::Ok
}

/// The state at `index` in lexicographic order.
///
/// # Safety
/// `model` must be a live model pointer; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bandalloc_model_state_at(
    model: *const BandallocModel,
    index: usize,
    out: *mut BandallocState,
) -> BandallocStatus {
    if model.is_null() || out.is_null() {
        return BandallocStatus::NullArgument;
    }
    let space = &(*model).space;
    let Some(s) = space.states().get(index) else {
        set_last_error(format!(
            "state index {index} out of range for a space of {}",
            space.len()
        ));
        return BandallocStatus::OutOfRange;
    };
    out.write(BandallocState {
        i: s.i,
        j: s.j,
        m: s.m,
        n: s.n,
    });
    BandallocStatus::Ok
}

/// Solves the stationary distribution directly and writes the blocking
/// triple.
///
/// # Safety
/// `model` must be a live model pointer; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bandalloc_solve_exact(
    model: *const BandallocModel,
    out: *mut BandallocBlocking,
) -> BandallocStatus {
    if model.is_null() || out.is_null() {
        return BandallocStatus::NullArgument;
    }
    let m = &*model;
    guarded(|| match solve_exact(&m.space, &m.params, m.scheme) {
        Ok(dist) => {
            let report = blocking_probabilities(&dist, &m.space, &m.params, m.scheme);
            out.write(BandallocBlocking {
                p_block_d2d: report.p_block_d2d,
                p_block_cc: report.p_block_cc,
                p_block_wifi: report.p_block_wifi,
                residual: dist.residual,
                iterations: dist.iterations,
                converged: dist.converged,
            });
            BandallocStatus::Ok
        }
        Err(err) => fail(&err),
    })
}

/// Solves the stationary distribution by the fixed-point iteration. When the
/// sweep limit is reached first, the outputs are still written and the call
/// returns [`BandallocStatus::NotConverged`].
///
/// # Safety
/// `model` must be a live model pointer; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bandalloc_solve_iterative(
    model: *const BandallocModel,
    alpha: f64,
    max_iter: u64,
    out: *mut BandallocBlocking,
) -> BandallocStatus {
    if model.is_null() || out.is_null() {
        return BandallocStatus::NullArgument;
    }
    let m = &*model;
    guarded(
        || match solve_iterative(&m.space, &m.params, m.scheme, alpha, max_iter) {
            Ok(dist) => {
                let report = blocking_probabilities(&dist, &m.space, &m.params, m.scheme);
                out.write(BandallocBlocking {
                    p_block_d2d: report.p_block_d2d,
                    p_block_cc: report.p_block_cc,
                    p_block_wifi: report.p_block_wifi,
                    residual: dist.residual,
                    iterations: dist.iterations,
                    converged: dist.converged,
                });
                if dist.converged {
                    BandallocStatus::Ok
                } else {
                    set_last_error(format!(
                        "iteration did not settle within {max_iter} sweeps"
                    ));
                    BandallocStatus::NotConverged
                }
            }
            Err(err) => fail(&err),
        },
    )
}

/// Runs the discrete-event simulator on the model's parameters and scheme.
/// Deterministic for a fixed seed.
///
/// # Safety
/// `model` must be a live model pointer; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bandalloc_simulate(
    model: *const BandallocModel,
    seed: u64,
    horizon: f64,
    warmup: f64,
    replications: u32,
    out: *mut BandallocSimStats,
) -> BandallocStatus {
    if model.is_null() || out.is_null() {
        return BandallocStatus::NullArgument;
    }
    let m = &*model;
    let cfg = SimConfig {
        params: m.params,
        scheme: m.scheme,
        seed,
        horizon,
        warmup,
        replications,
    };
    guarded(|| match simulate(&cfg) {
        Ok(stats) => {
            out.write(BandallocSimStats {
                d2d_offered: stats.d2d.offered,
                d2d_blocked: stats.d2d.blocked,
                d2d_estimate: stats.d2d.estimate,
                d2d_half_width: stats.d2d.half_width,
                cc_offered: stats.cc.offered,
                cc_blocked: stats.cc.blocked,
                cc_estimate: stats.cc.estimate,
                cc_half_width: stats.cc.half_width,
                wifi_offered: stats.wifi.offered,
                wifi_blocked: stats.wifi.blocked,
                wifi_estimate: stats.wifi.estimate,
                wifi_half_width: stats.wifi.half_width,
                mean_occupancy: stats.mean_occupancy,
            });
            BandallocStatus::Ok
        }
        Err(err) => fail(&err),
    })
}

/// Returns the latest error message on this thread as a newly allocated
/// string, or null when no error has occurred. Free it with
/// [`bandalloc_string_free`].
#[no_mangle]
pub extern "C" fn bandalloc_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match slot.borrow().as_ref() {
        Some(msg) => msg.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Frees a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must be null or a pointer obtained from
/// [`bandalloc_last_error_message`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bandalloc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn bandalloc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
