//! C ABI over `disclosure-core`.
//!
//! Models are opaque handles created by the `ds_*_new` constructors and
//! released with [`ds_model_free`]. Every fallible call returns a
//! [`DsStatus`]; on failure the message is available from
//! [`ds_last_error`] on the same thread. Results are written through out
//! pointers, which are left untouched on failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use disclosure_core::applications::{
    crra_model, crra_regime, quadratic_cs_model, separable_model, CrraParams, CrraRegime, SeparableParams,
};
use disclosure_core::conditions::{
    check_derivable_condition, check_suboptimality, check_weak_condition, ConditionVerdict, GridSpec, Status,
};
use disclosure_core::model::{Interval, Posterior, StateActionModel};
use disclosure_core::oracle::{binary_split_gain, concavify_2state, EnvelopeVerdict};
use disclosure_core::Error;

/// Opaque model handle.
pub struct DsModel(StateActionModel);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsStatus {
    Ok = 0,
    NullPointer = 1,
    NoInteriorRoot = 2,
    DomainError = 3,
    ConcavityViolation = 4,
    MissingDerivatives = 5,
    InvalidParams = 6,
    InvalidPosterior = 7,
    InvalidGrid = 8,
    InvalidArgument = 9,
    NotLinearReceiver = 10,
    MonotonicityViolation = 11,
    NoOpposingStates = 12,
    InfeasibleWeights = 13,
    DegenerateSimplex = 14,
    UnsupportedSupportSize = 15,
    SolverError = 16,
    ConfigError = 17,
    IoError = 18,
    Panic = 19,
}

impl From<&Error> for DsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NoInteriorRoot { .. } => DsStatus::NoInteriorRoot,
            Error::Domain(_) => DsStatus::DomainError,
            Error::ConcavityViolation { .. } => DsStatus::ConcavityViolation,
            Error::MissingDerivatives { .. } => DsStatus::MissingDerivatives,
            Error::InvalidParams(_) => DsStatus::InvalidParams,
            Error::InvalidPosterior(_) => DsStatus::InvalidPosterior,
            Error::InvalidGrid(_) => DsStatus::InvalidGrid,
            Error::InvalidArgument(_) => DsStatus::InvalidArgument,
            Error::NotLinearReceiver(_) => DsStatus::NotLinearReceiver,
            Error::MonotonicityViolation(_) => DsStatus::MonotonicityViolation,
            Error::NoOpposingStates(_) => DsStatus::NoOpposingStates,
            Error::InfeasibleWeights(_) => DsStatus::InfeasibleWeights,
            Error::DegenerateSimplex(_) => DsStatus::DegenerateSimplex,
            Error::UnsupportedSupportSize(_) => DsStatus::UnsupportedSupportSize,
            Error::Solver(_) => DsStatus::SolverError,
            Error::Config(_) => DsStatus::ConfigError,
            Error::Io(_) => DsStatus::IoError,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsVerdict {
    HoldsStrictly = 0,
    HoldsWeakly = 1,
    Violated = 2,
    Vacuous = 3,
}

impl From<Status> for DsVerdict {
    fn from(s: Status) -> Self {
        match s {
            Status::HoldsStrictly => DsVerdict::HoldsStrictly,
            Status::HoldsWeakly => DsVerdict::HoldsWeakly,
            Status::Violated => DsVerdict::Violated,
            Status::Vacuous => DsVerdict::Vacuous,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsEnvelopeVerdict {
    FullDisclosureOptimal = 0,
    FullDisclosureSuboptimal = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsRegime {
    Optimal = 0,
    Suboptimal = 1,
    Inconclusive = 2,
}

/// Grid verdict of a pairwise condition.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DsConditionResult {
    pub verdict: DsVerdict,
    pub min_margin: f64,
    pub margin_tol: f64,
    pub pairs_tested: u64,
}

impl From<&ConditionVerdict> for DsConditionResult {
    fn from(v: &ConditionVerdict) -> Self {
        Self { verdict: v.status.into(), min_margin: v.min_margin, margin_tol: v.margin_tol, pairs_tested: v.pairs_tested }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DsSuboptimality {
    /// 1 when a witness pair was found, 0 otherwise.
    pub found: u8,
    /// State with the lower full-information action.
    pub low_state: f64,
    pub high_state: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DsBinarySplit {
    pub low_state: f64,
    pub high_state: f64,
    pub p_low: f64,
    pub a_pool: f64,
    pub a_low: f64,
    pub a_high: f64,
    pub k: f64,
    pub gain: f64,
    pub effort_delta: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DsEnvelope {
    pub verdict: DsEnvelopeVerdict,
    /// Envelope value at the prior minus the full-disclosure value.
    pub margin: f64,
    pub envelope_value: f64,
    pub full_disclosure_value: f64,
    pub pooled_value: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), DsError>) -> DsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            DsStatus::Ok
        }
        Ok(Err(DsError::Core(e))) => {
            set_last_error(&e.to_string());
            DsStatus::from(&e)
        }
        Ok(Err(DsError::Null(what))) => {
            set_last_error(&format!("null pointer: {what}"));
            DsStatus::NullPointer
        }
        Err(_) => {
            set_last_error("internal panic");
            DsStatus::Panic
        }
    }
}

enum DsError {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for DsError {
    fn from(e: Error) -> Self {
        DsError::Core(e)
    }
}

unsafe fn model_ref<'a>(m: *const DsModel) -> Result<&'a StateActionModel, DsError> {
    m.as_ref().map(|m| &m.0).ok_or(DsError::Null("model"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), DsError> {
    if out.is_null() {
        return Err(DsError::Null("out"));
    }
    out.write(value);
    Ok(())
}

unsafe fn posterior(support: *const f64, probs: *const f64, n: usize) -> Result<Posterior, DsError> {
    if support.is_null() || probs.is_null() {
        return Err(DsError::Null("posterior"));
    }
    let s = std::slice::from_raw_parts(support, n).to_vec();
    let p = std::slice::from_raw_parts(probs, n).to_vec();
    Ok(Posterior::new(s, p)?)
}

fn boxed(m: StateActionModel) -> *mut DsModel {
    Box::into_raw(Box::new(DsModel(m)))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ds_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Message of the most recent failure on this thread. The pointer stays
/// valid until the next `ds_*` call on the same thread.
#[no_mangle]
pub extern "C" fn ds_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// CRRA effort model on the state interval `[state_lo, state_hi]`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ds_crra_new(
    gamma: f64,
    rho: f64,
    delta: f64,
    kappa: f64,
    state_lo: f64,
    state_hi: f64,
    out: *mut *mut DsModel,
) -> DsStatus {
    guard(|| {
        let p = CrraParams::new(gamma, rho, delta, kappa)?;
        let m = crra_model(p, Interval::new(state_lo, state_hi)?, None)?;
        write(out, boxed(m))
    })
}

/// Quadratic-loss model with sender bias `b`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ds_quadratic_cs_new(b: f64, state_lo: f64, state_hi: f64, out: *mut *mut DsModel) -> DsStatus {
    guard(|| {
        let m = quadratic_cs_model(b, Interval::new(state_lo, state_hi)?, None)?;
        write(out, boxed(m))
    })
}

/// Separable production model with `φ = h·a^κ`, `ξ = l·a^τ` and `β(ω) = ω`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn ds_separable_power_new(
    h: f64,
    kappa: f64,
    l: f64,
    tau: f64,
    delta: f64,
    state_lo: f64,
    state_hi: f64,
    out: *mut *mut DsModel,
) -> DsStatus {
    guard(|| {
        let p = SeparableParams::power_power(h, kappa, l, tau, delta);
        let m = separable_model(p, Interval::new(state_lo, state_hi)?, None)?;
        write(out, boxed(m))
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from a `ds_*_new` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ds_model_free(model: *mut DsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Receiver's best response to the posterior `(support[i], probs[i])`.
///
/// # Safety
/// `support` and `probs` must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn ds_best_response(
    model: *const DsModel,
    support: *const f64,
    probs: *const f64,
    n: usize,
    out: *mut f64,
) -> DsStatus {
    guard(|| {
        let m = model_ref(model)?;
        let a = m.best_response(&posterior(support, probs, n)?)?;
        write(out, a)
    })
}

/// Sender's expected utility at the receiver's best response.
///
/// # Safety
/// As [`ds_best_response`].
#[no_mangle]
pub unsafe extern "C" fn ds_sender_value(
    model: *const DsModel,
    support: *const f64,
    probs: *const f64,
    n: usize,
    out: *mut f64,
) -> DsStatus {
    guard(|| {
        let m = model_ref(model)?;
        let v = m.sender_value(&posterior(support, probs, n)?)?;
        write(out, v)
    })
}

/// `V_a / (−U_aa)` at `(state, action)`.
///
/// # Safety
/// `model` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ds_ratio(model: *const DsModel, state: f64, action: f64, out: *mut f64) -> DsStatus {
    guard(|| {
        let r = model_ref(model)?.ratio(state, action)?;
        write(out, r)
    })
}

/// Weak sufficient condition on an automatic `n_states x n_actions` grid.
///
/// # Safety
/// `model` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ds_check_weak(
    model: *const DsModel,
    n_states: usize,
    n_actions: usize,
    out: *mut DsConditionResult,
) -> DsStatus {
    guard(|| {
        let m = model_ref(model)?;
        let v = check_weak_condition(m, &GridSpec::auto(m, n_states, n_actions)?)?;
        write(out, (&v).into())
    })
}

/// Derivable condition on an automatic grid.
///
/// # Safety
/// As [`ds_check_weak`].
#[no_mangle]
pub unsafe extern "C" fn ds_check_derivable(
    model: *const DsModel,
    n_states: usize,
    n_actions: usize,
    out: *mut DsConditionResult,
) -> DsStatus {
    guard(|| {
        let m = model_ref(model)?;
        let v = check_derivable_condition(m, &GridSpec::auto(m, n_states, n_actions)?)?;
        write(out, (&v).into())
    })
}

/// Searches the prior support for a reversed state pair. The support states
/// are added to the grid.
///
/// # Safety
/// `support` must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn ds_check_suboptimality(
    model: *const DsModel,
    n_states: usize,
    n_actions: usize,
    support: *const f64,
    n: usize,
    out: *mut DsSuboptimality,
) -> DsStatus {
    guard(|| {
        let m = model_ref(model)?;
        if support.is_null() {
            return Err(DsError::Null("support"));
        }
        let states = std::slice::from_raw_parts(support, n);
        let auto = GridSpec::auto(m, n_states, n_actions)?;
        let mut points = auto.state_points().to_vec();
        points.extend_from_slice(states);
        points.sort_by(f64::total_cmp);
        points.dedup();
        let grid = GridSpec::new(points, auto.action_points().to_vec())?;
        let report = check_suboptimality(m, &grid, states)?;
        let (found, (lo, hi)) = match report.witness {
            Some(w) => (1, w),
            None => (0, (f64::NAN, f64::NAN)),
        };
        write(out, DsSuboptimality { found, low_state: lo, high_state: hi })
    })
}

/// Sender's gain from revealing `state1` and `state2` instead of pooling
/// them with probability `p1` on `state1`.
///
/// # Safety
/// `model` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ds_binary_split_gain(
    model: *const DsModel,
    state1: f64,
    state2: f64,
    p1: f64,
    out: *mut DsBinarySplit,
) -> DsStatus {
    guard(|| {
        let r = binary_split_gain(model_ref(model)?, state1, state2, p1)?;
        write(
            out,
            DsBinarySplit {
                low_state: r.low_state,
                high_state: r.high_state,
                p_low: r.p_low,
                a_pool: r.a_pool,
                a_low: r.a_low,
                a_high: r.a_high,
                k: r.k,
                gain: r.gain,
                effort_delta: r.effort_delta,
            },
        )
    })
}

/// Concavification on two states; `prior_p` is the probability of
/// `state_hi`.
///
/// # Safety
/// `model` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ds_concavify_2state(
    model: *const DsModel,
    state_lo: f64,
    state_hi: f64,
    prior_p: f64,
    resolution: usize,
    out: *mut DsEnvelope,
) -> DsStatus {
    guard(|| {
        let r = concavify_2state(model_ref(model)?, (state_lo, state_hi), prior_p, resolution)?;
        let verdict = match r.verdict {
            EnvelopeVerdict::FullDisclosureOptimal => DsEnvelopeVerdict::FullDisclosureOptimal,
            EnvelopeVerdict::FullDisclosureSuboptimal => DsEnvelopeVerdict::FullDisclosureSuboptimal,
        };
        write(
            out,
            DsEnvelope {
                verdict,
                margin: r.margin,
                envelope_value: r.envelope_value_at_prior,
                full_disclosure_value: r.full_disclosure_value,
                pooled_value: r.pooled_value,
            },
        )
    })
}

/// Analytic CRRA regime for `(gamma, rho)`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ds_crra_regime(gamma: f64, rho: f64, out: *mut DsRegime) -> DsStatus {
    guard(|| {
        let r = match crra_regime(gamma, rho)? {
            CrraRegime::Optimal => DsRegime::Optimal,
            CrraRegime::Suboptimal => DsRegime::Suboptimal,
            CrraRegime::Inconclusive => DsRegime::Inconclusive,
        };
        write(out, r)
    })
}
