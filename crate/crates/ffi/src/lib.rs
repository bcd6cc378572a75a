//! C interface to `credal-bayes`, in double precision.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible function
//! returns a [`CbStatus`] and writes its result through an out-pointer; the
//! message of the last failure on the calling thread is available from
//! [`cb_last_error_message`]. Events are bitmasks: bit i set means outcome i
//! is in the event.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use credal_bayes::bayes::{self, LikelihoodSet, PosteriorQuery, Route};
use credal_bayes::capacity::{Capacity, EventMask, OutcomeSpace, ProbabilityVector};
use credal_bayes::choquet::Functional;
use credal_bayes::model;
use credal_bayes::oracle::{self, LikelihoodSearch};
use credal_bayes::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    UndefinedRatio = 4,
    NotTwoAlternating = 5,
    TooLarge = 6,
    EmptyCore = 7,
    ZeroEvidence = 8,
    NotAttained = 9,
    Internal = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CbRoute {
    Vertex = 0,
    Choquet = 1,
}

/// Opaque prior capacity.
pub struct CbCapacity {
    inner: Capacity<f64>,
}

/// Opaque likelihood band. Values are kept raw and placed on the prior's
/// outcome space when the two are combined.
pub struct CbLikelihood {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

fn status_of(error: &Error) -> CbStatus {
    match error {
        Error::UndefinedRatio { .. } => CbStatus::UndefinedRatio,
        Error::NotTwoAlternating(..) => CbStatus::NotTwoAlternating,
        Error::SpaceTooLarge { .. } | Error::SpaceSize { .. } => CbStatus::TooLarge,
        Error::InfeasibleCore => CbStatus::EmptyCore,
        Error::ZeroEvidence | Error::AllZeroEvidence => CbStatus::ZeroEvidence,
        Error::EnvelopesNotMembers => CbStatus::NotAttained,
        Error::ChainViolation(_) | Error::ConcavityLost(_) | Error::PivotLimit(_) | Error::Io(_) => CbStatus::Internal,
        _ => CbStatus::InvalidInput,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (CbStatus, String)>) -> CbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            CbStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("panic inside credal-bayes");
            CbStatus::Panic
        }
    }
}

fn fail(e: Error) -> (CbStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (CbStatus, String) {
    (CbStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (CbStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], (CbStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), (CbStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn query(prior: &CbCapacity, l: &CbLikelihood, event: u32) -> Result<PosteriorQuery<f64>, (CbStatus, String)> {
    let likelihoods = likelihood_on(prior.inner.space(), l)?;
    PosteriorQuery::new(prior.inner.clone(), likelihoods, EventMask(event)).map_err(fail)
}

fn likelihood_on(space: &OutcomeSpace, l: &CbLikelihood) -> Result<LikelihoodSet<f64>, (CbStatus, String)> {
    let lower = Functional::new(space.clone(), l.lower.clone()).map_err(fail)?;
    let upper = Functional::new(space.clone(), l.upper.clone()).map_err(fail)?;
    LikelihoodSet::band(lower, upper).map_err(fail)
}

/// Message describing the last failure on this thread, or an empty string.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn cb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a capacity from its JSON form (`outcomes` is required).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_capacity_from_json(json: *const c_char, out: *mut *mut CbCapacity) -> CbStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (CbStatus::InvalidUtf8, e.to_string()))?;
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| fail(e.into()))?;
        let inner = model::capacity_from_json::<f64>(&value).map_err(fail)?;
        write(out, Box::into_raw(Box::new(CbCapacity { inner })), "out")
    })
}

/// (1 - eps) p(A) + eps on nonempty events, over outcomes labelled t1..tn.
///
/// # Safety
/// `p` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_capacity_eps_contamination(
    p: *const f64,
    n: usize,
    eps: f64,
    out: *mut *mut CbCapacity,
) -> CbStatus {
    guard(|| {
        let p = slice(p, n, "p")?;
        let space = OutcomeSpace::indexed(n).map_err(fail)?;
        let p = ProbabilityVector::new(space, p.to_vec()).map_err(fail)?;
        let inner = Capacity::epsilon_contamination(&p, eps).map_err(fail)?;
        write(out, Box::into_raw(Box::new(CbCapacity { inner })), "out")
    })
}

/// Number of outcomes, or 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cb_capacity_num_outcomes(c: *const CbCapacity) -> usize {
    c.as_ref().map_or(0, |c| c.inner.len())
}

/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_capacity_value(c: *const CbCapacity, event: u32, out: *mut f64) -> CbStatus {
    guard(|| {
        let c = deref(c, "capacity")?;
        let event = EventMask(event);
        if !event.fits(c.inner.len()) {
            return Err((CbStatus::InvalidInput, format!("event {event} is outside the space")));
        }
        write(out, *c.inner.value(event), "out")
    })
}

/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_capacity_is_two_alternating(c: *const CbCapacity, out: *mut bool) -> CbStatus {
    guard(|| {
        let c = deref(c, "capacity")?;
        write(out, c.inner.is_two_alternating().map_err(fail)?, "out")
    })
}

/// Explicit JSON form; release the string with [`cb_string_free`].
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_capacity_to_json(c: *const CbCapacity, out: *mut *mut c_char) -> CbStatus {
    guard(|| {
        let c = deref(c, "capacity")?;
        let text = model::capacity_to_json(&c.inner).to_string();
        let text = CString::new(text).map_err(|e| (CbStatus::Internal, e.to_string()))?;
        write(out, text.into_raw(), "out")
    })
}

/// # Safety
/// `c` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cb_capacity_free(c: *mut CbCapacity) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Likelihood band [lower, upper] over n outcomes.
///
/// # Safety
/// `lower` and `upper` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_likelihood_band(
    lower: *const f64,
    upper: *const f64,
    n: usize,
    out: *mut *mut CbLikelihood,
) -> CbStatus {
    guard(|| {
        let handle = CbLikelihood {
            lower: slice(lower, n, "lower")?.to_vec(),
            upper: slice(upper, n, "upper")?.to_vec(),
        };
        likelihood_on(&OutcomeSpace::indexed(n).map_err(fail)?, &handle)?;
        write(out, Box::into_raw(Box::new(handle)), "out")
    })
}

/// # Safety
/// `l` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cb_likelihood_free(l: *mut CbLikelihood) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// Vertex-route upper bound on the posterior upper probability of `event`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_upper_bound_vertex(
    prior: *const CbCapacity,
    likelihood: *const CbLikelihood,
    event: u32,
    out: *mut f64,
) -> CbStatus {
    upper(prior, likelihood, event, CbRoute::Vertex, out)
}

/// Choquet-route upper bound on the posterior upper probability of `event`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_upper_bound_choquet(
    prior: *const CbCapacity,
    likelihood: *const CbLikelihood,
    event: u32,
    out: *mut f64,
) -> CbStatus {
    upper(prior, likelihood, event, CbRoute::Choquet, out)
}

unsafe fn upper(
    prior: *const CbCapacity,
    likelihood: *const CbLikelihood,
    event: u32,
    route: CbRoute,
    out: *mut f64,
) -> CbStatus {
    guard(|| {
        let q = query(deref(prior, "prior")?, deref(likelihood, "likelihood")?, event)?;
        let bound = bayes::upper_bound(&q, route_of(route)).map_err(fail)?;
        write(out, bound.value, "out")
    })
}

/// 1 - upper bound of the complement.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_lower_bound(
    prior: *const CbCapacity,
    likelihood: *const CbLikelihood,
    event: u32,
    route: CbRoute,
    out: *mut f64,
) -> CbStatus {
    guard(|| {
        let q = query(deref(prior, "prior")?, deref(likelihood, "likelihood")?, event)?;
        write(out, bayes::lower_bound(&q, route_of(route)).map_err(fail)?, "out")
    })
}

/// Posterior upper probability of every event as a new capacity. Requires a
/// 2-alternating prior.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_posterior_capacity(
    prior: *const CbCapacity,
    likelihood: *const CbLikelihood,
    out: *mut *mut CbCapacity,
) -> CbStatus {
    guard(|| {
        let prior = deref(prior, "prior")?;
        let l = likelihood_on(prior.inner.space(), deref(likelihood, "likelihood")?)?;
        let inner = bayes::posterior_capacity(&prior.inner, &l).map_err(fail)?;
        write(out, Box::into_raw(Box::new(CbCapacity { inner })), "out")
    })
}

/// Brute-force posterior upper probability over core vertices and all
/// bang-bang likelihoods (at most 10 outcomes).
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_oracle_upper(
    prior: *const CbCapacity,
    likelihood: *const CbLikelihood,
    event: u32,
    out: *mut f64,
) -> CbStatus {
    guard(|| {
        let q = query(deref(prior, "prior")?, deref(likelihood, "likelihood")?, event)?;
        let result = oracle::brute_force_upper(&q, LikelihoodSearch::Exhaustive).map_err(fail)?;
        write(out, result.value, "out")
    })
}

fn route_of(route: CbRoute) -> Route {
    match route {
        CbRoute::Vertex => Route::Vertex,
        CbRoute::Choquet => Route::Choquet,
    }
}
