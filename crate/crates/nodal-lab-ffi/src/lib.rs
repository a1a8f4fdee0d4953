//! C ABI over the nodal-lab toolkit.
//!
//! Conventions: every fallible call returns a [`NodalStatus`]; results leave
//! through out-pointers; heap objects cross the boundary as opaque handles
//! with explicit `_free` functions.  On any non-[`NodalStatus::Ok`] return
//! the thread-local error message is set and can be copied out with
//! [`nodal_last_error_message`].  All functions are panic-safe: a caught
//! panic reports [`NodalStatus::Panic`] instead of unwinding across the
//! boundary.
//!
//! The matching C header is generated into `include/nodal_lab.h` at build
//! time by cbindgen.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nodal_lab::kac_rice::KacRiceContext;
use nodal_lab::kernel::CovarianceKernel1D;
use nodal_lab::lattice::enumerate_lattice_points;
use nodal_lab::measure::Direction;
use nodal_lab::monte_carlo::{estimate, resolve_measure_spec, ExperimentConfig, MomentEstimates};
use nodal_lab::{Error, FrequencyConvention};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodalStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Invalid configuration or argument (bad measure spec, non-UTF-8
    /// string, out-of-range parameter).
    InvalidArgument = 2,
    /// A numerical routine failed (degenerate covariance, quadrature).
    NumericalFailure = 3,
    /// An internal panic was caught at the boundary.
    Panic = 4,
}

/// Frequency convention selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodalConvention {
    /// ω = 1: wavelength 2π.
    Angular = 0,
    /// ω = 2π: rescaled waves, unit wavelength scale.
    TwoPi = 1,
}

impl From<NodalConvention> for FrequencyConvention {
    fn from(value: NodalConvention) -> Self {
        match value {
            NodalConvention::Angular => FrequencyConvention::Angular,
            NodalConvention::TwoPi => FrequencyConvention::TwoPi,
        }
    }
}

/// Opaque experiment description (measure, direction, length, sample count).
pub struct NodalExperiment(ExperimentConfig);

/// Opaque Monte Carlo result set.
pub struct NodalEstimates(MomentEstimates);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', "?")).expect("NULs replaced");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn fail(error: &Error) -> NodalStatus {
    set_error(error.to_string());
    match error.exit_code() {
        2 => NodalStatus::NumericalFailure,
        _ => NodalStatus::InvalidArgument,
    }
}

fn null_pointer(what: &str) -> NodalStatus {
    set_error(format!("{what} must not be null"));
    NodalStatus::NullPointer
}

/// Run a closure behind a panic guard, translating panics into a status.
fn guarded(body: impl FnOnce() -> NodalStatus) -> NodalStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| (*s).to_owned())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_owned());
            set_error(format!("internal panic: {message}"));
            NodalStatus::Panic
        }
    }
}

/// # Safety
/// `measure` must point to a NUL-terminated string.
unsafe fn measure_str<'a>(measure: *const c_char) -> Result<&'a str, NodalStatus> {
    if measure.is_null() {
        return Err(null_pointer("measure"));
    }
    CStr::from_ptr(measure).to_str().map_err(|_| {
        set_error("measure spec is not valid UTF-8".to_owned());
        NodalStatus::InvalidArgument
    })
}

/// Copy the last error message of this thread into `buffer` (NUL-terminated,
/// truncated to `capacity`).  Returns the full message length in bytes
/// excluding the NUL, or 0 when no error is pending.  `buffer` may be null
/// to query the required capacity.
#[no_mangle]
pub unsafe extern "C" fn nodal_last_error_message(
    buffer: *mut c_char,
    capacity: usize,
) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let Some(message) = slot.as_ref() else {
            return 0;
        };
        let bytes = message.as_bytes();
        if !buffer.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buffer, n);
            *buffer.add(n) = 0;
        }
        bytes.len()
    })
}

/// Create an experiment handle.
///
/// `measure` is a builtin spec (`cilleruelo`, `tilted`, `uniform:<n>`,
/// `sigma:<theta>:<n>`, `lattice:<m>`) or a path to a measure JSON file;
/// `u` is the segment direction in radians, `length` the segment length.
///
/// # Safety
/// `measure` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nodal_experiment_new(
    measure: *const c_char,
    convention: NodalConvention,
    u: f64,
    length: f64,
    samples: u64,
    seed: u64,
    out: *mut *mut NodalExperiment,
) -> NodalStatus {
    guarded(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        let spec = match measure_str(measure) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let config = ExperimentConfig::new(spec, convention.into(), u, length, samples, seed);
        if let Err(e) = config.validate().and_then(|()| resolve_measure_spec(spec).map(drop)) {
            return fail(&e);
        }
        clear_error();
        *out = Box::into_raw(Box::new(NodalExperiment(config)));
        NodalStatus::Ok
    })
}

/// Release an experiment handle (null is a no-op).
///
/// # Safety
/// `handle` must come from [`nodal_experiment_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn nodal_experiment_free(handle: *mut NodalExperiment) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Run the Monte Carlo experiment and hand back an estimates handle.
///
/// # Safety
/// `handle` must be a live experiment; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nodal_experiment_run(
    handle: *const NodalExperiment,
    out: *mut *mut NodalEstimates,
) -> NodalStatus {
    guarded(|| {
        if handle.is_null() {
            return null_pointer("handle");
        }
        if out.is_null() {
            return null_pointer("out");
        }
        match estimate(&(*handle).0) {
            Ok(estimates) => {
                clear_error();
                *out = Box::into_raw(Box::new(NodalEstimates(estimates)));
                NodalStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Release an estimates handle (null is a no-op).
///
/// # Safety
/// `handle` must come from [`nodal_experiment_run`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn nodal_estimates_free(handle: *mut NodalEstimates) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

unsafe fn statistic(
    handle: *const NodalEstimates,
    value: *mut f64,
    se: *mut f64,
    read: impl Fn(&MomentEstimates) -> (f64, f64),
) -> NodalStatus {
    if handle.is_null() {
        return null_pointer("handle");
    }
    if value.is_null() || se.is_null() {
        return null_pointer("value/se");
    }
    let (v, s) = read(&(*handle).0);
    *value = v;
    *se = s;
    clear_error();
    NodalStatus::Ok
}

/// Mean zero count with its standard error.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nodal_estimates_mean(
    handle: *const NodalEstimates,
    value: *mut f64,
    se: *mut f64,
) -> NodalStatus {
    guarded(|| statistic(handle, value, se, |e| (e.mean.value, e.mean.se)))
}

/// Second factorial moment E[Z(Z−1)] with its standard error.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nodal_estimates_second_factorial(
    handle: *const NodalEstimates,
    value: *mut f64,
    se: *mut f64,
) -> NodalStatus {
    guarded(|| {
        statistic(handle, value, se, |e| {
            (e.second_factorial.value, e.second_factorial.se)
        })
    })
}

/// Sample variance of the zero count with its standard error.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nodal_estimates_variance(
    handle: *const NodalEstimates,
    value: *mut f64,
    se: *mut f64,
) -> NodalStatus {
    guarded(|| statistic(handle, value, se, |e| (e.variance.value, e.variance.se)))
}

/// Persistence probability P(Z = 0) with its standard error.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nodal_estimates_persistence(
    handle: *const NodalEstimates,
    value: *mut f64,
    se: *mut f64,
) -> NodalStatus {
    guarded(|| {
        statistic(handle, value, se, |e| {
            (e.persistence.value, e.persistence.se)
        })
    })
}

/// Empirical probability of observing exactly `count` zeros.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nodal_estimates_count_probability(
    handle: *const NodalEstimates,
    count: u64,
    probability: *mut f64,
) -> NodalStatus {
    guarded(|| {
        if handle.is_null() {
            return null_pointer("handle");
        }
        if probability.is_null() {
            return null_pointer("probability");
        }
        let estimates = &(*handle).0;
        let hits = estimates.histogram.get(&count).copied().unwrap_or(0);
        *probability = hits as f64 / estimates.n_samples as f64;
        clear_error();
        NodalStatus::Ok
    })
}

/// Kac–Rice expected zero count for a measure/direction/length, no sampling.
///
/// # Safety
/// `measure` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nodal_expected_zero_count(
    measure: *const c_char,
    convention: NodalConvention,
    u: f64,
    length: f64,
    out: *mut f64,
) -> NodalStatus {
    guarded(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        let spec = match measure_str(measure) {
            Ok(s) => s,
            Err(status) => return status,
        };
        if !(length.is_finite() && length >= 0.0) {
            set_error(format!("length must be finite and nonnegative, got {length}"));
            return NodalStatus::InvalidArgument;
        }
        let mu = match resolve_measure_spec(spec) {
            Ok(mu) => mu,
            Err(e) => return fail(&e),
        };
        let kernel = CovarianceKernel1D::from_measure(&mu, Direction::new(u), convention.into());
        *out = KacRiceContext::new(kernel).expected_zero_count(length);
        clear_error();
        NodalStatus::Ok
    })
}

/// Lattice points on the circle of radius √m: count and fourth moment ν̂₄.
///
/// # Safety
/// `r2` and `nu4_hat` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn nodal_lattice_circle(
    m: u64,
    r2: *mut u64,
    nu4_hat: *mut f64,
) -> NodalStatus {
    guarded(|| {
        if r2.is_null() || nu4_hat.is_null() {
            return null_pointer("r2/nu4_hat");
        }
        match enumerate_lattice_points(m) {
            Ok(circle) => {
                *r2 = circle.r2() as u64;
                *nu4_hat = circle.nu4_hat();
                clear_error();
                NodalStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}
