//! C interface to the betcraft sequential tests.
//!
//! A test is created from a JSON description (the same `{"test": ...}`
//! objects used by experiment files) and fed observations one at a time.
//! Every entry point returns a [`BetcraftStatus`]; on failure a description
//! is available from [`betcraft_last_error`] on the calling thread. Panics
//! never cross the boundary.
//!
//! ```c
//! BetcraftTest *t = NULL;
//! betcraft_test_new("{\"test\":\"ks1\",\"target\":{\"uniform\":{\"a\":0,\"b\":1}}}", 0.05, &t);
//! bool rejected = false;
//! betcraft_test_observe_scalar(t, 0.3, &rejected);
//! betcraft_test_free(t);
//! ```

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use betcraft::baselines::{chi2_quantile, kolmogorov_quantile};
use betcraft::betting::Status;
use betcraft::catalog::TestSpec;
use betcraft::observation::Observation;
use betcraft::procedure::SequentialProcedure;
use betcraft::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetcraftStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The observation does not fit the test (wrong shape or domain).
    WrongObservation = 3,
    /// A numerical failure inside the test.
    Numerical = 4,
    /// An internal panic was caught.
    Internal = 5,
}

/// Opaque handle to a running sequential test.
pub struct BetcraftTest {
    inner: Box<dyn SequentialProcedure>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> BetcraftStatus {
    match e {
        Error::WrongObservation(_) | Error::DimensionMismatch { .. } => BetcraftStatus::WrongObservation,
        Error::PayoffOutOfRange { .. } | Error::Bankrupt { .. } | Error::Domain(_) => {
            BetcraftStatus::Numerical
        }
        _ => BetcraftStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (BetcraftStatus, String)>) -> BetcraftStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BetcraftStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BetcraftStatus::Internal
        }
    }
}

fn lift(e: Error) -> (BetcraftStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (BetcraftStatus, String) {
    (BetcraftStatus::NullPointer, format!("`{what}` is null"))
}

/// Static description of a status code. Never null; never freed.
#[no_mangle]
pub extern "C" fn betcraft_status_message(status: BetcraftStatus) -> *const c_char {
    let s: &'static CStr = match status {
        BetcraftStatus::Ok => c"ok",
        BetcraftStatus::NullPointer => c"null pointer argument",
        BetcraftStatus::InvalidArgument => c"invalid argument",
        BetcraftStatus::WrongObservation => c"observation does not fit the test",
        BetcraftStatus::Numerical => c"numerical failure",
        BetcraftStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

/// Message of the most recent failure on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn betcraft_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Create a test from a JSON spec such as `{"test":"mmd","bandwidth":1.0}`.
///
/// # Safety
/// `spec_json` must be a NUL-terminated string and `out` a writable pointer.
/// On success `*out` owns a handle to release with [`betcraft_test_free`].
#[no_mangle]
pub unsafe extern "C" fn betcraft_test_new(
    spec_json: *const c_char,
    alpha: f64,
    out: *mut *mut BetcraftTest,
) -> BetcraftStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if spec_json.is_null() {
            return Err(null("spec_json"));
        }
        let text = CStr::from_ptr(spec_json)
            .to_str()
            .map_err(|_| (BetcraftStatus::InvalidArgument, "spec is not UTF-8".to_string()))?;
        let spec: TestSpec =
            serde_json::from_str(text).map_err(|e| (BetcraftStatus::InvalidArgument, e.to_string()))?;
        let inner = spec.build(alpha).map_err(lift)?;
        *out = Box::into_raw(Box::new(BetcraftTest { inner }));
        Ok(())
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `test` must come from [`betcraft_test_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn betcraft_test_free(test: *mut BetcraftTest) {
    if !test.is_null() {
        drop(Box::from_raw(test));
    }
}

unsafe fn observe(test: *mut BetcraftTest, obs: Observation, rejected: *mut bool) -> BetcraftStatus {
    guard(|| {
        let t = test.as_mut().ok_or_else(|| null("test"))?;
        let status = t.inner.observe(obs).map_err(lift)?;
        if !rejected.is_null() {
            *rejected = matches!(status, Status::Rejected { .. });
        }
        Ok(())
    })
}

/// Feed one scalar observation. `rejected` (may be null) receives whether
/// the null has been rejected by now.
///
/// # Safety
/// `test` must be a live handle; `rejected` null or writable.
#[no_mangle]
pub unsafe extern "C" fn betcraft_test_observe_scalar(
    test: *mut BetcraftTest,
    value: f64,
    rejected: *mut bool,
) -> BetcraftStatus {
    observe(test, Observation::Scalar(value), rejected)
}

/// Feed one `(x, y)` pair of scalars.
///
/// # Safety
/// As for [`betcraft_test_observe_scalar`].
#[no_mangle]
pub unsafe extern "C" fn betcraft_test_observe_pair(
    test: *mut BetcraftTest,
    x: f64,
    y: f64,
    rejected: *mut bool,
) -> BetcraftStatus {
    observe(test, Observation::Pair(x, y), rejected)
}

/// Feed one pair of `dim`-dimensional points.
///
/// # Safety
/// `x` and `y` must each point to `dim` readable doubles; otherwise as for
/// [`betcraft_test_observe_scalar`].
#[no_mangle]
pub unsafe extern "C" fn betcraft_test_observe_vectors(
    test: *mut BetcraftTest,
    x: *const f64,
    y: *const f64,
    dim: usize,
    rejected: *mut bool,
) -> BetcraftStatus {
    if x.is_null() || y.is_null() {
        return guard(|| Err(null("x or y")));
    }
    if dim == 0 {
        return guard(|| Err((BetcraftStatus::InvalidArgument, "dim must be positive".into())));
    }
    let xs = std::slice::from_raw_parts(x, dim).to_vec();
    let ys = std::slice::from_raw_parts(y, dim).to_vec();
    observe(test, Observation::Vectors(xs, ys), rejected)
}

/// Current wealth (betting tests) or monitored statistic (baselines).
///
/// # Safety
/// `test` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn betcraft_test_statistic(test: *const BetcraftTest, out: *mut f64) -> BetcraftStatus {
    guard(|| {
        let t = test.as_ref().ok_or_else(|| null("test"))?;
        let o = out.as_mut().ok_or_else(|| null("out"))?;
        *o = t.inner.statistic();
        Ok(())
    })
}

/// Number of observations consumed.
///
/// # Safety
/// `test` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn betcraft_test_steps(test: *const BetcraftTest, out: *mut u64) -> BetcraftStatus {
    guard(|| {
        let t = test.as_ref().ok_or_else(|| null("test"))?;
        let o = out.as_mut().ok_or_else(|| null("out"))?;
        *o = t.inner.steps();
        Ok(())
    })
}

/// Step at which the null was rejected, or 0 if it has not been.
///
/// # Safety
/// `test` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn betcraft_test_stopping_time(
    test: *const BetcraftTest,
    out: *mut u64,
) -> BetcraftStatus {
    guard(|| {
        let t = test.as_ref().ok_or_else(|| null("test"))?;
        let o = out.as_mut().ok_or_else(|| null("out"))?;
        *o = t.inner.stopping_time().unwrap_or(0);
        Ok(())
    })
}

/// Upper-`alpha` quantile of the Kolmogorov distribution.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn betcraft_kolmogorov_quantile(alpha: f64, out: *mut f64) -> BetcraftStatus {
    guard(|| {
        let o = out.as_mut().ok_or_else(|| null("out"))?;
        *o = kolmogorov_quantile(alpha).map_err(lift)?;
        Ok(())
    })
}

/// Upper-`alpha` quantile of χ² with `df` degrees of freedom.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn betcraft_chi2_quantile(df: u32, alpha: f64, out: *mut f64) -> BetcraftStatus {
    guard(|| {
        let o = out.as_mut().ok_or_else(|| null("out"))?;
        *o = chi2_quantile(df, alpha).map_err(lift)?;
        Ok(())
    })
}
