//! C ABI for the wiener-cubature core.
//!
//! Every fallible call returns a [`WcStatus`]. On failure the message is kept
//! per thread and can be read with [`wc_last_error_message`]. Objects are
//! opaque handles owned by the caller and released with the matching
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use wiener_cubature::algebra::Word;
use wiener_cubature::measures::GaussianRule;
use wiener_cubature::sde::{cubature_tree, monte_carlo, Method, MonteCarloConfig, SDEProblem, SolverReport, TreeConfig};
use wiener_cubature::wiener::{construct, expected_signature_coefficient, scale_formula, verify_formula, WienerCubatureFormula};
use wiener_cubature::Error;

/// Result codes shared by all functions.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unsupported = 3,
    Io = 4,
    Parse = 5,
    VerificationFailed = 6,
    BudgetExceeded = 7,
    Numerical = 8,
    Panic = 9,
}

/// Solver selector for [`wc_solve`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WcMethod {
    Taylor = 0,
    LogOde = 1,
}

/// Opaque cubature formula.
pub struct WcFormula(WienerCubatureFormula<f64>);

/// Opaque SDE problem.
pub struct WcProblem(SDEProblem);

/// Flat copy of a solver report. `reference` and `abs_error` are NaN when
/// no reference is known; `std_error` is NaN for cubature runs.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct WcReport {
    pub estimate: f64,
    pub reference: f64,
    pub abs_error: f64,
    pub std_error: f64,
    pub weight_sum: f64,
    /// Saturates at `u64::MAX`.
    pub leaf_count: u64,
    pub step_count: u64,
}

impl From<&SolverReport> for WcReport {
    fn from(r: &SolverReport) -> Self {
        WcReport {
            estimate: r.estimate,
            reference: r.reference.unwrap_or(f64::NAN),
            abs_error: r.abs_error.unwrap_or(f64::NAN),
            std_error: r.std_error.unwrap_or(f64::NAN),
            weight_sum: r.weight_sum,
            leaf_count: u64::try_from(r.leaf_count).unwrap_or(u64::MAX),
            step_count: r.step_count as u64,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn status_of(e: &Error) -> WcStatus {
    match e {
        Error::Io { .. } => WcStatus::Io,
        Error::Json(_) | Error::Csv(_) | Error::BracketParse(_) | Error::Payoff(_) => WcStatus::Parse,
        Error::Unsupported(_) | Error::SpaceTooLarge { .. } => WcStatus::Unsupported,
        Error::LeafBudget { .. } => WcStatus::BudgetExceeded,
        Error::MomentCheck { .. } => WcStatus::VerificationFailed,
        Error::NonFinite(_) | Error::SingularSystem(_) | Error::DegenerateFit { .. } => WcStatus::Numerical,
        _ => WcStatus::InvalidArgument,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (WcStatus, String)>) -> WcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            WcStatus::Panic
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, (WcStatus, String)>;
}

impl<T> OrStatus<T> for wiener_cubature::Result<T> {
    fn or_status(self) -> Result<T, (WcStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (WcStatus, String) {
    (WcStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> (WcStatus, String) {
    (WcStatus::InvalidArgument, msg.into())
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, (WcStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p).to_str().map_err(|_| invalid("path is not valid UTF-8"))?;
    Ok(Path::new(s))
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds the degree 3, 5 or 7 formula in `dim` Brownian dimensions. `x` is
/// the free parameter of the degree-5 construction (use 0.5).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn wc_formula_construct(degree: u32, dim: u32, x: f64, out: *mut *mut WcFormula) -> WcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let f = construct(degree as usize, dim as usize, GaussianRule::Auto, x).or_status()?;
        *out = Box::into_raw(Box::new(WcFormula(f)));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wc_formula_load(path: *const c_char, out: *mut *mut WcFormula) -> WcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let f = WienerCubatureFormula::<f64>::load(path_arg(path)?).or_status()?;
        *out = Box::into_raw(Box::new(WcFormula(f)));
        Ok(())
    })
}

/// # Safety
/// `f` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wc_formula_save(f: *const WcFormula, path: *const c_char) -> WcStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null("formula"))?;
        f.0.save(path_arg(path)?).or_status()
    })
}

/// Number of entries, degree and Brownian dimension of a formula. Any of the
/// output pointers may be null.
///
/// # Safety
/// `f` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn wc_formula_info(
    f: *const WcFormula,
    len: *mut usize,
    degree: *mut u32,
    dim: *mut u32,
) -> WcStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null("formula"))?;
        if let Some(p) = len.as_mut() {
            *p = f.0.len();
        }
        if let Some(p) = degree.as_mut() {
            *p = f.0.degree as u32;
        }
        if let Some(p) = dim.as_mut() {
            *p = f.0.dim as u32;
        }
        Ok(())
    })
}

/// Largest residual against the expected signature at time `t`, over all
/// words up to the formula's degree. Returns `VerificationFailed` when it
/// exceeds `tol`; the residual is written in both cases.
///
/// # Safety
/// `f` must be a live handle; `max_residual` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn wc_formula_verify(f: *const WcFormula, t: f64, tol: f64, max_residual: *mut f64) -> WcStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null("formula"))?;
        if !(t > 0.0) || !t.is_finite() {
            return Err(invalid(format!("time must be positive, got {t}")));
        }
        let scaled = scale_formula(&f.0, t).or_status()?;
        let r = verify_formula(&scaled, &t, None).or_status()?;
        if let Some(p) = max_residual.as_mut() {
            *p = r.max_residual;
        }
        if r.max_residual > tol {
            let w = &r.residuals[0];
            return Err((
                WcStatus::VerificationFailed,
                format!("max residual {:e} on word {} exceeds {tol:e}", r.max_residual, w.word),
            ));
        }
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wc_formula_free(f: *mut WcFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Expected-signature coefficient `E[S(B)_{0,t}]` of a word over letters
/// `0..=d`, where 0 is time.
///
/// # Safety
/// `letters` must point to `len` bytes (or be null when `len` is 0); `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn wc_expected_signature_coefficient(
    letters: *const u8,
    len: usize,
    t: f64,
    out: *mut f64,
) -> WcStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let w = if len == 0 {
            Word::empty()
        } else if letters.is_null() {
            return Err(null("letters"));
        } else {
            Word::new(std::slice::from_raw_parts(letters, len).to_vec())
        };
        *out = expected_signature_coefficient(&w, &t);
        Ok(())
    })
}

/// Stratonovich GBM `dX = a X dt + Σ b_j X ∘ dB^j` with the identity payoff.
///
/// # Safety
/// `b` must point to `d` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wc_problem_gbm(
    a: f64,
    b: *const f64,
    d: usize,
    x0: f64,
    t: f64,
    out: *mut *mut WcProblem,
) -> WcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if b.is_null() || d == 0 {
            return Err(invalid("at least one diffusion coefficient is required"));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(invalid(format!("horizon must be positive, got {t}")));
        }
        let b = std::slice::from_raw_parts(b, d);
        *out = Box::into_raw(Box::new(WcProblem(SDEProblem::gbm(a, b, x0, t))));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wc_problem_load(path: *const c_char, out: *mut *mut WcProblem) -> WcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = SDEProblem::load(path_arg(path)?).or_status()?;
        *out = Box::into_raw(Box::new(WcProblem(p)));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wc_problem_free(p: *mut WcProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Cubature tree over `steps` uniform steps. `threads` 0 means the default
/// pool; results do not depend on it.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wc_solve(
    p: *const WcProblem,
    f: *const WcFormula,
    method: WcMethod,
    steps: usize,
    threads: usize,
    out: *mut WcReport,
) -> WcStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("problem"))?;
        let f = f.as_ref().ok_or_else(|| null("formula"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let method = match method {
            WcMethod::Taylor => Method::Taylor,
            WcMethod::LogOde => Method::LogOde,
        };
        let cfg = TreeConfig { threads: (threads > 0).then_some(threads), ..TreeConfig::with_method(method) };
        let r = cubature_tree(&p.0, &f.0, steps, &cfg).or_status()?;
        *out = WcReport::from(&r);
        Ok(())
    })
}

/// Heun Monte Carlo with `paths` paths of `steps` steps from `seed`.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wc_monte_carlo(
    p: *const WcProblem,
    paths: usize,
    steps: usize,
    seed: u64,
    out: *mut WcReport,
) -> WcStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("problem"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = monte_carlo(&p.0, &MonteCarloConfig { paths, steps, seed, threads: Some(1) }).or_status()?;
        *out = WcReport::from(&r);
        Ok(())
    })
}
