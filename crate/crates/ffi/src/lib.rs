//! C ABI over `levy-hit`.
//!
//! Models are opaque handles created by `lh_model_*` and released with
//! [`lh_model_free`]. Every fallible call returns an [`LhStatus`]; on failure
//! the message is kept per thread and read back with [`lh_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use levy_hit::asymptotics::point_hitting_asymptote;
use levy_hit::kernels::{h_sym, k_lambda, u_lambda};
use levy_hit::levy_model::{preset, ModelConfig};
use levy_hit::mc_engine::{estimate_hitting_tail, MCConfig, Target};
use levy_hit::{LevyError, LevyModel};

/// Opaque model handle.
pub struct LhModel(LevyModel);

/// Result codes; `LH_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LhStatus {
    LhOk = 0,
    LhNullPointer = 1,
    LhInvalidUtf8 = 2,
    LhDomain = 3,
    LhInvalidModel = 4,
    LhConfig = 5,
    LhNumerical = 6,
    LhAssumption = 7,
    LhUnsupported = 8,
    LhIo = 9,
    LhPanic = 10,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &LevyError) -> LhStatus {
    match e {
        LevyError::Domain(_) => LhStatus::LhDomain,
        LevyError::InvalidModel(_) => LhStatus::LhInvalidModel,
        LevyError::Config(_) => LhStatus::LhConfig,
        LevyError::QuadratureFailure { .. }
        | LevyError::NonIntegrable(_)
        | LevyError::UnstableLimit(_)
        | LevyError::InsufficientResolution(_) => LhStatus::LhNumerical,
        LevyError::ExistenceNotCertified | LevyError::NotCertified(_) | LevyError::AssumptionViolated(_) => {
            LhStatus::LhAssumption
        }
        LevyError::Unsupported(_) => LhStatus::LhUnsupported,
        LevyError::Io(_) => LhStatus::LhIo,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), LhStatusError>>(f: F) -> LhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            LhStatus::LhOk
        }
        Ok(Err(LhStatusError(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            LhStatus::LhPanic
        }
    }
}

struct LhStatusError(LhStatus, String);

impl From<LevyError> for LhStatusError {
    fn from(e: LevyError) -> Self {
        LhStatusError(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> LhStatusError {
    LhStatusError(LhStatus::LhNullPointer, format!("{what} is NULL"))
}

unsafe fn model_ref<'a>(m: *const LhModel) -> Result<&'a LevyModel, LhStatusError> {
    m.as_ref().map(|m| &m.0).ok_or_else(|| null("model"))
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, LhStatusError> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| LhStatusError(LhStatus::LhInvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), LhStatusError> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

unsafe fn emit_model(out: *mut *mut LhModel, m: LevyModel) -> Result<(), LhStatusError> {
    write_out(out, Box::into_raw(Box::new(LhModel(m))))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length, 0 if none.
///
/// # Safety
/// `buf` must be NULL or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn lh_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Built-in model by name, e.g. `"stable-sym-1.5"`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lh_model_preset(name: *const c_char, out: *mut *mut LhModel) -> LhStatus {
    guard(|| emit_model(out, preset(str_arg(name, "name")?)?))
}

/// Model from a TOML description.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lh_model_from_toml(toml: *const c_char, out: *mut *mut LhModel) -> LhStatus {
    guard(|| emit_model(out, ModelConfig::from_toml_str(str_arg(toml, "toml")?)?.build()?))
}

/// Centered strictly stable model with `Re ψ(1) = 1` and skewness `beta`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lh_model_stable(alpha: f64, beta: f64, out: *mut *mut LhModel) -> LhStatus {
    guard(|| emit_model(out, LevyModel::stable_unit(alpha, beta)?))
}

/// Brownian motion with `ψ(ξ) = σ²ξ²`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lh_model_brownian(sigma: f64, out: *mut *mut LhModel) -> LhStatus {
    guard(|| emit_model(out, LevyModel::brownian(sigma)?))
}

/// Releases a handle; NULL is ignored.
///
/// # Safety
/// `m` must come from an `lh_model_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lh_model_free(m: *mut LhModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// `ψ(ξ)` as real and imaginary parts.
///
/// # Safety
/// `m` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lh_psi(m: *const LhModel, xi: f64, re: *mut f64, im: *mut f64) -> LhStatus {
    guard(|| {
        let p = model_ref(m)?.eval_exponent(xi)?;
        write_out(re, p.re)?;
        write_out(im, p.im)
    })
}

/// Concentration function `h(r)`.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lh_concentration(m: *const LhModel, r: f64, out: *mut f64) -> LhStatus {
    guard(|| write_out(out, model_ref(m)?.concentration_h(r)?))
}

/// λ-potential density `u^λ(x)`, `λ > 0`.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lh_u_lambda(m: *const LhModel, lambda: f64, x: f64, out: *mut f64) -> LhStatus {
    guard(|| write_out(out, u_lambda(model_ref(m)?, lambda, x)?.value))
}

/// `K^λ(x) = u^λ(0) − u^λ(x)`; `λ = 0` gives the compensated kernel `K`.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lh_k_lambda(m: *const LhModel, lambda: f64, x: f64, out: *mut f64) -> LhStatus {
    guard(|| write_out(out, k_lambda(model_ref(m)?, lambda, x)?.value))
}

/// `H^λ(x) = K^λ(x) + K^λ(−x)`.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lh_h_sym(m: *const LhModel, lambda: f64, x: f64, out: *mut f64) -> LhStatus {
    guard(|| write_out(out, h_sym(model_ref(m)?, x, lambda)?.value))
}

/// Limit of `t (Re ψ)^{-1}(1/t) P^x(T_0 > t)`.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lh_point_asymptote(m: *const LhModel, x: f64, out: *mut f64) -> LhStatus {
    guard(|| write_out(out, point_hitting_asymptote(model_ref(m)?, x)?))
}

/// Simulation settings for [`lh_hitting_tail`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LhMcConfig {
    pub seed: u64,
    pub n_paths: usize,
    pub dt: f64,
    /// 0 defers to `LEVY_HIT_THREADS`, then to the machine.
    pub threads: usize,
}

/// Defaults matching the library.
#[no_mangle]
pub extern "C" fn lh_mc_config_default() -> LhMcConfig {
    let d = MCConfig::default();
    LhMcConfig {
        seed: d.seed,
        n_paths: d.n_paths,
        dt: d.dt,
        threads: 0,
    }
}

/// Monte Carlo survival `P^x(T_[lo,hi] > t_i)` for `n` times; writes
/// estimates and 95% half-widths into `estimate[n]` and `ci[n]`.
///
/// # Safety
/// `m` must be a live handle, `t` must hold `n` readable values and
/// `estimate`, `ci` `n` writable ones; `cfg` may be NULL for defaults.
#[no_mangle]
pub unsafe extern "C" fn lh_hitting_tail(
    m: *const LhModel,
    x: f64,
    lo: f64,
    hi: f64,
    t: *const f64,
    n: usize,
    cfg: *const LhMcConfig,
    estimate: *mut f64,
    ci: *mut f64,
) -> LhStatus {
    guard(|| {
        let model = model_ref(m)?;
        if t.is_null() || estimate.is_null() || ci.is_null() {
            return Err(null("array argument"));
        }
        let grid = std::slice::from_raw_parts(t, n);
        let c = cfg.as_ref().copied().unwrap_or_else(|| lh_mc_config_default());
        let t_max = grid.iter().cloned().fold(0.0, f64::max);
        let mc = MCConfig {
            seed: c.seed,
            n_paths: c.n_paths,
            dt: c.dt.min(t_max.max(f64::MIN_POSITIVE)),
            t_max: t_max.max(c.dt),
            threads: (c.threads > 0).then_some(c.threads),
            ..MCConfig::default()
        };
        let res = estimate_hitting_tail(model, x, Target::new(lo, hi)?, grid, &mc)?;
        for (i, r) in res.iter().enumerate() {
            *estimate.add(i) = r.estimate;
            *ci.add(i) = r.ci_halfwidth;
        }
        Ok(())
    })
}
