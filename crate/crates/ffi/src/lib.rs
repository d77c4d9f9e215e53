//! C ABI for `svoltails`.
//!
//! Every fallible function returns an [`SvtStatus`] and writes results through out-pointers.
//! On failure a message is kept per thread and can be read with [`svt_last_error`]. Models and
//! stock densities are opaque handles owned by the caller and released with their `_free`
//! functions.

// `!(x > 0.0)` is how NaN gets rejected along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use svoltails::asymptotics::{mixing_constants, smile_coeffs, stock_constants};
use svoltails::densities::{self, StockDensity};
use svoltails::montecarlo::{simulate_cir_alpha, simulate_ou_alpha, McConfig, Scheme};
use svoltails::pricing::{self, OptionSpec};
use svoltails::special_roots::{smallest_root, RootQuery};
use svoltails::transforms;
use svoltails::{Error, HestonParams, Model, SteinSteinParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvtStatus {
    Ok = 0,
    /// A null pointer, bad length or parameter outside its admissible range.
    InvalidArgument = 1,
    /// Transform argument outside the analyticity half-plane.
    Domain = 2,
    /// Quadrature, inversion or root finding failed.
    Numerical = 3,
    /// Price outside the no-arbitrage band.
    Arbitrage = 4,
    Internal = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

/// Opaque model handle.
pub struct SvtModel(Model);

/// Opaque stock-density handle; precomputes the mixing table once.
pub struct SvtStockDensity(StockDensity);

/// `m_t(y) ≈ exp(log_prefactor) · y^power · exp(linear·y − quadratic·y²)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SvtMixingTail {
    pub log_prefactor: f64,
    pub linear: f64,
    pub quadratic: f64,
    pub power: f64,
}

/// `D_t(x0 e^{μt} x) ≈ c1 x^{−c3} e^{c2 √log x} (log x)^{log_power}`, with the smile
/// coefficients at maturity `t`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SvtStockTail {
    pub c1: f64,
    pub log_c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub log_power: f64,
    pub moment_lo: f64,
    pub moment_hi: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SvtStatus {
    match e {
        Error::InvalidParameter(_) => SvtStatus::InvalidArgument,
        Error::Domain { .. } => SvtStatus::Domain,
        Error::Numerical(_) => SvtStatus::Numerical,
        Error::Arbitrage { .. } => SvtStatus::Arbitrage,
        _ => SvtStatus::Internal,
    }
}

struct Fail(SvtStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(name: &str) -> Fail {
    Fail(SvtStatus::InvalidArgument, format!("{name} is null"))
}

/// Runs `f`, converting errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SvtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SvtStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            SvtStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or valid for writes.
unsafe fn write<T>(p: *mut T, name: &str, v: T) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(name));
    }
    unsafe { p.write(v) };
    Ok(())
}

/// # Safety
/// `m` must be null or a live handle from one of the constructors.
unsafe fn model<'a>(m: *const SvtModel) -> Result<&'a Model, Fail> {
    unsafe { m.as_ref() }.map(|m| &m.0).ok_or_else(|| null("model"))
}

/// Message of the last failed call on this thread, or null. The pointer stays valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn svt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn svt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be valid for writes. The handle must be released with [`svt_model_free`].
#[no_mangle]
pub unsafe extern "C" fn svt_model_heston_new(
    mu: f64,
    a: f64,
    b: f64,
    c: f64,
    y0: f64,
    x0: f64,
    out: *mut *mut SvtModel,
) -> SvtStatus {
    guard(|| {
        let m = Model::Heston(HestonParams::new(mu, a, b, c, y0, x0)?);
        unsafe { write(out, "out", Box::into_raw(Box::new(SvtModel(m)))) }
    })
}

/// # Safety
/// `out` must be valid for writes. The handle must be released with [`svt_model_free`].
#[no_mangle]
pub unsafe extern "C" fn svt_model_stein_stein_new(
    mu: f64,
    q: f64,
    m: f64,
    sigma: f64,
    y0: f64,
    x0: f64,
    out: *mut *mut SvtModel,
) -> SvtStatus {
    guard(|| {
        let model = Model::SteinStein(SteinSteinParams::new(mu, q, m, sigma, y0, x0)?);
        unsafe { write(out, "out", Box::into_raw(Box::new(SvtModel(model)))) }
    })
}

/// # Safety
/// `m` must be null or a handle from a model constructor that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn svt_model_free(m: *mut SvtModel) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}

/// Smallest positive zero of `z cos z + s sin z`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn svt_smallest_root(s: f64, out: *mut f64) -> SvtStatus {
    guard(|| {
        let r = smallest_root(&RootQuery::with_default_tolerance(s)?)?;
        unsafe { write(out, "out", r) }
    })
}

/// `E exp(−λ V)` for the integrated variance `V` at complex `λ`.
///
/// # Safety
/// `model` must be a live handle; `out_re` and `out_im` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn svt_laplace(
    model: *const SvtModel,
    t: f64,
    lam_re: f64,
    lam_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> SvtStatus {
    guard(|| {
        let v = transforms::laplace(unsafe { self::model(model)? }, t, Complex64::new(lam_re, lam_im))?;
        unsafe {
            write(out_re, "out_re", v.re)?;
            write(out_im, "out_im", v.im)
        }
    })
}

/// Density of the integrated variance at `v`.
///
/// # Safety
/// `model` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn svt_integrated_variance_density(model: *const SvtModel, t: f64, v: f64, out: *mut f64) -> SvtStatus {
    guard(|| {
        let d = densities::integrated_variance_density(unsafe { self::model(model)? }, t, v)?;
        unsafe { write(out, "out", d) }
    })
}

/// Mixing density `m_t(y)`.
///
/// # Safety
/// `model` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn svt_mixing_density(model: *const SvtModel, t: f64, y: f64, out: *mut f64) -> SvtStatus {
    guard(|| {
        let d = densities::mixing_density(unsafe { self::model(model)? }, t, y)?;
        unsafe { write(out, "out", d) }
    })
}

/// `log m_t(y)`, finite where `m_t(y)` underflows.
///
/// # Safety
/// `model` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn svt_log_mixing_density(model: *const SvtModel, t: f64, y: f64, out: *mut f64) -> SvtStatus {
    guard(|| {
        let d = densities::log_mixing_density(unsafe { self::model(model)? }, t, y)?;
        unsafe { write(out, "out", d) }
    })
}

/// `P(α_t ≤ y)`.
///
/// # Safety
/// `model` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn svt_mixing_cdf(model: *const SvtModel, t: f64, y: f64, out: *mut f64) -> SvtStatus {
    guard(|| {
        let d = densities::mixing_cdf(unsafe { self::model(model)? }, t, y)?;
        unsafe { write(out, "out", d) }
    })
}

/// # Safety
/// `model` must be a live handle; `out` valid for writes. Release with
/// [`svt_stock_density_free`].
#[no_mangle]
pub unsafe extern "C" fn svt_stock_density_new(model: *const SvtModel, t: f64, out: *mut *mut SvtStockDensity) -> SvtStatus {
    guard(|| {
        let sd = StockDensity::new(unsafe { self::model(model)? }, t)?;
        unsafe { write(out, "out", Box::into_raw(Box::new(SvtStockDensity(sd)))) }
    })
}

/// # Safety
/// `d` must be null or a live stock-density handle.
#[no_mangle]
pub unsafe extern "C" fn svt_stock_density_free(d: *mut SvtStockDensity) {
    if !d.is_null() {
        drop(unsafe { Box::from_raw(d) });
    }
}

/// `D_t(x0 e^{μt} x)` at moneyness `x > 0`; `log_out` receives its logarithm when not null.
///
/// # Safety
/// `d` must be a live handle; `out` valid for writes; `log_out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn svt_stock_density_eval(
    d: *const SvtStockDensity,
    x: f64,
    out: *mut f64,
    log_out: *mut f64,
) -> SvtStatus {
    guard(|| {
        let d = unsafe { d.as_ref() }.ok_or_else(|| null("density"))?;
        if !(x > 0.0) || !x.is_finite() {
            return Err(Fail(SvtStatus::InvalidArgument, format!("x must be finite and > 0, got {x}")));
        }
        let l = d.0.log_density_ratio(x);
        unsafe {
            if !log_out.is_null() {
                log_out.write(l);
            }
            write(out, "out", l.exp())
        }
    })
}

/// Call price `e^{−rT} E[(X_T − K)^+]` with drift `rate`.
///
/// # Safety
/// `model` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn svt_call_price(model: *const SvtModel, t: f64, rate: f64, strike: f64, out: *mut f64) -> SvtStatus {
    guard(|| {
        let p = densities::call_price(unsafe { self::model(model)? }, t, rate, strike)?;
        unsafe { write(out, "out", p) }
    })
}

/// # Safety
/// `model` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn svt_mixing_tail(model: *const SvtModel, t: f64, out: *mut SvtMixingTail) -> SvtStatus {
    guard(|| {
        let tail = mixing_constants(unsafe { self::model(model)? }, t)?.tail();
        let v = SvtMixingTail {
            log_prefactor: tail.log_prefactor,
            linear: tail.linear,
            quadratic: tail.quadratic,
            power: tail.power,
        };
        unsafe { write(out, "out", v) }
    })
}

/// # Safety
/// `model` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn svt_stock_tail(model: *const SvtModel, t: f64, out: *mut SvtStockTail) -> SvtStatus {
    guard(|| {
        let m = unsafe { self::model(model)? };
        let st = stock_constants(m, t)?;
        let sc = smile_coeffs(&st, t)?;
        let (moment_lo, moment_hi) = svoltails::asymptotics::moment_window(m, t)?;
        let v = SvtStockTail {
            c1: st.c1,
            log_c1: st.log_c1,
            c2: st.c2,
            c3: st.c3,
            log_power: st.log_power,
            moment_lo,
            moment_hi,
            beta1: sc.b1,
            beta2: sc.b2,
            beta3: sc.b3,
        };
        unsafe { write(out, "out", v) }
    })
}

/// Black–Scholes call price.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn svt_bs_call(spot: f64, strike: f64, rate: f64, expiry: f64, vol: f64, out: *mut f64) -> SvtStatus {
    guard(|| {
        let p = pricing::bs_call(&OptionSpec::new(spot, strike, rate, expiry)?, vol)?;
        unsafe { write(out, "out", p) }
    })
}

/// Black–Scholes implied volatility of a call price.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn svt_implied_vol(spot: f64, strike: f64, rate: f64, expiry: f64, price: f64, out: *mut f64) -> SvtStatus {
    guard(|| {
        let v = pricing::implied_vol(&OptionSpec::new(spot, strike, rate, expiry)?, price)?;
        unsafe { write(out, "out", v) }
    })
}

/// Implied volatilities of the model at log-strikes `k[0..n]` (relative to the forward).
/// `flagged` (optional) receives 1 where the price was only representable in log space.
///
/// # Safety
/// `model` must be a live handle; `k` and `vols` valid for `n` elements; `flagged` null or
/// valid for `n` elements.
#[no_mangle]
pub unsafe extern "C" fn svt_smile(
    model: *const SvtModel,
    maturity: f64,
    rate: f64,
    k: *const f64,
    n: usize,
    vols: *mut f64,
    flagged: *mut u8,
) -> SvtStatus {
    guard(|| {
        let m = unsafe { self::model(model)? };
        if n == 0 {
            return Ok(());
        }
        if k.is_null() || vols.is_null() {
            return Err(null(if k.is_null() { "k" } else { "vols" }));
        }
        let ks = unsafe { std::slice::from_raw_parts(k, n) };
        let sm = pricing::model_smile(m, maturity, rate, ks)?;
        let out = unsafe { std::slice::from_raw_parts_mut(vols, n) };
        for (o, p) in out.iter_mut().zip(&sm) {
            *o = p.implied_vol;
        }
        if !flagged.is_null() {
            let f = unsafe { std::slice::from_raw_parts_mut(flagged, n) };
            for (o, p) in f.iter_mut().zip(&sm) {
                *o = u8::from(p.flagged_tail);
            }
        }
        Ok(())
    })
}

/// Draws of `α_t` with exact transitions; `out` receives `paths` values.
///
/// # Safety
/// `model` must be a live handle; `out` valid for `paths` elements.
#[no_mangle]
pub unsafe extern "C" fn svt_simulate_alpha(
    model: *const SvtModel,
    t: f64,
    paths: usize,
    steps: usize,
    seed: u64,
    out: *mut f64,
) -> SvtStatus {
    guard(|| {
        let m = unsafe { self::model(model)? };
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = McConfig::new(paths, steps, seed, Scheme::ExactTransition)?;
        let s = match m {
            Model::Heston(p) => simulate_cir_alpha(p, t, &cfg)?,
            Model::SteinStein(p) => simulate_ou_alpha(p, t, &cfg)?,
        };
        unsafe { std::slice::from_raw_parts_mut(out, paths) }.copy_from_slice(&s.draws);
        Ok(())
    })
}
