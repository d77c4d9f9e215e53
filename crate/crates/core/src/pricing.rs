//! Black–Scholes pricing, implied volatility and model smiles.
//!
//! Internally everything is normalised by the forward: with `k = log(K/F)` and total volatility
//! `w = σ√T`, the undiscounted call is `F·c(k, w)`, `c = Φ(d1) − e^k Φ(d2)`. Out-of-the-money
//! prices are handled as logarithms so wing strikes do not underflow.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::densities::StockDensity;
use crate::error::{Error, Result};
use crate::transforms::Model;

/// Implied-volatility search interval.
pub const VOL_MIN: f64 = 1e-6;
pub const VOL_MAX: f64 = 5.0;

/// Normalised prices below this would underflow in linear space; such smile points are flagged.
pub const UNDERFLOW_LOG_PRICE: f64 = -644.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionSpec {
    pub spot: f64,
    pub strike: f64,
    pub rate: f64,
    pub expiry: f64,
}

impl OptionSpec {
    pub fn new(spot: f64, strike: f64, rate: f64, expiry: f64) -> Result<Self> {
        let s = OptionSpec { spot, strike, rate, expiry };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("spot", self.spot), ("strike", self.strike), ("expiry", self.expiry)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if !(self.rate >= 0.0) || !self.rate.is_finite() {
            return Err(Error::invalid(format!("rate must be finite and >= 0, got {}", self.rate)));
        }
        Ok(())
    }

    pub fn forward(&self) -> f64 {
        self.spot * (self.rate * self.expiry).exp()
    }

    /// `log(K / (x0 e^{rT}))`.
    pub fn log_strike(&self) -> f64 {
        (self.strike / self.spot).ln() - self.rate * self.expiry
    }

    /// `(max(S − K e^{−rT}, 0), S)`.
    pub fn no_arbitrage_band(&self) -> (f64, f64) {
        ((self.spot - self.strike * (-self.rate * self.expiry).exp()).max(0.0), self.spot)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmilePoint {
    pub log_strike: f64,
    pub implied_vol: f64,
    /// The normalised price is below the linear-space floating-point range; the point was
    /// priced and inverted entirely in log space.
    pub flagged_tail: bool,
}

pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

fn log_norm_pdf(x: f64) -> f64 {
    -0.5 * x * x - 0.5 * (2.0 * PI).ln()
}

/// `e^{z²} erfc(z)` for `z ≥ 0`.
fn erfcx(z: f64) -> f64 {
    if z < 26.0 {
        return (z * z).exp() * libm::erfc(z);
    }
    // continued fraction 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))), evaluated bottom-up
    let mut f = z;
    for n in (1..=60).rev() {
        f = z + 0.5 * n as f64 / f;
    }
    1.0 / (PI.sqrt() * f)
}

/// Mills-type ratio `Φ(x)/φ(x)` for `x ≤ 0`.
fn mills(x: f64) -> f64 {
    (0.5 * PI).sqrt() * erfcx(-x * FRAC_1_SQRT_2)
}

/// `log c(k, w)` for the normalised undiscounted call.
pub fn log_normalized_bs_call(k: f64, w: f64) -> f64 {
    if !(w > 0.0) {
        return if k < 0.0 { (-k.exp_m1()).ln() } else { f64::NEG_INFINITY };
    }
    let d1 = -k / w + 0.5 * w;
    let d2 = d1 - w;
    if d1 < 0.0 {
        // c = φ(d1)(M(d1) − M(d2)) since e^k φ(d2) = φ(d1)
        log_norm_pdf(d1) + (mills(d1) - mills(d2)).ln()
    } else {
        (norm_cdf(d1) - k.exp() * norm_cdf(d2)).ln()
    }
}

fn check_vol(vol: f64) -> Result<()> {
    if !(vol > 0.0) || !vol.is_finite() {
        return Err(Error::invalid(format!("volatility must be finite and > 0, got {vol}")));
    }
    Ok(())
}

/// Black–Scholes call price.
pub fn bs_call(spec: &OptionSpec, vol: f64) -> Result<f64> {
    spec.validate()?;
    check_vol(vol)?;
    let k = spec.log_strike();
    let w = vol * spec.expiry.sqrt();
    if k >= 0.0 {
        Ok(spec.spot * log_normalized_bs_call(k, w).exp())
    } else {
        // in the money: intrinsic plus the put's time value, by parity
        let put = k.exp() * log_normalized_bs_call(-k, w).exp();
        Ok(spec.spot * (put - k.exp_m1()))
    }
}

/// `∂C/∂σ = S φ(d1) √T`.
pub fn bs_vega(spec: &OptionSpec, vol: f64) -> Result<f64> {
    spec.validate()?;
    check_vol(vol)?;
    let w = vol * spec.expiry.sqrt();
    let d1 = -spec.log_strike() / w + 0.5 * w;
    Ok(spec.spot * norm_pdf(d1) * spec.expiry.sqrt())
}

/// Total implied volatility `w` from the log of the out-of-the-money normalised price at
/// log-strike `k`: the call for `k ≥ 0`, the put for `k < 0`.
pub fn implied_total_vol(k: f64, log_otm_price: f64, w_min: f64, w_max: f64) -> Result<f64> {
    // p(k, w) = e^k c(−k, w), so both cases reduce to a call at |k|
    let ka = k.abs();
    let target = if k < 0.0 { log_otm_price - k } else { log_otm_price };
    let g = |w: f64| log_normalized_bs_call(ka, w) - target;
    let (mut lo, mut hi) = (w_min, w_max);
    let (glo, ghi) = (g(lo), g(hi));
    if !(glo <= 0.0 && ghi >= 0.0) {
        return Err(Error::numerical(format!(
            "implied volatility outside [{w_min}, {w_max}] (total) at k = {k}"
        )));
    }
    while hi - lo > 1e-6 * w_min.max(1e-3) {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut w = 0.5 * (lo + hi);
    for _ in 0..50 {
        let lc = log_normalized_bs_call(ka, w);
        let d1 = -ka / w + 0.5 * w;
        // d log c / dw = φ(d1)/c
        let slope = (log_norm_pdf(d1) - lc).exp();
        let step = (lc - target) / slope;
        let next = (w - step).clamp(lo, hi);
        if (next - w).abs() <= 1e-15 * w {
            w = next;
            break;
        }
        w = next;
    }
    Ok(w)
}

/// Volatility with `bs_call(spec, vol) = price`.
pub fn implied_vol(spec: &OptionSpec, price: f64) -> Result<f64> {
    spec.validate()?;
    let (lower, upper) = spec.no_arbitrage_band();
    if !(price > lower && price < upper) {
        return Err(Error::Arbitrage { price, lower, upper });
    }
    let k = spec.log_strike();
    let log_otm = if k >= 0.0 { (price / spec.spot).ln() } else { ((price - lower) / spec.spot).ln() };
    if !log_otm.is_finite() {
        return Err(Error::Arbitrage { price, lower, upper });
    }
    let sq = spec.expiry.sqrt();
    Ok(implied_total_vol(k, log_otm, VOL_MIN * sq, VOL_MAX * sq)? / sq)
}

/// Smile from logs of out-of-the-money normalised prices, `k ↦ log(OTM price / F)`.
pub fn smile_from_log_prices<F>(maturity: f64, k_grid: &[f64], log_otm: F) -> Result<Vec<SmilePoint>>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(maturity > 0.0) {
        return Err(Error::invalid(format!("maturity must be > 0, got {maturity}")));
    }
    let sq = maturity.sqrt();
    k_grid
        .iter()
        .map(|&k| {
            let lp = log_otm(k)?;
            let w = implied_total_vol(k, lp, VOL_MIN * sq, VOL_MAX * sq)?;
            Ok(SmilePoint { log_strike: k, implied_vol: w / sq, flagged_tail: lp < UNDERFLOW_LOG_PRICE })
        })
        .collect()
}

/// Implied volatilities of the model's call prices under the pricing measure (drift = `rate`).
pub fn model_smile(model: &Model, maturity: f64, rate: f64, k_grid: &[f64]) -> Result<Vec<SmilePoint>> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::invalid(format!("rate must be finite and >= 0, got {rate}")));
    }
    let sd = StockDensity::new(&model.with_mu(rate), maturity)?;
    smile_from_log_prices(maturity, k_grid, |k| if k >= 0.0 { sd.log_normalized_call(k) } else { sd.log_normalized_put(k) })
}
