//! Stock-price tails, smile coefficients and moment windows.

use std::f64::consts::PI;

use super::mixing::{mixing_constants, MixingConstants};
use crate::error::{Error, Result};
use crate::transforms::{HestonParams, Model, SteinSteinParams};

/// `D_t(x0 e^{μt} x) ≈ c1 x^{−c3} e^{c2 √log x} (log x)^{log_power}` as `x → ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StockTailConstants {
    pub c1: f64,
    pub log_c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// `√(C + t/8)` or `√(G + t/8)`.
    pub k: f64,
    /// `B` or `F`.
    pub l: f64,
    /// `a/c²` for Heston, 0 for Stein–Stein.
    pub power_shift: f64,
    /// Exponent of `log x`: `−3/4 + a/c²` or `−1/2`.
    pub log_power: f64,
}

fn assemble(consts: &MixingConstants, forward: f64) -> StockTailConstants {
    let t = consts.t();
    let tail = consts.tail();
    // m_t(y) ≈ A y^{−1/2+2p} e^{By−Cy²}
    let p = consts.power_shift();
    let (b, c) = (tail.linear, tail.quadratic);
    let d = 8.0 * c + t;
    let e = -0.125 - 0.5 * p;
    let log_c1 = tail.log_prefactor - forward.ln() + (-0.75 + p) * 2f64.ln() + e * t.ln() + e * d.ln()
        + b * b / (2.0 * d);
    let power_shift = match consts {
        MixingConstants::Heston(h) => h.power_shift,
        MixingConstants::SteinStein(_) => 0.0,
    };
    StockTailConstants {
        c1: log_c1.exp(),
        log_c1,
        c2: b * 2f64.sqrt() / (t.powf(0.25) * d.powf(0.25)),
        c3: 1.5 + d.sqrt() / (2.0 * t.sqrt()),
        k: (c + t / 8.0).sqrt(),
        l: b,
        power_shift,
        log_power: -0.75 + p,
    }
}

/// Stock constants for either model, built from the mixing tail.
pub fn stock_constants(model: &Model, t: f64) -> Result<StockTailConstants> {
    let consts = mixing_constants(model, t)?;
    Ok(assemble(&consts, model.x0() * (model.mu() * t).exp()))
}

pub fn heston_stock_constants(p: &HestonParams, t: f64) -> Result<StockTailConstants> {
    stock_constants(&Model::Heston(*p), t)
}

pub fn stein_stock_constants(p: &SteinSteinParams, t: f64) -> Result<StockTailConstants> {
    stock_constants(&Model::SteinStein(*p), t)
}

/// `log D_t(x0 e^{μt} x)` from the leading term; `x > 1`.
pub fn stock_tail_log_eval(consts: &StockTailConstants, x: f64) -> Result<f64> {
    if !(x > 1.0) || !x.is_finite() {
        return Err(Error::invalid(format!("stock tail is an expansion for x > 1, got {x}")));
    }
    let lx = x.ln();
    Ok(consts.log_c1 - consts.c3 * lx + consts.c2 * lx.sqrt() + consts.log_power * lx.ln())
}

pub fn stock_tail_eval(consts: &StockTailConstants, x: f64) -> Result<f64> {
    Ok(stock_tail_log_eval(consts, x)?.exp())
}

/// Right-wing implied volatility `I ≈ b1 √k + b2 + b3 log k / √k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmileCoeffs {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub maturity: f64,
}

pub fn smile_coeffs(consts: &StockTailConstants, maturity: f64) -> Result<SmileCoeffs> {
    if !(maturity > 0.0) {
        return Err(Error::invalid(format!("maturity must be > 0, got {maturity}")));
    }
    if !(consts.c3 > 2.0) {
        return Err(Error::invalid(format!("smile needs c3 > 2, got {}", consts.c3)));
    }
    let s1 = (consts.c3 - 1.0).sqrt();
    let s2 = (consts.c3 - 2.0).sqrt();
    let r = 1.0 / (2.0 * maturity).sqrt();
    // 1/4 − a/c² for Heston; vanishes for Stein–Stein
    let shift = -(consts.log_power + 0.5);
    Ok(SmileCoeffs {
        b1: 2f64.sqrt() / maturity.sqrt() * (s1 - s2),
        b2: consts.c2 * r * (1.0 / s2 - 1.0 / s1),
        b3: if shift == 0.0 { 0.0 } else { r * shift * (1.0 / s1 - 1.0 / s2) },
        maturity,
    })
}

/// Smile with the log term; for the Stein–Stein form pass `with_log = false`.
fn smile_value(sc: &SmileCoeffs, k: f64, with_log: bool) -> f64 {
    let sk = k.sqrt();
    let mut v = sc.b1 * sk + sc.b2;
    if with_log {
        v += sc.b3 * k.ln() / sk;
    }
    v
}

/// Heston form `b1 √k + b2 + b3 log k / √k`; `k > 1`.
pub fn smile_eval(sc: &SmileCoeffs, k: f64) -> Result<f64> {
    if !(k > 1.0) {
        return Err(Error::invalid(format!("smile expansion needs k > 1, got {k}")));
    }
    Ok(smile_value(sc, k, true))
}

/// Stein–Stein form `b1 √k + b2`; any `b3` is ignored.
pub fn smile_eval_stein(sc: &SmileCoeffs, k: f64) -> Result<f64> {
    if !(k > 1.0) {
        return Err(Error::invalid(format!("smile expansion needs k > 1, got {k}")));
    }
    Ok(smile_value(sc, k, false))
}

/// Smile for the model the constants came from.
pub fn model_smile_eval(model: &Model, sc: &SmileCoeffs, k: f64) -> Result<f64> {
    match model {
        Model::Heston(_) => smile_eval(sc, k),
        Model::SteinStein(_) => smile_eval_stein(sc, k),
    }
}

/// `E[X_t^p] < ∞` iff `p_lo < p < p_hi`.
pub fn moment_window(model: &Model, t: f64) -> Result<(f64, f64)> {
    let c3 = stock_constants(model, t)?.c3;
    Ok((2.0 - c3, c3 - 1.0))
}

/// Closed form for Heston with `b = 0`: `1/2 ± √(4π² + c²t²)/(2ct)`.
pub fn heston_b0_moment_window(c: f64, t: f64) -> (f64, f64) {
    let h = (4.0 * PI * PI + c * c * t * t).sqrt() / (2.0 * c * t);
    (0.5 - h, 0.5 + h)
}
