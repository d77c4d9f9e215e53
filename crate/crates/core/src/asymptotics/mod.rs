//! Tail constants and leading terms for the mixing density, the stock density and the smile.

mod mixing;
mod stock;

use std::f64::consts::PI;

pub use mixing::{
    heston_mixing_constants, heston_mixing_constants_b0, mixing_constants, mixing_tail_eval,
    mixing_tail_log_eval, stein_mixing_constants, HestonMixingConstants, MixingConstants, MixingTail,
    SteinMixingConstants,
};
pub use stock::{
    heston_b0_moment_window, heston_stock_constants, model_smile_eval, moment_window, smile_coeffs,
    smile_eval, smile_eval_stein, stein_stock_constants, stock_constants, stock_tail_eval,
    stock_tail_log_eval, SmileCoeffs, StockTailConstants,
};

use crate::error::{Error, Result};
use crate::quadrature::adaptive;
use crate::transforms::HestonParams;

/// Inputs of the generic inversion leading term for `M(y)` whose Laplace transform behaves like
/// `G1(λ)^{γ1} G2(λ)^{γ2} e^{F(λ)}` with a simple pole of residue `α` in `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtiInputs {
    pub alpha: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub g2_at_0: f64,
    pub f_tilde_at_0: f64,
}

/// `log M(y)`, with `M(y) ≈ (2√π)^{−1} α^{1/4+(γ1−γ2)/2} G2(0) e^{F̃(0)} y^{−3/4+(γ2−γ1)/2} e^{2√(αy)}`.
pub fn lti_log_leading_term(inp: &LtiInputs, y: f64) -> Result<f64> {
    if !(inp.alpha > 0.0) {
        return Err(Error::invalid(format!("residue alpha must be > 0, got {}", inp.alpha)));
    }
    if !(y > 0.0) {
        return Err(Error::invalid(format!("y must be > 0, got {y}")));
    }
    if !(inp.g2_at_0 > 0.0) {
        return Err(Error::invalid("G2(0) must be > 0"));
    }
    let dg = 0.5 * (inp.gamma1 - inp.gamma2);
    Ok(-(2.0 * PI.sqrt()).ln() + (0.25 + dg) * inp.alpha.ln() + inp.g2_at_0.ln() + inp.f_tilde_at_0
        + (-0.75 - dg) * y.ln()
        + 2.0 * (inp.alpha * y).sqrt())
}

pub fn lti_leading_term(inp: &LtiInputs, y: f64) -> Result<f64> {
    Ok(lti_log_leading_term(inp, y)?.exp())
}

/// Heston inputs: `γ1 = 0`, `γ2 = 2a/c²`, `G2(0) = λ0^{2a/c²} √(2t)/c · e^{−abt/c²}`.
///
/// The leading term then describes `y^{−1/2} e^{(b² − u)y} m_t(c√(2y/t))`.
pub fn heston_lti_inputs(p: &HestonParams, h: &HestonMixingConstants) -> LtiInputs {
    let c2 = p.c * p.c;
    let g2 = 2.0 * p.a / c2;
    let log_g2 = g2 * h.lambda0.ln() + 0.5 * (2.0 * h.t).ln() - p.c.ln() - p.a * p.b * h.t / c2;
    LtiInputs { alpha: h.alpha, gamma1: 0.0, gamma2: g2, g2_at_0: log_g2.exp(), f_tilde_at_0: h.f_tilde0 }
}

/// `log` of `(√π/(2κ)) e^{l²/(16κ²)} ζ(√(w/κ)) e^{l √(w/κ)} e^{−2κw}`, the leading term of
/// `∫₀^∞ ζ(y) e^{ly} exp(−w²/y² − κ²y²) dy` as `w → ∞`. `log_zeta` is `log ζ`.
pub fn into_log_leading_term<Z: Fn(f64) -> f64>(
    log_zeta: Z,
    l: f64,
    kappa: f64,
    gamma_exp: f64,
    w: f64,
) -> Result<f64> {
    if !(kappa > 0.0) || !(w > 0.0) {
        return Err(Error::invalid(format!("need kappa > 0 and w > 0, got {kappa}, {w}")));
    }
    if !(gamma_exp > 0.0 && gamma_exp <= 1.0) {
        return Err(Error::invalid(format!("gamma must lie in (0, 1], got {gamma_exp}")));
    }
    let y = (w / kappa).sqrt();
    Ok(0.5 * PI.ln() - (2.0 * kappa).ln() + l * l / (16.0 * kappa * kappa) + log_zeta(y) + l * y
        - 2.0 * kappa * w)
}

pub fn into_leading_term<Z: Fn(f64) -> f64>(zeta_at: Z, l: f64, kappa: f64, gamma_exp: f64, w: f64) -> Result<f64> {
    let v = into_log_leading_term(|y| zeta_at(y).ln(), l, kappa, gamma_exp, w)?;
    Ok(v.exp())
}

/// `∫_{−π/2}^{π/2} e^{2α√y(cos θ − 1)} dθ` by adaptive quadrature.
pub fn cosine_kernel_integral(alpha: f64, y: f64) -> Result<f64> {
    let s = 2.0 * alpha * y.sqrt();
    let f = |th: f64| (-2.0 * s * (0.5 * th).sin().powi(2)).exp();
    let (half, _) = adaptive(f, 0.0, 0.5 * PI, 1e-16, 1e-14, 40)?;
    Ok(2.0 * half)
}

/// Laplace's-method value `√π α^{−1/2} y^{−1/4}` of [`cosine_kernel_integral`].
pub fn cosine_kernel_leading(alpha: f64, y: f64) -> f64 {
    PI.sqrt() / alpha.sqrt() * y.powf(-0.25)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lti_trivial_case() {
        let inp = LtiInputs { alpha: 1.0, gamma1: 0.5, gamma2: 0.5, g2_at_0: 2.0 * PI.sqrt(), f_tilde_at_0: 0.0 };
        let v = lti_leading_term(&inp, 1.0).unwrap();
        assert!((v / 2f64.exp() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn into_closed_form() {
        // ∫ exp(−w²/y² − κ²y²) dy = √π/(2κ) e^{−2κw}
        let (kappa, w) = (1.0, 3.0);
        let (q, _) = adaptive(|y: f64| (-w * w / (y * y) - kappa * kappa * y * y).exp(), 1e-6, 20.0, 1e-18, 1e-14, 50)
            .unwrap();
        let lead = into_leading_term(|_| 1.0, 0.0, kappa, 1.0, w).unwrap();
        assert!((q / lead - 1.0).abs() < 1e-10);
    }

    #[test]
    fn laplace_method() {
        let e2 = (cosine_kernel_integral(1.0, 1e2).unwrap() / cosine_kernel_leading(1.0, 1e2) - 1.0).abs();
        let e4 = (cosine_kernel_integral(1.0, 1e4).unwrap() / cosine_kernel_leading(1.0, 1e4) - 1.0).abs();
        assert!(e4 < e2 / 10f64.powf(0.5) * 1.01, "{e2} {e4}");
    }
}
