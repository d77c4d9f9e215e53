//! Tail constants of the mixing density `m_t`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special_roots::{phi_derivatives, root};
use crate::transforms::{HestonParams, Model, SteinSteinParams};

/// Heston: `m_t(y) ≈ A y^{−1/2 + 2a/c²} e^{By − Cy²}` and the residues and Taylor coefficients
/// it is assembled from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HestonMixingConstants {
    pub t: f64,
    /// `s = t|b|/2`, the parameter of `Φ_s`.
    pub s: f64,
    /// `r_s`.
    pub r: f64,
    pub u_bt: f64,
    pub lambda0: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub alpha: f64,
    pub f_tilde0: f64,
    pub tail_a: f64,
    pub log_tail_a: f64,
    pub tail_b: f64,
    pub tail_c: f64,
    /// `a/c²`.
    pub power_shift: f64,
}

/// Stein–Stein: `m_t(y) ≈ E e^{Fy − Gy²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteinMixingConstants {
    pub t: f64,
    /// `s = qt`.
    pub s: f64,
    pub r: f64,
    pub v_qt: f64,
    pub lambda1: f64,
    pub zeta1: f64,
    pub zeta2: f64,
    pub tau1: f64,
    pub tau2: f64,
    /// `α2, α3, α4, α5`.
    pub alpha_parts: [f64; 4],
    /// `F̃2(0), F̃3(0), F̃4(0), F̃5(0)`.
    pub f_tilde_parts: [f64; 4],
    pub alpha: f64,
    pub f_tilde0: f64,
    pub tail_e: f64,
    pub log_tail_e: f64,
    pub tail_f: f64,
    pub tail_g: f64,
}

/// The leading term `m_t(y) ≈ prefactor · y^power · e^{linear·y − quadratic·y²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingTail {
    pub log_prefactor: f64,
    pub linear: f64,
    pub quadratic: f64,
    pub power: f64,
}

impl MixingTail {
    pub fn log_eval(&self, y: f64) -> f64 {
        self.log_prefactor + self.linear * y - self.quadratic * y * y + self.power * y.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MixingConstants {
    Heston(HestonMixingConstants),
    SteinStein(SteinMixingConstants),
}

impl MixingConstants {
    pub fn tail(&self) -> MixingTail {
        match self {
            MixingConstants::Heston(h) => MixingTail {
                log_prefactor: h.log_tail_a,
                linear: h.tail_b,
                quadratic: h.tail_c,
                power: -0.5 + 2.0 * h.power_shift,
            },
            MixingConstants::SteinStein(s) => MixingTail {
                log_prefactor: s.log_tail_e,
                linear: s.tail_f,
                quadratic: s.tail_g,
                power: 0.0,
            },
        }
    }

    pub fn t(&self) -> f64 {
        match self {
            MixingConstants::Heston(h) => h.t,
            MixingConstants::SteinStein(s) => s.t,
        }
    }

    /// Exponent `p` in the stock tail power `(log x)^{−3/4 + p}`: `a/c²` (Heston), `1/4` (Stein–Stein).
    pub fn power_shift(&self) -> f64 {
        match self {
            MixingConstants::Heston(h) => h.power_shift,
            MixingConstants::SteinStein(_) => 0.25,
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("horizon t must be finite and > 0, got {t}")));
    }
    Ok(())
}

/// `log A = −½ log π + (1/4 + p) log(t/(2c²)) + (1/4 − p) log α + 2p log λ0 − abt/c² + F̃(0)`.
fn heston_log_a(p: &HestonParams, t: f64, alpha: f64, lambda0: f64, f_tilde0: f64) -> f64 {
    let c2 = p.c * p.c;
    let ps = p.a / c2;
    -0.5 * PI.ln() + (0.25 + ps) * (t / (2.0 * c2)).ln() + (0.25 - ps) * alpha.ln()
        + 2.0 * ps * lambda0.ln()
        - p.a * p.b * t / c2
        + f_tilde0
}

/// Constants for `b < 0`.
pub fn heston_mixing_constants(p: &HestonParams, t: f64) -> Result<HestonMixingConstants> {
    p.validate()?;
    check_t(t)?;
    if p.b >= 0.0 {
        return Err(Error::invalid("heston_mixing_constants needs b < 0; use heston_mixing_constants_b0"));
    }
    if !(p.y0 > 0.0) {
        return Err(Error::invalid("tail constants need y0 > 0 (the residue alpha vanishes at y0 = 0)"));
    }
    let (b, c2, y0) = (p.b, p.c * p.c, p.y0);
    let s = 0.5 * t * b.abs();
    let r = root(s)?;
    let (sin, cos) = r.sin_cos();
    let (dphi, _) = phi_derivatives(s, r);
    let t2 = t * t;
    let u_bt = -4.0 * r * r / t2;
    let k = b * b - u_bt;
    let lambda0 = 8.0 * r * r / (t2 * dphi.abs());
    let eta1 = sin;
    let eta2 = -t2 * cos / (8.0 * r);
    let rho1 = t2 * dphi / (8.0 * r);
    let rho2 = t2 * t2 / 128.0 * (dphi / (r * r * r) + 2.0 * sin / (r * r));
    let alpha = t * y0 * eta1 * k / (2.0 * c2 * rho1.abs());
    let f_tilde0 = t * y0 / (2.0 * c2 * rho1 * rho1) * ((eta1 - k * eta2) * rho1 + k * eta1 * rho2);
    let log_tail_a = heston_log_a(p, t, alpha, lambda0, f_tilde0);
    Ok(HestonMixingConstants {
        t,
        s,
        r,
        u_bt,
        lambda0,
        eta1,
        eta2,
        rho1,
        rho2,
        alpha,
        f_tilde0,
        tail_a: log_tail_a.exp(),
        log_tail_a,
        tail_b: (2.0 * alpha * t).sqrt() / p.c,
        tail_c: t * k / (2.0 * c2),
        power_shift: p.a / c2,
    })
}

/// Closed-form constants for `b = 0`.
pub fn heston_mixing_constants_b0(p: &HestonParams, t: f64) -> Result<HestonMixingConstants> {
    p.validate()?;
    check_t(t)?;
    if p.b != 0.0 {
        return Err(Error::invalid("heston_mixing_constants_b0 needs b = 0"));
    }
    if !(p.y0 > 0.0) {
        return Err(Error::invalid("tail constants need y0 > 0 (the residue alpha vanishes at y0 = 0)"));
    }
    let (c, y0) = (p.c, p.y0);
    let c2 = c * c;
    let ps = p.a / c2;
    let t2 = t * t;
    let alpha = 4.0 * y0 * PI * PI / (c2 * t2 * t);
    let f_tilde0 = -3.0 * y0 / (c2 * t);
    // A = 2^{1/4+p} y0^{1/4−p} c^{−1} t^{−1/2} e^{−3y0/(c²t)}
    let log_tail_a = (0.25 + ps) * 2f64.ln() + (0.25 - ps) * y0.ln() - c.ln() - 0.5 * t.ln() + f_tilde0;
    Ok(HestonMixingConstants {
        t,
        s: 0.0,
        r: 0.5 * PI,
        u_bt: -PI * PI / t2,
        lambda0: 4.0 * PI / t2,
        eta1: 1.0,
        eta2: 0.0,
        rho1: -t2 / 8.0,
        rho2: t2 * t2 / (32.0 * PI * PI),
        alpha,
        f_tilde0,
        tail_a: log_tail_a.exp(),
        log_tail_a,
        tail_b: 2.0 * (2.0 * y0).sqrt() * PI / (c2 * t),
        tail_c: PI * PI / (2.0 * c2 * t),
        power_shift: ps,
    })
}

/// Constants for `q > 0`, `σ > 0`, `m ≥ 0`, with `(y0, m) ≠ (0, 0)`.
pub fn stein_mixing_constants(p: &SteinSteinParams, t: f64) -> Result<SteinMixingConstants> {
    p.validate()?;
    check_t(t)?;
    if p.y0 == 0.0 && p.m == 0.0 {
        return Err(Error::invalid("tail constants need y0 != 0 or m > 0 (the residue alpha vanishes)"));
    }
    let (q, m, s2, y0) = (p.q, p.m, p.sigma * p.sigma, p.y0);
    let s = q * t;
    let r = root(s)?;
    let (sin, cos) = r.sin_cos();
    let (dphi, _) = phi_derivatives(s, r);
    let (t2, r2) = (t * t, r * r);
    let v_qt = -r2 / t2;
    let lambda1 = 2.0 * r2 / (t2 * dphi.abs());
    let zeta1 = t2 * dphi / (2.0 * r);
    let zeta2 = t2 * t2 * ((1.0 + s) * cos + r * sin) / (8.0 * r2 * r);
    let vq = v_qt - q * q;
    let tau1 = vq / zeta1;
    let tau2 = (zeta1 - vq * zeta2) / (zeta1 * zeta1);

    // λ F_j(λ) = c_j (τ1 + τ2 λ + ...)(g_j0 + g_j1 λ + ...) with purely imaginary c_j and g_jk
    let i = Complex64::i();
    let half_sin = (0.5 * r).sin();
    let n0 = r * sin - 4.0 * half_sin * half_sin;
    let g = [
        (i * sin, -i * t2 * cos / (2.0 * r)),
        (i * t * (1.0 - cos) / r, -i * t2 * t * (r * sin + cos - 1.0) / (2.0 * r2 * r)),
        (-i * t2 * (sin - r * cos) / r2, -i * t2 * t2 * (2.0 * sin - r2 * sin - 2.0 * r * cos) / (2.0 * r2 * r2)),
        (
            i * t2 * t * n0 / (r2 * r),
            i * t2 * t2 * t * ((sin - r * cos) / (2.0 * r2 * r2) + 3.0 * n0 / (2.0 * r2 * r2 * r)),
        ),
    ];
    let c = [
        -i * y0 * y0 * t / (2.0 * s2),
        -i * m * q * y0 * t / s2,
        i * m * m * q * q * t / (2.0 * s2),
        i * m * m * q * q * q * t / (2.0 * s2),
    ];
    let mut alpha_parts = [0.0; 4];
    let mut f_tilde_parts = [0.0; 4];
    for j in 0..4 {
        alpha_parts[j] = (c[j] * tau1 * g[j].0).re;
        f_tilde_parts[j] = (c[j] * (tau1 * g[j].1 + tau2 * g[j].0)).re;
    }
    let alpha: f64 = alpha_parts.iter().sum();
    let f_tilde0: f64 = f_tilde_parts.iter().sum();
    if !(alpha > 0.0) {
        return Err(Error::numerical(format!("non-positive residue alpha = {alpha}")));
    }
    let log_tail_e = 0.5 * t.ln() - 0.5 * (2.0 * PI).ln() - p.sigma.ln() + 0.5 * q * t + 0.5 * lambda1.ln() + f_tilde0;
    Ok(SteinMixingConstants {
        t,
        s,
        r,
        v_qt,
        lambda1,
        zeta1,
        zeta2,
        tau1,
        tau2,
        alpha_parts,
        f_tilde_parts,
        alpha,
        f_tilde0,
        tail_e: log_tail_e.exp(),
        log_tail_e,
        tail_f: (2.0 * alpha * t).sqrt() / p.sigma,
        tail_g: t * (q * q + r2 / t2) / (2.0 * s2),
    })
}

/// Mixing constants for either model; Heston with `b = 0` uses the closed forms.
pub fn mixing_constants(model: &Model, t: f64) -> Result<MixingConstants> {
    match model {
        Model::Heston(p) if p.b == 0.0 => heston_mixing_constants_b0(p, t).map(MixingConstants::Heston),
        Model::Heston(p) => heston_mixing_constants(p, t).map(MixingConstants::Heston),
        Model::SteinStein(p) => stein_mixing_constants(p, t).map(MixingConstants::SteinStein),
    }
}

/// `log` of the leading term of `m_t(y)`.
pub fn mixing_tail_log_eval(consts: &MixingConstants, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::invalid(format!("mixing tail needs y > 0, got {y}")));
    }
    Ok(consts.tail().log_eval(y))
}

/// Leading term of `m_t(y)`: `A y^{−1/2+2a/c²} e^{By−Cy²}` or `E e^{Fy−Gy²}`.
pub fn mixing_tail_eval(consts: &MixingConstants, y: f64) -> Result<f64> {
    Ok(mixing_tail_log_eval(consts, y)?.exp())
}
