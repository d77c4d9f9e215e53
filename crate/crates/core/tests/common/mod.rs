//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod laurent;

use num_complex::Complex64;
use svoltails::{HestonParams, SteinSteinParams};

type C = Complex64;

fn rk4<const N: usize>(mut y: [C; N], t: f64, steps: usize, f: impl Fn(&[C; N]) -> [C; N]) -> [C; N] {
    let h = t / steps as f64;
    let add = |a: &[C; N], b: &[C; N], s: f64| {
        let mut out = *a;
        for i in 0..N {
            out[i] += b[i] * s;
        }
        out
    };
    for _ in 0..steps {
        let k1 = f(&y);
        let k2 = f(&add(&y, &k1, 0.5 * h));
        let k3 = f(&add(&y, &k2, 0.5 * h));
        let k4 = f(&add(&y, &k3, h));
        for i in 0..N {
            y[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
    }
    y
}

/// `E exp(−λ∫Y)` for CIR from the Riccati system `B' = −λ + bB + c²B²/2`, `A' = aB`.
pub fn riccati_cir(p: &HestonParams, t: f64, lam: C, steps: usize) -> C {
    let (a, b, c2) = (p.a, p.b, p.c * p.c);
    let y = rk4([C::new(0.0, 0.0); 2], t, steps, |s| {
        let bb = s[1];
        [a * bb, -lam + b * bb + 0.5 * c2 * bb * bb]
    });
    (y[0] + y[1] * p.y0).exp()
}

/// `E exp(−λ∫Y²)` for OU from `u = exp(A + B y + G y²)`.
pub fn riccati_ou2(p: &SteinSteinParams, t: f64, lam: C, steps: usize) -> C {
    let (q, m, s2) = (p.q, p.m, p.sigma * p.sigma);
    let y = rk4([C::new(0.0, 0.0); 3], t, steps, |s| {
        let (aa, bb, gg) = (s[0], s[1], s[2]);
        let _ = aa;
        [
            q * m * bb + 0.5 * s2 * (bb * bb + 2.0 * gg),
            2.0 * q * m * gg - q * bb + 2.0 * s2 * bb * gg,
            -2.0 * q * gg + 2.0 * s2 * gg * gg - lam,
        ]
    });
    (y[0] + y[1] * p.y0 + y[2] * p.y0 * p.y0).exp()
}

/// Value at 0 of a function `g` analytic near 0, from symmetric samples with Richardson
/// extrapolation of order 2: `(4 g_h − g_{2h}) / 3` with `g_h = (g(h) + g(−h)) / 2`.
pub fn richardson_at_zero(g: impl Fn(f64) -> f64, h: f64) -> f64 {
    let gh = 0.5 * (g(h) + g(-h));
    let g2h = 0.5 * (g(2.0 * h) + g(-2.0 * h));
    (4.0 * gh - g2h) / 3.0
}

/// Derivative at 0 of an analytic `g`, fourth-order central differences.
pub fn derivative_at_zero(g: impl Fn(f64) -> f64, h: f64) -> f64 {
    (8.0 * (g(h) - g(-h)) - (g(2.0 * h) - g(-2.0 * h))) / (12.0 * h)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Reference Heston set used across the suites.
pub fn heston_ref() -> HestonParams {
    HestonParams::new(0.0, 1.0, -1.0, 1.0, 1.0, 1.0).unwrap()
}

/// Heston set with `b = 0` for the closed-form tail constants.
pub fn heston_b0() -> HestonParams {
    HestonParams::new(0.0, 1.0, 0.0, 1.0, 1.0, 1.0).unwrap()
}

/// Reference Stein–Stein set used across the suites.
pub fn stein_ref() -> SteinSteinParams {
    SteinSteinParams::new(0.0, 1.0, 0.2, 0.2, 0.2, 1.0).unwrap()
}
