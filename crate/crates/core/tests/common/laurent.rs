//! Laurent-expansion oracles for the transform poles, built directly from the closed forms.

use num_complex::Complex64 as C;
use svoltails::special_roots::{phi, smallest_root, RootQuery};
use svoltails::{HestonParams, SteinSteinParams};

use super::{heston_ref, stein_ref};

pub fn root(s: f64) -> f64 {
    smallest_root(&RootQuery::with_default_tolerance(s).unwrap()).unwrap()
}

/// The analytic pieces of the Heston transform around its first pole, in the shifted variable.
pub struct HestonPieces {
    pub p: HestonParams,
    pub t: f64,
    pub u: f64,
}

impl HestonPieces {
    pub fn new(p: HestonParams, t: f64) -> Self {
        let r = root(0.5 * t * p.b.abs());
        HestonPieces { p, t, u: -4.0 * r * r / (t * t) }
    }
    pub fn sq(&self, lam: f64) -> C {
        C::new(lam + self.u, 0.0).sqrt()
    }
    pub fn den(&self, lam: f64) -> C {
        let s = self.sq(lam);
        let z = 0.5 * self.t * s;
        s * z.cosh() + self.p.b.abs() * z.sinh()
    }
    pub fn lambda_fn(&self, lam: f64) -> f64 {
        (self.sq(lam) / self.den(lam)).re
    }
    pub fn f(&self, lam: f64) -> f64 {
        let p = &self.p;
        let z = 0.5 * self.t * self.sq(lam);
        (-(p.y0 * (lam + self.u - p.b * p.b)) * z.sinh() / (p.c * p.c * self.den(lam))).re
    }
    pub fn eta(&self, lam: f64) -> f64 {
        ((0.5 * self.t * self.sq(lam)).sinh() / C::i()).re
    }
    pub fn rho(&self, lam: f64) -> f64 {
        (C::i() * 0.5 * self.t * self.den(lam)).re
    }
}

/// Oracle step as a fraction of the distance to the nearest branch point.
pub const H_REL: f64 = 5e-3;

pub fn heston_sets() -> Vec<(HestonParams, f64)> {
    vec![
        (heston_ref(), 1.0),
        (HestonParams::new(0.0, 0.5, -2.3, 0.7, 0.4, 1.0).unwrap(), 1.7),
        (HestonParams::new(0.0, 2.0, -0.3, 1.5, 0.05, 1.0).unwrap(), 0.25),
    ]
}

/// The squared-OU pieces around the first pole.
pub struct SteinPieces {
    pub p: SteinSteinParams,
    pub t: f64,
    pub v: f64,
}

impl SteinPieces {
    pub fn new(p: SteinSteinParams, t: f64) -> Self {
        let r = root(p.q * t);
        SteinPieces { p, t, v: -r * r / (t * t) }
    }
    pub fn z(&self, l: f64) -> C {
        self.t * C::new(l + self.v, 0.0).sqrt()
    }
    pub fn phi_z(&self, l: f64) -> C {
        phi(self.p.q * self.t, C::i() * self.z(l))
    }
    pub fn g1(&self, l: f64) -> f64 {
        (C::i() * self.z(l) / self.phi_z(l)).re
    }
    pub fn fj(&self, j: usize, l: f64) -> f64 {
        let SteinSteinParams { q, m, sigma, y0, .. } = self.p;
        let (t, s2) = (self.t, sigma * sigma);
        let z = self.z(l);
        let w = C::new(l + self.v, 0.0);
        let k = l + self.v - q * q;
        let i = C::i();
        let num = match j {
            2 => -i * y0 * y0 * t * k * z.sinh() / (2.0 * s2),
            3 => -i * m * q * y0 * t * k * (z.cosh() - 1.0) / (s2 * w.sqrt()),
            4 => i * m * m * q * q * t * k * (z.sinh() - z * z.cosh()) / (2.0 * s2 * w),
            _ => {
                let h = (0.5 * z).sinh();
                i * m * m * q * q * q * t * k * (4.0 * h * h - z * z.sinh()) / (2.0 * s2 * w * w.sqrt())
            }
        };
        (num / self.phi_z(l)).re
    }
}

pub fn stein_sets() -> Vec<(SteinSteinParams, f64)> {
    vec![
        (stein_ref(), 1.0),
        (SteinSteinParams::new(0.0, 1.0, 0.3, 0.25, 0.1, 1.0).unwrap(), 1.0),
        (SteinSteinParams::new(0.0, 0.7, 0.5, 0.4, 0.3, 1.0).unwrap(), 1.8),
        (SteinSteinParams::new(0.0, 3.0, 1.0, 1.2, -0.4, 1.0).unwrap(), 0.4),
    ]
}
