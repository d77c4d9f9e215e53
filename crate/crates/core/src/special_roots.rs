//! The entire function `Φ_s(z) = z cos z + s sin z` and its smallest positive zero `r_s`.
//!
//! For `s ≥ 0` the zero lies in `[π/2, π)` and is the unique solution of
//! `-u / tan u = s` on `(π/2, π)`; the map `s ↦ r_s` is strictly increasing with
//! `r_0 = π/2` and `r_s → π` as `s → ∞`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance for [`smallest_root`].
pub const DEFAULT_ROOT_TOLERANCE: f64 = 1e-13;

const MAX_BISECTIONS: usize = 200;
const BRACKET_OFFSET: f64 = 1e-12;
const LARGE_S: f64 = 1e12;

/// Parameters of a root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootQuery {
    pub s: f64,
    pub tolerance: f64,
}

impl RootQuery {
    pub fn new(s: f64, tolerance: f64) -> Result<Self> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::invalid(format!("root parameter s must be finite and >= 0, got {s}")));
        }
        if !(tolerance > 0.0) {
            return Err(Error::invalid(format!("root tolerance must be > 0, got {tolerance}")));
        }
        Ok(Self { s, tolerance })
    }

    /// Query with [`DEFAULT_ROOT_TOLERANCE`].
    pub fn with_default_tolerance(s: f64) -> Result<Self> {
        Self::new(s, DEFAULT_ROOT_TOLERANCE)
    }
}

/// `Φ_s(z) = z cos z + s sin z` in complex arithmetic.
pub fn phi(s: f64, z: Complex64) -> Complex64 {
    z * z.cos() + s * z.sin()
}

/// First and second derivatives of `Φ_s` on the real line.
pub fn phi_derivatives(s: f64, z: f64) -> (f64, f64) {
    let (sin, cos) = z.sin_cos();
    let first = (1.0 + s) * cos - z * sin;
    let second = -2.0 * sin - (z * cos + s * sin);
    (first, second)
}

/// `φ(u) = -u / tan u`, strictly increasing from 0 to ∞ on `(π/2, π)`.
fn cot_map(u: f64) -> f64 {
    let (sin, cos) = u.sin_cos();
    -u * cos / sin
}

/// Smallest positive zero `r_s` of `Φ_s`.
pub fn smallest_root(q: &RootQuery) -> Result<f64> {
    let s = q.s;
    if !(s >= 0.0) {
        return Err(Error::invalid(format!("root parameter s must be >= 0, got {s}")));
    }
    if s == 0.0 {
        return Ok(FRAC_PI_2);
    }
    if s > LARGE_S {
        let r = PI - PI / (1.0 + s);
        return Ok(r.clamp(FRAC_PI_2, PI - f64::EPSILON * PI));
    }

    let mut lo = FRAC_PI_2 + BRACKET_OFFSET;
    let mut hi = PI;
    if cot_map(lo) >= s {
        // Root sits inside the excluded sliver next to π/2, where φ(π/2 + ε) ≈ πε/2.
        return Ok(FRAC_PI_2 + 2.0 * s / PI);
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        // Run to full double precision; the tolerance only caps the final bracket width.
        if mid <= lo || mid >= hi {
            break;
        }
        if cot_map(mid) < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo > q.tolerance {
        return Err(Error::Internal(format!("root bracket for s = {s} did not shrink below the tolerance")));
    }
    Ok(0.5 * (lo + hi))
}

/// `r_s` with the default tolerance; `s` must already be validated as `≥ 0`.
pub(crate) fn root(s: f64) -> Result<f64> {
    smallest_root(&RootQuery::with_default_tolerance(s)?)
}
