//! Densities of integrated variance, of the mixing variable `α_t` and of the stock price, and
//! call prices obtained by quadrature against the stock density.
//!
//! The integrated-variance density is recovered from its Laplace transform along a vertical
//! line `Re λ = γ`, with `γ` at the saddle point of `γ v + log Ψ(γ)`. On that line the integrand
//! is positive near the real axis and free of cancellation, which keeps the relative accuracy
//! in the far tails where the density is far below the double-precision floor of a
//! real-axis Fourier inversion. All values are assembled in log space.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive, gl20};
use crate::transforms::{integrated_variance_mean, log_laplace_unchecked, transform_domain, Model};

/// Pointwise relative accuracy targeted by the inversion.
pub const DEFAULT_ABS_TOLERANCE: f64 = 1e-8;

const PANEL_REL_TOL: f64 = 1e-12;
const MAX_PANELS: usize = 20_000;
const ENVELOPE_CUTOFF: f64 = 1e-18;
const SADDLE_ITERATIONS: usize = 200;
// Asymptotic slope of the inversion contour: Re s ≈ γ − β |Im s|.
const CONTOUR_SLOPE: f64 = 1.0;

/// Sampled density with its quadrature mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub abscissae: Vec<f64>,
    pub values: Vec<f64>,
    pub abs_tolerance: f64,
    pub total_mass: f64,
}

impl DensityGrid {
    /// Builds a grid; `total_mass` is the trapezoid rule over the abscissae.
    pub fn from_samples(abscissae: Vec<f64>, values: Vec<f64>, abs_tolerance: f64) -> Result<Self> {
        if abscissae.len() != values.len() || abscissae.len() < 2 {
            return Err(Error::invalid("density grid needs at least two matching samples"));
        }
        if abscissae.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("density grid abscissae must be strictly increasing"));
        }
        let total_mass = abscissae
            .windows(2)
            .zip(values.windows(2))
            .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
            .sum();
        Ok(Self { abscissae, values, abs_tolerance, total_mass })
    }
}

/// Saddle-shifted inversion of the integrated-variance transform.
#[derive(Debug, Clone)]
pub(crate) struct VarianceInverter {
    model: Model,
    t: f64,
    re_lower: f64,
    mean: f64,
}

impl VarianceInverter {
    pub(crate) fn new(model: &Model, t: f64) -> Result<Self> {
        let dom = transform_domain(model, t)?;
        let mean = integrated_variance_mean(model, t)?;
        Ok(Self { model: *model, t, re_lower: dom.re_lower, mean })
    }

    fn lp(&self, lam: Complex64) -> Complex64 {
        log_laplace_unchecked(&self.model, self.t, lam)
    }

    /// d/dγ log Ψ(γ) by complex-step differentiation.
    fn dlp(&self, g: f64) -> f64 {
        let h = 1e-20 * (1.0 + g.abs());
        self.lp(Complex64::new(g, h)).im / h
    }

    /// Curvature of log Ψ at γ, used only to size the first quadrature panel.
    fn d2lp(&self, g: f64) -> f64 {
        let d = 1e-4 * (g - self.re_lower).min(1.0 + g.abs());
        (self.dlp(g + d) - self.dlp(g - d)) / (2.0 * d)
    }

    /// Minimiser of `γ v + log Ψ(γ)` (density) or of `γ v + log Ψ(γ) − log|γ|` (distribution).
    fn saddle(&self, v: f64, cdf: bool) -> Result<f64> {
        let slope = |g: f64| v + self.dlp(g) - if cdf { 1.0 / g } else { 0.0 };
        let (mut lo, mut hi) = if v < self.mean {
            let mut lo = 0.0;
            let mut hi = 1.0 / self.mean.max(1e-300);
            let mut n = 0;
            while slope(hi) < 0.0 {
                lo = hi;
                hi *= 2.0;
                n += 1;
                if n > 1000 || !hi.is_finite() || hi > 1e250 {
                    return Err(Error::numerical(format!("no saddle point for v = {v}")));
                }
            }
            (lo, hi)
        } else {
            (self.re_lower, 0.0)
        };
        for _ in 0..SADDLE_ITERATIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slope(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let g = 0.5 * (lo + hi);
        if g <= self.re_lower || (cdf && g == 0.0) {
            return Err(Error::numerical(format!("saddle point collapsed onto a singularity for v = {v}")));
        }
        Ok(g)
    }

    /// Integral along the hyperbola `s(u) = γ + iu − β(√(u² + u_s²) − u_s)`, `u ≥ 0`:
    /// `∫₀^∞ Re[e^{(s−γ)v} Ψ(s)/Ψ(γ) · s′(u)/i · w(s)] du`, with `w = γ/s` for the distribution.
    ///
    /// The contour leaves the saddle vertically and bends into the left half-plane, where
    /// `e^{sv}` decays exponentially. It never meets the cut `(−∞, re_lower]` of `Ψ`.
    fn line_integral(&self, v: f64, g: f64, cdf: bool) -> Result<f64> {
        let base = self.lp(Complex64::new(g, 0.0)).re;
        let kappa = self.d2lp(g) + if cdf { 1.0 / (g * g) } else { 0.0 };
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::numerical(format!("non-convex transform at gamma = {g}")));
        }
        let scale = kappa.sqrt().recip();
        let term = |u: f64| -> Complex64 {
            let root = (u * u + scale * scale).sqrt();
            let s = Complex64::new(g - CONTOUR_SLOPE * (root - scale), u);
            let ds_over_i = Complex64::new(1.0, CONTOUR_SLOPE * u / root);
            let mut z = (self.lp(s) - base + (s - g) * v).exp() * ds_over_i;
            if cdf {
                z *= g / s;
            }
            z
        };
        // the exponent is a difference of terms of size |base| and γv, which sets a noise floor
        let rel_tol = PANEL_REL_TOL.max(64.0 * f64::EPSILON * (1.0 + base.abs() + (g * v).abs()));
        let cap = (4.0 * PI / v).max(scale);
        let mut a = 0.0;
        let mut w = 0.5 * scale;
        let mut total = 0.0f64;
        let mut quiet = 0;
        for _ in 0..MAX_PANELS {
            let b = a + w;
            let (val, _) = adaptive(|u| term(u).re, a, b, rel_tol * scale.max(total.abs()), rel_tol, 40)?;
            total += val;
            let envelope = term(b).norm();
            if envelope < ENVELOPE_CUTOFF && val.abs() <= 1e-15 * total.abs() {
                quiet += 1;
                if quiet >= 2 {
                    return Ok(total);
                }
            } else {
                quiet = 0;
            }
            a = b;
            w = (1.5 * w).min(cap.max(w));
        }
        Err(Error::numerical(format!("inversion integral did not settle for v = {v}")))
    }

    pub(crate) fn log_density(&self, v: f64) -> Result<f64> {
        check_positive("v", v)?;
        let g = self.saddle(v, false)?;
        let integral = self.line_integral(v, g, false)?;
        if !(integral > 0.0) {
            return Err(Error::numerical(format!("non-positive inversion integral at v = {v}")));
        }
        Ok(g * v + self.lp(Complex64::new(g, 0.0)).re - PI.ln() + integral.ln())
    }

    pub(crate) fn cdf(&self, v: f64) -> Result<f64> {
        check_positive("v", v)?;
        let g = self.saddle(v, true)?;
        let integral = self.line_integral(v, g, true)?;
        let x = (g * v + self.lp(Complex64::new(g, 0.0)).re).exp() / (PI * g) * integral;
        let f = if g > 0.0 { x } else { 1.0 + x };
        Ok(f.clamp(0.0, 1.0))
    }

    pub(crate) fn log_mixing(&self, y: f64) -> Result<f64> {
        check_positive("y", y)?;
        Ok((2.0 * self.t * y).ln() + self.log_density(self.t * y * y)?)
    }

    pub(crate) fn mean(&self) -> f64 {
        self.mean
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::invalid(format!("{name} must be finite and > 0, got {v}")));
    }
    Ok(())
}

/// Logarithm of the density of `∫₀ᵗ Y ds` (Heston) or `∫₀ᵗ Y² ds` (Stein–Stein) at `v`.
pub fn integrated_variance_log_density(model: &Model, t: f64, v: f64) -> Result<f64> {
    VarianceInverter::new(model, t)?.log_density(v)
}

/// Density of integrated variance at `v`.
pub fn integrated_variance_density(model: &Model, t: f64, v: f64) -> Result<f64> {
    Ok(integrated_variance_log_density(model, t, v)?.exp())
}

/// Distribution function of integrated variance at `v`.
pub fn integrated_variance_cdf(model: &Model, t: f64, v: f64) -> Result<f64> {
    VarianceInverter::new(model, t)?.cdf(v)
}

/// `log m_t(y)`, where `m_t` is the density of `α_t = (V/t)^{1/2}`.
pub fn log_mixing_density(model: &Model, t: f64, y: f64) -> Result<f64> {
    VarianceInverter::new(model, t)?.log_mixing(y)
}

/// Mixing density `m_t(y) = 2ty · f_V(ty²)`.
pub fn mixing_density(model: &Model, t: f64, y: f64) -> Result<f64> {
    Ok(log_mixing_density(model, t, y)?.exp())
}

/// `P(α_t ≤ y)`.
pub fn mixing_cdf(model: &Model, t: f64, y: f64) -> Result<f64> {
    check_positive("y", y)?;
    VarianceInverter::new(model, t)?.cdf(t * y * y)
}

/// Mixing density sampled on `ys`.
pub fn mixing_density_grid(model: &Model, t: f64, ys: &[f64]) -> Result<DensityGrid> {
    let inv = VarianceInverter::new(model, t)?;
    let values = ys.iter().map(|&y| inv.log_mixing(y).map(f64::exp)).collect::<Result<Vec<_>>>()?;
    DensityGrid::from_samples(ys.to_vec(), values, DEFAULT_ABS_TOLERANCE)
}

/// Distribution function of `α_t` tabulated on a uniform grid and interpolated linearly.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    lo: f64,
    step: f64,
    values: Vec<f64>,
    inverter: VarianceInverter,
}

impl TabulatedCdf {
    pub fn new(model: &Model, t: f64, lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) || points < 2 {
            return Err(Error::invalid("tabulated cdf needs 0 < lo < hi and at least two points"));
        }
        let inverter = VarianceInverter::new(model, t)?;
        let step = (hi - lo) / (points - 1) as f64;
        let mut values = Vec::with_capacity(points);
        for i in 0..points {
            let y = lo + step * i as f64;
            values.push(inverter.cdf(t * y * y)?);
        }
        // Enforce monotonicity against rounding in the inversion.
        for i in 1..values.len() {
            if values[i] < values[i - 1] {
                values[i] = values[i - 1];
            }
        }
        Ok(Self { lo, step, values, inverter })
    }

    pub fn eval(&self, y: f64) -> f64 {
        if !(y > 0.0) {
            return 0.0;
        }
        let u = (y - self.lo) / self.step;
        if u < 0.0 || u > (self.values.len() - 1) as f64 {
            let t = self.inverter.t;
            return self.inverter.cdf(t * y * y).unwrap_or(if u < 0.0 { 0.0 } else { 1.0 });
        }
        let i = (u.floor() as usize).min(self.values.len() - 2);
        let frac = u - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }
}

// Extent of the mixing table: log-density drop below its value at the mean, upper and lower side.
const UPPER_SPAN: f64 = 1200.0;
const LOWER_SPAN: f64 = 45.0;
const MAX_LOG_STEP: f64 = 30.0;

/// Stock-price density through the mixing representation
///
/// `D_t(F x) = (F √(2πt))^{-1} x^{-3/2} ∫ y^{-1} m_t(y) exp(−log²x/(2ty²) − ty²/8) dy`,
/// with `F = x0 e^{μt}`. The `y` integral uses a fixed Gauss–Legendre table of `m_t`, so every
/// evaluation is a log-sum-exp over the same nodes and the reflection `x ↦ 1/x` is exact.
#[derive(Debug, Clone)]
pub struct StockDensity {
    t: f64,
    forward: f64,
    nodes: Vec<f64>,
    log_weights: Vec<f64>,
    mixing: DensityGrid,
    mixing_mass: f64,
    spread: f64,
}

impl StockDensity {
    pub fn new(model: &Model, t: f64) -> Result<Self> {
        Self::with_upper_span(model, t, UPPER_SPAN)
    }

    /// Like [`StockDensity::new`], with the mixing table extended until `log m_t` has dropped by
    /// `span` below its value at the mean. Far tails of `D_t` (large `|log x|`) draw on large `y`,
    /// so moment probes deep in the tail need a wider table than the default.
    pub fn with_upper_span(model: &Model, t: f64, span: f64) -> Result<Self> {
        if !(span > 0.0) || !span.is_finite() {
            return Err(Error::invalid(format!("table span must be finite and > 0, got {span}")));
        }
        let inv = VarianceInverter::new(model, t)?;
        let forward = model.x0() * (model.mu() * t).exp();
        let y_c = (inv.mean() / t).sqrt();
        let l_c = inv.log_mixing(y_c)?;

        let mut y_hi = y_c;
        for n in 0.. {
            y_hi *= 1.2;
            if inv.log_mixing(y_hi)? < l_c - span {
                break;
            }
            if n > 2000 {
                return Err(Error::numerical("mixing density tail does not decay"));
            }
        }
        let mut y_lo = y_c;
        loop {
            y_lo *= 0.85;
            if inv.log_mixing(y_lo)? - y_lo.ln() < l_c - y_c.ln() - LOWER_SPAN || y_lo < 1e-6 * y_c {
                break;
            }
        }

        let rule = gl20();
        let mut nodes = Vec::new();
        let mut log_weights = Vec::new();
        let mut densities = Vec::new();
        let mut mixing_mass = 0.0;
        let mut second = 0.0;
        let w_max = 0.5 * y_c;
        let mut a = y_lo;
        let mut la = inv.log_mixing(a)?;
        let mut w = 0.25 * (y_c - y_lo).max(0.05 * y_c);
        while a < y_hi {
            let mut trial = w.min(y_hi - a);
            let (b, lb) = loop {
                let b = a + trial;
                let lb = inv.log_mixing(b)?;
                if (lb - la).abs() <= MAX_LOG_STEP || trial < 1e-6 * y_c {
                    break (b, lb);
                }
                trial *= 0.5;
            };
            for (y, wt) in rule.mapped(a, b) {
                let lm = inv.log_mixing(y)?;
                nodes.push(y);
                log_weights.push(wt.ln() + lm - y.ln());
                densities.push(lm.exp());
                mixing_mass += wt * lm.exp();
                second += wt * lm.exp() * y * y;
            }
            a = b;
            la = lb;
            w = (1.5 * trial).min(w_max);
        }
        let mixing = DensityGrid::from_samples(nodes.clone(), densities, DEFAULT_ABS_TOLERANCE)?;
        let spread = (t * second / mixing_mass).sqrt();
        Ok(Self { t, forward, nodes, log_weights, mixing, mixing_mass, spread })
    }

    pub fn horizon(&self) -> f64 {
        self.t
    }

    /// `x0 e^{μt}`.
    pub fn forward(&self) -> f64 {
        self.forward
    }

    /// Gauss–Legendre quadrature of `m_t` over the table; should be 1 up to the inversion error.
    pub fn mixing_mass(&self) -> f64 {
        self.mixing_mass
    }

    /// The mixing density on the table nodes (not equally spaced).
    pub fn mixing_grid(&self) -> &DensityGrid {
        &self.mixing
    }

    fn log_kernel_sum(&self, l: f64) -> f64 {
        let t = self.t;
        let terms = self
            .nodes
            .iter()
            .zip(&self.log_weights)
            .map(|(&y, &lw)| lw - l * l / (2.0 * t * y * y) - t * y * y / 8.0);
        log_sum_exp(terms)
    }

    /// `log D_t(F x)` for moneyness `x > 0`.
    pub fn log_density_ratio(&self, x: f64) -> f64 {
        let l = x.ln();
        -self.forward.ln() - 0.5 * (2.0 * PI * self.t).ln() - 1.5 * l + self.log_kernel_sum(l)
    }

    /// `D_t(F x)` for moneyness `x > 0`.
    pub fn density_ratio(&self, x: f64) -> f64 {
        self.log_density_ratio(x).exp()
    }

    /// `D_t(s)` at an absolute price `s > 0`.
    pub fn density(&self, s: f64) -> f64 {
        self.density_ratio(s / self.forward)
    }

    /// Log density of `log(X_t / F)` at `l`.
    pub fn log_moneyness_log_density(&self, l: f64) -> f64 {
        -0.5 * (2.0 * PI * self.t).ln() - 0.5 * l + self.log_kernel_sum(l)
    }

    /// Standard deviation scale of log moneyness, `sqrt(t E α²)`.
    fn spread(&self) -> f64 {
        self.spread
    }

    /// `∫_a^b e^{f(l)} dl` for a log-integrand `f`, accumulated from `a` towards `b` in panels.
    fn integrate_log(&self, f: impl Fn(f64) -> f64, a: f64, b: f64, shift: f64) -> Result<f64> {
        let scale = self.spread();
        let dir = if b >= a { 1.0 } else { -1.0 };
        let mut lo = a;
        let mut w = 0.25 * scale;
        let mut total = 0.0;
        let mut quiet = 0;
        for _ in 0..MAX_PANELS {
            let hi = if dir > 0.0 { (lo + w).min(b) } else { (lo - w).max(b) };
            let (val, _) = adaptive(|l| (f(l) - shift).exp(), lo.min(hi), lo.max(hi), 1e-300, 1e-12, 30)?;
            total += val;
            if hi == b {
                return Ok(total);
            }
            if val <= 1e-17 * total && (hi - a).abs() > 2.0 * scale {
                quiet += 1;
                if quiet >= 3 {
                    return Ok(total);
                }
            } else {
                quiet = 0;
            }
            lo = hi;
            w = (1.25 * w).min(4.0 * scale);
        }
        Err(Error::numerical("log-moneyness integral did not settle"))
    }

    /// `∫ D_t(s) ds` by quadrature in log moneyness.
    pub fn total_mass(&self) -> Result<f64> {
        let f = |l: f64| self.log_moneyness_log_density(l);
        let shift = f(0.0);
        let right = self.integrate_log(f, 0.0, f64::INFINITY, shift)?;
        let left = self.integrate_log(f, 0.0, f64::NEG_INFINITY, shift)?;
        Ok((right + left) * shift.exp())
    }

    /// `∫_{-L}^{L} (s/F)^p D_t(s) ds`, the truncated `p`-th moment of the moneyness.
    pub fn truncated_moment(&self, p: f64, half_width: f64) -> Result<f64> {
        let f = |l: f64| p * l + self.log_moneyness_log_density(l);
        let shift = f(0.0);
        let right = self.integrate_log(f, 0.0, half_width, shift)?;
        let left = self.integrate_log(f, 0.0, -half_width, shift)?;
        Ok((right + left) * shift.exp())
    }

    /// `log E[(X_t − F e^k)^+] / F`, the log of the undiscounted normalised call at log-strike `k`.
    pub fn log_normalized_call(&self, k: f64) -> Result<f64> {
        // Integrand (e^l − e^k) d̃(l) = e^k expm1(l − k) d̃(l)
        let f = |l: f64| {
            let d = l - k;
            if d <= 0.0 {
                f64::NEG_INFINITY
            } else {
                k + d.exp_m1().ln() + self.log_moneyness_log_density(l)
            }
        };
        let probe = k + self.spread();
        let shift = f(probe);
        let integral = self.integrate_log(f, k, f64::INFINITY, shift)?;
        if !(integral > 0.0) {
            return Err(Error::numerical(format!("call integral vanished at k = {k}")));
        }
        Ok(shift + integral.ln())
    }

    /// `log E[(F e^k − X_t)^+] / F`, the log of the undiscounted normalised put.
    pub fn log_normalized_put(&self, k: f64) -> Result<f64> {
        let f = |l: f64| {
            let d = l - k;
            if d >= 0.0 {
                f64::NEG_INFINITY
            } else {
                k + (-d.exp_m1()).ln() + self.log_moneyness_log_density(l)
            }
        };
        let probe = k - self.spread();
        let shift = f(probe);
        let integral = self.integrate_log(f, k, f64::NEG_INFINITY, shift)?;
        if !(integral > 0.0) {
            return Err(Error::numerical(format!("put integral vanished at k = {k}")));
        }
        Ok(shift + integral.ln())
    }

    /// Undiscounted call payoff expectation `E[(X_t − K)^+]`.
    pub fn undiscounted_call(&self, strike: f64) -> Result<f64> {
        check_positive("strike", strike)?;
        Ok(self.forward * self.log_normalized_call((strike / self.forward).ln())?.exp())
    }
}

fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + terms.map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// `D_t(x0 e^{μt} x)` at moneyness `x`. Builds a fresh [`StockDensity`]; reuse that type for
/// many evaluations.
pub fn stock_density(model: &Model, t: f64, x: f64) -> Result<f64> {
    check_positive("x", x)?;
    Ok(StockDensity::new(model, t)?.density_ratio(x))
}

/// Call price `e^{−rT} E[(X_T − K)^+]` under the pricing measure (drift replaced by `rate`).
pub fn call_price(model: &Model, t: f64, rate: f64, strike: f64) -> Result<f64> {
    if !rate.is_finite() {
        return Err(Error::invalid("rate must be finite"));
    }
    let sd = StockDensity::new(&model.with_mu(rate), t)?;
    Ok((-rate * t).exp() * sd.undiscounted_call(strike)?)
}
