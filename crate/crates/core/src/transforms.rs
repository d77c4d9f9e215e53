//! Laplace transforms of integrated variance for the CIR (Heston), squared OU (Stein–Stein) and
//! squared Bessel processes.
//!
//! Every transform is evaluated from entire functions of `x = t² w` (see `entire`), so the
//! formulas are branch-free and analytic up to the first zero of the denominator. Logarithms
//! are assembled term by term to stay finite for large `|λ|`.

use num_complex::Complex64;

use crate::entire::entire;
use crate::error::{Error, Result};
use crate::special_roots::root;

/// Heston parameters: `dX = μX dt + √Y X dW`, `dY = (a + bY) dt + c√Y dZ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HestonParams {
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub y0: f64,
    pub x0: f64,
}

impl HestonParams {
    pub fn new(mu: f64, a: f64, b: f64, c: f64, y0: f64, x0: f64) -> Result<Self> {
        let p = Self { mu, a, b, c, y0, x0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        finite(&[("mu", self.mu), ("a", self.a), ("b", self.b), ("c", self.c), ("y0", self.y0), ("x0", self.x0)])?;
        if self.a < 0.0 {
            return Err(Error::invalid(format!("Heston a must be >= 0, got {}", self.a)));
        }
        if self.b > 0.0 {
            return Err(Error::invalid(format!("Heston b must be <= 0, got {}", self.b)));
        }
        if self.c <= 0.0 {
            return Err(Error::invalid(format!("Heston c must be > 0, got {}", self.c)));
        }
        if self.y0 < 0.0 {
            return Err(Error::invalid(format!("Heston y0 must be >= 0, got {}", self.y0)));
        }
        if self.x0 <= 0.0 {
            return Err(Error::invalid(format!("x0 must be > 0, got {}", self.x0)));
        }
        Ok(())
    }
}

/// Stein–Stein parameters: `dX = μX dt + |Y| X dW`, `dY = q(m − Y) dt + σ dZ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteinSteinParams {
    pub mu: f64,
    pub q: f64,
    pub m: f64,
    pub sigma: f64,
    pub y0: f64,
    pub x0: f64,
}

impl SteinSteinParams {
    pub fn new(mu: f64, q: f64, m: f64, sigma: f64, y0: f64, x0: f64) -> Result<Self> {
        let p = Self { mu, q, m, sigma, y0, x0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        finite(&[
            ("mu", self.mu),
            ("q", self.q),
            ("m", self.m),
            ("sigma", self.sigma),
            ("y0", self.y0),
            ("x0", self.x0),
        ])?;
        if self.q <= 0.0 {
            return Err(Error::invalid(format!("Stein-Stein q must be > 0, got {}", self.q)));
        }
        if self.m < 0.0 {
            return Err(Error::invalid(format!("Stein-Stein m must be >= 0, got {}", self.m)));
        }
        if self.sigma <= 0.0 {
            return Err(Error::invalid(format!("Stein-Stein sigma must be > 0, got {}", self.sigma)));
        }
        if self.x0 <= 0.0 {
            return Err(Error::invalid(format!("x0 must be > 0, got {}", self.x0)));
        }
        Ok(())
    }

    /// For `m = 0` the squared OU process is a CIR process with `(σ², −2q, 2σ, y0²)`.
    pub fn as_heston(&self) -> Option<HestonParams> {
        (self.m == 0.0).then(|| HestonParams {
            mu: self.mu,
            a: self.sigma * self.sigma,
            b: -2.0 * self.q,
            c: 2.0 * self.sigma,
            y0: self.y0 * self.y0,
            x0: self.x0,
        })
    }
}

fn finite(fields: &[(&str, f64)]) -> Result<()> {
    for (name, v) in fields {
        if !v.is_finite() {
            return Err(Error::invalid(format!("{name} must be finite, got {v}")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Heston(HestonParams),
    SteinStein(SteinSteinParams),
}

impl Model {
    pub fn validate(&self) -> Result<()> {
        match self {
            Model::Heston(p) => p.validate(),
            Model::SteinStein(p) => p.validate(),
        }
    }

    pub fn mu(&self) -> f64 {
        match self {
            Model::Heston(p) => p.mu,
            Model::SteinStein(p) => p.mu,
        }
    }

    pub fn x0(&self) -> f64 {
        match self {
            Model::Heston(p) => p.x0,
            Model::SteinStein(p) => p.x0,
        }
    }

    /// Same model with the drift replaced, e.g. by the short rate for pricing.
    pub fn with_mu(&self, mu: f64) -> Model {
        match *self {
            Model::Heston(p) => Model::Heston(HestonParams { mu, ..p }),
            Model::SteinStein(p) => Model::SteinStein(SteinSteinParams { mu, ..p }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::Heston(_) => "heston",
            Model::SteinStein(_) => "stein_stein",
        }
    }
}

impl From<HestonParams> for Model {
    fn from(p: HestonParams) -> Self {
        Model::Heston(p)
    }
}

impl From<SteinSteinParams> for Model {
    fn from(p: SteinSteinParams) -> Self {
        Model::SteinStein(p)
    }
}

/// Half-plane `Re λ > re_lower` on which the integrated-variance transform is analytic, and the
/// exponent `δ` in the decay bound `|Ψ(λ)| ≤ C1 exp(−C2 |λ|^δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformDomain {
    pub re_lower: f64,
    pub decay_exponent: f64,
}

/// Analyticity domain of the transform in the variable `λ` of `E exp(−λ ∫ Y)` (Heston) or
/// `E exp(−λ ∫ Y²)` (Stein–Stein).
pub fn transform_domain(model: &Model, t: f64) -> Result<TransformDomain> {
    check_t(t)?;
    model.validate()?;
    let re_lower = match model {
        Model::Heston(p) => {
            let r = root(0.5 * t * p.b.abs())?;
            let u = -4.0 * r * r / (t * t);
            (u - p.b * p.b) / (2.0 * p.c * p.c)
        }
        Model::SteinStein(p) => {
            let r = root(p.q * t)?;
            let v = -r * r / (t * t);
            (v - p.q * p.q) / (2.0 * p.sigma * p.sigma)
        }
    };
    Ok(TransformDomain { re_lower, decay_exponent: 0.5 })
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("horizon t must be finite and > 0, got {t}")));
    }
    Ok(())
}

fn check_domain(lam: Complex64, dom: &TransformDomain) -> Result<()> {
    if !(lam.re > dom.re_lower) || !lam.im.is_finite() {
        return Err(Error::Domain { re: lam.re, im: lam.im, lower: dom.re_lower });
    }
    Ok(())
}

/// `log E exp(−μ ∫₀^τ T_s ds)` for `T = BESQ^δ_x`, as an analytic function of `μ`.
fn besq_log(x: f64, delta: f64, tau: f64, mu: Complex64) -> Complex64 {
    // Pitman–Yor with λ² = 2μ: [cosh λτ]^{−δ/2} exp(−(x/2) λ tanh λτ)
    let e = entire(2.0 * mu * tau * tau);
    let log_ch = e.log_scale + e.ch.ln();
    -0.5 * delta * log_ch - x * mu * tau * e.sh1 / e.ch
}

/// `E exp(−(λ²/2) ∫₀ᵗ T_s ds)` for a squared Bessel process of dimension `δ` started at `x`.
pub fn besq_integrated_laplace(x: f64, delta: f64, t: f64, lam: f64) -> Result<f64> {
    check_t(t)?;
    if !(x >= 0.0) || !(delta >= 0.0) || !(lam >= 0.0) || !lam.is_finite() {
        return Err(Error::invalid("besq transform needs x >= 0, delta >= 0, lambda >= 0"));
    }
    Ok(besq_log(x, delta, t, Complex64::new(0.5 * lam * lam, 0.0)).re.exp())
}

fn cir_log(p: &HestonParams, t: f64, lam: Complex64) -> Complex64 {
    let (a, b, c, y0) = (p.a, p.b, p.c, p.y0);
    let c2 = c * c;
    let half = 0.5 * t;
    let e = entire(half * half * (b * b + 2.0 * c2 * lam));
    let s = e.sh1 * half;
    let den = e.ch - b * s;
    let log_den = e.log_scale + den.ln();
    -a * b * t / c2 - (2.0 * a / c2) * log_den - 2.0 * y0 * lam * s / den
}

fn heston_log(p: &HestonParams, t: f64, lam: Complex64) -> Complex64 {
    if p.b == 0.0 {
        let c2 = p.c * p.c;
        besq_log(p.y0, 4.0 * p.a / c2, 0.25 * c2 * t, 4.0 * lam / c2)
    } else {
        cir_log(p, t, lam)
    }
}

fn ou2_log(p: &SteinSteinParams, t: f64, lam: Complex64) -> Complex64 {
    let (q, m, s2, y0) = (p.q, p.m, p.sigma * p.sigma, p.y0);
    let e = entire(t * t * (q * q + 2.0 * s2 * lam));
    let den = e.ch + q * t * e.sh1;
    let log_den = e.log_scale + den.ln();
    let t2 = t * t;
    let num = -y0 * y0 * lam * t * e.sh1 - 2.0 * m * q * y0 * lam * t2 * e.e1
        + m * m * q * q * lam * t2 * t * e.e2
        + m * m * q * q * q * lam * t2 * t2 * e.e3;
    0.5 * q * t - 0.5 * log_den + num / den
}

/// `E exp(−λ ∫₀ᵗ Y ds)` for the Heston variance process; requires `b < 0`.
pub fn cir_integrated_laplace(p: &HestonParams, t: f64, lam: Complex64) -> Result<Complex64> {
    p.validate()?;
    if p.b >= 0.0 {
        return Err(Error::invalid("cir_integrated_laplace needs b < 0; b = 0 goes through the Bessel route"));
    }
    let dom = transform_domain(&Model::Heston(*p), t)?;
    check_domain(lam, &dom)?;
    Ok(cir_log(p, t, lam).exp())
}

/// `E exp(−λ ∫₀ᵗ Y² ds)` for the Stein–Stein volatility process.
pub fn ou2_integrated_laplace(p: &SteinSteinParams, t: f64, lam: Complex64) -> Result<Complex64> {
    p.validate()?;
    let dom = transform_domain(&Model::SteinStein(*p), t)?;
    check_domain(lam, &dom)?;
    Ok(ou2_log(p, t, lam).exp())
}

/// Logarithm of the integrated-variance transform, continuous along any path inside the domain
/// that does not wind around the origin of the denominator.
pub fn log_laplace(model: &Model, t: f64, lam: Complex64) -> Result<Complex64> {
    let dom = transform_domain(model, t)?;
    check_domain(lam, &dom)?;
    Ok(log_laplace_unchecked(model, t, lam))
}

/// Analytic continuation of [`log_laplace`] to the plane cut along `(−∞, re_lower]`.
///
/// All singularities of the transform lie on that ray, so the value is defined for every
/// other `λ`, including `Re λ ≤ re_lower` away from the real axis.
pub fn log_laplace_continued(model: &Model, t: f64, lam: Complex64) -> Result<Complex64> {
    let dom = transform_domain(model, t)?;
    if lam.im == 0.0 && lam.re <= dom.re_lower || !lam.re.is_finite() || !lam.im.is_finite() {
        return Err(Error::Domain { re: lam.re, im: lam.im, lower: dom.re_lower });
    }
    Ok(log_laplace_unchecked(model, t, lam))
}

pub(crate) fn log_laplace_unchecked(model: &Model, t: f64, lam: Complex64) -> Complex64 {
    match model {
        Model::Heston(p) => heston_log(p, t, lam),
        Model::SteinStein(p) => ou2_log(p, t, lam),
    }
}

/// Integrated-variance transform `Ψ(λ)` for either model (`b = 0` handled via BESQ).
pub fn laplace(model: &Model, t: f64, lam: Complex64) -> Result<Complex64> {
    Ok(log_laplace(model, t, lam)?.exp())
}

/// `Ψ(iξ)`; the imaginary axis always lies inside the domain.
pub fn char_fn(model: &Model, t: f64, xi: f64) -> Result<Complex64> {
    laplace(model, t, Complex64::new(0.0, xi))
}

/// `E ∫₀ᵗ Y ds` (Heston) or `E ∫₀ᵗ Y² ds` (Stein–Stein) from the ODE moments.
pub fn integrated_variance_mean(model: &Model, t: f64) -> Result<f64> {
    check_t(t)?;
    model.validate()?;
    Ok(match model {
        Model::Heston(p) => {
            // E Y_s = y0 e^{bs} + a (e^{bs} − 1)/b
            let b = p.b;
            if b == 0.0 {
                p.y0 * t + 0.5 * p.a * t * t
            } else {
                let i1 = (b * t).exp_m1() / b;
                p.y0 * i1 + p.a / b * (i1 - t)
            }
        }
        Model::SteinStein(p) => {
            // E Y_s = m + (y0 − m) e^{−qs}, Var Y_s = σ²(1 − e^{−2qs})/(2q)
            let (q, m, d) = (p.q, p.m, p.y0 - p.m);
            let i1 = -(-q * t).exp_m1() / q;
            let i2 = -(-2.0 * q * t).exp_m1() / (2.0 * q);
            let mean_sq = m * m * t + 2.0 * m * d * i1 + d * d * i2;
            let var = p.sigma * p.sigma / (2.0 * q) * (t - i2);
            mean_sq + var
        }
    })
}
