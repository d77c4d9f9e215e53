//! Simulation of the realized volatility `α_t` and of the stock price under the mixing
//! representation.
//!
//! Every path draws from its own ChaCha8 stream `(seed, path index)`, so results do not depend
//! on how paths are split across threads.

use std::num::NonZeroUsize;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::transforms::{HestonParams, Model, SteinSteinParams};

/// Number of batches behind the batch-means standard error.
pub const SE_BATCHES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    ExactTransition,
    EulerFullTruncation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub paths: usize,
    pub steps: usize,
    pub seed: u64,
    pub scheme: Scheme,
}

impl McConfig {
    pub fn new(paths: usize, steps: usize, seed: u64, scheme: Scheme) -> Result<Self> {
        let cfg = McConfig { paths, steps, seed, scheme };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths < 1 {
            return Err(Error::invalid("paths must be >= 1"));
        }
        if self.steps < 2 {
            return Err(Error::invalid(format!("steps must be >= 2, got {}", self.steps)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSample {
    pub draws: Vec<f64>,
    pub config: McConfig,
}

impl McSample {
    /// Sample mean of `payoff(draw)`.
    pub fn mean<F: Fn(f64) -> f64>(&self, payoff: F) -> f64 {
        self.draws.iter().map(|&x| payoff(x)).sum::<f64>() / self.draws.len() as f64
    }

    /// Batch-means standard error of the mean of `payoff(draw)`.
    pub fn standard_error<F: Fn(f64) -> f64>(&self, payoff: F) -> f64 {
        batch_means_se(&self.draws.iter().map(|&x| payoff(x)).collect::<Vec<_>>())
    }
}

/// Standard error of the mean from [`SE_BATCHES`] contiguous batches; falls back to the i.i.d.
/// formula when there are fewer values than batches.
pub fn batch_means_se(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return f64::NAN;
    }
    let (groups, size) = if n >= SE_BATCHES { (SE_BATCHES, n / SE_BATCHES) } else { (n, 1) };
    let means: Vec<f64> =
        (0..groups).map(|g| values[g * size..(g + 1) * size].iter().sum::<f64>() / size as f64).collect();
    let m = means.iter().sum::<f64>() / groups as f64;
    let var = means.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (groups - 1) as f64;
    (var / groups as f64).sqrt()
}

fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Runs `path_fn` on every path index, in parallel chunks, keeping path order.
fn run_paths<F>(paths: usize, path_fn: F) -> Vec<f64>
where
    F: Fn(usize) -> f64 + Sync,
{
    let threads = std::thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1).min(paths);
    if threads <= 1 {
        return (0..paths).map(&path_fn).collect();
    }
    let chunk = paths.div_ceil(threads);
    let mut out = vec![0.0; paths];
    std::thread::scope(|scope| {
        for (k, slot) in out.chunks_mut(chunk).enumerate() {
            let f = &path_fn;
            scope.spawn(move || {
                for (j, v) in slot.iter_mut().enumerate() {
                    *v = f(k * chunk + j);
                }
            });
        }
    });
    out
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("horizon t must be finite and > 0, got {t}")));
    }
    Ok(())
}

/// Noncentral chi-square with `d ≥ 0` degrees of freedom and noncentrality `nc ≥ 0`.
fn noncentral_chi2(rng: &mut ChaCha8Rng, d: f64, nc: f64) -> f64 {
    let central = |rng: &mut ChaCha8Rng, k: f64| {
        if k > 0.0 {
            ChiSquared::new(k).map(|c| c.sample(rng)).unwrap_or(0.0)
        } else {
            0.0
        }
    };
    if d >= 1.0 {
        let z = normal(rng) + nc.sqrt();
        central(rng, d - 1.0) + z * z
    } else {
        let n = if nc > 0.0 { Poisson::new(0.5 * nc).map(|p| p.sample(rng)).unwrap_or(0.0) } else { 0.0 };
        central(rng, d + 2.0 * n)
    }
}

/// Trapezoid accumulator over an equally spaced grid.
struct Trapezoid {
    h: f64,
    sum: f64,
    last: f64,
}

impl Trapezoid {
    fn new(h: f64, first: f64) -> Self {
        Trapezoid { h, sum: 0.0, last: first }
    }
    fn push(&mut self, v: f64) {
        self.sum += 0.5 * self.h * (self.last + v);
        self.last = v;
    }
}

/// One CIR path: returns `∫₀ᵗ Y ds` and the path's generator.
fn cir_path(p: &HestonParams, t: f64, cfg: &McConfig, path: usize) -> (f64, ChaCha8Rng) {
    let mut rng = path_rng(cfg.seed, path);
    let h = t / cfg.steps as f64;
    let mut y = p.y0;
    let mut acc = Trapezoid::new(h, y);
    match cfg.scheme {
        Scheme::ExactTransition => {
            let c2 = p.c * p.c;
            let d = 4.0 * p.a / c2;
            // Y_{s+h} = scale · χ'²_d(Y_s · e^{bh} / scale)
            let scale = if p.b == 0.0 { 0.25 * c2 * h } else { 0.25 * c2 * (p.b * h).exp_m1() / p.b };
            let decay = (p.b * h).exp();
            for _ in 0..cfg.steps {
                y = scale * noncentral_chi2(&mut rng, d, y * decay / scale);
                acc.push(y);
            }
        }
        Scheme::EulerFullTruncation => {
            let sq = h.sqrt();
            let mut plus = y;
            for _ in 0..cfg.steps {
                y += (p.a + p.b * plus) * h + p.c * plus.sqrt() * sq * normal(&mut rng);
                plus = y.max(0.0);
                acc.push(plus);
            }
        }
    }
    (acc.sum, rng)
}

/// One OU path: returns `∫₀ᵗ Y² ds` and the path's generator.
fn ou_path(p: &SteinSteinParams, t: f64, cfg: &McConfig, path: usize) -> (f64, ChaCha8Rng) {
    let mut rng = path_rng(cfg.seed, path);
    let h = t / cfg.steps as f64;
    let mut y = p.y0;
    let mut acc = Trapezoid::new(h, y * y);
    let (decay, sd) = match cfg.scheme {
        Scheme::ExactTransition => {
            let decay = (-p.q * h).exp();
            (decay, p.sigma * (-(-2.0 * p.q * h).exp_m1() / (2.0 * p.q)).sqrt())
        }
        Scheme::EulerFullTruncation => (1.0 - p.q * h, p.sigma * h.sqrt()),
    };
    let drift = p.m * (1.0 - decay);
    for _ in 0..cfg.steps {
        y = decay * y + drift + sd * normal(&mut rng);
        acc.push(y * y);
    }
    (acc.sum, rng)
}

fn integrated_variance_path(model: &Model, t: f64, cfg: &McConfig, path: usize) -> (f64, ChaCha8Rng) {
    match model {
        Model::Heston(p) => cir_path(p, t, cfg, path),
        Model::SteinStein(p) => ou_path(p, t, cfg, path),
    }
}

fn alpha_from(v: f64, t: f64) -> f64 {
    (v.max(0.0) / t).sqrt()
}

fn simulate_alpha(model: &Model, t: f64, cfg: &McConfig) -> Result<McSample> {
    model.validate()?;
    cfg.validate()?;
    check_t(t)?;
    let draws = run_paths(cfg.paths, |i| alpha_from(integrated_variance_path(model, t, cfg, i).0, t));
    Ok(McSample { draws, config: *cfg })
}

/// Draws of `α_t = ((1/t) ∫₀ᵗ Y_s² ds)^{1/2}` for the Stein–Stein volatility process.
pub fn simulate_ou_alpha(p: &SteinSteinParams, t: f64, cfg: &McConfig) -> Result<McSample> {
    simulate_alpha(&Model::SteinStein(*p), t, cfg)
}

/// Draws of `α_t = ((1/t) ∫₀ᵗ Y_s ds)^{1/2}` for the Heston variance process.
pub fn simulate_cir_alpha(p: &HestonParams, t: f64, cfg: &McConfig) -> Result<McSample> {
    simulate_alpha(&Model::Heston(*p), t, cfg)
}

/// Draws of `X_t`: given `α_t`, `log(X_t / (x0 e^{μt}))` is normal with mean `−tα²/2` and
/// variance `tα²`.
pub fn simulate_stock(model: &Model, t: f64, cfg: &McConfig) -> Result<McSample> {
    model.validate()?;
    cfg.validate()?;
    check_t(t)?;
    let fwd = model.x0() * (model.mu() * t).exp();
    let draws = run_paths(cfg.paths, |i| {
        let (v, mut rng) = integrated_variance_path(model, t, cfg, i);
        let v = v.max(0.0);
        fwd * (-0.5 * v + v.sqrt() * normal(&mut rng)).exp()
    });
    Ok(McSample { draws, config: *cfg })
}

/// Kolmogorov–Smirnov distance between the empirical law of `draws` and `cdf`.
///
/// Ties are handled exactly: at a repeated value the empirical CDF jumps once, and the left
/// limit of `cdf` is taken just below that value.
pub fn ks_distance_values<F: Fn(f64) -> f64>(draws: &[f64], cdf: F) -> Result<f64> {
    if draws.is_empty() {
        return Err(Error::invalid("KS distance needs at least one draw"));
    }
    if draws.iter().any(|x| x.is_nan()) {
        return Err(Error::invalid("KS distance: NaN draw"));
    }
    let mut xs = draws.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let v = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == v {
            j += 1;
        }
        let below = i as f64 / n;
        let above = j as f64 / n;
        d = d.max((cdf(v) - above).abs()).max((cdf(v.next_down()) - below).abs());
        i = j;
    }
    Ok(d)
}

pub fn ks_distance<F: Fn(f64) -> f64>(sample: &McSample, cdf: F) -> Result<f64> {
    ks_distance_values(&sample.draws, cdf)
}
