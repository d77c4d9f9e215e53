use std::fmt::Write as _;

use super::{fmt, DensityKind, Grid, RunConfig, Spacing};
use crate::asymptotics::{
    mixing_constants, model_smile_eval, moment_window, smile_coeffs, stock_constants, stock_tail_log_eval,
    MixingConstants,
};
use crate::densities::{log_mixing_density, StockDensity, TabulatedCdf};
use crate::error::{Error, Result};
use crate::montecarlo::{ks_distance, simulate_cir_alpha, simulate_ou_alpha};
use crate::pricing::model_smile;
use crate::transforms::Model;

const KS_TABLE_POINTS: usize = 4000;
/// Truncations of the moment integral in log moneyness; see the moment-window probe.
const MOMENT_WIDTHS: [f64; 4] = [100.0, 200.0, 400.0, 800.0];
const MOMENT_OFFSET: f64 = 0.3;
/// Default extent of the stock density's mixing table, in units of log m_t.
const TABLE_SPAN: f64 = 1200.0;

fn row(s: &mut String, name: &str, v: f64) {
    let _ = writeln!(s, "{name},{}", fmt(v));
}

pub(super) fn constants(cfg: &RunConfig) -> Result<String> {
    let mut s = String::from("name,value\n");
    match mixing_constants(&cfg.model, cfg.t)? {
        MixingConstants::Heston(h) => {
            for (n, v) in [
                ("t", h.t),
                ("s", h.s),
                ("r_s", h.r),
                ("u", h.u_bt),
                ("lambda0", h.lambda0),
                ("eta1", h.eta1),
                ("eta2", h.eta2),
                ("rho1", h.rho1),
                ("rho2", h.rho2),
                ("alpha", h.alpha),
                ("F_tilde0", h.f_tilde0),
                ("A", h.tail_a),
                ("log_A", h.log_tail_a),
                ("B", h.tail_b),
                ("C", h.tail_c),
                ("a_over_c2", h.power_shift),
            ] {
                row(&mut s, n, v);
            }
        }
        MixingConstants::SteinStein(g) => {
            for (n, v) in [
                ("t", g.t),
                ("s", g.s),
                ("r_s", g.r),
                ("v", g.v_qt),
                ("lambda1", g.lambda1),
                ("zeta1", g.zeta1),
                ("zeta2", g.zeta2),
                ("tau1", g.tau1),
                ("tau2", g.tau2),
            ] {
                row(&mut s, n, v);
            }
            for (j, v) in g.alpha_parts.iter().enumerate() {
                row(&mut s, &format!("alpha{}", j + 2), *v);
            }
            for (j, v) in g.f_tilde_parts.iter().enumerate() {
                row(&mut s, &format!("F_tilde{}", j + 2), *v);
            }
            for (n, v) in [
                ("alpha", g.alpha),
                ("F_tilde0", g.f_tilde0),
                ("E", g.tail_e),
                ("log_E", g.log_tail_e),
                ("F", g.tail_f),
                ("G", g.tail_g),
            ] {
                row(&mut s, n, v);
            }
        }
    }
    let st = stock_constants(&cfg.model, cfg.t)?;
    for (n, v) in [
        ("c1", st.c1),
        ("log_c1", st.log_c1),
        ("c2", st.c2),
        ("c3", st.c3),
        ("k", st.k),
        ("l", st.l),
        ("power_shift", st.power_shift),
        ("log_power", st.log_power),
    ] {
        row(&mut s, n, v);
    }
    let (lo, hi) = moment_window(&cfg.model, cfg.t)?;
    row(&mut s, "moment_lo", lo);
    row(&mut s, "moment_hi", hi);
    let sc = smile_coeffs(&st, cfg.t)?;
    row(&mut s, "beta1", sc.b1);
    row(&mut s, "beta2", sc.b2);
    row(&mut s, "beta3", sc.b3);
    Ok(s)
}

fn ratio(exact: f64, asym: f64) -> f64 {
    (exact - asym).exp()
}

pub(super) fn density(cfg: &RunConfig) -> Result<String> {
    let mut s = String::from("x_or_y,exact,asymptotic,ratio\n");
    match cfg.kind {
        DensityKind::Mixing => {
            let grid = cfg.grid.unwrap_or(Grid { min: 2.0, max: 10.0, count: 17, spacing: Spacing::Linear });
            if !(grid.min > 0.0) {
                return Err(Error::invalid("mixing density grid needs min > 0"));
            }
            let tail = mixing_constants(&cfg.model, cfg.t)?.tail();
            for y in grid.points() {
                let (e, a) = (log_mixing_density(&cfg.model, cfg.t, y)?, tail.log_eval(y));
                let _ = writeln!(s, "{},{},{},{}", fmt(y), fmt(e.exp()), fmt(a.exp()), fmt(ratio(e, a)));
            }
            let sd = StockDensity::new(&cfg.model, cfg.t)?;
            let _ = writeln!(s, "# total_mass={}", fmt(sd.mixing_mass()));
        }
        DensityKind::Stock => {
            let e8 = 8f64.exp();
            let grid = cfg.grid.unwrap_or(Grid { min: 2f64.exp(), max: e8, count: 13, spacing: Spacing::Log });
            if !(grid.min > 1.0) {
                return Err(Error::invalid("stock density grid needs min > 1 (the tail expansion is for x → ∞)"));
            }
            let sd = StockDensity::new(&cfg.model, cfg.t)?;
            let st = stock_constants(&cfg.model, cfg.t)?;
            for x in grid.points() {
                let (e, a) = (sd.log_density_ratio(x), stock_tail_log_eval(&st, x)?);
                let _ = writeln!(s, "{},{},{},{}", fmt(x), fmt(e.exp()), fmt(a.exp()), fmt(ratio(e, a)));
            }
            let _ = writeln!(s, "# total_mass={}", fmt(sd.total_mass()?));
        }
    }
    Ok(s)
}

pub(super) fn smile(cfg: &RunConfig) -> Result<String> {
    let grid = cfg.grid.unwrap_or(Grid { min: -5.0, max: 5.0, count: 21, spacing: Spacing::Linear });
    let ks = grid.points();
    let st = stock_constants(&cfg.model.with_mu(cfg.rate), cfg.t)?;
    let sc = smile_coeffs(&st, cfg.t)?;
    let mut s = String::from("k,implied_vol,asymptotic,flagged_tail\n");
    for p in model_smile(&cfg.model, cfg.t, cfg.rate, &ks)? {
        // the expansion is for |k| → ∞ and the smile is even in k
        let asym = if p.log_strike.abs() > 1.0 { model_smile_eval(&cfg.model, &sc, p.log_strike.abs())? } else { f64::NAN };
        let _ = writeln!(s, "{},{},{},{}", fmt(p.log_strike), fmt(p.implied_vol), fmt(asym), u8::from(p.flagged_tail));
    }
    Ok(s)
}

struct Check {
    name: &'static str,
    statistic: f64,
    threshold: f64,
    pass: bool,
}

fn ks_check(cfg: &RunConfig) -> Result<Check> {
    let sample = match &cfg.model {
        Model::Heston(p) => simulate_cir_alpha(p, cfg.t, &cfg.mc)?,
        Model::SteinStein(p) => simulate_ou_alpha(p, cfg.t, &cfg.mc)?,
    };
    let lo = sample.draws.iter().copied().filter(|&a| a > 0.0).fold(f64::INFINITY, f64::min);
    let hi = sample.draws.iter().copied().fold(0.0, f64::max);
    if !(lo < hi) {
        return Err(Error::numerical("degenerate Monte Carlo sample"));
    }
    let cdf = TabulatedCdf::new(&cfg.model, cfg.t, lo, hi, KS_TABLE_POINTS)?;
    let d = ks_distance(&sample, |y| cdf.eval(y))?;
    Ok(Check { name: "ks_mixing", statistic: d, threshold: cfg.ks_threshold, pass: d < cfg.ks_threshold })
}

/// Moments just inside the upper end of the window settle as the truncation widens; just
/// outside they keep growing.
fn moment_checks(cfg: &RunConfig) -> Result<[Check; 2]> {
    let (_, hi) = moment_window(&cfg.model, cfg.t)?;
    let hi = hi + cfg.corrupt_c3;
    // the density at log-moneyness l is carried by y² ≈ l/√(2t(K + t/8)), where log m_t ≈ −Ky²
    let (t, k) = (cfg.t, mixing_constants(&cfg.model, cfg.t)?.tail().quadratic);
    let l_max = MOMENT_WIDTHS[MOMENT_WIDTHS.len() - 1];
    let span = (1.25 * k * l_max / (2.0 * t * (k + t / 8.0)).sqrt()).max(TABLE_SPAN);
    let sd = StockDensity::with_upper_span(&cfg.model, t, span)?;
    // an overflowing partial moment is as divergent as it gets
    let partial = |p: f64| -> Result<Vec<f64>> {
        MOMENT_WIDTHS
            .iter()
            .map(|&w| match sd.truncated_moment(p, w) {
                Ok(v) if v.is_finite() => Ok(v),
                Ok(_) | Err(Error::Numerical(_)) => Ok(f64::INFINITY),
                Err(e) => Err(e),
            })
            .collect()
    };
    let v = partial(hi - MOMENT_OFFSET)?;
    let settle = if v[3].is_finite() { (v[3] - v[2]) / v[3] } else { f64::INFINITY };
    let inside = Check { name: "moment_inside", statistic: settle, threshold: 1e-9, pass: settle < 1e-9 };
    let v = partial(hi + MOMENT_OFFSET)?;
    let growth = if v[2].is_finite() { v[3] / v[2] } else { f64::INFINITY };
    let outside = Check { name: "moment_outside", statistic: growth, threshold: 2.0, pass: growth > 2.0 };
    Ok([inside, outside])
}

/// Runs every check; returns the report and the first failing check, if any.
pub(super) fn validate(cfg: &RunConfig) -> Result<(String, Option<String>)> {
    let sd = StockDensity::new(&cfg.model, cfg.t)?;
    let mass = sd.total_mass()?;
    let martingale = sd.truncated_moment(1.0, MOMENT_WIDTHS[0])?;
    let tol = cfg.mass_tolerance;
    let mut checks = vec![
        Check { name: "total_mass", statistic: (mass - 1.0).abs(), threshold: tol, pass: (mass - 1.0).abs() < tol },
        Check {
            name: "martingale",
            statistic: (martingale - 1.0).abs(),
            threshold: tol,
            pass: (martingale - 1.0).abs() < tol,
        },
        ks_check(cfg)?,
    ];
    checks.extend(moment_checks(cfg)?);
    let mut s = String::from("check,statistic,threshold,pass\n");
    for c in &checks {
        let _ = writeln!(s, "{},{},{},{}", c.name, fmt(c.statistic), fmt(c.threshold), u8::from(c.pass));
    }
    Ok((s, checks.iter().find(|c| !c.pass).map(|c| c.name.to_string())))
}
