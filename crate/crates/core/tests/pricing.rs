mod common;

use std::f64::consts::PI;

use common::{heston_b0, heston_ref, stein_ref};
use svoltails::asymptotics::{model_smile_eval, smile_coeffs, stock_constants};
use svoltails::densities::{call_price, StockDensity};
use svoltails::montecarlo::{simulate_stock, McConfig, Scheme};
use svoltails::pricing::*;
use svoltails::quadrature::adaptive;
use svoltails::{Error, Model};

fn spec(k: f64) -> OptionSpec {
    OptionSpec::new(100.0, k, 0.02, 1.5).unwrap()
}

#[test]
fn spec_validation() {
    assert!(OptionSpec::new(0.0, 1.0, 0.0, 1.0).is_err());
    assert!(OptionSpec::new(1.0, 1.0, -0.01, 1.0).is_err());
    assert!(OptionSpec::new(1.0, 1.0, 0.0, 0.0).is_err());
    assert!(bs_call(&spec(100.0), 0.0).is_err());
}

#[test]
fn bs_limits_and_band() {
    let s = spec(1e-10);
    assert!((bs_call(&s, 0.2).unwrap() / s.spot - 1.0).abs() < 1e-9);
    for k in [70.0, 100.0, 180.0] {
        let s = spec(k);
        let (lo, hi) = s.no_arbitrage_band();
        let mut last = 0.0;
        for vol in [0.1, 0.3, 0.8, 2.0] {
            let c = bs_call(&s, vol).unwrap();
            assert!(c > lo && c < hi && c > last);
            last = c;
        }
    }
}

#[test]
fn atm_forward_small_vol() {
    let s = OptionSpec::new(100.0, 100.0 * (0.02f64 * 1.5).exp(), 0.02, 1.5).unwrap();
    let vol = 0.01 / 1.5f64.sqrt();
    let approx = s.spot * vol * (s.expiry / (2.0 * PI)).sqrt();
    assert!((bs_call(&s, vol).unwrap() / approx - 1.0).abs() < 1e-3);
}

#[test]
fn put_call_parity() {
    for k in [60.0, 100.0, 150.0] {
        let s = spec(k);
        let vol = 0.35;
        let sq = s.expiry.sqrt();
        let d1 = ((s.spot / k).ln() + (s.rate + 0.5 * vol * vol) * s.expiry) / (vol * sq);
        let d2 = d1 - vol * sq;
        let df = (-s.rate * s.expiry).exp();
        let put = k * df * norm_cdf(-d2) - s.spot * norm_cdf(-d1);
        let call = bs_call(&s, vol).unwrap();
        assert!((call - put - (s.spot - k * df)).abs() < 1e-12 * s.spot);
    }
}

#[test]
fn vega_matches_difference() {
    let s = spec(120.0);
    let h = 1e-5;
    let fd = (bs_call(&s, 0.3 + h).unwrap() - bs_call(&s, 0.3 - h).unwrap()) / (2.0 * h);
    assert!((bs_vega(&s, 0.3).unwrap() / fd - 1.0).abs() < 1e-7);
}

#[test]
fn implied_vol_round_trip() {
    // deep in the money the time value drowns in the intrinsic value, so stay where vega is sizeable
    let cases = [60.0, 70.0, 100.0, 103.0, 160.0, 250.0].into_iter().flat_map(|k| [(k, 0.3), (k, 1.2)]);
    for (k, vol) in cases.chain([(95.0, 0.05), (110.0, 0.05)]) {
        {
            let s = spec(k);
            let price = bs_call(&s, vol).unwrap();
            let iv = implied_vol(&s, price).unwrap();
            assert!((iv - vol).abs() < 1e-10, "{k} {vol} {iv}");
            assert!((bs_call(&s, iv).unwrap() - price).abs() < 1e-12 * s.spot);
        }
    }
}

#[test]
fn implied_vol_rejects_out_of_band() {
    let s = spec(120.0);
    assert!(matches!(implied_vol(&s, -1e-16), Err(Error::Arbitrage { .. })));
    assert!(matches!(implied_vol(&s, s.spot), Err(Error::Arbitrage { .. })));
    let s = spec(80.0);
    let (lo, _) = s.no_arbitrage_band();
    assert!(matches!(implied_vol(&s, lo - 1e-16 * s.spot), Err(Error::Arbitrage { .. })));
}

#[test]
fn density_price_matches_monte_carlo() {
    let model = Model::Heston(heston_ref());
    let (t, r) = (1.0f64, 0.03f64);
    let k = model.x0() * (r * t).exp();
    let s = OptionSpec::new(model.x0(), k, r, t).unwrap();
    let price = call_price(&model, t, r, k).unwrap();
    let iv = implied_vol(&s, price).unwrap();
    let mc = simulate_stock(&model.with_mu(r), t, &McConfig::new(400_000, 64, 77, Scheme::ExactTransition).unwrap()).unwrap();
    let df = (-r * t).exp();
    let payoff = |x: f64| df * (x - k).max(0.0);
    let (mc_price, se) = (mc.mean(payoff), mc.standard_error(payoff));
    let mc_iv = implied_vol(&s, mc_price).unwrap();
    let vol_se = se / bs_vega(&s, iv).unwrap();
    assert!((iv - mc_iv).abs() < 3.0 * vol_se, "{iv} {mc_iv} se {vol_se}");
}

#[test]
fn smile_symmetry_and_wing_approach() {
    let model = Model::Heston(heston_ref());
    let ks = [-5.0, -2.0, -1.5, -0.5, 0.5, 1.5, 2.0, 5.0];
    let sm = model_smile(&model, 1.0, 0.0, &ks).unwrap();
    for i in 0..ks.len() / 2 {
        let (a, b) = (sm[i], sm[ks.len() - 1 - i]);
        assert_eq!(a.log_strike, -b.log_strike);
        assert!((a.implied_vol - b.implied_vol).abs() < 1e-5, "{a:?} {b:?}");
    }
    let sc = smile_coeffs(&stock_constants(&model, 1.0).unwrap(), 1.0).unwrap();
    let gap = |p: &SmilePoint| (p.implied_vol / p.log_strike.sqrt() - sc.b1).abs();
    assert!(gap(&sm[7]) < gap(&sm[6]));
    let d = |p: &SmilePoint| (p.implied_vol - model_smile_eval(&model, &sc, p.log_strike).unwrap()).abs();
    assert!(d(&sm[7]) < d(&sm[6]));
}

#[test]
fn symmetry_with_rate() {
    let model = Model::SteinStein(stein_ref());
    let sm = model_smile(&model, 0.5, 0.04, &[-1.5, 1.5]).unwrap();
    assert!((sm[0].implied_vol - sm[1].implied_vol).abs() < 1e-5);
}

#[test]
fn lognormal_density_gives_flat_smile() {
    let (v, t) = (0.27f64, 1.3f64);
    let w = v * t.sqrt();
    // log-moneyness density N(−w²/2, w²)
    let dens = |l: f64| {
        let z = (l + 0.5 * w * w) / w;
        (-0.5 * z * z).exp() / (w * (2.0 * PI).sqrt())
    };
    let log_otm = |k: f64| -> svoltails::Result<f64> {
        let (val, _) = if k >= 0.0 {
            adaptive(|l| (l.exp() - k.exp()) * dens(l), k, k + 12.0 * w + 1.0, 1e-300, 1e-14, 50)?
        } else {
            adaptive(|l| (k.exp() - l.exp()) * dens(l), k - 12.0 * w - 1.0, k, 1e-300, 1e-14, 50)?
        };
        Ok(val.ln())
    };
    let ks: Vec<f64> = (-8..=8).map(|i| 0.25 * i as f64).collect();
    for p in smile_from_log_prices(t, &ks, log_otm).unwrap() {
        assert!((p.implied_vol - v).abs() < 1e-8, "{p:?}");
        assert!(!p.flagged_tail);
    }
}

#[test]
fn no_butterfly_arbitrage() {
    let model = Model::Heston(heston_b0());
    let sd = StockDensity::new(&model, 1.0).unwrap();
    let strikes: Vec<f64> = (1..=80).map(|i| 0.05 * i as f64).collect();
    let c: Vec<f64> = strikes.iter().map(|&k| sd.undiscounted_call(k).unwrap()).collect();
    for i in 1..c.len() - 1 {
        assert!(c[i - 1] - 2.0 * c[i] + c[i + 1] >= -1e-8 * model.x0());
    }
}

#[test]
fn lee_bound_on_grid() {
    for model in [Model::Heston(heston_ref()), Model::SteinStein(stein_ref())] {
        let t = 0.8;
        let ks = [4.5, 6.0, 10.0, 20.0];
        for p in model_smile(&model, t, 0.0, &ks).unwrap() {
            assert!(t * p.implied_vol.powi(2) / p.log_strike <= 2.0);
        }
    }
}

#[test]
fn deep_wing_points_are_flagged_not_lost() {
    let model = Model::SteinStein(stein_ref());
    let sm = model_smile(&model, 1.0, 0.0, &[60.0, 100.0, -100.0]).unwrap();
    assert!(!sm[0].flagged_tail && sm[1].flagged_tail && sm[2].flagged_tail);
    assert!((sm[1].implied_vol - sm[2].implied_vol).abs() < 1e-5);
    assert!(sm[1].implied_vol > sm[0].implied_vol);
}
