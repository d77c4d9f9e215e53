mod common;

use common::{derivative_at_zero, heston_ref, stein_ref};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svoltails::densities::{StockDensity, TabulatedCdf};
use svoltails::montecarlo::*;
use svoltails::quadrature::adaptive;
use svoltails::transforms::{cir_integrated_laplace, ou2_integrated_laplace};
use svoltails::{HestonParams, Model, SteinSteinParams};

fn exact(paths: usize, steps: usize, seed: u64) -> McConfig {
    McConfig::new(paths, steps, seed, Scheme::ExactTransition).unwrap()
}

#[test]
fn config_validation() {
    assert!(McConfig::new(0, 10, 1, Scheme::ExactTransition).is_err());
    assert!(McConfig::new(10, 1, 1, Scheme::ExactTransition).is_err());
    assert!(simulate_cir_alpha(&HestonParams { c: -1.0, ..heston_ref() }, 1.0, &exact(10, 10, 1)).is_err());
    assert!(simulate_ou_alpha(&stein_ref(), 0.0, &exact(10, 10, 1)).is_err());
}

#[test]
fn ou_deterministic_limit() {
    let p = SteinSteinParams::new(0.0, 1.5, 0.4, 1e-12, 0.4, 1.0).unwrap();
    let s = simulate_ou_alpha(&p, 2.0, &exact(1000, 64, 3)).unwrap();
    assert_eq!(s.draws.len(), 1000);
    assert!(s.draws.iter().all(|&a| (a - 0.4).abs() < 1e-9));
}

#[test]
fn ou_second_moment_matches_transform() {
    let p = stein_ref();
    let t = 1.0;
    let s = simulate_ou_alpha(&p, t, &exact(1_000_000, 64, 11)).unwrap();
    let mean = s.mean(|a| a * a);
    let se = s.standard_error(|a| a * a);
    let psi = |l: f64| ou2_integrated_laplace(&p, t, Complex64::new(l, 0.0)).unwrap().re;
    let want = -derivative_at_zero(psi, 1e-3) / t;
    assert!((mean - want).abs() < 3.0 * se, "{mean} {want} se {se}");
}

#[test]
fn seed_reproducibility_and_substreams() {
    let a = simulate_ou_alpha(&stein_ref(), 1.0, &exact(500, 16, 42)).unwrap();
    let b = simulate_ou_alpha(&stein_ref(), 1.0, &exact(500, 16, 42)).unwrap();
    assert_eq!(a.draws, b.draws);
    let c = simulate_ou_alpha(&stein_ref(), 1.0, &exact(500, 16, 43)).unwrap();
    assert_ne!(a.draws, c.draws);
    // one stream per path: a longer run extends a shorter one
    let long = simulate_cir_alpha(&heston_ref(), 1.0, &exact(300, 16, 9)).unwrap();
    let short = simulate_cir_alpha(&heston_ref(), 1.0, &exact(100, 16, 9)).unwrap();
    assert_eq!(&long.draws[..100], &short.draws[..]);
    let x1 = simulate_stock(&Model::Heston(heston_ref()), 1.0, &exact(200, 16, 5)).unwrap();
    let x2 = simulate_stock(&Model::Heston(heston_ref()), 1.0, &exact(200, 16, 5)).unwrap();
    assert_eq!(x1.draws, x2.draws);
}

#[test]
fn cir_deterministic_limit() {
    let p = HestonParams::new(0.0, 0.8, -1.3, 1e-10, 0.5, 1.0).unwrap();
    let t = 1.0;
    let s = simulate_cir_alpha(&p, t, &exact(20, 1024, 2)).unwrap();
    // Y' = a + bY
    let (a, b, y0) = (p.a, p.b, p.y0);
    let integral = -a * t / b + (y0 + a / b) * (b * t).exp_m1() / b;
    for &alpha in &s.draws {
        assert!((alpha * alpha * t / integral - 1.0).abs() < 1e-6, "{alpha}");
    }
}

#[test]
fn cir_laplace_matches_transform() {
    let p = heston_ref();
    let (t, lam) = (1.0, 2.0);
    let s = simulate_cir_alpha(&p, t, &exact(1_000_000, 128, 17)).unwrap();
    let f = |a: f64| (-lam * t * a * a).exp();
    let (mean, se) = (s.mean(f), s.standard_error(f));
    let want = cir_integrated_laplace(&p, t, Complex64::new(lam, 0.0)).unwrap().re;
    assert!((mean - want).abs() < 3.0 * se, "{mean} {want} se {se}");
}

#[test]
fn cir_ks_against_inverted_cdf() {
    let p = heston_ref();
    let s = simulate_cir_alpha(&p, 1.0, &exact(1_000_000, 1024, 23)).unwrap();
    assert!(s.draws.iter().all(|&a| a >= 0.0));
    let cdf = TabulatedCdf::new(&Model::Heston(p), 1.0, 0.2, 2.5, 4000).unwrap();
    let d = ks_distance(&s, |y| cdf.eval(y)).unwrap();
    assert!(d < 0.005, "KS {d}");
}

#[test]
fn schemes_agree() {
    let t = 1.0;
    let p = heston_ref();
    let e = simulate_cir_alpha(&p, t, &exact(20_000, 4096, 31)).unwrap();
    let u = simulate_cir_alpha(&p, t, &McConfig::new(20_000, 4096, 32, Scheme::EulerFullTruncation).unwrap()).unwrap();
    let sq = |a: f64| a * a;
    let se = (e.standard_error(sq).powi(2) + u.standard_error(sq).powi(2)).sqrt();
    assert!((e.mean(sq) - u.mean(sq)).abs() < 3.0 * se);
    let q = stein_ref();
    let e = simulate_ou_alpha(&q, t, &exact(20_000, 4096, 33)).unwrap();
    let u = simulate_ou_alpha(&q, t, &McConfig::new(20_000, 4096, 34, Scheme::EulerFullTruncation).unwrap()).unwrap();
    let se = (e.standard_error(sq).powi(2) + u.standard_error(sq).powi(2)).sqrt();
    assert!((e.mean(sq) - u.mean(sq)).abs() < 3.0 * se);
}

#[test]
fn stock_martingale() {
    for model in [Model::Heston(heston_ref()), Model::SteinStein(stein_ref())] {
        let s = simulate_stock(&model, 1.0, &exact(200_000, 32, 8)).unwrap();
        let (m, se) = (s.mean(|x| x), s.standard_error(|x| x));
        assert!((m - model.x0()).abs() < 3.0 * se, "{} {m} {se}", model.name());
    }
}

#[test]
fn stock_tail_probability_matches_density() {
    let model = Model::Heston(heston_ref());
    let x = 5.0f64;
    let s = simulate_stock(&model, 1.0, &exact(1_000_000, 64, 19)).unwrap();
    let fwd = model.x0();
    let ind = |v: f64| if v > fwd * x { 1.0 } else { 0.0 };
    let (p_mc, se) = (s.mean(ind), s.standard_error(ind));
    let d = StockDensity::new(&model, 1.0).unwrap();
    let (p, _) = adaptive(|l| d.log_moneyness_log_density(l).exp(), x.ln(), x.ln() + 60.0, 1e-16, 1e-12, 40).unwrap();
    assert!((p_mc - p).abs() < 3.0 * se, "{p_mc} {p} se {se}");
}

#[test]
fn ks_inverse_transform_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 100_000;
    let draws: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let d = ks_distance_values(&draws, |x| if x > 0.0 { -(-x).exp_m1() } else { 0.0 }).unwrap();
    assert!(d < 1.63 / (n as f64).sqrt(), "{d}");
}

#[test]
fn ks_degenerate_cases() {
    let point = |x: f64| if x >= 1.0 { 1.0 } else { 0.0 };
    assert_eq!(ks_distance_values(&[1.0, 1.0, 1.0], point).unwrap(), 0.0);
    assert!(ks_distance_values(&[], point).is_err());
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let u: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>()).collect();
    let d = ks_distance_values(&u, |x| x.clamp(0.0, 1.0).powi(2)).unwrap();
    assert!((d - 0.25).abs() < 0.01, "{d}");
}
