use std::f64::consts::PI;
use std::process::{Command, Output};
use std::time::Instant;

fn svoltails(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_svoltails")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

/// Data rows (header and comments removed), split on commas.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn named(text: &str, name: &str) -> f64 {
    rows(text).iter().find(|r| r[0] == name).unwrap_or_else(|| panic!("no row {name}"))[1].parse().unwrap()
}

#[test]
fn constants_heston_b0_quadratic_coefficient() {
    let o = svoltails(&["constants", "--model", "heston", "--b", "0", "--c", "1", "--t", "1", "--y0", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# svoltails "));
    assert!(text.lines().any(|l| l == "name,value"));
    assert!((named(&text, "C") - PI * PI / 2.0).abs() < 1e-14);
    for r in rows(&text) {
        r[1].parse::<f64>().unwrap();
    }
}

#[test]
fn constants_stein_m0_parts_vanish() {
    let o = svoltails(&["constants", "--model", "stein_stein", "--m", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for n in ["alpha3", "alpha4", "alpha5"] {
        assert_eq!(named(&text, n), 0.0, "{n}");
    }
    assert!(named(&text, "alpha2") > 0.0);
}

#[test]
fn invalid_input_exits_2() {
    let o = svoltails(&["constants", "--b", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("b must be <= 0"));
    assert_eq!(svoltails(&["density", "--grid-min", "1", "--grid-max", "2", "--grid-count", "1"]).status.code(), Some(2));
    assert_eq!(svoltails(&["density", "--grid-min", "3", "--grid-max", "2"]).status.code(), Some(2));
    assert_eq!(svoltails(&["smile", "--rate", "-0.1"]).status.code(), Some(2));
    assert_eq!(svoltails(&["smile", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(svoltails(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn density_ratio_trends_to_one_and_mass() {
    for kind in ["mixing", "stock"] {
        let o = svoltails(&["density", "--kind", kind]);
        assert_eq!(o.status.code(), Some(0), "{kind}");
        let text = stdout(&o);
        assert!(text.lines().any(|l| l == "x_or_y,exact,asymptotic,ratio"));
        let ratios: Vec<f64> = rows(&text).iter().map(|r| r[3].parse().unwrap()).collect();
        let (first, last) = (ratios[0], ratios[ratios.len() - 1]);
        assert!((last - 1.0).abs() < (first - 1.0).abs(), "{kind}: {first} {last}");
        let mass: f64 = text.lines().find_map(|l| l.strip_prefix("# total_mass=")).unwrap().parse().unwrap();
        assert!((mass - 1.0).abs() < 1e-3, "{kind}: {mass}");
    }
}

#[test]
fn density_file_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let o = svoltails(&["density", "--model", "stein_stein", "--grid-min", "0.5", "--grid-max", "3", "--grid-count", "11", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn smile_is_symmetric() {
    let o = svoltails(&["smile", "--grid-min", "-4", "--grid-max", "4", "--grid-count", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "k,implied_vol,asymptotic,flagged_tail"));
    let r = rows(&text);
    let iv: Vec<f64> = r.iter().map(|r| r[1].parse().unwrap()).collect();
    for i in 0..iv.len() / 2 {
        assert!((iv[i] - iv[iv.len() - 1 - i]).abs() < 1e-5);
    }
    // the wing expansion is reported only where it applies
    assert!(r[4][2].parse::<f64>().unwrap().is_nan());
    assert!(r[0][2].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn validate_reference_heston_passes() {
    let start = Instant::now();
    let o = svoltails(&["validate", "--model", "heston", "--paths", "100000"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}{}", String::from_utf8_lossy(&o.stderr));
    assert!(start.elapsed().as_secs() < 120);
    assert!(text.contains("# seed="));
    assert!(rows(&text).iter().all(|r| r[3] == "1"));
}

#[test]
fn validate_with_corrupted_constant_fails() {
    let o = svoltails(&["validate", "--paths", "20000", "--steps", "128", "--corrupt-c3", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("moment_inside"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# reference set\nmodel = heston\nb = 0\nc = 2\nt = 1\n").unwrap();
    let o = svoltails(&["constants", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!((named(&stdout(&o), "C") - PI * PI / 8.0).abs() < 1e-14);
    let o = svoltails(&["constants", "--config", cfg.to_str().unwrap(), "--c", "1"]);
    assert!((named(&stdout(&o), "C") - PI * PI / 2.0).abs() < 1e-14);
    std::fs::write(&cfg, "b -1\n").unwrap();
    assert_eq!(svoltails(&["constants", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}
