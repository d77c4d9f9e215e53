//! Even entire functions of `z` written as functions of `x = z²`.
//!
//! With `ch(x) = cosh √x` and `sh1(x) = sinh √x / √x`:
//!
//! * `e1(x) = (ch − 1) / x`
//! * `e2(x) = (sh1 − ch) / x`
//! * `e3(x) = (2(ch − 1) − x sh1) / x²`
//!
//! None of them depends on the branch of `√x`. For large `|x|` all values are returned
//! multiplied by `e^{−Z}`, `Z = √x` on the principal branch, so that ratios and logarithms stay
//! representable.

use num_complex::Complex64;

const SERIES_RADIUS: f64 = 4.0;
const SERIES_TERMS: usize = 32;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Entire {
    /// Common scale: the true values equal the stored ones times `exp(log_scale)`.
    pub log_scale: Complex64,
    pub ch: Complex64,
    pub sh1: Complex64,
    pub e1: Complex64,
    pub e2: Complex64,
    pub e3: Complex64,
}

pub(crate) fn entire(x: Complex64) -> Entire {
    if x.norm() < SERIES_RADIUS {
        series(x)
    } else {
        closed(x)
    }
}

fn series(x: Complex64) -> Entire {
    // inv_fact[k] = 1/k!
    let mut inv_fact = [0.0f64; 2 * SERIES_TERMS + 4];
    inv_fact[0] = 1.0;
    for k in 1..inv_fact.len() {
        inv_fact[k] = inv_fact[k - 1] / k as f64;
    }
    let zero = Complex64::new(0.0, 0.0);
    let (mut ch, mut sh1, mut e1, mut e2, mut e3) = (zero, zero, zero, zero, zero);
    let mut pow = Complex64::new(1.0, 0.0);
    for n in 0..SERIES_TERMS {
        // pow = x^n
        ch += pow * inv_fact[2 * n];
        sh1 += pow * inv_fact[2 * n + 1];
        // e1, e2 use x^{n} as the coefficient of index n+1
        e1 += pow * inv_fact[2 * n + 2];
        e2 += pow * (inv_fact[2 * n + 3] - inv_fact[2 * n + 2]);
        // e3 uses x^{n} as the coefficient of index n+2
        let m = n + 2;
        e3 += pow * (2.0 * inv_fact[2 * m] - inv_fact[2 * m - 1]);
        pow *= x;
    }
    Entire { log_scale: zero, ch, sh1, e1, e2, e3 }
}

fn closed(x: Complex64) -> Entire {
    let z = x.sqrt();
    let eta = (-z).exp();
    let eps = eta * eta;
    let one = Complex64::new(1.0, 0.0);
    let ch = (one + eps) * 0.5;
    let sh1 = (one - eps) / (2.0 * z);
    let e1 = (ch - eta) / x;
    let e2 = (sh1 - ch) / x;
    let e3 = ((one + eps) - 2.0 * eta - x * sh1) / (x * x);
    Entire { log_scale: z, ch, sh1, e1, e2, e3 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unscale(e: &Entire) -> [Complex64; 5] {
        let s = e.log_scale.exp();
        [e.ch * s, e.sh1 * s, e.e1 * s, e.e2 * s, e.e3 * s]
    }

    fn direct(x: Complex64) -> [Complex64; 5] {
        let z = x.sqrt();
        let ch = z.cosh();
        let sh1 = z.sinh() / z;
        let two = Complex64::new(2.0, 0.0);
        [
            ch,
            sh1,
            (ch - 1.0) / x,
            (sh1 - ch) / x,
            (two * (ch - 1.0) - x * sh1) / (x * x),
        ]
    }

    #[test]
    fn series_and_closed_agree_on_overlap() {
        for &(re, im) in &[(3.9, 0.0), (-3.9, 0.1), (2.0, 3.0), (-1.0, -3.5), (4.5, 0.0), (-4.5, 0.5)] {
            let x = Complex64::new(re, im);
            let a = unscale(&series(x));
            let b = unscale(&closed(x));
            for k in 0..5 {
                assert!((a[k] - b[k]).norm() < 1e-12 * (1.0 + a[k].norm()), "k={k} x={x}");
            }
        }
    }

    #[test]
    fn matches_direct_evaluation() {
        for &(re, im) in &[(0.3, 0.0), (-2.0, 0.0), (10.0, 0.0), (-9.0, 0.0), (6.0, 8.0), (0.0, 20.0)] {
            let x = Complex64::new(re, im);
            let a = unscale(&entire(x));
            let b = direct(x);
            for k in 0..5 {
                assert!((a[k] - b[k]).norm() < 1e-10 * (1.0 + b[k].norm()), "k={k} x={x}");
            }
        }
    }

    #[test]
    fn values_at_origin() {
        let e = entire(Complex64::new(0.0, 0.0));
        assert_eq!(e.ch.re, 1.0);
        assert_eq!(e.sh1.re, 1.0);
        assert_eq!(e.e1.re, 0.5);
        assert!((e.e2.re - (1.0 / 6.0 - 0.5)).abs() < 1e-16);
        assert!((e.e3.re - (2.0 / 24.0 - 1.0 / 6.0)).abs() < 1e-16);
    }

    #[test]
    fn huge_argument_stays_finite() {
        let e = entire(Complex64::new(1e6, 1e6));
        for v in [e.ch, e.sh1, e.e1, e.e2, e.e3] {
            assert!(v.re.is_finite() && v.im.is_finite());
        }
        assert!((e.ch - 0.5).norm() < 1e-12);
    }
}
