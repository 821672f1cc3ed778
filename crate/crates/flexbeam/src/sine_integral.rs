//! Sine integral Si(x) = int_0^x sin(t)/t dt.
//!
//! Maclaurin series for |x| <= 12 (cancellation still leaves ~13 digits
//! there), and the continued fraction of E1(i x) beyond, using
//! Si(x) = pi/2 + Im E1(i x) for x > 0. Target accuracy 1e-12 everywhere.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

const SERIES_LIMIT: f64 = 12.0;

pub fn sine_integral(x: f64) -> f64 {
    if x < 0.0 {
        return -sine_integral(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x <= SERIES_LIMIT {
        si_series(x)
    } else {
        FRAC_PI_2 + e1_imag_axis(x).im
    }
}

/// sum_{k>=0} (-1)^k x^(2k+1) / ((2k+1) (2k+1)!)
fn si_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut p = x; // (-1)^k x^(2k+1) / (2k+1)!, starting at k = 0
    let mut sum = x;
    for k in 1..200 {
        let two_k = 2.0 * k as f64;
        p *= -x2 / (two_k * (two_k + 1.0));
        let term = p / (two_k + 1.0);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-3) {
            break;
        }
    }
    sum
}

/// E1(i x) for x > 0 by the modified Lentz continued fraction
/// E1(z) = exp(-z) / (z + 1 - 1/(z + 3 - 4/(z + 5 - 9/(...)))).
fn e1_imag_axis(x: f64) -> Complex64 {
    let z = Complex64::new(0.0, x);
    let mut b = z + 1.0;
    let mut c = Complex64::new(1e290, 0.0);
    let mut d = 1.0 / guard(b);
    let mut f = d;
    for j in 1..400 {
        let a = -((j * j) as f64);
        b += 2.0;
        d = 1.0 / guard(b + a * d);
        c = guard(b + a / c);
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    (-z).exp() * f
}

fn guard(v: Complex64) -> Complex64 {
    if v.norm() < 1e-290 {
        Complex64::new(1e-290, 0.0)
    } else {
        v
    }
}
