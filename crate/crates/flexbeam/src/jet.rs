//! Truncated power-series (Taylor jet) arithmetic.
//!
//! A jet stores the Taylor coefficients c[k] = f^(k)(x0)/k! of a function at
//! a point. Composing the recurrences below on the closed form of an
//! integrand yields exact high-order derivatives without finite differences.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Jet {
    /// Taylor coefficients, c[k] = f^(k)/k!; len = order + 1.
    pub c: Vec<f64>,
}

impl Jet {
    /// Jet of the identity-like affine function v0 + v1 (x - x0).
    pub fn affine(v0: f64, v1: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v0;
        if order >= 1 {
            c[1] = v1;
        }
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    fn check(self) -> Result<Self> {
        for (k, v) in self.c.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::JetOverflow { order: k });
            }
        }
        Ok(self)
    }

    /// Product of two jets (Cauchy convolution, truncated).
    pub fn mul(&self, rhs: &Jet) -> Result<Jet> {
        let order = self.order().min(rhs.order());
        let mut c = vec![0.0; order + 1];
        for k in 0..=order {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += self.c[j] * rhs.c[k - j];
            }
            c[k] = acc;
        }
        Jet { c }.check()
    }

    /// Real power u^a for u with strictly positive value part.
    pub fn powf(&self, a: f64) -> Result<Jet> {
        let u0 = self.c[0];
        assert!(u0 > 0.0, "powf needs a positive leading coefficient");
        let order = self.order();
        let mut c = vec![0.0; order + 1];
        c[0] = u0.powf(a);
        for k in 1..=order {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += ((a + 1.0) * j as f64 - k as f64) * self.c[j] * c[k - j];
            }
            c[k] = acc / (k as f64 * u0);
        }
        Jet { c }.check()
    }

    /// exp(u).
    pub fn exp(&self) -> Result<Jet> {
        let order = self.order();
        let mut c = vec![0.0; order + 1];
        c[0] = self.c[0].exp();
        for k in 1..=order {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * c[k - j];
            }
            c[k] = acc / k as f64;
        }
        Jet { c }.check()
    }

    pub fn neg(&self) -> Jet {
        Jet { c: self.c.iter().map(|v| -v).collect() }
    }

    /// k-th derivative value f^(k), i.e. c[k] * k!.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.c[k] * fact
    }
}
