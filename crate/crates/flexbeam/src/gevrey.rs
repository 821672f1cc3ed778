//! Gevrey-class transition profile and its high-order derivative jets.
//!
//! The profile ramps from 0 to 1 over [0, T]:
//!
//! ```text
//! phi(t) = int_0^(t/T) theta(s) ds / int_0^1 theta(s) ds,
//! theta(s) = exp(-(s(1-s))^(-eps)),
//! ```
//!
//! clamped to 0 / 1 outside (0, T). All derivatives vanish at both ends,
//! which is what makes the profile usable as a flat output for rest-to-rest
//! transitions: phi is Gevrey of order sigma = 1 + 1/eps, i.e. its k-th
//! derivatives grow no faster than M (k!)^sigma / K^k.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::LuFactor;
use crate::quad::adaptive_simpson;

/// Bump integrand theta(s) = exp(-(s(1-s))^(-eps)); zero outside (0, 1).
pub fn bump_integrand(s: f64, epsilon: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        return 0.0;
    }
    (-(s * (1.0 - s)).powf(-epsilon)).exp()
}

/// Derivative jet of the profile at one time: values[k] = phi^(k)(t).
#[derive(Debug, Clone)]
pub struct DerivativeJet {
    pub t: f64,
    pub values: Vec<f64>,
}

/// Fitted derivative-growth envelope |phi^(k+1)| <= M (k!)^sigma / K^k.
#[derive(Debug, Clone, Copy)]
pub struct GevreyBounds {
    pub m: f64,
    pub k_radius: f64,
}

#[derive(Debug, Clone)]
pub struct GevreyProfile {
    epsilon: f64,
    sigma: f64,
    duration: f64,
    jet_order: usize,
    normalizer: f64,
}

impl GevreyProfile {
    /// Build a profile with shape parameter `epsilon`, transition duration
    /// `duration`, and derivatives available up to `jet_order`.
    pub fn new(epsilon: f64, duration: f64, jet_order: usize) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
        }
        if !duration.is_finite() || duration <= 0.0 {
            return Err(Error::Domain(format!("duration must be positive, got {duration}")));
        }
        if jet_order < 2 {
            return Err(Error::Domain(format!("jet order must be >= 2, got {jet_order}")));
        }
        let normalizer = adaptive_simpson(|s| bump_integrand(s, epsilon), 0.0, 1.0, 1e-13, 1e-18);
        if !normalizer.is_finite() || normalizer <= 0.0 {
            return Err(Error::Domain(format!(
                "bump integral vanished for epsilon = {epsilon}; profile is degenerate"
            )));
        }
        Ok(Self { epsilon, sigma: 1.0 + 1.0 / epsilon, duration, jet_order, normalizer })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Gevrey order sigma = 1 + 1/epsilon.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn jet_order(&self) -> usize {
        self.jet_order
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// phi(t), clamped to {0, 1} outside (0, T).
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= self.duration {
            return 1.0;
        }
        let s = t / self.duration;
        // Integrating the shorter tail keeps the quadrature cheap and the
        // symmetry identity phi(t) + phi(T - t) = 1 sharp.
        if s <= 0.5 {
            adaptive_simpson(|u| bump_integrand(u, self.epsilon), 0.0, s, 1e-13, 1e-18)
                / self.normalizer
        } else {
            1.0 - adaptive_simpson(|u| bump_integrand(u, self.epsilon), s, 1.0, 1e-13, 1e-18)
                / self.normalizer
        }
    }

    /// Jet of theta at s0 in (0, 1), to the profile's order minus one.
    fn theta_jet(&self, s0: f64) -> Result<Option<Jet>> {
        let u = Jet::affine(s0, 1.0, self.jet_order - 1)
            .mul(&Jet::affine(1.0 - s0, -1.0, self.jet_order - 1))?;
        let v = u.powf(-self.epsilon)?;
        if v.c[0] > 745.0 {
            // exp(-v) underflows: the whole jet is zero at double precision.
            return Ok(None);
        }
        Ok(Some(v.neg().exp()?))
    }

    /// All derivatives [phi, phi', ..., phi^(jet_order)] at `t`.
    ///
    /// Outside (0, T) every derivative is exactly zero. Inside,
    /// phi^(k)(t) = theta^(k-1)(t/T) / (normalizer * T^k) with the theta
    /// derivatives obtained by jet arithmetic on the closed form.
    pub fn derivative_jet(&self, t: f64) -> Result<DerivativeJet> {
        let mut values = vec![0.0; self.jet_order + 1];
        if t <= 0.0 {
            return Ok(DerivativeJet { t, values });
        }
        if t >= self.duration {
            values[0] = 1.0;
            return Ok(DerivativeJet { t, values });
        }
        values[0] = self.eval(t);
        let s0 = t / self.duration;
        if let Some(theta) = self.theta_jet(s0)? {
            let mut t_pow = self.duration; // T^k
            let mut fact = 1.0; // (k-1)!
            for k in 1..=self.jet_order {
                if k >= 2 {
                    fact *= (k - 1) as f64;
                }
                // theta^(k-1)(s0) = c[k-1] * (k-1)!
                values[k] = theta.c[k - 1] * fact / (self.normalizer * t_pow);
                if !values[k].is_finite() {
                    return Err(Error::JetOverflow { order: k });
                }
                t_pow *= self.duration;
            }
        }
        Ok(DerivativeJet { t, values })
    }

    fn derivative_sups(&self, orders: usize, grid: usize) -> Result<Vec<f64>> {
        let mut sups = vec![0.0f64; orders];
        let saved;
        let profile = if self.jet_order >= orders {
            self
        } else {
            saved = GevreyProfile::new(self.epsilon, self.duration, orders)?;
            &saved
        };
        for i in 0..=grid {
            let t = self.duration * i as f64 / grid as f64;
            let jet = profile.derivative_jet(t)?;
            for (k, sup) in sups.iter_mut().enumerate() {
                *sup = sup.max(jet.values[k + 1].abs());
            }
        }
        Ok(sups)
    }

    /// Fit the envelope |phi^(k+1)|_inf <= M (k!)^sigma / K^k over
    /// k = 0..orders by least squares in log space, then raise M so every
    /// sampled order satisfies the bound. Sampling uses a uniform
    /// 4001-point grid on [0, T].
    pub fn estimate_gevrey_bounds(&self, orders: usize) -> Result<GevreyBounds> {
        if orders < 4 {
            return Err(Error::Domain(format!("bound fit needs >= 4 orders, got {orders}")));
        }
        let sups = self.derivative_sups(orders, 4000)?;
        let mut points = Vec::new();
        for (k, &sup) in sups.iter().enumerate() {
            if sup > 0.0 {
                points.push((k as f64, sup.ln() - self.sigma * ln_factorial(k)));
            }
        }
        if points.len() < 2 {
            return Err(Error::DegenerateFit("all sampled derivatives are zero".into()));
        }
        // d_k = ln M - k ln K
        let n = points.len() as f64;
        let sx: f64 = points.iter().map(|p| p.0).sum();
        let sy: f64 = points.iter().map(|p| p.1).sum();
        let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let ln_k = -slope;
        let ln_m = points.iter().map(|p| p.1 + p.0 * ln_k).fold(f64::NEG_INFINITY, f64::max);
        Ok(GevreyBounds { m: ln_m.exp(), k_radius: ln_k.exp() })
    }

    /// Re-fit the growth law with sigma free:
    /// ln sup|phi^(k+1)| ~ ln M + sigma ln(k!) - k ln K; returns the fitted
    /// sigma. A diagnostic, not a bound.
    pub fn estimate_gevrey_order(&self, orders: usize) -> Result<f64> {
        if orders < 4 {
            return Err(Error::Domain(format!("order fit needs >= 4 orders, got {orders}")));
        }
        let sups = self.derivative_sups(orders, 4000)?;
        // Normal equations for theta = (ln M, sigma, -ln K) against
        // regressors (1, ln k!, k). k = 0, 1 carry ln k! = 0; keep them, the
        // system stays well-posed for orders >= 4.
        let mut ata = [0.0f64; 9];
        let mut atb = [0.0f64; 3];
        let mut rows = 0;
        for (k, &sup) in sups.iter().enumerate() {
            if sup <= 0.0 {
                continue;
            }
            rows += 1;
            let r = [1.0, ln_factorial(k), k as f64];
            let y = sup.ln();
            for i in 0..3 {
                for j in 0..3 {
                    ata[i * 3 + j] += r[i] * r[j];
                }
                atb[i] += r[i] * y;
            }
        }
        if rows < 3 {
            return Err(Error::DegenerateFit("all sampled derivatives are zero".into()));
        }
        let lu = LuFactor::new(&ata, 3).map_err(|_| {
            Error::DegenerateFit("normal equations for the order fit are singular".into())
        })?;
        Ok(lu.solve(&atb)[1])
    }
}

pub(crate) fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}
