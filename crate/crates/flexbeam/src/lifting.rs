//! Sinc regularisation of the point loads and the lifted kernels.
//!
//! A Dirac load at x_j is approximated by the unit-mass blob
//! phi_m(x - x_j) = sin(m (x - x_j)) / (pi (x - x_j)). The lifted kernel
//!
//! ```text
//! H_m(x) = x^3/6 - x/2 + I_m(x),
//! I_m(x) = int_0^x int_1^z int_0^y int_1^t phi_m(s - x_j) ds dt dy dz,
//! ```
//!
//! satisfies H'''' = phi_m with H(0) = H'(1) = H''(0) = 0, H'''(1) = 1, and
//! the regularised steady deflection is psi_m(x) = y_bar I_m(x).
//!
//! Two evaluation routes for I_m are kept:
//!
//! * power series in m (term-wise integration of the sinc Taylor series),
//!   convergent for any fixed m but numerically explosive once
//!   m * distance grows;
//! * sine-integral route: I''' = (Si(m(x-x_j)) - Si(m(1-x_j)))/pi, pushed
//!   through the three remaining integrals in closed form, stable for
//!   large m.
//!
//! They cross-validate each other near the switch point.

use crate::error::{Error, Result};
use crate::green::green_deriv_x;
use crate::green::green_eval_unchecked;
use crate::quad::adaptive_simpson;
use crate::sine_integral::sine_integral;
use std::f64::consts::PI;

/// Unit-mass sinc regularisation of a Dirac load.
#[derive(Debug, Clone, Copy)]
pub struct Blob {
    pub m: f64,
    pub center: f64,
}

impl Blob {
    pub fn new(m: f64, center: f64) -> Result<Self> {
        if !m.is_finite() || m <= 0.0 {
            return Err(Error::Domain(format!("blob parameter m must be positive, got {m}")));
        }
        if center.is_nan() || center <= 0.0 || center > 1.0 {
            return Err(Error::Domain(format!("blob center {center} outside (0, 1]")));
        }
        Ok(Self { m, center })
    }

    /// phi_m(x - center), with the removable singularity filled in.
    pub fn eval(&self, x: f64) -> f64 {
        let u = x - self.center;
        let z = self.m * u;
        if z.abs() < 1e-4 {
            // sin(z)/z = 1 - z^2/6 + z^4/120 - ...
            self.m / PI * (1.0 - z * z / 6.0)
        } else {
            z.sin() / (PI * u)
        }
    }

    /// Mass over [lo, hi] by adaptive quadrature (the full-line mass is 1).
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        adaptive_simpson(|x| self.eval(x), lo, hi, 1e-12, 1e-14)
    }
}

/// Evaluation route for the nested-integral kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMode {
    PowerSeries,
    Quadrature,
}

/// m * distance threshold above which the power series is abandoned for the
/// sine-integral route (alternating terms reach ~e^(m d) before decaying).
pub const SERIES_SWITCH: f64 = 30.0;

#[derive(Debug, Clone)]
pub struct LiftKernel {
    blob: Blob,
    series_cutoff: usize,
    forced_mode: Option<KernelMode>,
}

impl LiftKernel {
    pub fn new(blob: Blob) -> Self {
        Self { blob, series_cutoff: 600, forced_mode: None }
    }

    pub fn with_mode(blob: Blob, mode: KernelMode) -> Self {
        Self { blob, series_cutoff: 600, forced_mode: Some(mode) }
    }

    pub fn blob(&self) -> &Blob {
        &self.blob
    }

    /// The route actually used for this kernel's geometry.
    pub fn mode(&self) -> KernelMode {
        self.forced_mode.unwrap_or({
            let d = self.blob.center.max(1.0 - self.blob.center);
            if self.blob.m * d > SERIES_SWITCH {
                KernelMode::Quadrature
            } else {
                KernelMode::PowerSeries
            }
        })
    }

    /// I_m(x), the four-fold integral of the blob.
    pub fn eval_i(&self, x: f64) -> Result<f64> {
        self.eval_i_deriv(x, 0)
    }

    /// d^r/dx^r I_m(x) for r = 0..=3.
    pub fn eval_i_deriv(&self, x: f64, r: u32) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("x = {x} outside [0, 1]")));
        }
        assert!(r <= 3, "kernel derivatives available up to order 3");
        match self.mode() {
            KernelMode::PowerSeries => self.series_i(x, r),
            KernelMode::Quadrature => Ok(self.sine_integral_i(x, r)),
        }
    }

    /// H_m(x) = x^3/6 - x/2 + I_m(x).
    pub fn eval_h(&self, x: f64) -> Result<f64> {
        Ok(x * x * x / 6.0 - 0.5 * x + self.eval_i(x)?)
    }

    pub fn eval_h_deriv(&self, x: f64, r: u32) -> Result<f64> {
        let poly = match r {
            0 => x * x * x / 6.0 - 0.5 * x,
            1 => 0.5 * x * x - 0.5,
            2 => x,
            3 => 1.0,
            _ => 0.0,
        };
        Ok(poly + self.eval_i_deriv(x, r)?)
    }

    /// Regularised steady deflection psi_m(x) = y_bar I_m(x).
    pub fn psi_steady(&self, y_bar: f64, x: f64) -> Result<f64> {
        Ok(y_bar * self.eval_i(x)?)
    }

    /// Power series in m. Writing a = x_j, the term-wise integration of the
    /// sinc Taylor series gives, for k = 1, 2, ...
    ///
    /// pref_k = (-1)^(k+1) m^(2k-1) / (2k-1),
    /// term_k = pref_k [ (x-a)^(2k+2)/(2k+2)! - (1-a)^(2k-1) x^3 / (6 (2k-1)!)
    ///        - a^(2k) x^2 / (2 (2k)!) - (1-a)^(2k+1) x / (2k+1)!
    ///        + a^(2k) x / (2k)! + (1-a)^(2k-1) x / (2 (2k-1)!)
    ///        - a^(2k+2)/(2k+2)! ] / pi,
    ///
    /// differentiated r times in x before summing. Every factor
    /// m^(2k-1) z^p / p! is carried multiplicatively so the intermediates
    /// stay bounded by ~e^(m d).
    fn series_i(&self, x: f64, r: u32) -> Result<f64> {
        let m = self.blob.m;
        let mut sum = 0.0f64;
        let mut prev_term = f64::INFINITY;
        let mut terms = SeriesTerms::new(&self.blob, x, r);
        for k in 1..=self.series_cutoff {
            let term = terms.next_term(k);
            sum += term;
            if !sum.is_finite() {
                return Err(Error::SeriesNoConvergence { m, terms: k });
            }
            let t_abs = term.abs();
            if t_abs <= 1e-16 * sum.abs().max(1e-300) && t_abs < prev_term {
                return Ok(sum);
            }
            prev_term = t_abs;
        }
        Err(Error::SeriesNoConvergence { m, terms: self.series_cutoff })
    }

    /// Magnitudes |term_k| of the power series at `x`, k = 1..=count;
    /// diagnostic for the fixed-m convergence (Cauchy) property.
    pub fn series_term_magnitudes(&self, x: f64, count: usize) -> Vec<f64> {
        let mut terms = SeriesTerms::new(&self.blob, x, 0);
        (1..=count).map(|k| terms.next_term(k).abs()).collect()
    }

    /// Sine-integral route. The three antiderivative levels below the
    /// closed-form I''' are exact:
    ///
    /// ```text
    /// I'''(t) = (S(t-a) - S(1-a)) / pi,                 S(u) = Si(m u)
    /// I''(y)  = [(y-a)S(y-a) - aS(a) + (cos(m(y-a)) - cos(ma))/m - S(1-a) y]/pi
    /// I'(z)   = [Q1(z-a) - Q1(1-a) - aS(a)(z-1) + (sin(m(z-a)) - sin(m(1-a)))/m^2
    ///            - cos(ma)(z-1)/m - S(1-a)(z^2-1)/2]/pi
    /// I(x)    = [Q2(x-a) - Q2(-a) - Q1(1-a)x - aS(a)(x^2/2-x)
    ///            - (cos(m(x-a)) - cos(ma))/m^3 - sin(m(1-a)) x/m^2
    ///            - cos(ma)(x^2/2-x)/m - S(1-a)(x^3/6-x/2)]/pi
    /// ```
    ///
    /// with Q1(w) = w^2 S(w)/2 + w cos(mw)/(2m) - sin(mw)/(2m^2) (the
    /// antiderivative of w S(w)) and
    /// Q2(w) = w^3 S(w)/6 + w^2 cos(mw)/(6m) + w sin(mw)/(6m^2)
    ///       + 2 cos(mw)/(3m^3) (the antiderivative of Q1).
    fn sine_integral_i(&self, x: f64, r: u32) -> f64 {
        let m = self.blob.m;
        let a = self.blob.center;
        let s = |u: f64| sine_integral(m * u);
        let q1 = |w: f64| {
            0.5 * w * w * s(w) + w * (m * w).cos() / (2.0 * m) - (m * w).sin() / (2.0 * m * m)
        };
        let q2 = |w: f64| {
            w * w * w * s(w) / 6.0 + w * w * (m * w).cos() / (6.0 * m)
                + w * (m * w).sin() / (6.0 * m * m)
                + 2.0 * (m * w).cos() / (3.0 * m * m * m)
        };
        let sa = s(a);
        let sb = s(1.0 - a);
        let cos_ma = (m * a).cos();
        let w = x - a;
        match r {
            0 => {
                (q2(w) - q2(-a) - q1(1.0 - a) * x - a * sa * (0.5 * x * x - x)
                    - ((m * w).cos() - cos_ma) / (m * m * m)
                    - (m * (1.0 - a)).sin() * x / (m * m)
                    - cos_ma * (0.5 * x * x - x) / m
                    - sb * (x * x * x / 6.0 - 0.5 * x))
                    / PI
            }
            1 => {
                (q1(w) - q1(1.0 - a) - a * sa * (x - 1.0)
                    + ((m * w).sin() - (m * (1.0 - a)).sin()) / (m * m)
                    - cos_ma * (x - 1.0) / m
                    - sb * (x * x - 1.0) / 2.0)
                    / PI
            }
            2 => (w * s(w) - a * sa + ((m * w).cos() - cos_ma) / m - sb * x) / PI,
            3 => (s(w) - sb) / PI,
            _ => unreachable!(),
        }
    }
}

/// Multiplicative ladder for the power-series terms of I (differentiated
/// `r` times in x). Each field carries m^(2k-1) z^p / p! for one of the
/// bases z in {x-a, a, 1-a}, advanced two powers per k.
struct SeriesTerms {
    x: f64,
    r: u32,
    m2: f64,
    a: f64,
    b: f64,
    w: f64,
    /// m^(2k-1) w^(2k+2-r) / (2k+2-r)!
    c_w: f64,
    /// m^(2k-1) a^(2k) / (2k)!
    c_a2: f64,
    /// m^(2k-1) b^(2k-1) / (2k-1)!
    c_b1: f64,
    /// m^(2k-1) b^(2k+1) / (2k+1)!
    c_b3: f64,
    /// m^(2k-1) a^(2k+2) / (2k+2)!
    c_a4: f64,
}

impl SeriesTerms {
    fn new(blob: &Blob, x: f64, r: u32) -> Self {
        let (m, a) = (blob.m, blob.center);
        let w = x - a;
        let b = 1.0 - a;
        // k = 1 seeds: m w^(4-r)/(4-r)!, m a^2/2!, m b^1/1!, m b^3/3!, m a^4/4!.
        let mut c_w = m;
        let mut fact = 1.0;
        for i in 1..=(4 - r) {
            c_w *= w;
            fact *= i as f64;
        }
        Self {
            x,
            r,
            m2: m * m,
            a,
            b,
            w,
            c_w: c_w / fact,
            c_a2: m * a * a / 2.0,
            c_b1: m * b,
            c_b3: m * b * b * b / 6.0,
            c_a4: m * a * a * a * a / 24.0,
        }
    }

    /// Term k of the series (the ladder must be called with consecutive k).
    fn next_term(&mut self, k: usize) -> f64 {
        let kf = k as f64;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let pref = sign / (2.0 * kf - 1.0);
        let x = self.x;
        let bracket = match self.r {
            0 => {
                self.c_w - self.c_b1 * x * x * x / 6.0 - self.c_a2 * x * x / 2.0 - self.c_b3 * x
                    + self.c_a2 * x
                    + self.c_b1 * x / 2.0
                    - self.c_a4
            }
            1 => {
                self.c_w - self.c_b1 * x * x / 2.0 - self.c_a2 * x - self.c_b3
                    + self.c_a2
                    + self.c_b1 / 2.0
            }
            2 => self.c_w - self.c_b1 * x - self.c_a2,
            3 => self.c_w - self.c_b1,
            _ => unreachable!(),
        };
        // Advance k -> k+1: every base gains m^2 z^2 / ((p+1)(p+2)).
        let p_w = 2.0 * kf + 2.0 - self.r as f64;
        self.c_w *= self.m2 * self.w * self.w / ((p_w + 1.0) * (p_w + 2.0));
        self.c_a2 *= self.m2 * self.a * self.a / ((2.0 * kf + 1.0) * (2.0 * kf + 2.0));
        self.c_b1 *= self.m2 * self.b * self.b / ((2.0 * kf) * (2.0 * kf + 1.0));
        self.c_b3 *= self.m2 * self.b * self.b / ((2.0 * kf + 2.0) * (2.0 * kf + 3.0));
        self.c_a4 *= self.m2 * self.a * self.a / ((2.0 * kf + 3.0) * (2.0 * kf + 4.0));
        pref * bracket / PI
    }
}

/// One row of the regularisation-convergence table.
#[derive(Debug, Clone, Copy)]
pub struct GapRow {
    pub m: f64,
    /// sup_x |psi_m(x) - alpha G(x, x_j)|
    pub c0: f64,
    /// sup_x of the first-derivative gap
    pub c1: f64,
}

#[derive(Debug, Clone)]
pub struct GapReport {
    pub actuator: f64,
    pub rows: Vec<GapRow>,
    /// Set when the actuator sits on the boundary, where half the blob mass
    /// falls outside the domain and the distributional limit is degraded.
    pub boundary_actuator: bool,
}

/// Sup-norm gaps between the regularised steady state y_bar I_m and the
/// Green's-function steady state alpha G(., x_j), per m, with y_bar = alpha.
pub fn regularization_gap(actuator: f64, alpha: f64, m_list: &[f64], grid: usize) -> Result<GapReport> {
    let mut rows = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let kernel = LiftKernel::new(Blob::new(m, actuator)?);
        let mut c0 = 0.0f64;
        let mut c1 = 0.0f64;
        for i in 0..=grid {
            let x = i as f64 / grid as f64;
            let psi = alpha * kernel.eval_i(x)?;
            let w = alpha * green_eval_unchecked(x, actuator);
            c0 = c0.max((psi - w).abs());
            let dpsi = alpha * kernel.eval_i_deriv(x, 1)?;
            let dw = alpha * green_deriv_x(x, actuator);
            c1 = c1.max((dpsi - dw).abs());
        }
        rows.push(GapRow { m, c0, c1 });
    }
    Ok(GapReport { actuator, rows, boundary_actuator: actuator == 1.0 })
}
