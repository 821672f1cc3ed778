//! Flat-output series for the boundary-controlled beam.
//!
//! With the flat output y(t) = y_bar * phi(t), the full-state trajectory and
//! the shear input at x = 1 are
//!
//! ```text
//! u(x,t) = y_bar P(x) phi(t) + y_bar sum_{n>=1} Phi_n(x) phi^(2n)(t),
//! g(t)   = -y_bar phi(t)    + y_bar sum_{n>=1} Psi_n    phi^(2n)(t),
//! ```
//!
//! where P(x) = x/2 - x^3/6 and the spatial coefficients carry reciprocal
//! factorial pairs:
//!
//! ```text
//! Phi_n(x) = (-1)^n [ sum_k x^(4k+1)/((4k+1)!(4(n-k)+2)!)
//!                   - sum_k x^(4k+3)/((4k+3)!(4(n-k))!) ],   k = 0..n,
//! Psi_n    = (-1)^n [ sum_{k=1..n} 1/((4k-2)!(4(n-k)+2)!)
//!                   - sum_{k=0..n} 1/((4k)!(4(n-k))!) ].
//! ```
//!
//! Both are assembled from exact binomial integers over a single factorial,
//! so the many algebraic identities of the series (vanishing boundary rows,
//! telescoping of the beam operator) hold to the last bit or near it.

use crate::error::{Error, Result};
use crate::gevrey::{ln_factorial, GevreyBounds, GevreyProfile};
use std::sync::Arc;

/// Largest supported truncation order; keeps every binomial below 2^96 and
/// every factorial in double range.
pub const MAX_SERIES_ORDER: usize = 24;

/// n! as f64 (exact integer accumulation below 2^128, rounded beyond).
pub(crate) fn factorial(n: usize) -> f64 {
    let mut exact: u128 = 1;
    let mut k = 1u128;
    while k <= n as u128 {
        match exact.checked_mul(k) {
            Some(v) => exact = v,
            None => break,
        }
        k += 1;
    }
    let mut f = exact as f64;
    while k <= n as u128 {
        f *= k as f64;
        k += 1;
    }
    f
}

/// Exact binomial coefficient; every intermediate stays integral.
fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k {
        c = c * (n - k + i) as u128 / i as u128;
    }
    c
}

/// The spatial coefficient Phi_n as an exact-integer polynomial
/// scale * sum_p c_p x^p with scale = (-1)^n / (4n+3)!.
#[derive(Debug, Clone)]
pub(crate) struct PhiPoly {
    /// Signed (4n+3)!; dividing the exact integer sum by it last keeps the
    /// rounding to one step.
    divisor: f64,
    /// (power, signed integer coefficient as f64)
    terms: Vec<(u32, f64)>,
}

impl PhiPoly {
    pub(crate) fn new(n: usize) -> Self {
        assert!((1..=MAX_SERIES_ORDER).contains(&n));
        let order = (4 * n + 3) as u64;
        let mut terms = Vec::with_capacity(2 * (n + 1));
        for k in 0..=n as u64 {
            terms.push(((4 * k + 1) as u32, binomial(order, 4 * k + 1) as f64));
            terms.push(((4 * k + 3) as u32, -(binomial(order, 4 * k + 3) as f64)));
        }
        terms.sort_by_key(|t| t.0);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        PhiPoly { divisor: sign * factorial(order as usize), terms }
    }

    /// d^r/dx^r Phi_n at x; r = 0 is the value itself.
    pub(crate) fn eval_deriv(&self, x: f64, r: u32) -> f64 {
        let mut sum = 0.0;
        for &(p, c) in &self.terms {
            if p < r {
                continue;
            }
            let mut fall = 1.0;
            for i in 0..r {
                fall *= (p - i) as f64;
            }
            let q = p - r;
            let monomial = if q == 0 { 1.0 } else { x.powi(q as i32) };
            sum += c * fall * monomial;
        }
        sum / self.divisor
    }

    pub(crate) fn eval(&self, x: f64) -> f64 {
        self.eval_deriv(x, 0)
    }

    pub(crate) fn sup_abs(&self, grid: usize) -> f64 {
        (0..=grid)
            .map(|i| self.eval(i as f64 / grid as f64).abs())
            .fold(0.0, f64::max)
    }
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 || n > MAX_SERIES_ORDER {
        return Err(Error::Domain(format!(
            "series index n = {n} outside 1..={MAX_SERIES_ORDER}"
        )));
    }
    Ok(())
}

/// Phi_n(x).
pub fn coeff_phi(n: usize, x: f64) -> Result<f64> {
    check_order(n)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} outside [0, 1]")));
    }
    Ok(PhiPoly::new(n).eval(x))
}

/// d^r/dx^r Phi_n at x.
pub fn coeff_phi_deriv(n: usize, x: f64, r: u32) -> Result<f64> {
    check_order(n)?;
    Ok(PhiPoly::new(n).eval_deriv(x, r))
}

/// Psi_n, the boundary coefficient of the input series
/// (equals the third spatial derivative of Phi_n at x = 1).
pub fn coeff_psi(n: usize) -> Result<f64> {
    check_order(n)?;
    let order = (4 * n) as u64;
    let mut s1: f64 = 0.0;
    for k in 1..=n as u64 {
        s1 += binomial(order, 4 * k - 2) as f64;
    }
    let mut s2: f64 = 0.0;
    for k in 0..=n as u64 {
        s2 += binomial(order, 4 * k) as f64;
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * (s1 - s2) / factorial(order as usize))
}

/// Base polynomial P(x) = x/2 - x^3/6 and its derivatives.
pub fn base_poly_deriv(x: f64, r: u32) -> f64 {
    match r {
        0 => 0.5 * x - x * x * x / 6.0,
        1 => 0.5 - 0.5 * x * x,
        2 => -x,
        3 => -1.0,
        _ => 0.0,
    }
}

/// Truncated flat-series evaluator for one actuator.
#[derive(Debug, Clone)]
pub struct FlatTrajectory {
    y_bar: f64,
    n_max: usize,
    actuator_index: usize,
    profile: Arc<GevreyProfile>,
    polys: Vec<PhiPoly>,
    psi: Vec<f64>,
}

/// Terms below this fraction of the running partial sum are dropped.
const TERM_CUTOFF: f64 = 1e-14;

impl FlatTrajectory {
    pub fn new(
        y_bar: f64,
        profile: Arc<GevreyProfile>,
        n_max: usize,
        actuator_index: usize,
    ) -> Result<Self> {
        check_order(n_max)?;
        if profile.sigma() >= 2.0 {
            return Err(Error::Domain(format!(
                "series convergence requires Gevrey order sigma < 2, got sigma = {} (epsilon = {})",
                profile.sigma(),
                profile.epsilon()
            )));
        }
        if profile.jet_order() < 2 * n_max {
            return Err(Error::Domain(format!(
                "profile carries derivatives to order {}, series truncated at n_max = {n_max} needs {}",
                profile.jet_order(),
                2 * n_max
            )));
        }
        let polys = (1..=n_max).map(PhiPoly::new).collect();
        let psi = (1..=n_max).map(|n| coeff_psi(n).expect("order checked")).collect();
        Ok(Self { y_bar, n_max, actuator_index, profile, polys, psi })
    }

    pub fn y_bar(&self) -> f64 {
        self.y_bar
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn actuator_index(&self) -> usize {
        self.actuator_index
    }

    pub fn profile(&self) -> &Arc<GevreyProfile> {
        &self.profile
    }

    /// Full-state trajectory u(x, t). Exactly y_bar P(x) once t >= T.
    pub fn state(&self, x: f64, t: f64) -> Result<f64> {
        self.state_spatial_deriv(x, t, 0)
    }

    /// d^r/dx^r of the truncated state series.
    pub fn state_spatial_deriv(&self, x: f64, t: f64, r: u32) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("x = {x} outside [0, 1]")));
        }
        if t >= self.profile.duration() {
            return Ok(self.y_bar * base_poly_deriv(x, r));
        }
        let jet = self.profile.derivative_jet(t)?;
        let mut sum = base_poly_deriv(x, r) * jet.values[0];
        for n in 1..=self.n_max {
            let term = self.polys[n - 1].eval_deriv(x, r) * jet.values[2 * n];
            sum += term;
            if term.abs() <= TERM_CUTOFF * sum.abs() {
                break;
            }
        }
        Ok(self.y_bar * sum)
    }

    /// Boundary input g(t); starts at 0 with zero slope, ends at -y_bar.
    pub fn input(&self, t: f64) -> Result<f64> {
        if t >= self.profile.duration() {
            return Ok(-self.y_bar);
        }
        let jet = self.profile.derivative_jet(t)?;
        Ok(self.input_from_jet(&jet))
    }

    /// Same as [`input`](Self::input) against a jet computed once by the
    /// caller: trajectories sharing a profile share the jet in hot loops.
    pub fn input_from_jet(&self, jet: &crate::gevrey::DerivativeJet) -> f64 {
        assert!(jet.values.len() > 2 * self.n_max, "jet too short for this series");
        let mut sum = -jet.values[0];
        for n in 1..=self.n_max {
            let term = self.psi[n - 1] * jet.values[2 * n];
            sum += term;
            if term.abs() <= TERM_CUTOFF * sum.abs() {
                break;
            }
        }
        self.y_bar * sum
    }

    /// Residual of the beam equation, u_tt + u_xxxx, for the truncated
    /// series. The series telescopes (Phi_n'''' = -Phi_{n-1}, Phi_0 = P), so
    /// the residual is exactly the unmatched top term
    /// y_bar Phi_{n_max}(x) phi^(2 n_max + 2)(t) plus rounding.
    pub fn pde_residual(&self, x: f64, t: f64) -> Result<f64> {
        if self.profile.jet_order() < 2 * self.n_max + 2 {
            return Err(Error::Domain(format!(
                "pde residual needs derivatives to order {}, profile has {}",
                2 * self.n_max + 2,
                self.profile.jet_order()
            )));
        }
        if t >= self.profile.duration() {
            return Ok(0.0);
        }
        let jet = self.profile.derivative_jet(t)?;
        let mut u_tt = base_poly_deriv(x, 0) * jet.values[2];
        for n in 1..=self.n_max {
            u_tt += self.polys[n - 1].eval(x) * jet.values[2 * n + 2];
        }
        let mut u_xxxx = 0.0;
        for n in 1..=self.n_max {
            u_xxxx += self.polys[n - 1].eval_deriv(x, 4) * jet.values[2 * n];
        }
        Ok(self.y_bar * (u_tt + u_xxxx))
    }

    /// Bound on the pde residual: sup_x |Phi_{n_max}| * sup_t |phi^(2n+2)|.
    pub fn residual_bound(&self, t_grid: usize) -> Result<f64> {
        let sup_phi = self.polys[self.n_max - 1].sup_abs(512);
        let mut sup_dt = 0.0f64;
        for i in 0..=t_grid {
            let t = self.profile.duration() * i as f64 / t_grid as f64;
            let jet = self.profile.derivative_jet(t)?;
            sup_dt = sup_dt.max(jet.values[2 * self.n_max + 2].abs());
        }
        Ok(self.y_bar.abs() * sup_phi * sup_dt)
    }

    /// Per-term decay diagnostics against the analytic majorant.
    pub fn truncation_diagnostic(
        &self,
        t_samples: usize,
        bounds: &GevreyBounds,
    ) -> Result<TruncationReport> {
        let mut sup_dt = vec![0.0f64; self.n_max + 1];
        for i in 0..=t_samples {
            let t = self.profile.duration() * i as f64 / t_samples as f64;
            let jet = self.profile.derivative_jet(t)?;
            for (n, sup) in sup_dt.iter_mut().enumerate().skip(1) {
                *sup = sup.max(jet.values[2 * n].abs());
            }
        }
        let sigma = self.profile.sigma();
        let mut terms = Vec::with_capacity(self.n_max);
        for n in 1..=self.n_max {
            let empirical = self.polys[n - 1].sup_abs(512) * sup_dt[n];
            let majorant = series_term_majorant(n, sigma, bounds.m, bounds.k_radius);
            terms.push(TruncationTerm {
                n,
                empirical,
                majorant,
                empirical_root: empirical.powf(1.0 / n as f64),
                majorant_root: majorant.powf(1.0 / n as f64),
            });
        }
        let dominated = terms.iter().all(|t| t.empirical <= t.majorant * (1.0 + 1e-9));
        let decaying =
            terms.windows(2).all(|w| w[1].empirical < w[0].empirical || w[1].empirical == 0.0);
        Ok(TruncationReport { terms, dominated, decaying })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TruncationTerm {
    pub n: usize,
    /// sup_x |Phi_n| * sup_t |phi^(2n)| (unit flat-output amplitude).
    pub empirical: f64,
    /// 2 M 16^n ((2n)!)^sigma / (K^(2n) (4n+1)!).
    pub majorant: f64,
    pub empirical_root: f64,
    pub majorant_root: f64,
}

#[derive(Debug, Clone)]
pub struct TruncationReport {
    pub terms: Vec<TruncationTerm>,
    /// Every empirical term sits below its majorant.
    pub dominated: bool,
    /// Empirical terms decay monotonically.
    pub decaying: bool,
}

/// Analytic bound on the n-th series term for a Gevrey order-sigma output
/// with envelope (M, K): 2 M 16^n ((2n)!)^sigma / (K^(2n) (4n+1)!).
pub fn series_term_majorant(n: usize, sigma: f64, m: f64, k: f64) -> f64 {
    let ln = (2.0 * m).ln() + n as f64 * 16f64.ln() + sigma * ln_factorial(2 * n)
        - 2.0 * n as f64 * k.ln()
        - ln_factorial(4 * n + 1);
    ln.exp()
}

/// n-th roots of the majorant sequence; their limit decides convergence
/// (0 for sigma < 2, 1/K^2 at sigma = 2, unbounded for sigma > 2).
pub fn majorant_nth_roots(sigma: f64, m: f64, k: f64, n_max: usize) -> Vec<f64> {
    (1..=n_max)
        .map(|n| series_term_majorant(n, sigma, m, k).powf(1.0 / n as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(jet_order: usize) -> Arc<GevreyProfile> {
        Arc::new(GevreyProfile::new(1.111, 5.0, jet_order).unwrap())
    }

    #[test]
    fn phi_1_matches_the_expanded_closed_form() {
        // Phi_1(x) = -(x/720 + x^5/240 - x^3/144 - x^7/5040); the two
        // evaluation routes each round a couple of ulps. At x = 1 the four
        // fractions sum to -(7 + 21 - 35 - 1)/5040 = 1/630.
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            let want = -(x / 720.0 + x.powi(5) / 240.0 - x.powi(3) / 144.0 - x.powi(7) / 5040.0);
            let got = coeff_phi(1, x).unwrap();
            assert!((got - want).abs() < 1e-17, "x = {x}: {got} vs {want}");
        }
        assert!((coeff_phi(1, 1.0).unwrap() - 1.0 / 630.0).abs() < 1e-17);
    }

    #[test]
    fn phi_boundary_rows_vanish() {
        for n in 1..=8 {
            assert_eq!(coeff_phi(n, 0.0).unwrap(), 0.0, "Phi_{n}(0)");
            assert_eq!(coeff_phi_deriv(n, 0.0, 2).unwrap(), 0.0, "Phi_{n}''(0)");
            let d1 = coeff_phi_deriv(n, 1.0, 1).unwrap();
            assert!(d1.abs() <= 1e-12, "Phi_{n}'(1) = {d1}");
        }
    }

    #[test]
    fn psi_1_is_minus_one_sixth_exactly() {
        assert_eq!(coeff_psi(1).unwrap(), -(1.0 / 6.0));
    }

    #[test]
    fn psi_magnitudes_strictly_decreasing() {
        let psi: Vec<f64> = (1..=8).map(|n| coeff_psi(n).unwrap()).collect();
        for w in psi.windows(2) {
            assert!(w[1].abs() < w[0].abs(), "{w:?}");
        }
    }

    #[test]
    fn psi_equals_third_derivative_of_phi_at_one() {
        for n in 1..=6 {
            let psi = coeff_psi(n).unwrap();
            let d3 = coeff_phi_deriv(n, 1.0, 3).unwrap();
            assert!(
                (psi - d3).abs() <= 1e-12 * psi.abs(),
                "n = {n}: Psi = {psi}, Phi'''(1) = {d3}"
            );
        }
    }

    #[test]
    fn phi_fourth_derivative_telescopes() {
        // Phi_n'''' = -Phi_{n-1} with Phi_0 = P; this is what makes the
        // truncated series satisfy the beam equation up to one term.
        for n in 1..=8usize {
            for i in 0..=20 {
                let x = i as f64 / 20.0;
                let lhs = coeff_phi_deriv(n, x, 4).unwrap();
                let rhs = if n == 1 {
                    -base_poly_deriv(x, 0)
                } else {
                    -coeff_phi(n - 1, x).unwrap()
                };
                assert!(
                    (lhs - rhs).abs() <= 1e-11 * rhs.abs().max(1e-300),
                    "n = {n}, x = {x}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn trajectory_construction_guards() {
        let p = profile(16);
        assert!(FlatTrajectory::new(1.0, p.clone(), 8, 0).is_ok());
        assert!(FlatTrajectory::new(1.0, p.clone(), 9, 0).is_err(), "jet order too low");
        assert!(FlatTrajectory::new(1.0, p, 0, 0).is_err());
        // sigma >= 2 rejected (epsilon = 1 gives sigma = 2).
        let wide = Arc::new(GevreyProfile::new(1.0, 5.0, 16).unwrap());
        assert!(FlatTrajectory::new(1.0, wide, 8, 0).is_err());
    }

    #[test]
    fn state_series_endpoints() {
        let traj = FlatTrajectory::new(0.7, profile(16), 8, 0).unwrap();
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            assert_eq!(traj.state(x, -1.0).unwrap(), 0.0);
            assert_eq!(traj.state(x, 0.0).unwrap(), 0.0);
            let steady = traj.state(x, 5.0).unwrap();
            assert_eq!(steady, 0.7 * (0.5 * x - x * x * x / 6.0));
            assert_eq!(traj.state(x, 9.0).unwrap(), steady);
        }
        // y_bar = 1, x = 1, t >= T: P(1) = 1/3.
        let unit = FlatTrajectory::new(1.0, profile(16), 8, 0).unwrap();
        assert!((unit.state(1.0, 6.0).unwrap() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn input_series_endpoints_and_midpoint() {
        let traj = FlatTrajectory::new(0.7, profile(16), 8, 0).unwrap();
        assert_eq!(traj.input(0.0).unwrap(), 0.0);
        assert_eq!(traj.input(-2.0).unwrap(), 0.0);
        assert_eq!(traj.input(5.0).unwrap(), -0.7);
        assert_eq!(traj.input(20.0).unwrap(), -0.7);
        // Zero slope at the start: g just after 0 is still essentially 0.
        assert!(traj.input(1e-6).unwrap().abs() < 1e-300);

        // n_max = 1: g(T/2) = -y phi(T/2) - (y/6) phi''(T/2).
        let one = FlatTrajectory::new(0.7, profile(16), 1, 0).unwrap();
        let jet = one.profile().derivative_jet(2.5).unwrap();
        let want = -0.7 * jet.values[0] - 0.7 / 6.0 * jet.values[2];
        assert!((one.input(2.5).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn shear_at_the_far_end_reproduces_the_input() {
        let traj = FlatTrajectory::new(-0.3, profile(16), 8, 3).unwrap();
        let mut rng = crate::rng::SplitMix64::new(7);
        for _ in 0..100 {
            let t = 5.0 * rng.next_f64();
            let shear = traj.state_spatial_deriv(1.0, t, 3).unwrap();
            let g = traj.input(t).unwrap();
            // Identical truncation on both sides: agreement to rounding in
            // the worst term magnitude.
            let scale = g.abs().max(0.3 * 1e-3);
            assert!((shear - g).abs() <= 1e-10 * scale, "t = {t}: {shear} vs {g}");
        }
    }

    #[test]
    fn pde_residual_below_top_term_bound() {
        let traj = FlatTrajectory::new(1.0, profile(18), 8, 0).unwrap();
        let bound = traj.residual_bound(200).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..=20 {
            for j in 0..=20 {
                let x = i as f64 / 20.0;
                let t = 5.0 * j as f64 / 20.0;
                worst = worst.max(traj.pde_residual(x, t).unwrap().abs());
            }
        }
        assert!(worst <= bound * (1.0 + 1e-9) + 1e-30, "residual {worst} vs bound {bound}");
        assert!(bound.is_finite() && bound > 0.0);
    }

    #[test]
    fn pde_residual_requires_enough_jet_orders() {
        let traj = FlatTrajectory::new(1.0, profile(16), 8, 0).unwrap();
        assert!(traj.pde_residual(0.5, 2.5).is_err());
    }

    #[test]
    fn truncation_terms_dominated_by_majorant() {
        let p = profile(18);
        let bounds = p.estimate_gevrey_bounds(18).unwrap();
        let traj = FlatTrajectory::new(1.0, p, 8, 0).unwrap();
        let report = traj.truncation_diagnostic(400, &bounds).unwrap();
        assert!(report.dominated, "{:#?}", report.terms);
        assert!(report.decaying, "{:#?}", report.terms);
        // sigma = 1.9: the majorant roots head towards zero.
        let roots: Vec<f64> = report.terms.iter().map(|t| t.majorant_root).collect();
        assert!(roots.last().unwrap() < &roots[0]);
        assert!(roots.last().unwrap() < &1.0);
    }

    #[test]
    fn majorant_roots_stay_below_one_at_sigma_two_when_k_exceeds_one() {
        // At sigma = 2 the root limit is 1/K^2.
        let p = GevreyProfile::new(1.0, 5.0, 16).unwrap();
        let bounds = p.estimate_gevrey_bounds(16).unwrap();
        assert!(bounds.k_radius > 1.0, "fitted K = {}", bounds.k_radius);
        let roots = majorant_nth_roots(2.0, bounds.m, bounds.k_radius, 16);
        let tail = &roots[4..];
        assert!(tail.iter().all(|&r| r < 1.0), "{roots:?}");
    }

    #[test]
    fn majorant_roots_blow_up_beyond_sigma_two() {
        let roots = majorant_nth_roots(2.5, 1.0, 1.5, 16);
        assert!(roots.last().unwrap() > &1.0, "{roots:?}");
        assert!(roots[15] > roots[8]);
    }
}
