//! Steady-state shape planning through the beam's Green's function.
//!
//! The static beam operator d^4/dx^4 with the pinned/shear-hinged boundary
//! set w(0) = w_xx(0) = 0, w_x(1) = w_xxx(1) = 0 has the piecewise-cubic
//! impulse response
//!
//! ```text
//! G(x, xi) = -x^3/6  + x xi (1 - xi/2),   x <  xi
//!          = -xi^3/6 + xi x (1 - x/2),    x >= xi
//! ```
//!
//! Sampling G at collocation points against the actuator positions gives a
//! dense input-to-output map; inverting it yields the steady actuator
//! amplitudes that interpolate a desired deflection profile.

use crate::error::{Error, Result};
use crate::linalg::{condition_1norm, solve_refined, LuFactor};
use crate::quad::composite_simpson;
use serde::{Deserialize, Serialize};

/// Condition-number gate for the collocation solve. Distinct interior nodes
/// guarantee invertibility but not good conditioning.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Residual contract for the steady solve, relative to ||b||_inf.
pub const RESIDUAL_LIMIT: f64 = 1e-9;

/// Beam Green's function G(x, xi).
///
/// Errors when `x` leaves [0, 1] or `xi` leaves (0, 1].
pub fn green_eval(x: f64, xi: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || !x.is_finite() {
        return Err(Error::Domain(format!("evaluation point x = {x} outside [0, 1]")));
    }
    if xi.is_nan() || xi <= 0.0 || xi > 1.0 {
        return Err(Error::Domain(format!("load point xi = {xi} outside (0, 1]")));
    }
    Ok(green_eval_unchecked(x, xi))
}

pub(crate) fn green_eval_unchecked(x: f64, xi: f64) -> f64 {
    if x < xi {
        -x * x * x / 6.0 + x * xi * (1.0 - 0.5 * xi)
    } else {
        -xi * xi * xi / 6.0 + xi * x * (1.0 - 0.5 * x)
    }
}

/// Spatial derivative dG/dx (x, xi); continuous across x = xi.
pub fn green_deriv_x(x: f64, xi: f64) -> f64 {
    if x < xi {
        -0.5 * x * x + xi * (1.0 - 0.5 * xi)
    } else {
        xi * (1.0 - x)
    }
}

/// One Gaussian bump `amplitude * exp(-decay (x - center)^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBump {
    pub amplitude: f64,
    pub center: f64,
    pub decay: f64,
}

/// A steady point load `amplitude` applied at `position`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointLoad {
    pub position: f64,
    pub amplitude: f64,
}

/// Desired steady deflection profile on [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesiredShape {
    /// Sum of Gaussian bumps.
    GaussianSum(Vec<GaussianBump>),
    /// Exact steady response of the beam to a set of point loads; useful as
    /// a shape that the planner can reproduce with zero interpolation error.
    PointLoads(Vec<PointLoad>),
    /// Piecewise-linear interpolation of tabulated samples (xs ascending).
    Samples { xs: Vec<f64>, values: Vec<f64> },
}

impl DesiredShape {
    pub fn zero() -> Self {
        DesiredShape::GaussianSum(Vec::new())
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            DesiredShape::GaussianSum(terms) => terms
                .iter()
                .map(|t| t.amplitude * (-t.decay * (x - t.center) * (x - t.center)).exp())
                .sum(),
            DesiredShape::PointLoads(loads) => loads
                .iter()
                .map(|l| l.amplitude * green_eval_unchecked(x.clamp(0.0, 1.0), l.position))
                .sum(),
            DesiredShape::Samples { xs, values } => {
                if xs.is_empty() {
                    return 0.0;
                }
                if x <= xs[0] {
                    return values[0];
                }
                if x >= xs[xs.len() - 1] {
                    return values[values.len() - 1];
                }
                let idx = xs.partition_point(|&p| p < x);
                let (x0, x1) = (xs[idx - 1], xs[idx]);
                let w = (x - x0) / (x1 - x0);
                values[idx - 1] * (1.0 - w) + values[idx] * w
            }
        }
    }
}

/// Solved steady plan: collocation geometry, influence matrix, and the
/// actuator amplitudes interpolating the desired shape.
#[derive(Debug, Clone)]
pub struct SteadyPlan {
    pub actuators: Vec<f64>,
    pub collocation: Vec<f64>,
    /// Row-major N x N influence matrix, entry (i, j) = G(x_i, xi_j).
    pub influence: Vec<f64>,
    /// Steady input amplitudes solving [G] alpha = desired(x_i).
    pub alpha_bar: Vec<f64>,
    /// Flat-output amplitudes; the steady sign chain gives y_bar = alpha_bar.
    pub y_bar: Vec<f64>,
    /// Relative residual of the linear solve.
    pub residual: f64,
    /// 1-norm condition estimate of the influence matrix.
    pub condition: f64,
}

fn validate_nodes(label: &str, nodes: &[f64], require_increasing: bool) -> Result<()> {
    if nodes.is_empty() {
        return Err(Error::DegenerateGeometry(format!("{label}: empty node set")));
    }
    for &p in nodes {
        if p.is_nan() || p <= 0.0 || p > 1.0 {
            return Err(Error::Domain(format!("{label}: node {p} outside (0, 1]")));
        }
    }
    for w in nodes.windows(2) {
        if require_increasing && w[1] <= w[0] {
            return Err(Error::DegenerateGeometry(format!(
                "{label}: nodes must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    let mut sorted = nodes.to_vec();
    sorted.sort_by(f64::total_cmp);
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DegenerateGeometry(format!("{label}: duplicate node {}", w[0])));
        }
    }
    Ok(())
}

/// Influence matrix (i, j) = G(x_i, xi_j) of actuators `xi` sampled at
/// collocation points `x`. Symmetric when the two node sets coincide.
pub fn build_influence(actuators: &[f64], collocation: &[f64]) -> Result<Vec<f64>> {
    validate_nodes("actuators", actuators, true)?;
    validate_nodes("collocation points", collocation, false)?;
    if actuators.len() != collocation.len() {
        return Err(Error::DegenerateGeometry(format!(
            "need as many collocation points ({}) as actuators ({})",
            collocation.len(),
            actuators.len()
        )));
    }
    let n = actuators.len();
    let mut g = vec![0.0; n * n];
    for (i, &x) in collocation.iter().enumerate() {
        for (j, &xi) in actuators.iter().enumerate() {
            g[i * n + j] = green_eval_unchecked(x, xi);
        }
    }
    Ok(g)
}

/// Solve for the steady amplitudes interpolating `desired` at the
/// collocation points (defaulting to the actuator positions).
pub fn solve_amplitudes(
    actuators: &[f64],
    collocation: Option<&[f64]>,
    desired: &DesiredShape,
) -> Result<SteadyPlan> {
    let collocation: Vec<f64> = collocation.unwrap_or(actuators).to_vec();
    let influence = build_influence(actuators, &collocation)?;
    let n = actuators.len();
    let lu = LuFactor::new(&influence, n)?;
    let condition = condition_1norm(&influence, n, &lu);
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(Error::IllConditioned {
            reason: "influence matrix beyond the conditioning gate".into(),
            condition,
        });
    }
    let rhs: Vec<f64> = collocation.iter().map(|&x| desired.eval(x)).collect();
    let (alpha_bar, residual) = solve_refined(&influence, n, &rhs, &lu);
    if residual > RESIDUAL_LIMIT {
        return Err(Error::ResidualTooLarge { residual, limit: RESIDUAL_LIMIT });
    }
    Ok(SteadyPlan {
        actuators: actuators.to_vec(),
        collocation,
        influence,
        y_bar: alpha_bar.clone(),
        alpha_bar,
        residual,
        condition,
    })
}

impl SteadyPlan {
    /// Steady superposition w(x) = sum_j G(x, xi_j) alpha_j.
    pub fn steady_shape(&self, x: f64) -> f64 {
        self.actuators
            .iter()
            .zip(&self.alpha_bar)
            .map(|(&xi, &a)| a * green_eval_unchecked(x.clamp(0.0, 1.0), xi))
            .sum()
    }

    /// Spatial derivative of the steady superposition.
    pub fn steady_shape_deriv(&self, x: f64) -> f64 {
        self.actuators
            .iter()
            .zip(&self.alpha_bar)
            .map(|(&xi, &a)| a * green_deriv_x(x, xi))
            .sum()
    }

    /// L1 distance between the desired shape and the steady superposition,
    /// by composite Simpson on a uniform 2001-node grid.
    pub fn interpolation_error(&self, desired: &DesiredShape) -> f64 {
        composite_simpson(|x| (desired.eval(x) - self.steady_shape(x)).abs(), 0.0, 1.0, 2001)
    }

    /// Largest steady amplitude magnitude (the control-effort measure).
    pub fn max_amplitude(&self) -> f64 {
        self.alpha_bar.iter().fold(0.0f64, |acc, a| acc.max(a.abs()))
    }
}

/// `n` actuator positions evenly distributed in the interior: x_j = j/(n+1).
pub fn evenly_spaced(n: usize) -> Vec<f64> {
    (1..=n).map(|j| j as f64 / (n + 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Frozen oracle values, derived by solving w'''' = delta(x - xi) with
    // the four boundary rows by hand (exact rationals):
    //   G(1, 1)        = 1/3
    //   G(0.5, 0.25)   = 35/384   (and symmetric partner)
    //   G(0.5, 0.5)    = 1/6
    //   G(0.75, 0.25)  = 11/96
    #[test]
    fn green_matches_hand_solved_values() {
        assert_eq!(green_eval(0.0, 0.5).unwrap(), 0.0);
        assert!((green_eval(1.0, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((green_eval(0.5, 0.25).unwrap() - 35.0 / 384.0).abs() < 1e-15);
        assert!((green_eval(0.25, 0.5).unwrap() - 35.0 / 384.0).abs() < 1e-15);
        assert!((green_eval(0.5, 0.5).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((green_eval(0.75, 0.25).unwrap() - 11.0 / 96.0).abs() < 1e-15);
    }

    #[test]
    fn green_rejects_out_of_range_arguments() {
        assert!(green_eval(-0.1, 0.5).is_err());
        assert!(green_eval(1.1, 0.5).is_err());
        assert!(green_eval(0.5, 0.0).is_err());
        assert!(green_eval(0.5, 1.2).is_err());
    }

    #[test]
    fn green_solves_the_static_beam_problem() {
        // Fourth finite difference away from the load point vanishes to
        // discretisation order, and the boundary rows hold analytically.
        let xi = 0.37;
        let h = 1e-3;
        for &x in &[0.1, 0.2, 0.6, 0.8] {
            let d4 = (green_eval_unchecked(x - 2.0 * h, xi) - 4.0 * green_eval_unchecked(x - h, xi)
                + 6.0 * green_eval_unchecked(x, xi)
                - 4.0 * green_eval_unchecked(x + h, xi)
                + green_eval_unchecked(x + 2.0 * h, xi))
                / h.powi(4);
            assert!(d4.abs() < 1e-3, "d4 at {x} = {d4}");
        }
        assert_eq!(green_eval_unchecked(0.0, xi), 0.0);
        // w_x(1) = 0 and w_xx(0) = 0 from the closed form.
        assert_eq!(green_deriv_x(1.0, xi), 0.0);
        // Curvature at 0 from a one-sided stencil carries an O(h) remainder
        // of the cubic term; zero quadratic coefficient means the second
        // difference must shrink linearly with h.
        let d2 = |h: f64| {
            (green_eval_unchecked(2.0 * h, xi) - 2.0 * green_eval_unchecked(h, xi)) / (h * h)
        };
        assert!(d2(h).abs() <= 1.5 * h);
        assert!(d2(h / 4.0).abs() <= 1.5 * h / 4.0);
    }

    proptest! {
        #[test]
        fn green_is_symmetric(x in 1e-6f64..1.0, xi in 1e-6f64..1.0) {
            let a = green_eval_unchecked(x, xi);
            let b = green_eval_unchecked(xi, x);
            prop_assert!((a - b).abs() <= 1e-16 + 1e-15 * a.abs().max(b.abs()));
        }
    }

    #[test]
    fn green_symmetry_dense_sweep() {
        let mut rng = crate::rng::SplitMix64::new(97);
        for _ in 0..10_000 {
            let x = rng.next_f64().max(1e-9);
            let xi = rng.next_f64().max(1e-9);
            let a = green_eval_unchecked(x, xi);
            let b = green_eval_unchecked(xi, x);
            assert!((a - b).abs() <= 1e-16 + 1e-15 * a.abs().max(b.abs()), "x={x} xi={xi}");
        }
    }

    #[test]
    fn influence_single_actuator() {
        let g = build_influence(&[0.5], &[0.5]).unwrap();
        assert!((g[0] - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn influence_two_actuators_symmetric() {
        let nodes = [0.25, 0.75];
        let g = build_influence(&nodes, &nodes).unwrap();
        assert_eq!(g[1], g[2]);
        assert!((g[1] - 11.0 / 96.0).abs() < 1e-15);
    }

    #[test]
    fn influence_rejects_duplicates() {
        assert!(matches!(
            build_influence(&[0.5, 0.5], &[0.5, 0.5]),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn solve_identity_by_construction() {
        // Desired shape equal to the unit response of the single actuator.
        let desired = DesiredShape::PointLoads(vec![PointLoad { position: 0.5, amplitude: 1.0 }]);
        let plan = solve_amplitudes(&[0.5], None, &desired).unwrap();
        assert!((plan.alpha_bar[0] - 1.0).abs() < 1e-12);
        assert_eq!(plan.y_bar, plan.alpha_bar);
    }

    #[test]
    fn solve_zero_shape_gives_zero_amplitudes() {
        let plan = solve_amplitudes(&evenly_spaced(5), None, &DesiredShape::zero()).unwrap();
        assert!(plan.alpha_bar.iter().all(|&a| a == 0.0));
        assert_eq!(plan.residual, 0.0);
        for i in 0..=10 {
            assert_eq!(plan.steady_shape(i as f64 / 10.0), 0.0);
        }
    }

    #[test]
    fn steady_shape_interpolates_at_collocation_points() {
        let desired = demo_shape();
        let plan = solve_amplitudes(&evenly_spaced(12), None, &desired).unwrap();
        assert!(plan.residual <= RESIDUAL_LIMIT);
        for &x in &plan.collocation {
            assert!((plan.steady_shape(x) - desired.eval(x)).abs() < 1e-9);
        }
        // Off-node value near the sharp bump stays within the interpolation
        // error of the 12-actuator layout.
        assert!((plan.steady_shape(0.7) - desired.eval(0.7)).abs() < 1e-3);
    }

    #[test]
    fn point_load_shape_reproduced_exactly() {
        let desired = DesiredShape::PointLoads(vec![PointLoad { position: 0.3, amplitude: -2.0 }]);
        let plan = solve_amplitudes(&[0.3], None, &desired).unwrap();
        assert!(plan.interpolation_error(&desired) < 1e-13);
    }

    #[test]
    fn invertible_for_random_distinct_interior_nodes() {
        let mut rng = crate::rng::SplitMix64::new(0x5eed);
        for _ in 0..100 {
            let n = 2 + (rng.next_u64() % 19) as usize; // N <= 20
            let mut nodes: Vec<f64> = (0..n).map(|_| 0.02 + 0.96 * rng.next_f64()).collect();
            nodes.sort_by(f64::total_cmp);
            // Enforce a minimum separation so the draw stays within the
            // conditioning gate; invertibility itself needs only distinctness.
            let ok = nodes.windows(2).all(|w| w[1] - w[0] > 5e-3);
            if !ok {
                continue;
            }
            let g = build_influence(&nodes, &nodes).unwrap();
            let lu = LuFactor::new(&g, n).expect("influence matrix must factor");
            let cond = condition_1norm(&g, n, &lu);
            assert!(cond.is_finite(), "condition blew up for {nodes:?}");
        }
    }

    fn demo_shape() -> DesiredShape {
        DesiredShape::GaussianSum(vec![
            GaussianBump { amplitude: -1e-3, center: 0.4, decay: 100.0 },
            GaussianBump { amplitude: -2e-3, center: 0.6, decay: 100.0 },
            GaussianBump { amplitude: -3e-3, center: 0.7, decay: 400.0 },
        ])
    }

    #[test]
    fn demo_shape_value_at_0p7() {
        // Direct evaluation of the three-bump profile at x = 0.7.
        let d = demo_shape();
        assert!((d.eval(0.7) - (-3.7358823e-3)).abs() < 1e-9);
    }

    #[test]
    fn actuator_count_study_trends() {
        let desired = demo_shape();
        let runs: Vec<_> = [8usize, 12, 16]
            .iter()
            .map(|&n| {
                let plan = solve_amplitudes(&evenly_spaced(n), None, &desired).unwrap();
                (plan.interpolation_error(&desired), plan.max_amplitude())
            })
            .collect();
        assert!(runs[0].0 > runs[1].0 && runs[1].0 > runs[2].0, "L1 errors {runs:?}");
        assert!(runs[2].1 > runs[1].1, "effort {runs:?}");
    }
}
