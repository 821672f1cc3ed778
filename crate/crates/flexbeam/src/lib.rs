//! Flatness-based deformation control of an in-domain actuated
//! Euler-Bernoulli beam.
//!
//! The crate covers the full pipeline:
//!
//! * [`green`]: steady-state shape planning (Green's-function collocation,
//!   amplitude solve, interpolation-error measures).
//! * [`gevrey`]: smooth 0-to-1 transition profiles with derivative jets of
//!   arbitrary order.
//! * [`flatseries`]: the flat-output series for the full-state trajectory
//!   and the boundary input, plus truncation diagnostics.
//! * [`lifting`]: sinc regularisations of the point loads, the lifted
//!   kernels H and I, and the convergence check against the Green's-function
//!   steady state.
//! * [`modalsim`]: closed-loop spectral simulation with pointwise velocity
//!   feedback.
//! * [`scenario`]: validated experiment definitions binding it all.

pub mod error;
pub mod flatseries;
pub mod gevrey;
pub mod green;
pub mod jet;
pub mod lifting;
pub mod linalg;
pub mod modalsim;
pub mod quad;
pub mod rng;
pub mod scenario;
pub mod sine_integral;

pub use error::{Error, Result};
