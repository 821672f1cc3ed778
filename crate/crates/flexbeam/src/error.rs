use thiserror::Error;

/// Errors reported by the planning, synthesis and simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain a function is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// Actuator/collocation geometry violates the distinct-interior-node
    /// hypothesis of the influence map.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// The influence matrix is singular or too ill-conditioned to trust.
    #[error("planning failed: {reason} (condition estimate {condition:.3e})")]
    IllConditioned { reason: String, condition: f64 },

    /// The steady solve did not reach its residual contract.
    #[error("planning failed: relative residual {residual:.3e} exceeds {limit:.3e}")]
    ResidualTooLarge { residual: f64, limit: f64 },

    /// Truncated-power-series arithmetic produced a non-finite coefficient.
    #[error("jet arithmetic overflow at derivative order {order}")]
    JetOverflow { order: usize },

    /// A series evaluation exhausted its term budget without converging.
    #[error("series for m = {m} did not converge within {terms} terms")]
    SeriesNoConvergence { m: f64, terms: usize },

    /// The fit of derivative-growth bounds had no usable samples.
    #[error("bound estimation degenerate: {0}")]
    DegenerateFit(String),

    /// The time integrator produced a non-finite state.
    #[error("simulation diverged at t = {t} (mode {mode})")]
    Divergence { t: f64, mode: usize },

    /// A scenario violated one or more module preconditions.
    #[error("invalid scenario:{}", .0.iter().map(|v| format!("\n  - {v}")).collect::<String>())]
    InvalidScenario(Vec<String>),
}

pub type Result<T> = std::result::Result<T, Error>;
