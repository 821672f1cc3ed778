//! Library half of the scenario runner; the binary in main.rs is a thin
//! clap wrapper so the commands stay testable.

pub mod commands;
pub mod csvio;

use anyhow::{Context, Result};
use flexbeam::scenario::BeamScenario;
use std::path::Path;

/// Load a scenario config (JSON) and apply command-line overrides.
pub fn load_scenario(
    path: &Path,
    n_max: Option<usize>,
    modes: Option<usize>,
    dt: Option<f64>,
) -> Result<BeamScenario> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut sc: BeamScenario = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    if let Some(n) = n_max {
        sc.n_max = n;
    }
    if let Some(m) = modes {
        sc.mode_count = m;
    }
    if let Some(step) = dt {
        sc.dt = step;
    }
    Ok(sc)
}
