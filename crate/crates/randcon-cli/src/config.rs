//! Scenario configuration: one JSON document, every field optional with
//! a desk-scale default, unknown keys rejected so a typo cannot
//! silently change an experiment.

use crate::AppError;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Inputs for scenario generation and both numerical studies.
///
/// Defaults describe a 30-sensor deployment on a 5x5 square with 90
/// realizable links, sized so the full comparison study stays
/// interactive on one core. Empty `budgets` / `baseline_radii` lists
/// mean "derive a sensible grid from the scenario" (an 8-point budget
/// grid up to the total cost, and radii hitting fixed cost quantiles).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub n_sensors: usize,
    pub grid_side: f64,
    pub eta: f64,
    pub n_realizable_edges: usize,
    pub budgets: Vec<f64>,
    pub mc_samples: usize,
    pub iters: usize,
    pub seed: u64,
    pub baseline_radii: Vec<f64>,
    pub er_graphs: usize,
    pub er_p_draws: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n_sensors: 30,
            grid_side: 5.0,
            eta: 1.0,
            n_realizable_edges: 90,
            budgets: Vec::new(),
            mc_samples: 400,
            iters: 1000,
            seed: 42,
            baseline_radii: Vec::new(),
            er_graphs: 10,
            er_p_draws: 5,
        }
    }
}

impl ScenarioConfig {
    /// Reads and validates a config file.
    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            AppError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let cfg: ScenarioConfig = serde_json::from_str(&text).map_err(|e| {
            AppError::Config(format!("invalid config {}: {e}", path.display()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), AppError> {
        let fail = |msg: String| Err(AppError::Config(msg));
        if self.n_sensors < 2 {
            return fail(format!("n_sensors must be at least 2, got {}", self.n_sensors));
        }
        if !(self.grid_side.is_finite() && self.grid_side > 0.0) {
            return fail(format!("grid_side must be finite and positive, got {}", self.grid_side));
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return fail(format!("eta must be finite and positive, got {}", self.eta));
        }
        let max_edges = self.n_sensors * (self.n_sensors - 1) / 2;
        if self.n_realizable_edges == 0 || self.n_realizable_edges > max_edges {
            return fail(format!(
                "n_realizable_edges must be in 1..={max_edges} for {} sensors, got {}",
                self.n_sensors, self.n_realizable_edges
            ));
        }
        for &u in &self.budgets {
            if !(u.is_finite() && u >= 0.0) {
                return fail(format!("budgets entries must be finite and nonnegative, got {u}"));
            }
        }
        for &r in &self.baseline_radii {
            if !(r.is_finite() && r > 0.0) {
                return fail(format!("baseline_radii entries must be finite and positive, got {r}"));
            }
        }
        if self.mc_samples == 0 {
            return fail("mc_samples must be positive".into());
        }
        if self.iters == 0 {
            return fail("iters must be positive".into());
        }
        if self.er_graphs == 0 || self.er_p_draws == 0 {
            return fail("er_graphs and er_p_draws must be positive".into());
        }
        Ok(())
    }
}
