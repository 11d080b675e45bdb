use serde::{Deserialize, Serialize};

use crate::error::{CascadeError, Result};

use super::UpdateRules;

/// Scalar knobs of the model plus the master seed.
///
/// `Default` is the baseline economy: 1000 firms, coupling spread 0.001,
/// eight time steps, no panic, no bailouts and equally populated initial
/// spins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Number of firms.
    pub n: usize,
    /// Mean pairwise coupling.
    pub j0: f64,
    /// Standard deviation of the pairwise couplings.
    pub sigma_j: f64,
    /// Panic amplitude, applied to `s = -1` once any firm has defaulted.
    pub h: f64,
    /// Number of time steps (sweeps of `n` single-firm updates).
    pub steps: usize,
    /// How many first defaults are rescued.
    pub bailout_budget: usize,
    /// Initial probability of `s = -1`.
    pub p0: f64,
    /// Initial probability of `s = +1`.
    pub q0: f64,
    pub master_seed: u64,
    /// Boundary treatment of the single-firm update.
    #[serde(default)]
    pub rules: UpdateRules,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            n: 1000,
            j0: 0.0,
            sigma_j: 0.001,
            h: 0.0,
            steps: 8,
            bailout_budget: 0,
            p0: 1.0 / 3.0,
            q0: 1.0 / 3.0,
            master_seed: 0,
            rules: UpdateRules::default(),
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(CascadeError::param("n", "must be at least 1"));
        }
        if !self.j0.is_finite() {
            return Err(CascadeError::param("j0", "must be finite"));
        }
        if !(self.sigma_j.is_finite() && self.sigma_j >= 0.0) {
            return Err(CascadeError::param("sigma_j", "must be finite and non-negative"));
        }
        if !(self.h.is_finite() && self.h >= 0.0) {
            return Err(CascadeError::param("h", "must be finite and non-negative"));
        }
        check_probability("p0", self.p0)?;
        check_probability("q0", self.q0)?;
        // Tolerate rounding from decimal inputs such as 1/3 + 2/3.
        if self.p0 + self.q0 > 1.0 + 1e-12 {
            return Err(CascadeError::param(
                "p0",
                format!("p0 + q0 must not exceed 1 (got {} + {})", self.p0, self.q0),
            ));
        }
        Ok(())
    }
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(CascadeError::param(name, format!("must lie in [0, 1] (got {value})")))
    }
}
