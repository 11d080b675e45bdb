//! Flat `key = value` configuration files.

use std::fmt::Write as _;
use std::path::PathBuf;

use cascade_core::analysis::{SweepAxis, SweepValue, DEFAULT_DELTA_H};
use cascade_core::meanfield::MeanFieldParams;
use cascade_core::{DefaultedSpins, ModelParams, TopBoundary, UpdateRules};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: `{key}`: {reason}")]
    Line { line: usize, key: String, reason: String },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("`{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

impl ConfigError {
    fn invalid(key: &str, reason: impl Into<String>) -> Self {
        ConfigError::Invalid { key: key.to_string(), reason: reason.into() }
    }

    fn at_line(self, line: usize) -> Self {
        match self {
            ConfigError::Invalid { key, reason } => ConfigError::Line { line, key, reason },
            other => other,
        }
    }
}

/// Every parameter a command can use, with defaults for the baseline economy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub j0: f64,
    pub sigma_j: f64,
    pub h: f64,
    pub steps: usize,
    pub bailout_budget: usize,
    pub p0: f64,
    pub q0: f64,
    pub seed: u64,
    pub realizations: usize,
    pub top_boundary: TopBoundary,
    pub defaulted_spins: DefaultedSpins,
    pub delta_h: f64,
    pub paired: bool,
    pub axis: Option<SweepAxis>,
    pub values: Vec<SweepValue>,
    pub j0_values: Vec<f64>,
    pub b_values: Vec<usize>,
    pub jtilde: Option<f64>,
    pub resolution: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let model = ModelParams::default();
        RunConfig {
            n: model.n,
            j0: model.j0,
            sigma_j: model.sigma_j,
            h: model.h,
            steps: model.steps,
            bailout_budget: model.bailout_budget,
            p0: model.p0,
            q0: model.q0,
            seed: model.master_seed,
            realizations: 1000,
            top_boundary: model.rules.top,
            defaulted_spins: model.rules.defaulted,
            delta_h: DEFAULT_DELTA_H,
            paired: true,
            axis: None,
            values: Vec::new(),
            j0_values: Vec::new(),
            b_values: Vec::new(),
            jtilde: None,
            resolution: MeanFieldParams::DEFAULT_RESOLUTION,
            tol: MeanFieldParams::DEFAULT_TOL,
            max_iter: MeanFieldParams::DEFAULT_MAX_ITER,
            out: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "n",
    "j0",
    "sigma_j",
    "h",
    "steps",
    "bailout_budget",
    "p0",
    "q0",
    "seed",
    "realizations",
    "top_boundary",
    "defaulted_spins",
    "delta_h",
    "paired",
    "axis",
    "values",
    "j0_values",
    "b_values",
    "jtilde",
    "resolution",
    "tol",
    "max_iter",
    "out",
];

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError::invalid(key, format!("malformed number `{value}`")))
}

fn list<T>(value: &str, item: impl FnMut(&str) -> Result<T, ConfigError>) -> Result<Vec<T>, ConfigError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(item)
        .collect()
}

fn sweep_value(key: &str, value: &str) -> Result<SweepValue, ConfigError> {
    match value.split_once(':') {
        Some((a, b)) => Ok(SweepValue::Pair(number(key, a.trim())?, number(key, b.trim())?)),
        None => Ok(SweepValue::Scalar(number(key, value)?)),
    }
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "n" => self.n = number(key, value)?,
            "j0" => self.j0 = number(key, value)?,
            "sigma_j" => self.sigma_j = number(key, value)?,
            "h" => self.h = number(key, value)?,
            "steps" => self.steps = number(key, value)?,
            "bailout_budget" => self.bailout_budget = number(key, value)?,
            "p0" => self.p0 = number(key, value)?,
            "q0" => self.q0 = number(key, value)?,
            "seed" => self.seed = number(key, value)?,
            "realizations" => self.realizations = number(key, value)?,
            "top_boundary" => self.top_boundary = value.parse().map_err(|e: String| ConfigError::invalid(key, e))?,
            "defaulted_spins" => {
                self.defaulted_spins = value.parse().map_err(|e: String| ConfigError::invalid(key, e))?
            }
            "delta_h" => self.delta_h = number(key, value)?,
            "paired" => {
                self.paired = value
                    .parse()
                    .map_err(|_| ConfigError::invalid(key, format!("expected true or false, got `{value}`")))?
            }
            "axis" => self.axis = Some(value.parse().map_err(|e| ConfigError::invalid(key, format!("{e}")))?),
            "values" => self.values = list(value, |s| sweep_value(key, s))?,
            "j0_values" => self.j0_values = list(value, |s| number(key, s))?,
            "b_values" => self.b_values = list(value, |s| number(key, s))?,
            "jtilde" => self.jtilde = Some(number(key, value)?),
            "resolution" => self.resolution = number(key, value)?,
            "tol" => self.tol = number(key, value)?,
            "max_iter" => self.max_iter = number(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(ConfigError::invalid(key, "unknown key")),
        }
        Ok(())
    }

    /// Checks the invariants that do not depend on the command.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model_params()
            .validate()
            .map_err(|e| match e {
                cascade_core::CascadeError::InvalidParameter { name, reason } => ConfigError::invalid(name, reason),
                other => ConfigError::invalid("config", other.to_string()),
            })?;
        if self.realizations == 0 {
            return Err(ConfigError::invalid("realizations", "must be at least 1"));
        }
        if !(self.delta_h > 0.0 && self.delta_h.is_finite()) {
            return Err(ConfigError::invalid("delta_h", "must be positive"));
        }
        if self.resolution < 2 {
            return Err(ConfigError::invalid("resolution", "must be at least 2"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(ConfigError::invalid("tol", "must be positive"));
        }
        if self.max_iter == 0 {
            return Err(ConfigError::invalid("max_iter", "must be at least 1"));
        }
        if self.jtilde.is_some_and(|j| !j.is_finite()) {
            return Err(ConfigError::invalid("jtilde", "must be finite"));
        }
        Ok(())
    }

    pub fn rules(&self) -> UpdateRules {
        UpdateRules { top: self.top_boundary, defaulted: self.defaulted_spins }
    }

    pub fn model_params(&self) -> ModelParams {
        ModelParams {
            n: self.n,
            j0: self.j0,
            sigma_j: self.sigma_j,
            h: self.h,
            steps: self.steps,
            bailout_budget: self.bailout_budget,
            p0: self.p0,
            q0: self.q0,
            master_seed: self.seed,
            rules: self.rules(),
        }
    }

    /// Renders the configuration in the file format; parsing the result
    /// gives back an equal configuration.
    pub fn to_text(&self) -> String {
        fn join<T: std::fmt::Display>(items: &[T]) -> String {
            items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
        }
        let mut out = String::new();
        let mut line = |key: &str, value: String| {
            let _ = writeln!(out, "{key} = {value}");
        };
        line("n", self.n.to_string());
        line("j0", self.j0.to_string());
        line("sigma_j", self.sigma_j.to_string());
        line("h", self.h.to_string());
        line("steps", self.steps.to_string());
        line("bailout_budget", self.bailout_budget.to_string());
        line("p0", self.p0.to_string());
        line("q0", self.q0.to_string());
        line("seed", self.seed.to_string());
        line("realizations", self.realizations.to_string());
        line("top_boundary", self.top_boundary.name().to_string());
        line("defaulted_spins", self.defaulted_spins.name().to_string());
        line("delta_h", self.delta_h.to_string());
        line("paired", self.paired.to_string());
        if let Some(axis) = self.axis {
            line("axis", axis.to_string());
        }
        if !self.values.is_empty() {
            line("values", join(&self.values));
        }
        if !self.j0_values.is_empty() {
            line("j0_values", join(&self.j0_values));
        }
        if !self.b_values.is_empty() {
            line("b_values", join(&self.b_values));
        }
        if let Some(jtilde) = self.jtilde {
            line("jtilde", jtilde.to_string());
        }
        line("resolution", self.resolution.to_string());
        line("tol", self.tol.to_string());
        line("max_iter", self.max_iter.to_string());
        if let Some(out_path) = &self.out {
            line("out", out_path.display().to_string());
        }
        out
    }
}

/// Parses a configuration document. Lines are `key = value`; `#` starts a
/// comment. Keys missing from the document keep their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    load_config(text, &[])
}

/// Parses `text`, then applies `overrides` in order before validating.
pub fn load_config(text: &str, overrides: &[(String, String)]) -> Result<RunConfig, ConfigError> {
    let mut config = RunConfig::default();
    let mut lines_of: Vec<(&'static str, usize)> = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: line_no })?;
        let key = key.trim();
        config.set(key, value).map_err(|e| e.at_line(line_no))?;
        if let Some(&known) = KEYS.iter().find(|&&k| k == key) {
            lines_of.retain(|(k, _)| *k != known);
            lines_of.push((known, line_no));
        }
    }
    for (key, value) in overrides {
        config.set(key, value)?;
        lines_of.retain(|(k, _)| k != key);
    }
    config.validate().map_err(|e| match e {
        ConfigError::Invalid { key, reason } => {
            // Point at the line that set the offending key, if any.
            let line = lines_of
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, l)| *l);
            match line {
                Some(line) => ConfigError::Line { line, key, reason },
                None => ConfigError::Invalid { key, reason },
            }
        }
        other => other,
    })?;
    Ok(config)
}
