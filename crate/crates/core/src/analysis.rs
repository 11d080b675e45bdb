//! Ensemble statistics, parameter sweeps, susceptibility and rescue benefit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{run_ensemble, EnsembleResult};
use crate::error::{CascadeError, Result};
use crate::model::ModelParams;
use crate::seed::{mix, point_seed};

/// Default finite-difference step for the susceptibility.
pub const DEFAULT_DELTA_H: f64 = 0.01;
/// Default split between the low- and high-default branches.
pub const DEFAULT_BRANCH_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub n: usize,
    pub realizations: usize,
    pub nd_mean: f64,
    /// Sample standard deviation (divisor `count - 1`; zero for one realization).
    pub nd_std: f64,
    pub nd_over_n_mean: f64,
    pub nd_over_n_std: f64,
    /// Mean cumulative defaults after each step, starting at step 0.
    pub per_step_means: Vec<f64>,
}

/// Sample mean and standard deviation with divisor `count - 1`.
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let count = values.len();
    if count == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / count as f64;
    if count == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (count - 1) as f64).sqrt())
}

pub fn aggregate(ensemble: &EnsembleResult) -> Result<AggregateStats> {
    if ensemble.realizations.is_empty() {
        return Err(CascadeError::InvalidInput("ensemble has no realizations".into()));
    }
    let n = ensemble.params.n;
    let finals: Vec<f64> = ensemble.final_defaults().map(|d| d as f64).collect();
    let (nd_mean, nd_std) = mean_and_std(&finals);
    let len = ensemble.realizations[0].nd_trajectory.len();
    let per_step_means = (0..len)
        .map(|t| {
            let total: usize = ensemble.realizations.iter().map(|r| r.nd_trajectory[t]).sum();
            total as f64 / ensemble.realizations.len() as f64
        })
        .collect();
    Ok(AggregateStats {
        n,
        realizations: ensemble.realizations.len(),
        nd_mean,
        nd_std,
        nd_over_n_mean: nd_mean / n as f64,
        nd_over_n_std: nd_std / n as f64,
        per_step_means,
    })
}

/// Fraction of realizations ending with more than `threshold * n` defaults.
pub fn branch_fraction(ensemble: &EnsembleResult, threshold: f64) -> Result<f64> {
    if ensemble.realizations.is_empty() {
        return Err(CascadeError::InvalidInput("ensemble has no realizations".into()));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(CascadeError::param("threshold", "must lie in (0, 1)"));
    }
    let n = ensemble.params.n as f64;
    let high = ensemble.final_defaults().filter(|&d| d as f64 / n > threshold).count();
    Ok(high as f64 / ensemble.realizations.len() as f64)
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    J0,
    H,
    N,
    B,
    /// Initial spin probabilities, varied together.
    P0Q0,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::J0 => "j0",
            SweepAxis::H => "h",
            SweepAxis::N => "n",
            SweepAxis::B => "b",
            SweepAxis::P0Q0 => "p0q0",
        }
    }

    /// `base` with this axis set to `value`.
    pub fn apply(self, base: &ModelParams, value: SweepValue) -> Result<ModelParams> {
        let mut params = base.clone();
        match (self, value) {
            (SweepAxis::J0, SweepValue::Scalar(v)) => params.j0 = v,
            (SweepAxis::H, SweepValue::Scalar(v)) => params.h = v,
            (SweepAxis::N, SweepValue::Scalar(v)) => params.n = as_count("n", v)?,
            (SweepAxis::B, SweepValue::Scalar(v)) => params.bailout_budget = as_count("b", v)?,
            (SweepAxis::P0Q0, SweepValue::Pair(p0, q0)) => {
                params.p0 = p0;
                params.q0 = q0;
            }
            (axis, value) => {
                return Err(CascadeError::param(
                    "values",
                    format!("{value} does not fit axis `{}`", axis.name()),
                ))
            }
        }
        params.validate()?;
        Ok(params)
    }
}

fn as_count(name: &'static str, v: f64) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(CascadeError::param(name, format!("{v} is not a non-negative integer")))
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = CascadeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "j0" => Ok(SweepAxis::J0),
            "h" => Ok(SweepAxis::H),
            "n" => Ok(SweepAxis::N),
            "b" | "bailout_budget" => Ok(SweepAxis::B),
            "p0q0" => Ok(SweepAxis::P0Q0),
            other => Err(CascadeError::param("axis", format!("unknown axis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SweepValue {
    Scalar(f64),
    Pair(f64, f64),
}

impl SweepValue {
    fn sort_key(&self) -> (f64, f64) {
        match *self {
            SweepValue::Scalar(v) => (v, 0.0),
            SweepValue::Pair(a, b) => (a, b),
        }
    }
}

impl fmt::Display for SweepValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepValue::Scalar(v) => write!(f, "{v}"),
            SweepValue::Pair(a, b) => write!(f, "{a}:{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: SweepValue,
    /// Fully resolved parameters, including the derived master seed.
    pub params: ModelParams,
    pub stats: AggregateStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub realizations: usize,
    /// Sorted by value.
    pub points: Vec<SweepPoint>,
}

/// Parameters of each sweep point: the `k`-th listed value runs with master
/// seed `point_seed(base.master_seed, k)`.
pub fn sweep_point_params(
    base: &ModelParams,
    axis: SweepAxis,
    values: &[SweepValue],
) -> Result<Vec<ModelParams>> {
    values
        .iter()
        .enumerate()
        .map(|(k, &value)| {
            let mut params = axis.apply(base, value)?;
            params.master_seed = point_seed(base.master_seed, k);
            Ok(params)
        })
        .collect()
}

/// One ensemble per value of `axis`, all other parameters held at `base`.
pub fn sweep(
    base: &ModelParams,
    axis: SweepAxis,
    values: &[SweepValue],
    realization_count: usize,
) -> Result<SweepTable> {
    if values.is_empty() {
        return Err(CascadeError::param("values", "sweep needs at least one value"));
    }
    let point_params = sweep_point_params(base, axis, values)?;
    let mut points = values
        .iter()
        .zip(point_params)
        .map(|(&value, params)| {
            let ensemble = run_ensemble(&params, realization_count)?;
            Ok(SweepPoint {
                value,
                stats: aggregate(&ensemble)?,
                params,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    points.sort_by(|a, b| {
        let (ka, kb) = (a.value.sort_key(), b.value.sort_key());
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    Ok(SweepTable {
        axis,
        realizations: realization_count,
        points,
    })
}

/// Finite-difference response of the mean default count to the panic field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SusceptibilityEstimate {
    pub j0: f64,
    pub chi: f64,
    /// Standard error of `chi`.
    pub chi_std: f64,
    pub delta_h: f64,
    pub realizations: usize,
}

/// Estimates `chi` from an ensemble at `h = 0` and one at `h = delta_h`.
///
/// With `paired`, realization `k` of both ensembles must share its random
/// stream and the error comes from the per-realization differences;
/// otherwise it combines the two ensemble variances.
pub fn susceptibility_from_ensembles(
    base: &EnsembleResult,
    field: &EnsembleResult,
    delta_h: f64,
    paired: bool,
) -> Result<SusceptibilityEstimate> {
    if !(delta_h > 0.0 && delta_h.is_finite()) {
        return Err(CascadeError::param("delta_h", "must be positive"));
    }
    let base_nd: Vec<f64> = base.final_defaults().map(|d| d as f64).collect();
    let field_nd: Vec<f64> = field.final_defaults().map(|d| d as f64).collect();
    if base_nd.is_empty() || field_nd.is_empty() {
        return Err(CascadeError::InvalidInput("ensemble has no realizations".into()));
    }
    let (chi, chi_std) = if paired {
        if base_nd.len() != field_nd.len() {
            return Err(CascadeError::InvalidInput(
                "paired ensembles must have equal realization counts".into(),
            ));
        }
        let diffs: Vec<f64> = field_nd.iter().zip(&base_nd).map(|(f, b)| f - b).collect();
        let (mean, std) = mean_and_std(&diffs);
        (mean / delta_h, std / (diffs.len() as f64).sqrt() / delta_h)
    } else {
        let (m0, s0) = mean_and_std(&base_nd);
        let (m1, s1) = mean_and_std(&field_nd);
        let var = s0 * s0 / base_nd.len() as f64 + s1 * s1 / field_nd.len() as f64;
        ((m1 - m0) / delta_h, var.sqrt() / delta_h)
    };
    Ok(SusceptibilityEstimate {
        j0: base.params.j0,
        chi,
        chi_std,
        delta_h,
        realizations: base_nd.len(),
    })
}

/// `chi = (mean ND at h = delta_h - mean ND at h = 0) / delta_h`.
///
/// Paired runs reuse the master seed for both ensembles (common random
/// numbers). Unpaired runs draw the field ensemble from
/// `mix(master_seed, 1)`.
pub fn susceptibility(
    params: &ModelParams,
    delta_h: f64,
    realization_count: usize,
    paired: bool,
) -> Result<SusceptibilityEstimate> {
    if !(delta_h > 0.0 && delta_h.is_finite()) {
        return Err(CascadeError::param("delta_h", "must be positive"));
    }
    if params.h != 0.0 {
        return Err(CascadeError::param("h", "susceptibility is taken at h = 0"));
    }
    let base = run_ensemble(params, realization_count)?;
    let mut field_params = ModelParams { h: delta_h, ..params.clone() };
    if !paired {
        field_params.master_seed = mix(params.master_seed, 1);
    }
    let field = run_ensemble(&field_params, realization_count)?;
    susceptibility_from_ensembles(&base, &field, delta_h, paired)
}

/// [`susceptibility`] at each `j0`, point `k` seeded with `point_seed(base, k)`.
pub fn susceptibility_sweep(
    base: &ModelParams,
    j0_values: &[f64],
    delta_h: f64,
    realization_count: usize,
    paired: bool,
) -> Result<Vec<SusceptibilityEstimate>> {
    let values: Vec<SweepValue> = j0_values.iter().map(|&v| SweepValue::Scalar(v)).collect();
    sweep_point_params(base, SweepAxis::J0, &values)?
        .iter()
        .map(|params| susceptibility(params, delta_h, realization_count, paired))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescueBenefit {
    pub j0: f64,
    pub h: f64,
    pub b: usize,
    /// `(mean ND at B = 0 - mean ND at B) / n`.
    pub delta_nd_over_n: f64,
    pub realizations: usize,
}

/// Fraction of firms saved by rescuing the first `b` defaults.
///
/// For each `j0` (point `k`, seed `point_seed(base, k)`) the `B = 0`
/// reference and every budget run on the same realization streams.
pub fn rescue_benefit(
    base: &ModelParams,
    j0_values: &[f64],
    b_values: &[usize],
    realization_count: usize,
) -> Result<Vec<RescueBenefit>> {
    let values: Vec<SweepValue> = j0_values.iter().map(|&v| SweepValue::Scalar(v)).collect();
    let mut rows = Vec::with_capacity(j0_values.len() * b_values.len());
    for params in sweep_point_params(base, SweepAxis::J0, &values)? {
        let reference_params = ModelParams { bailout_budget: 0, ..params.clone() };
        let reference = aggregate(&run_ensemble(&reference_params, realization_count)?)?;
        for &b in b_values {
            let mean = if b == 0 {
                reference.nd_mean
            } else {
                let budget_params = ModelParams { bailout_budget: b, ..params.clone() };
                aggregate(&run_ensemble(&budget_params, realization_count)?)?.nd_mean
            };
            rows.push(RescueBenefit {
                j0: params.j0,
                h: params.h,
                b,
                delta_nd_over_n: (reference.nd_mean - mean) / params.n as f64,
                realizations: realization_count,
            });
        }
    }
    Ok(rows)
}
