//! Asynchronous rating dynamics, bailouts and seeded ensembles.
//!
//! Each realization owns a [`RealizationStreams`] pair. The dynamics stream
//! is consumed in this order:
//!
//! 1. `n(n-1)/2` normal variates for the couplings (ensemble runs only);
//! 2. for each firm in index order, a rating `U{1..7}` then a uniform `[0,1)`
//!    that selects the initial spin (`-1` below `p0`, `+1` below `p0 + q0`,
//!    else `0`);
//! 3. per single-firm update, a firm index `U{0..n-1}`, then, unless the firm
//!    is defaulted and frozen, a uniform `[0,1)` that selects its spin by
//!    inverse CDF over `(-1, 0, +1)`.
//!
//! The rescue stream yields, per bailout, a rating `U{1..7}` followed by a
//! spin `U{-1,0,+1}`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CascadeError, Result};
use crate::model::{
    alignment_sums, apply_spin, distribution_from_sums, restricts_top, sample_coupling_matrix,
    CouplingMatrix, DefaultedSpins, EconomyState, ModelParams, RatingGrade, Spin,
};
use crate::seed::RealizationStreams;

/// Outcome of one realization, observed at time-step boundaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationResult {
    /// Cumulative defaults after each step; index 0 is the initial state.
    pub nd_trajectory: Vec<usize>,
    /// Rescues spent by the end of each step, aligned with `nd_trajectory`.
    pub rescues_trajectory: Vec<usize>,
    pub rescues_used: usize,
    /// First step at whose end the panic latch was set.
    pub panic_onset_step: Option<usize>,
    /// Firms per rating grade at the end, indexed by grade.
    pub final_grade_counts: [usize; 8],
}

impl RealizationResult {
    pub fn final_defaults(&self) -> usize {
        *self.nd_trajectory.last().expect("trajectory always holds the initial point")
    }

    /// Whether the panic field was active at the end of step `t`.
    pub fn panic_active_at(&self, t: usize) -> bool {
        self.panic_onset_step.is_some_and(|onset| onset <= t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub params: ModelParams,
    pub realizations: Vec<RealizationResult>,
}

impl EnsembleResult {
    pub fn realization_count(&self) -> usize {
        self.realizations.len()
    }

    pub fn final_defaults(&self) -> impl Iterator<Item = usize> + '_ {
        self.realizations.iter().map(RealizationResult::final_defaults)
    }
}

fn random_rating<R: Rng + ?Sized>(rng: &mut R) -> RatingGrade {
    RatingGrade::new(rng.gen_range(1..=RatingGrade::MAX.value())).expect("range is within grades")
}

/// Fresh economy: ratings uniform on `1..=7`, spins drawn with `(p0, q0)`.
pub fn init_state<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<EconomyState> {
    params.validate()?;
    let mut ratings = Vec::with_capacity(params.n);
    let mut spins = Vec::with_capacity(params.n);
    for _ in 0..params.n {
        ratings.push(random_rating(rng));
        let u: f64 = rng.gen();
        spins.push(if u < params.p0 {
            Spin::Down
        } else if u < params.p0 + params.q0 {
            Spin::Up
        } else {
            Spin::Flat
        });
    }
    EconomyState::new(ratings, spins)
}

/// Single-firm update of firm `i`, including the rescue and panic checks.
///
/// A frozen defaulted firm is left untouched and consumes no randomness.
/// Otherwise a spin is sampled and applied. A firm that has just hit 0 is
/// rescued while budget remains; after that, any default present latches the
/// panic field.
pub fn update_firm(
    i: usize,
    state: &mut EconomyState,
    couplings: &CouplingMatrix,
    params: &ModelParams,
    streams: &mut RealizationStreams,
) -> Result<()> {
    let rating = state.ratings()[i];
    if rating.is_default() && params.rules.defaulted == DefaultedSpins::Frozen {
        return Ok(());
    }
    let h_eff = if state.panic_latched() { params.h } else { 0.0 };
    let sums = alignment_sums(couplings.row(i), state.spins());
    let distribution = distribution_from_sums(sums, h_eff, restricts_top(rating.is_top(), params.rules));
    let spin = distribution.sample(streams.dynamics.gen());
    apply_spin(i, spin, state, params.rules)?;

    let newly_defaulted = !rating.is_default() && state.ratings()[i].is_default();
    if newly_defaulted && state.rescues_used() < params.bailout_budget {
        let rating = random_rating(&mut streams.rescue);
        let spin = Spin::ALL[streams.rescue.gen_range(0..3)];
        state.rescue(i, rating, spin);
    }
    if state.defaults() > 0 {
        state.latch_panic();
    }
    Ok(())
}

/// One time step: `n` single-firm updates on firms drawn uniformly with
/// replacement.
pub fn advance_time_step(
    state: &mut EconomyState,
    couplings: &CouplingMatrix,
    params: &ModelParams,
    streams: &mut RealizationStreams,
) -> Result<()> {
    let n = state.n();
    if couplings.n() != n {
        return Err(CascadeError::param(
            "n",
            format!("coupling matrix has dimension {}, state has {n} firms", couplings.n()),
        ));
    }
    for _ in 0..n {
        let i = streams.dynamics.gen_range(0..n);
        update_firm(i, state, couplings, params, streams)?;
    }
    Ok(())
}

/// Initializes an economy on the given couplings and runs `params.steps` steps.
pub fn run_realization(
    params: &ModelParams,
    couplings: &CouplingMatrix,
    streams: &mut RealizationStreams,
) -> Result<RealizationResult> {
    params.validate()?;
    if couplings.n() != params.n {
        return Err(CascadeError::param(
            "n",
            format!("coupling matrix has dimension {}, expected {}", couplings.n(), params.n),
        ));
    }
    let mut state = init_state(params, &mut streams.dynamics)?;
    let mut nd_trajectory = Vec::with_capacity(params.steps + 1);
    let mut rescues_trajectory = Vec::with_capacity(params.steps + 1);
    nd_trajectory.push(state.defaults());
    rescues_trajectory.push(state.rescues_used());
    let mut panic_onset_step = None;
    for t in 1..=params.steps {
        advance_time_step(&mut state, couplings, params, streams)?;
        nd_trajectory.push(state.defaults());
        rescues_trajectory.push(state.rescues_used());
        if panic_onset_step.is_none() && state.panic_latched() {
            panic_onset_step = Some(t);
        }
    }
    Ok(RealizationResult {
        nd_trajectory,
        rescues_trajectory,
        rescues_used: state.rescues_used(),
        panic_onset_step,
        final_grade_counts: state.grade_counts(),
    })
}

/// Realization `index` of the ensemble defined by `params`: fresh couplings
/// and initial conditions on the streams derived from `(master_seed, index)`.
pub fn run_ensemble_member(params: &ModelParams, index: usize) -> Result<RealizationResult> {
    let mut streams = RealizationStreams::for_realization(params.master_seed, index);
    let couplings = sample_coupling_matrix(params.n, params.j0, params.sigma_j, &mut streams.dynamics)?;
    run_realization(params, &couplings, &mut streams)
}

/// Runs `realization_count` independent realizations in parallel.
///
/// The result does not depend on the number of worker threads.
pub fn run_ensemble(params: &ModelParams, realization_count: usize) -> Result<EnsembleResult> {
    params.validate()?;
    if realization_count == 0 {
        return Err(CascadeError::param("realizations", "must be at least 1"));
    }
    let realizations = (0..realization_count)
        .into_par_iter()
        .map(|k| run_ensemble_member(params, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleResult {
        params: params.clone(),
        realizations,
    })
}
