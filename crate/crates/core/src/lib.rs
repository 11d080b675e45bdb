//! Credit-rating cascade model.
//!
//! Firms carry an effective credit rating in `0..=7` and a last rating
//! change in `{-1, 0, +1}`. Changes are resampled asynchronously from a
//! Potts-like conditional distribution with random symmetric couplings; the
//! first unrescued default latches a global panic field that biases every
//! firm towards downgrades. The crate provides the stochastic engine,
//! seeded ensembles, aggregate statistics and sweeps, and the homogenized
//! mean-field map with its basin-of-attraction grid.

pub mod analysis;
pub mod engine;
pub mod error;
pub mod meanfield;
pub mod model;
pub mod seed;

pub use engine::{
    advance_time_step, init_state, run_ensemble, run_ensemble_member, run_realization,
    update_firm, EnsembleResult, RealizationResult,
};
pub use error::{CascadeError, Result};
pub use model::{
    apply_spin, conditional_distribution, panic_field_active, sample_coupling_matrix,
    CouplingMatrix, DefaultedSpins, EconomyState, ModelParams, RatingGrade, Spin, SpinDistribution,
    TopBoundary, UpdateRules,
};
pub use seed::RealizationStreams;
