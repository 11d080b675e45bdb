//! Domain types and the single-firm stochastic update rule.

mod couplings;
mod params;
mod rules;
mod state;
mod update;

pub use couplings::{sample_coupling_matrix, CouplingMatrix};
pub use params::ModelParams;
pub use rules::{DefaultedSpins, TopBoundary, UpdateRules};
pub use state::{apply_spin, panic_field_active, EconomyState, RatingGrade, Spin};
pub use update::{conditional_distribution, SpinDistribution};

pub(crate) use update::{alignment_sums, distribution_from_sums, restricts_top};
