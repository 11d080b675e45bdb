//! Deterministic seed derivation for ensembles and sweeps.
//!
//! Every realization runs on its own ChaCha8 stream. The stream seed is
//! derived from the master seed with [`mix`], a SplitMix64-style
//! finalizer applied to the master seed xor the finalized index:
//!
//! ```text
//! finalize(z) = let z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
//!               let z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
//!               z ^ (z >> 31)
//! mix(seed, index) = finalize(seed ^ finalize(index + 0x9E3779B97F4A7C15))
//! ```
//!
//! All arithmetic wraps modulo 2^64. A sweep point `k` runs its ensemble with
//! master seed `mix(base_seed, k)`, and realization `r` of an ensemble with
//! master seed `m` uses `mix(m, r)`. The 64-bit result seeds two ChaCha8
//! generators via `ChaCha8Rng::seed_from_u64`: stream 0 drives couplings,
//! initial conditions and dynamics; stream 1 supplies bailout redraws only.
//! Keeping bailouts on their own stream means runs that differ only in the
//! budget consume identical dynamics randomness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combines a seed with an index into a new, well-separated seed.
pub fn mix(seed: u64, index: u64) -> u64 {
    finalize(seed ^ finalize(index.wrapping_add(GOLDEN_GAMMA)))
}

/// Master seed used by sweep point `point`.
pub fn point_seed(base_seed: u64, point: usize) -> u64 {
    mix(base_seed, point as u64)
}

/// Seed of realization `realization` within an ensemble.
pub fn realization_seed(master_seed: u64, realization: usize) -> u64 {
    mix(master_seed, realization as u64)
}

/// Random streams of one realization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizationStreams {
    pub dynamics: ChaCha8Rng,
    pub rescue: ChaCha8Rng,
}

impl RealizationStreams {
    pub fn from_seed(seed: u64) -> Self {
        let dynamics = ChaCha8Rng::seed_from_u64(seed);
        let mut rescue = dynamics.clone();
        rescue.set_stream(1);
        RealizationStreams { dynamics, rescue }
    }

    /// Streams of realization `realization` within an ensemble.
    pub fn for_realization(master_seed: u64, realization: usize) -> Self {
        Self::from_seed(realization_seed(master_seed, realization))
    }
}
