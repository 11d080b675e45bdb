//! Fixtures shared by the benchmarks.

use cascade_core::{init_state, sample_coupling_matrix, CouplingMatrix, EconomyState, ModelParams, RealizationStreams};

/// Baseline economy of `n` firms at mean coupling `j0`, with its couplings and streams.
pub fn economy(n: usize, j0: f64, seed: u64) -> (ModelParams, CouplingMatrix, EconomyState, RealizationStreams) {
    let params = ModelParams { n, j0, h: 0.08, master_seed: seed, ..Default::default() };
    let mut streams = RealizationStreams::from_seed(seed);
    let couplings = sample_coupling_matrix(n, j0, params.sigma_j, &mut streams.dynamics).expect("valid parameters");
    let state = init_state(&params, &mut streams.dynamics).expect("valid parameters");
    (params, couplings, state, streams)
}
