//! Independent oracles for the stochastic engine: exact enumeration for two
//! firms, the decoupled single-firm Markov chain, and replay determinism.

mod common;

use cascade_core::analysis::{aggregate, mean_and_std};
use cascade_core::{advance_time_step, init_state, run_ensemble, sample_coupling_matrix, ModelParams, RealizationStreams, UpdateRules};
use common::{decoupled_absorption, enumerate_one_step, two_firm_chi_square};

fn chi_square_two_firms(rules: UpdateRules, seed: u64) {
    let (stat, critical) = two_firm_chi_square(rules, seed);
    println!("{rules:?}: chi2 = {stat:.2}, critical {critical:.2}");
    assert!(stat < critical, "chi-square {stat} exceeds {critical}");
}

#[test]
fn two_firm_step_matches_enumeration() {
    chi_square_two_firms(UpdateRules::default(), 1);
}

#[test]
fn two_firm_step_matches_enumeration_restricted_rules() {
    chi_square_two_firms(UpdateRules::RESTRICTED, 2);
}

#[test]
fn oracle_sanity() {
    // Single update per step leaves the fixed-count chain.
    let fixed_eight = decoupled_absorption(1, 8, 0.5);
    assert!((fixed_eight - 0.2020216865895878).abs() < 1e-12);
    let mixed = decoupled_absorption(1000, 8, 0.5);
    assert!((mixed - 0.19837371913923046).abs() < 1e-9);
}

fn check_decoupled_limit(rules: UpdateRules, top_stay: f64, seed: u64) {
    let params = ModelParams {
        n: 1000,
        j0: 0.0,
        sigma_j: 0.0,
        h: 0.0,
        master_seed: seed,
        rules,
        ..Default::default()
    };
    let realizations = 200;
    let ensemble = run_ensemble(&params, realizations).unwrap();
    let stats = aggregate(&ensemble).unwrap();
    let expected = decoupled_absorption(1000, 8, top_stay);
    let se = stats.nd_over_n_std / (realizations as f64).sqrt();
    println!("{rules:?}: ND/N = {:.5} +- {se:.5}, chain {expected:.5}", stats.nd_over_n_mean);
    assert!((stats.nd_over_n_mean - expected).abs() < 3.0 * se);
}

#[test]
fn decoupled_limit_matches_markov_chain() {
    check_decoupled_limit(UpdateRules::default(), 2.0 / 3.0, 31);
}

#[test]
fn decoupled_limit_matches_markov_chain_restricted_rules() {
    check_decoupled_limit(UpdateRules::RESTRICTED, 0.5, 32);
}

#[test]
fn decoupled_spins_are_unbiased() {
    // Mean spin over all firms after eight steps, per realization.
    let params = ModelParams { n: 1000, j0: 0.0, sigma_j: 0.0, h: 0.0, ..Default::default() };
    let mut means = Vec::new();
    for k in 0..500 {
        let mut streams = RealizationStreams::for_realization(77, k);
        let couplings = sample_coupling_matrix(params.n, 0.0, 0.0, &mut streams.dynamics).unwrap();
        let mut state = init_state(&params, &mut streams.dynamics).unwrap();
        for _ in 0..params.steps {
            advance_time_step(&mut state, &couplings, &params, &mut streams).unwrap();
        }
        let total: f64 = state.spins().iter().map(|s| s.value() as f64).sum();
        means.push(total / params.n as f64);
    }
    let (mean, std) = mean_and_std(&means);
    let se = std / (means.len() as f64).sqrt();
    println!("mean spin {mean:.5} +- {se:.5}");
    assert!(mean.abs() < 3.0 * se);
}

#[test]
fn ensembles_replay_bit_identically() {
    let params = ModelParams { n: 300, j0: 0.015, h: 0.1, bailout_budget: 2, master_seed: 5, ..Default::default() };
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_ensemble(&params, 6).unwrap());
    let parallel = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| run_ensemble(&params, 6).unwrap());
    assert_eq!(serial, parallel);
    assert_eq!(serial, run_ensemble(&params, 6).unwrap());
    let other = run_ensemble(&ModelParams { master_seed: 6, ..params }, 6).unwrap();
    assert_ne!(serial.realizations, other.realizations);
}

#[test]
fn exact_mean_defaults_grow_with_field() {
    for rules in [UpdateRules::default(), UpdateRules::RESTRICTED] {
        let means: Vec<f64> = [0.0, 0.3, 1.0, 3.0]
            .iter()
            .map(|&h| {
                enumerate_one_step(0.4, h, 1.0 / 3.0, 1.0 / 3.0, rules)
                    .iter()
                    .map(|(&(a, b), p)| p * ((a == 0) as u8 + (b == 0) as u8) as f64)
                    .sum()
            })
            .collect();
        assert!(means.windows(2).all(|w| w[1] > w[0]), "{means:?}");
    }
}
