//! Oracles shared by the integration test targets.

use std::collections::HashMap;

use cascade_core::{
    advance_time_step, init_state, sample_coupling_matrix, DefaultedSpins, ModelParams, RealizationStreams,
    TopBoundary, UpdateRules,
};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

/// Exact two-firm model written from scratch: state is (ratings, spins, panic).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Pair {
    r: [i8; 2],
    s: [i8; 2],
    panic: bool,
}

pub fn enumerate_one_step(j: f64, h: f64, p0: f64, q0: f64, rules: UpdateRules) -> HashMap<(i8, i8), f64> {
    let mut dist: HashMap<Pair, f64> = HashMap::new();
    let spin_prob = |s: i8| match s {
        -1 => p0,
        1 => q0,
        _ => 1.0 - p0 - q0,
    };
    for r0 in 1..=7 {
        for r1 in 1..=7 {
            for s0 in [-1i8, 0, 1] {
                for s1 in [-1i8, 0, 1] {
                    let w = (1.0 / 49.0) * spin_prob(s0) * spin_prob(s1);
                    if w > 0.0 {
                        let state = Pair { r: [r0, r1], s: [s0, s1], panic: false };
                        *dist.entry(state).or_default() += w;
                    }
                }
            }
        }
    }
    // One time step of n = 2 is two single-firm updates.
    for _ in 0..2 {
        let mut next: HashMap<Pair, f64> = HashMap::new();
        for (state, w) in dist {
            for firm in 0..2 {
                let other = 1 - firm;
                let w_firm = w * 0.5;
                if state.r[firm] == 0 && rules.defaulted == DefaultedSpins::Frozen {
                    *next.entry(state).or_default() += w_firm;
                    continue;
                }
                let at_top = state.r[firm] == 7;
                let candidates: Vec<i8> = if at_top && rules.top == TopBoundary::RestrictSpin {
                    vec![-1, 0]
                } else {
                    vec![-1, 0, 1]
                };
                let weight = |s: i8| {
                    let align = if state.s[other] == s { j } else { 0.0 };
                    let field = if state.panic && s == -1 { h } else { 0.0 };
                    (align + field).exp()
                };
                let z: f64 = candidates.iter().map(|&s| weight(s)).sum();
                for &s in &candidates {
                    let mut after = state;
                    if state.r[firm] == 0 {
                        after.s[firm] = s;
                    } else if at_top && s == 1 {
                        after.s[firm] = 1;
                    } else {
                        after.r[firm] += s;
                        after.s[firm] = s;
                        if after.r[firm] == 0 && rules.defaulted == DefaultedSpins::Frozen {
                            after.s[firm] = 0;
                        }
                    }
                    if after.r.contains(&0) {
                        after.panic = true;
                    }
                    *next.entry(after).or_default() += w_firm * weight(s) / z;
                }
            }
        }
        dist = next;
    }
    let mut ratings: HashMap<(i8, i8), f64> = HashMap::new();
    for (state, w) in dist {
        *ratings.entry((state.r[0], state.r[1])).or_default() += w;
    }
    ratings
}

/// Absorption probability of one decoupled firm after `steps` sweeps of `n`
/// uniformly targeted updates, from a uniform start on grades 1..=7.
pub fn decoupled_absorption(n: usize, steps: usize, top_stay: f64) -> f64 {
    let mut p = [[0.0f64; 8]; 8];
    p[0][0] = 1.0;
    for r in 1..7 {
        for d in [-1i32, 0, 1] {
            p[r][(r as i32 + d) as usize] += 1.0 / 3.0;
        }
    }
    p[7][6] = 1.0 - top_stay;
    p[7][7] = top_stay;

    let trials = (steps * n) as u64;
    let updates = Binomial::new(1.0 / n as f64, trials).unwrap();
    let mut row = [0.0f64; 8];
    row[1..].fill(1.0 / 7.0);
    let mut total = 0.0;
    let mut k = 0u64;
    loop {
        let weight = updates.pmf(k);
        total += weight * row[0];
        if k > 10 && weight < 1e-18 {
            break;
        }
        let mut next = [0.0f64; 8];
        for from in 0..8 {
            for to in 0..8 {
                next[to] += row[from] * p[from][to];
            }
        }
        row = next;
        k += 1;
    }
    total
}

/// Chi-square statistic of 10^6 simulated two-firm steps against the exact
/// enumeration, with its critical value at the 10^-3 level.
pub fn two_firm_chi_square(rules: UpdateRules, seed: u64) -> (f64, f64) {
    let (j, h, p0, q0) = (0.7, 0.9, 0.25, 0.45);
    let exact = enumerate_one_step(j, h, p0, q0, rules);
    assert!((exact.values().sum::<f64>() - 1.0).abs() < 1e-12);

    let params = ModelParams {
        n: 2,
        j0: j,
        sigma_j: 0.0,
        h,
        steps: 1,
        p0,
        q0,
        rules,
        ..Default::default()
    };
    let runs = 1_000_000usize;
    let mut counts: HashMap<(i8, i8), usize> = HashMap::new();
    let mut streams = RealizationStreams::from_seed(seed);
    for _ in 0..runs {
        let couplings = sample_coupling_matrix(2, j, 0.0, &mut streams.dynamics).unwrap();
        let mut state = init_state(&params, &mut streams.dynamics).unwrap();
        advance_time_step(&mut state, &couplings, &params, &mut streams).unwrap();
        let r = state.ratings();
        *counts.entry((r[0].value() as i8, r[1].value() as i8)).or_default() += 1;
    }
    for cell in counts.keys() {
        assert!(exact.get(cell).copied().unwrap_or(0.0) > 0.0, "impossible cell {cell:?} observed");
    }
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (cell, p) in &exact {
        let expected = p * runs as f64;
        if expected < 5.0 {
            continue;
        }
        let observed = counts.get(cell).copied().unwrap_or(0) as f64;
        stat += (observed - expected).powi(2) / expected;
        cells += 1;
    }
    let critical = ChiSquared::new((cells - 1) as f64).unwrap().inverse_cdf(1.0 - 1e-3);
    (stat, critical)
}
