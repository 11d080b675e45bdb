use crate::error::{CascadeError, Result};

use super::{CouplingMatrix, DefaultedSpins, EconomyState, Spin, TopBoundary, UpdateRules};

/// Probabilities of the next rating change of one firm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinDistribution {
    pub down: f64,
    pub flat: f64,
    pub up: f64,
}

impl SpinDistribution {
    pub fn prob(&self, s: Spin) -> f64 {
        match s {
            Spin::Down => self.down,
            Spin::Flat => self.flat,
            Spin::Up => self.up,
        }
    }

    /// Inverse-CDF sampling from a uniform `u` in `[0, 1)`.
    pub fn sample(&self, u: f64) -> Spin {
        if u < self.down {
            Spin::Down
        } else if self.up == 0.0 || u < self.down + self.flat {
            Spin::Flat
        } else {
            Spin::Up
        }
    }
}

const LANES: usize = 4;

/// Sums of `row[j]` over firms whose spin is `-1`, `0` and `+1`.
///
/// Accumulates in four interleaved lanes so the loop pipelines; the summation
/// order is fixed, so results are reproducible.
pub(crate) fn alignment_sums(row: &[f64], spins: &[Spin]) -> [f64; 3] {
    debug_assert_eq!(row.len(), spins.len());
    let mut down = [0.0f64; LANES];
    let mut up = [0.0f64; LANES];
    let mut flat = [0.0f64; LANES];
    let row_chunks = row.chunks_exact(LANES);
    let spin_chunks = spins.chunks_exact(LANES);
    let (row_tail, spin_tail) = (row_chunks.remainder(), spin_chunks.remainder());
    for (js, ss) in row_chunks.zip(spin_chunks) {
        for k in 0..LANES {
            let (j, s) = (js[k], ss[k] as i8);
            down[k] += if s < 0 { j } else { 0.0 };
            up[k] += if s > 0 { j } else { 0.0 };
            flat[k] += if s == 0 { j } else { 0.0 };
        }
    }
    for (k, (&j, &s)) in row_tail.iter().zip(spin_tail).enumerate() {
        match s {
            Spin::Down => down[k] += j,
            Spin::Flat => flat[k] += j,
            Spin::Up => up[k] += j,
        }
    }
    let total = |a: [f64; LANES]| (a[0] + a[1]) + (a[2] + a[3]);
    [total(down), total(flat), total(up)]
}

/// Normalized exponential weights; `at_top` drops `+1` from the support.
pub(crate) fn distribution_from_sums(sums: [f64; 3], h_eff: f64, at_top: bool) -> SpinDistribution {
    let down = sums[0] + h_eff;
    let flat = sums[1];
    let up = sums[2];
    let max = if at_top { down.max(flat) } else { down.max(flat).max(up) };
    let w_down = (down - max).exp();
    let w_flat = (flat - max).exp();
    let w_up = if at_top { 0.0 } else { (up - max).exp() };
    let z = w_down + w_flat + w_up;
    SpinDistribution {
        down: w_down / z,
        flat: w_flat / z,
        up: w_up / z,
    }
}

/// Distribution of the next spin of firm `i` given everybody else.
///
/// Weights are `exp(sum_{j != i} J_ij [s_j = s] + h [s = -1])`, with the field
/// only present once the panic latch is set. Under
/// [`TopBoundary::RestrictSpin`] a firm at the top grade has its support
/// reduced to `{-1, 0}` and renormalized. Defaulted neighbours count with
/// their current spin. Asking for a defaulted firm is a contract violation
/// under [`DefaultedSpins::Frozen`].
pub fn conditional_distribution(
    i: usize,
    state: &EconomyState,
    couplings: &CouplingMatrix,
    h: f64,
    rules: UpdateRules,
) -> Result<SpinDistribution> {
    if couplings.n() != state.n() {
        return Err(CascadeError::InvalidInput(format!(
            "coupling matrix has dimension {}, state has {} firms",
            couplings.n(),
            state.n()
        )));
    }
    let rating = *state
        .ratings()
        .get(i)
        .ok_or_else(|| CascadeError::ContractViolation(format!("firm index {i} out of range")))?;
    if rating.is_default() && rules.defaulted == DefaultedSpins::Frozen {
        return Err(CascadeError::ContractViolation(format!(
            "firm {i} has defaulted and is never updated"
        )));
    }
    let sums = alignment_sums(couplings.row(i), state.spins());
    let h_eff = if state.panic_latched() { h } else { 0.0 };
    Ok(distribution_from_sums(sums, h_eff, restricts_top(rating.is_top(), rules)))
}

pub(crate) fn restricts_top(at_top: bool, rules: UpdateRules) -> bool {
    at_top && rules.top == TopBoundary::RestrictSpin
}
