use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{CascadeError, Result};

/// Symmetric pairwise influence strengths with a zero diagonal.
///
/// Stored dense and row-major with both triangles filled, so that the row of
/// firm `i` is contiguous for the alignment sums.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl CouplingMatrix {
    /// Builds a matrix from `value(i, j)` evaluated once per pair `i < j`.
    pub fn from_upper(n: usize, mut value: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = value(i, j);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        CouplingMatrix { n, entries }
    }

    /// All off-diagonal entries equal to `value`.
    pub fn uniform(n: usize, value: f64) -> Self {
        Self::from_upper(n, |_, _| value)
    }

    /// Validates an explicit matrix: square, symmetric, zero diagonal.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(CascadeError::InvalidInput("coupling matrix is empty".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(CascadeError::InvalidInput(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(CascadeError::InvalidInput(format!("diagonal entry {i} is non-zero")));
            }
            for j in (i + 1)..n {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(CascadeError::InvalidInput(format!(
                        "entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
            }
        }
        Ok(CouplingMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Couplings of firm `i` to every firm (entry `i` is zero).
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Relabels firms: entry `(perm[i], perm[j])` of the result equals entry `(i, j)`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[perm[i] * n + perm[j]] = self.entries[i * n + j];
            }
        }
        CouplingMatrix { n, entries }
    }

    /// Off-diagonal entries in canonical order (row-major over `i < j`).
    pub fn upper_triangle(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| self.entries[i * n + j]))
    }
}

/// Draws a coupling matrix with i.i.d. `Normal(j0, sigma_j^2)` entries.
///
/// Exactly `n(n-1)/2` normal variates are consumed, row-major over pairs
/// `i < j`. Negative draws are kept.
pub fn sample_coupling_matrix<R: Rng + ?Sized>(
    n: usize,
    j0: f64,
    sigma_j: f64,
    rng: &mut R,
) -> Result<CouplingMatrix> {
    if n == 0 {
        return Err(CascadeError::param("n", "must be at least 1"));
    }
    if !(sigma_j.is_finite() && sigma_j >= 0.0) {
        return Err(CascadeError::param("sigma_j", "must be finite and non-negative"));
    }
    let normal = Normal::new(j0, sigma_j)
        .map_err(|e| CascadeError::param("sigma_j", e.to_string()))?;
    Ok(CouplingMatrix::from_upper(n, |_, _| normal.sample(rng)))
}
