//! Homogenized dynamics of the spin fractions.
//!
//! With all couplings replaced by their mean `J0` and `jtilde = J0 * N`, the
//! probabilities `p` of `s = -1` and `q` of `s = +1` evolve as
//!
//! ```text
//! p' = exp(jtilde p + h) / D,   q' = exp(jtilde q) / D,
//! D  = exp(jtilde p + h) + exp(jtilde q) + exp(jtilde (1 - p - q))
//! ```
//!
//! with the field applied from the first iteration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CascadeError, Result};

/// Fractions of firms with `s = -1` (`p`) and `s = +1` (`q`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldPoint {
    pub p: f64,
    pub q: f64,
}

impl MeanFieldPoint {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        let point = MeanFieldPoint { p, q };
        if point.is_valid() {
            Ok(point)
        } else {
            Err(CascadeError::InvalidInput(format!("({p}, {q}) is not on the simplex")))
        }
    }

    pub fn is_valid(&self) -> bool {
        self.p.is_finite()
            && self.q.is_finite()
            && self.p >= 0.0
            && self.q >= 0.0
            && self.p + self.q <= 1.0 + 1e-12
    }

    fn distance(&self, other: &MeanFieldPoint) -> f64 {
        (self.p - other.p).abs().max((self.q - other.q).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldParams {
    /// Mean coupling times the number of firms.
    pub jtilde: f64,
    pub h: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl MeanFieldParams {
    pub const DEFAULT_TOL: f64 = 1e-10;
    pub const DEFAULT_MAX_ITER: usize = 100_000;
    pub const DEFAULT_RESOLUTION: usize = 101;

    pub fn new(jtilde: f64, h: f64) -> Self {
        MeanFieldParams {
            jtilde,
            h,
            tol: Self::DEFAULT_TOL,
            max_iter: Self::DEFAULT_MAX_ITER,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.jtilde.is_finite() {
            return Err(CascadeError::param("jtilde", "must be finite"));
        }
        if !(self.h.is_finite() && self.h >= 0.0) {
            return Err(CascadeError::param("h", "must be finite and non-negative"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(CascadeError::param("tol", "must be positive"));
        }
        if self.max_iter == 0 {
            return Err(CascadeError::param("max_iter", "must be at least 1"));
        }
        Ok(())
    }
}

/// One application of the homogenized map.
pub fn mf_step(point: MeanFieldPoint, params: &MeanFieldParams) -> MeanFieldPoint {
    let MeanFieldPoint { p, q } = point;
    let down = params.jtilde * p + params.h;
    let up = params.jtilde * q;
    let flat = params.jtilde * (1.0 - p - q);
    // Shift by the largest exponent; the ratios are unchanged.
    let max = down.max(up).max(flat);
    let w_down = (down - max).exp();
    let w_up = (up - max).exp();
    let w_flat = (flat - max).exp();
    let d = w_down + w_up + w_flat;
    MeanFieldPoint {
        p: w_down / d,
        q: w_up / d,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointResult {
    pub point: MeanFieldPoint,
    /// The iterate before `point`; differs noticeably from it on cycles.
    pub previous: MeanFieldPoint,
    pub converged: bool,
    pub iterations: usize,
}

/// Iterates [`mf_step`] until successive iterates differ by less than `tol`
/// in max-norm, or `max_iter` steps have been taken.
pub fn mf_fixed_point(start: MeanFieldPoint, params: &MeanFieldParams) -> FixedPointResult {
    let mut previous = start;
    let mut point = start;
    for iteration in 1..=params.max_iter {
        previous = point;
        point = mf_step(point, params);
        if point.distance(&previous) < params.tol {
            return FixedPointResult {
                point,
                previous,
                converged: true,
                iterations: iteration,
            };
        }
    }
    FixedPointResult {
        point,
        previous,
        converged: false,
        iterations: params.max_iter,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinCell {
    pub start: MeanFieldPoint,
    pub result: FixedPointResult,
}

/// Fixed points reached from a uniform grid of starts on the simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinGrid {
    pub resolution: usize,
    pub params: MeanFieldParams,
    /// Ordered by `p0` index, then `q0` index.
    pub cells: Vec<BasinCell>,
}

impl BasinGrid {
    /// Converged values of `p_inf`, sorted and merged when closer than `tol`.
    pub fn distinct_p_inf(&self, tol: f64) -> Vec<f64> {
        let mut values: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| c.result.converged)
            .map(|c| c.result.point.p)
            .collect();
        values.sort_by(f64::total_cmp);
        let mut distinct: Vec<f64> = Vec::new();
        for v in values {
            if distinct.last().is_none_or(|&last| v - last > tol) {
                distinct.push(v);
            }
        }
        distinct
    }
}

/// Runs [`mf_fixed_point`] from every grid point `(i, j) / (resolution - 1)`
/// with `i + j <= resolution - 1`.
pub fn basin_map(params: &MeanFieldParams, resolution: usize) -> Result<BasinGrid> {
    params.validate()?;
    if resolution < 2 {
        return Err(CascadeError::param("resolution", "must be at least 2"));
    }
    let last = resolution - 1;
    let starts: Vec<(usize, usize)> = (0..=last)
        .flat_map(|i| (0..=last - i).map(move |j| (i, j)))
        .collect();
    let cells = starts
        .into_par_iter()
        .map(|(i, j)| {
            let start = MeanFieldPoint {
                p: i as f64 / last as f64,
                q: j as f64 / last as f64,
            };
            BasinCell {
                start,
                result: mf_fixed_point(start, params),
            }
        })
        .collect();
    Ok(BasinGrid {
        resolution,
        params: *params,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(p: f64, q: f64) -> MeanFieldPoint {
        MeanFieldPoint::new(p, q).unwrap()
    }

    #[test]
    fn uncoupled_map_is_constant() {
        let params = MeanFieldParams::new(0.0, 0.0);
        for start in [pt(0.0, 0.0), pt(0.9, 0.1), pt(0.2, 0.5)] {
            let next = mf_step(start, &params);
            assert!((next.p - 1.0 / 3.0).abs() < 1e-15);
            assert!((next.q - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn field_closed_forms() {
        let e = 0.5f64.exp();
        let next = mf_step(pt(0.1, 0.7), &MeanFieldParams::new(0.0, 0.5));
        assert!((next.p - e / (e + 2.0)).abs() < 1e-12);
        assert!((next.q - 1.0 / (e + 2.0)).abs() < 1e-12);
        assert!((next.p - 0.45186).abs() < 5e-6);
        assert!((next.q - 0.27407).abs() < 5e-6);

        let next = mf_step(pt(0.3, 0.3), &MeanFieldParams::new(0.0, 2f64.ln()));
        assert!((next.p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_map_converges_in_two_steps() {
        let params = MeanFieldParams::new(0.0, 0.5);
        let r = mf_fixed_point(pt(1.0, 0.0), &params);
        assert!(r.converged);
        assert!(r.iterations <= 2);
        assert!((r.point.p - 0.45186).abs() < 5e-6);
    }

    #[test]
    fn corners_only_at_lowest_resolution() {
        let grid = basin_map(&MeanFieldParams::new(1.0, 0.2), 2).unwrap();
        let starts: Vec<(f64, f64)> = grid.cells.iter().map(|c| (c.start.p, c.start.q)).collect();
        assert_eq!(starts, vec![(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]);
        assert!(basin_map(&MeanFieldParams::new(1.0, 0.2), 1).is_err());
    }

    #[test]
    fn grid_covers_simplex() {
        let grid = basin_map(&MeanFieldParams::new(1.0, 0.2), 11).unwrap();
        assert_eq!(grid.cells.len(), 11 * 12 / 2);
        assert!(grid.cells.iter().all(|c| c.start.is_valid()));
    }

    #[test]
    fn cycles_are_flagged_not_errors() {
        let params = MeanFieldParams { max_iter: 3, ..MeanFieldParams::new(3.5, 0.1) };
        let r = mf_fixed_point(pt(0.2, 0.2), &params);
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
        assert_eq!(mf_step(r.previous, &params), r.point);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(MeanFieldParams { tol: 0.0, ..MeanFieldParams::new(1.0, 0.0) }.validate().is_err());
        assert!(MeanFieldParams { max_iter: 0, ..MeanFieldParams::new(1.0, 0.0) }.validate().is_err());
        assert!(MeanFieldParams::new(1.0, -0.1).validate().is_err());
        assert!(MeanFieldPoint::new(0.7, 0.7).is_err());
    }
}
