//! Partitions of `[0, T]`.

use crate::error::{invalid, Result};

/// Relative tolerance for comparing constructed grid points.
pub const GRID_RTOL: f64 = 1e-12;

/// A partition `0 = t_0 < t_1 < ... < t_n = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    /// Builds a grid from explicit points, checking that they start at 0,
    /// are finite and strictly increasing, and contain at least one step.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return invalid("a time grid needs at least two points");
        }
        if points[0] != 0.0 {
            return invalid(format!("grid must start at 0, got {}", points[0]));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return invalid("grid points must be finite");
        }
        if let Some(w) = points.windows(2).find(|w| w[1] <= w[0]) {
            return invalid(format!(
                "grid points must be strictly increasing ({} then {})",
                w[0], w[1]
            ));
        }
        Ok(Self { points })
    }

    /// Evenly spaced grid with `n` steps of length `horizon / n`.
    pub fn even(horizon: f64, n: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return invalid(format!("horizon must be positive, got {horizon}"));
        }
        if n == 0 {
            return invalid("number of steps must be at least 1");
        }
        let step = horizon / n as f64;
        let mut points: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
        points.push(horizon);
        Ok(Self { points })
    }

    /// Splits every step into `factor` equal substeps. The original points
    /// are copied bit-for-bit, so the result nests `self` exactly.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor < 2 {
            return invalid(format!("refinement factor must be at least 2, got {factor}"));
        }
        let mut points = Vec::with_capacity(self.steps() * factor + 1);
        for w in self.points.windows(2) {
            let h = (w[1] - w[0]) / factor as f64;
            points.push(w[0]);
            for j in 1..factor {
                points.push(w[0] + j as f64 * h);
            }
        }
        points.push(self.horizon());
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn horizon(&self) -> f64 {
        *self.points.last().expect("grid is never empty")
    }

    /// Number of steps `n` (one less than the number of points).
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn step(&self, i: usize) -> f64 {
        self.points[i + 1] - self.points[i]
    }

    /// Maximal step size δ.
    pub fn max_step(&self) -> f64 {
        self.points.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn is_even(&self) -> bool {
        let h = self.horizon() / self.steps() as f64;
        self.points
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= GRID_RTOL * self.horizon().max(h))
    }

    pub fn same_horizon(&self, other: &TimeGrid) -> bool {
        approx_eq(self.horizon(), other.horizon())
    }

    /// Positions of every point of `self` inside `fine`, or `None` if some
    /// point of `self` is missing from `fine`.
    pub fn embedding_in(&self, fine: &TimeGrid) -> Option<Vec<usize>> {
        if !self.same_horizon(fine) {
            return None;
        }
        let fp = fine.points();
        let mut idx = Vec::with_capacity(self.points.len());
        let mut j = 0;
        for &t in &self.points {
            while j < fp.len() && fp[j] < t && !approx_eq(fp[j], t) {
                j += 1;
            }
            if j == fp.len() || !approx_eq(fp[j], t) {
                return None;
            }
            idx.push(j);
            j += 1;
        }
        Some(idx)
    }

    pub fn nests_in(&self, fine: &TimeGrid) -> bool {
        self.embedding_in(fine).is_some()
    }

    /// Index of the step containing `s`: the largest `i < n` with `t_i <= s`.
    pub fn locate(&self, s: f64) -> usize {
        match self.points.partition_point(|&t| t <= s) {
            0 => 0,
            k => (k - 1).min(self.steps() - 1),
        }
    }
}

pub(crate) fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= GRID_RTOL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
