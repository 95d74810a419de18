//! Seeded Brownian paths and Brownian-bridge refinement.
//!
//! Refinement keeps every existing value and fills new interior points from
//! the bridge law, so a coarse path and all of its refinements are one
//! realization observed at different resolutions.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::grid::TimeGrid;
use crate::path::SamplePath;
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl BrownianPath {
    /// Samples `B` on `grid` from the generator seeded with `seed`.
    pub fn sample(grid: &TimeGrid, seed: u64) -> Self {
        Self::sample_with(grid, &mut rng::stream(seed, 0))
    }

    /// Samples `B` on `grid`: independent `N(0, t_i − t_{i−1})` increments.
    pub fn sample_with<R: Rng + ?Sized>(grid: &TimeGrid, rng: &mut R) -> Self {
        let pts = grid.points();
        let mut values = Vec::with_capacity(pts.len());
        values.push(0.0);
        let mut b = 0.0;
        for w in pts.windows(2) {
            let z: f64 = rng.sample(StandardNormal);
            b += z * (w[1] - w[0]).sqrt();
            values.push(b);
        }
        Self {
            grid: grid.clone(),
            values,
        }
    }

    /// The identically zero path (noiseless diagnostics).
    pub fn zero(grid: &TimeGrid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.points().len()],
        }
    }

    /// Wraps explicit values; the first value must be 0.
    pub fn from_values(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.points().len() {
            return invalid("Brownian path length does not match its grid");
        }
        if values[0] != 0.0 {
            return invalid("Brownian path must start at 0");
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_sample_path(&self) -> SamplePath {
        SamplePath::from_parts(self.grid.clone(), self.values.clone())
    }

    /// Refines onto `fine` using the generator seeded with `seed`.
    pub fn bridge_refine(&self, fine: &TimeGrid, seed: u64) -> Result<Self> {
        self.bridge_refine_with(fine, &mut rng::stream(seed, 0))
    }

    /// Refines onto `fine`, which must contain every point of this path's
    /// grid. Existing values are copied exactly; each new point `t` between
    /// the previous filled point `a` and the next coarse point `b` is drawn
    /// from `N(B(a) + (t−a)/(b−a)·(B(b)−B(a)), (t−a)(b−t)/(b−a))`.
    pub fn bridge_refine_with<R: Rng + ?Sized>(&self, fine: &TimeGrid, rng: &mut R) -> Result<Self> {
        let Some(idx) = self.grid.embedding_in(fine) else {
            return invalid("fine grid does not contain every point of the coarse grid");
        };
        let fp = fine.points();
        let mut values = vec![0.0; fp.len()];
        for (k, w) in idx.windows(2).enumerate() {
            let (lo, hi) = (w[0], w[1]);
            values[lo] = self.values[k];
            values[hi] = self.values[k + 1];
            let tb = fp[hi];
            let bb = self.values[k + 1];
            for j in lo + 1..hi {
                let (ta, ba) = (fp[j - 1], values[j - 1]);
                let t = fp[j];
                let mean = ba + (t - ta) / (tb - ta) * (bb - ba);
                let var = (t - ta) * (tb - t) / (tb - ta);
                let z: f64 = rng.sample(StandardNormal);
                values[j] = mean + z * var.sqrt();
            }
        }
        Ok(Self {
            grid: fine.clone(),
            values,
        })
    }

    /// Values at the points of a coarser grid nested in this one.
    pub fn restrict(&self, coarse: &TimeGrid) -> Result<Self> {
        let Some(idx) = coarse.embedding_in(&self.grid) else {
            return invalid("coarse grid is not nested in the Brownian grid");
        };
        Ok(Self {
            grid: coarse.clone(),
            values: idx.iter().map(|&j| self.values[j]).collect(),
        })
    }
}
