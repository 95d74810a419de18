//! Batch-means Monte Carlo driver.
//!
//! Paths are split into [`BATCHES`] contiguous batches that run in
//! parallel. With [`Reduction::Ordered`] each batch is folded sequentially
//! and batches are merged in index order, so the result is bitwise
//! identical for every thread count. [`Reduction::Unordered`] also splits
//! work inside a batch and merges partial sums as they finish; results then
//! agree only up to floating-point reordering.

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::stats::{batch_bounds, estimate_from_batches, Estimate, KahanSum, BATCHES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    #[default]
    Ordered,
    Unordered,
}

/// Path count, master seed and reduction mode of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_paths: usize,
    pub seed: u64,
    pub reduction: Reduction,
}

impl McConfig {
    pub fn new(n_paths: usize, seed: u64) -> Self {
        Self {
            n_paths,
            seed,
            reduction: Reduction::Ordered,
        }
    }

    pub fn with_reduction(mut self, reduction: Reduction) -> Self {
        self.reduction = reduction;
        self
    }

    pub(crate) fn require_paths(&self, min: usize) -> Result<()> {
        if self.n_paths < min {
            return invalid(format!("n_paths must be at least {min}, got {}", self.n_paths));
        }
        Ok(())
    }
}

#[derive(Clone)]
struct Sums(Vec<KahanSum>);

impl Sums {
    fn zero(width: usize) -> Self {
        Sums(vec![KahanSum::new(); width])
    }

    fn add(mut self, v: &[f64]) -> Self {
        for (s, &x) in self.0.iter_mut().zip(v) {
            s.add(x);
        }
        self
    }

    fn merge(mut self, other: Sums) -> Self {
        for (s, o) in self.0.iter_mut().zip(other.0) {
            s.add(o.value());
        }
        self
    }
}

/// Runs `path_fn(i)` for every path index and returns one batch-means
/// estimate per output component. `path_fn` must return exactly `width`
/// values.
pub fn run_paths<F>(cfg: &McConfig, width: usize, path_fn: F) -> Vec<Estimate>
where
    F: Fn(u64) -> Vec<f64> + Sync,
{
    assert!(cfg.n_paths >= 1);
    let batches = BATCHES.min(cfg.n_paths);
    let bounds = batch_bounds(cfg.n_paths, batches);
    let batch_sums: Vec<Sums> = bounds
        .par_iter()
        .map(|&(lo, hi)| match cfg.reduction {
            Reduction::Ordered => (lo..hi).fold(Sums::zero(width), |acc, i| {
                let v = path_fn(i as u64);
                debug_assert_eq!(v.len(), width);
                acc.add(&v)
            }),
            Reduction::Unordered => (lo..hi)
                .into_par_iter()
                .fold(|| Sums::zero(width), |acc, i| acc.add(&path_fn(i as u64)))
                .reduce(|| Sums::zero(width), Sums::merge),
        })
        .collect();
    let counts: Vec<usize> = bounds.iter().map(|(lo, hi)| hi - lo).collect();
    (0..width)
        .map(|k| {
            let sums: Vec<f64> = batch_sums.iter().map(|b| b.0[k].value()).collect();
            estimate_from_batches(&sums, &counts)
        })
        .collect()
}

/// Scalar convenience wrapper around [`run_paths`].
pub fn run_scalar<F>(cfg: &McConfig, path_fn: F) -> Estimate
where
    F: Fn(u64) -> f64 + Sync,
{
    run_paths(cfg, 1, |i| vec![path_fn(i)])[0]
}
