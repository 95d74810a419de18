//! Strong-error study: mean squared sup-distance between EM paths on a set
//! of grids and a common fine-grid reference solution.

use crate::brownian::BrownianPath;
use crate::channel::ChannelSpec;
use crate::error::{invalid, Result};
use crate::grid::{approx_eq, TimeGrid};
use crate::mc::{run_paths, McConfig};
use crate::path::{sup_distance, SamplePath};
use crate::rng;
use crate::stats::loglog_slope;

use super::em::simulate_em;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongErrorRow {
    pub steps: usize,
    pub delta: f64,
    /// `E‖Y⁽ⁿ⁾ − Y_ref‖²` over the grid's sample points.
    pub mean_sq_error: f64,
    pub stderr: f64,
}

/// For every grid, estimates `E‖Y⁽ⁿ⁾ − Y_ref‖²` where `Y_ref` is EM on the
/// finest grid refined `ref_factor` times, sampled on the grid in question.
///
/// Per path one message is drawn and one Brownian path is sampled on the
/// coarsest grid and bridge-refined onto the reference grid, so every grid
/// sees the same realization.
pub fn strong_error_study(
    spec: &ChannelSpec,
    grids: &[TimeGrid],
    ref_factor: usize,
    mc: &McConfig,
) -> Result<Vec<StrongErrorRow>> {
    mc.require_paths(100)?;
    if grids.is_empty() {
        return invalid("strong-error study needs at least one grid");
    }
    if ref_factor < 16 {
        return invalid(format!("ref_factor must be at least 16, got {ref_factor}"));
    }
    if let Some(g) = grids.iter().find(|g| !approx_eq(g.horizon(), spec.horizon())) {
        return invalid(format!(
            "grid horizon {} differs from channel horizon {}",
            g.horizon(),
            spec.horizon()
        ));
    }
    let finest = grids.iter().max_by_key(|g| g.steps()).expect("nonempty");
    let coarsest = grids.iter().min_by_key(|g| g.steps()).expect("nonempty");
    let reference = finest.refine(ref_factor)?;
    if let Some(g) = grids.iter().find(|g| !g.nests_in(&reference)) {
        return invalid(format!(
            "grid with {} steps does not nest in the reference grid",
            g.steps()
        ));
    }
    if !coarsest.nests_in(&reference) {
        return invalid("coarsest grid does not nest in the reference grid");
    }
    let drift = spec.drift();
    let message = spec.message();

    let path_fn = |i: u64| -> Vec<f64> {
        let mut r = rng::stream(mc.seed, i);
        let m = message.alphabet()[message.sample_index(&mut r)];
        let coarse_b = BrownianPath::sample_with(coarsest, &mut r);
        let b = coarse_b
            .bridge_refine_with(&reference, &mut r)
            .expect("coarsest grid nests in reference");
        let y_ref = simulate_em(drift, m, &reference, &b).expect("symbol checked by ChannelSpec");
        grids
            .iter()
            .map(|g| {
                let em = simulate_em(drift, m, g, &b).expect("grid nests in reference");
                let r: SamplePath = y_ref.path().restrict(g).expect("grid nests in reference");
                sup_distance(em.path(), &r).expect("same horizon").powi(2)
            })
            .collect()
    };
    let est = run_paths(mc, grids.len(), path_fn);
    Ok(grids
        .iter()
        .zip(est)
        .map(|(g, e)| StrongErrorRow {
            steps: g.steps(),
            delta: g.max_step(),
            mean_sq_error: e.value,
            stderr: e.stderr,
        })
        .collect())
}

/// Least-squares slope of `ln E‖·‖²` against `ln δ`. `None` when some row
/// has zero error (the slope is undefined, e.g. for drifts EM solves
/// exactly).
pub fn fit_strong_rate(rows: &[StrongErrorRow]) -> Option<f64> {
    if rows.len() < 2 || rows.iter().any(|r| r.mean_sq_error <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.delta).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mean_sq_error).collect();
    Some(loglog_slope(&xs, &ys))
}
