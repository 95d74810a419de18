use crate::brownian::BrownianPath;
use crate::drift::Drift;
use crate::error::{invalid, Result};
use crate::grid::TimeGrid;
use crate::message::Symbol;
use crate::path::{PathPrefix, SamplePath};

/// Refinement factor of the reference solution relative to the grid it
/// stands in for.
pub const DEFAULT_REF_FACTOR: usize = 64;

/// `∫_{t0}^{t1} g(s, m, prefix) ds` by the one-node midpoint rule.
///
/// This is the only drift quadrature in the crate: the simulator, the A₃
/// density and the estimators all call it, so the density of a simulated
/// path is exactly the density the estimators evaluate.
#[inline]
pub fn step_drift_integral(drift: &dyn Drift, m: Symbol, prefix: &PathPrefix<'_>, t0: f64, t1: f64) -> f64 {
    (t1 - t0) * drift.eval(0.5 * (t0 + t1), m, prefix)
}

/// An Euler-Maruyama solution on a grid for a fixed message.
#[derive(Debug, Clone, PartialEq)]
pub struct EmPath {
    path: SamplePath,
    message: Symbol,
}

impl EmPath {
    pub fn path(&self) -> &SamplePath {
        &self.path
    }

    pub fn grid(&self) -> &TimeGrid {
        self.path.grid()
    }

    pub fn values(&self) -> &[f64] {
        self.path.values()
    }

    pub fn message(&self) -> Symbol {
        self.message
    }

    pub fn into_path(self) -> SamplePath {
        self.path
    }
}

/// EM recursion on raw slices. The output is kept as `D_i + B_i` with `D`
/// the accumulated drift integrals, which equals the step recursion
/// `Y_{i+1} = Y_i + ∫g ds + ΔB_i` and reproduces `B` bitwise when `g ≡ 0`.
pub(crate) fn em_values(drift: &dyn Drift, m: Symbol, times: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(times.len(), b.len());
    let mut y = Vec::with_capacity(times.len());
    y.push(0.0);
    let mut d = 0.0;
    for i in 0..times.len() - 1 {
        let g = {
            let prefix = PathPrefix::new(&times[..=i], &y[..=i]);
            step_drift_integral(drift, m, &prefix, times[i], times[i + 1])
        };
        d += g;
        y.push(d + b[i + 1]);
    }
    y
}

/// Euler-Maruyama approximation on `grid`, driven by `b` (given on `grid`
/// or on any grid nesting it), started at `Y(0) = 0`.
pub fn simulate_em(drift: &dyn Drift, m: Symbol, grid: &TimeGrid, b: &BrownianPath) -> Result<EmPath> {
    if !drift.supports(m) {
        return invalid(format!("drift {} has no input for symbol {m}", drift.name()));
    }
    let values = if b.grid() == grid {
        em_values(drift, m, grid.points(), b.values())
    } else {
        let restricted = b.restrict(grid)?;
        em_values(drift, m, grid.points(), restricted.values())
    };
    Ok(EmPath {
        path: SamplePath::from_parts(grid.clone(), values),
        message: m,
    })
}

/// Stand-in for the exact solution sampled on `coarse`: EM on
/// `coarse.refine(ref_factor)`, restricted back to `coarse`. `b_fine` must
/// be defined on the refined grid or a refinement of it.
pub fn simulate_reference(
    drift: &dyn Drift,
    m: Symbol,
    coarse: &TimeGrid,
    b_fine: &BrownianPath,
    ref_factor: usize,
) -> Result<SamplePath> {
    if ref_factor < 16 {
        return invalid(format!("ref_factor must be at least 16, got {ref_factor}"));
    }
    let fine = coarse.refine(ref_factor)?;
    let em = simulate_em(drift, m, &fine, b_fine)?;
    em.path.restrict(coarse)
}
