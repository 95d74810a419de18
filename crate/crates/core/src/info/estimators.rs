//! Monte Carlo mutual-information estimators for `I(M; Y⁽ⁿ⁾(Δₙ))`.
//!
//! Every estimator draws path `i` from `rng::stream(seed, i)`: first the
//! message, then the Brownian increments on the grid. Estimators called
//! with the same seed and grid therefore see identical paths, which is what
//! the cross-checks between them rely on.

use rand::Rng;

use crate::brownian::BrownianPath;
use crate::channel::ChannelSpec;
use crate::discretize::em_values;
use crate::error::{invalid, Result};
use crate::grid::TimeGrid;
use crate::mc::{run_paths, run_scalar, McConfig};
use crate::message::Message;
use crate::rng;
use crate::stats::Estimate;

use super::posterior::{log_mixture_ratio, normalize, LogLikelihoods};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiMethod {
    Plugin,
    Cmmse,
}

/// A mutual-information estimate in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_paths: usize,
    pub method: MiMethod,
}

impl MiEstimate {
    fn from_estimate(e: Estimate, method: MiMethod) -> Self {
        Self {
            value: e.value,
            stderr: e.stderr,
            n_paths: e.n,
            method,
        }
    }

    pub fn combined_stderr(&self, other: &MiEstimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }
}

/// Message index and EM output values for one Monte Carlo path.
fn draw_path<R: Rng>(spec: &ChannelSpec, grid: &TimeGrid, r: &mut R) -> (usize, Vec<f64>) {
    let message = spec.message();
    let k = message.sample_index(r);
    let b = BrownianPath::sample_with(grid, r);
    let y = em_values(spec.drift(), message.alphabet()[k], grid.points(), b.values());
    (k, y)
}

/// Per-path plug-in integrand
/// `−A₃(M, y) − log Σ_m p(m) e^{−A₃(m, y)}`.
fn plugin_integrand(spec: &ChannelSpec, times: &[f64], y: &[f64], k_true: usize) -> f64 {
    let message = spec.message();
    let ll = LogLikelihoods::run(spec.drift(), message, times, y).values();
    let d: Vec<f64> = ll.iter().map(|l| l - ll[k_true]).collect();
    -log_mixture_ratio(message.prior(), &d)
}

/// Per-path causal squared estimation error `½ Σ δᵢ (gᵢ(M) − ĝᵢ)²`, with
/// `ĝᵢ` the posterior mean of the step drift given the path up to `tᵢ`.
/// Its expectation equals `½ Σ δᵢ (E[gᵢ²] − E[ĝᵢ²])`.
fn cmmse_integrand(spec: &ChannelSpec, times: &[f64], y: &[f64], k_true: usize) -> f64 {
    let message: &Message = spec.message();
    let mut ll = LogLikelihoods::new(message.len());
    let mut w = vec![0.0; message.len()];
    let mut total = 0.0;
    for i in 0..times.len() - 1 {
        let dt = times[i + 1] - times[i];
        normalize(message.prior(), &ll.values(), &mut w);
        let g = ll.step_integrals(spec.drift(), message, times, y, i);
        let g_hat: f64 = w.iter().zip(g).map(|(w, g)| w * g).sum();
        let e = g[k_true] - g_hat;
        total += 0.5 * e * e / dt;
        ll.absorb(y[i + 1] - y[i], dt);
    }
    total
}

/// Density-ratio plug-in estimate of `I(M; Y⁽ⁿ⁾(Δₙ))`. The message mixture
/// is an exact finite sum, so the only error is Monte Carlo error over
/// paths. Negative values are reported as computed.
pub fn mi_plugin(spec: &ChannelSpec, grid: &TimeGrid, mc: &McConfig) -> Result<MiEstimate> {
    mc.require_paths(100)?;
    spec.check_grid(grid)?;
    let times = grid.points();
    let e = run_scalar(mc, |i| {
        let mut r = rng::stream(mc.seed, i);
        let (k, y) = draw_path(spec, grid, &mut r);
        plugin_integrand(spec, times, &y, k)
    });
    Ok(MiEstimate::from_estimate(e, MiMethod::Plugin))
}

/// Causal-MMSE estimate `½ ∫ (E[g²] − E[ĝ²]) ds` on the discretized
/// channel, with running posteriors and left-endpoint quadrature in time.
pub fn mi_cmmse(spec: &ChannelSpec, grid: &TimeGrid, mc: &McConfig) -> Result<MiEstimate> {
    mc.require_paths(100)?;
    spec.check_grid(grid)?;
    let times = grid.points();
    let e = run_scalar(mc, |i| {
        let mut r = rng::stream(mc.seed, i);
        let (k, y) = draw_path(spec, grid, &mut r);
        cmmse_integrand(spec, times, &y, k)
    });
    Ok(MiEstimate::from_estimate(e, MiMethod::Cmmse))
}

/// Upper bounds on `I(M; Y⁽ⁿ⁾(Δₙ))`, in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundChain {
    /// `½ Σᵢ log(1 + ∫_{t_{i−1}}^{t_i} E[g²] ds)`
    pub b_log: f64,
    /// `½ ∫₀ᵀ E[g²] ds`
    pub b_power: f64,
    pub b_power_stderr: f64,
    /// `P·T/2`
    pub b_half_pt: f64,
}

/// Estimates the per-step energies `∫ E[g²] ds` once and derives both
/// bounds from the same numbers, so `b_log ≤ b_power` holds term by term.
pub fn mi_bound_chain(spec: &ChannelSpec, grid: &TimeGrid, mc: &McConfig) -> Result<BoundChain> {
    mc.require_paths(100)?;
    spec.check_grid(grid)?;
    let times = grid.points();
    let n = grid.steps();
    let drift = spec.drift();
    let est = run_paths(mc, n + 1, |i| {
        let mut r = rng::stream(mc.seed, i);
        let (k, y) = draw_path(spec, grid, &mut r);
        let m = spec.message().alphabet()[k];
        let mut out = Vec::with_capacity(n + 1);
        let mut total = 0.0;
        for j in 0..n {
            let prefix = crate::path::PathPrefix::new(&times[..=j], &y[..=j]);
            let g = crate::discretize::step_drift_integral(drift, m, &prefix, times[j], times[j + 1]);
            let energy = g * g / (times[j + 1] - times[j]);
            total += energy;
            out.push(energy);
        }
        out.push(total);
        out
    });
    let mut b_log = 0.0;
    let mut b_power = 0.0;
    for e in &est[..n] {
        b_log += e.value.ln_1p();
        b_power += e.value;
    }
    Ok(BoundChain {
        b_log: 0.5 * b_log,
        b_power: 0.5 * b_power,
        b_power_stderr: 0.5 * est[n].stderr,
        b_half_pt: spec.half_pt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiConvergenceRow {
    pub level: usize,
    pub steps: usize,
    pub delta: f64,
    pub value: f64,
    pub stderr: f64,
}

/// Plug-in estimates on `base_grid` and `n_levels − 1` successive 2×
/// refinements. Each path keeps one message and one Brownian realization,
/// bridge-refined from level to level, so the levels are nested
/// observations of the same randomness. Level 0 coincides with
/// [`mi_plugin`] on `base_grid` with the same seed.
pub fn mi_convergence_study(
    spec: &ChannelSpec,
    base_grid: &TimeGrid,
    n_levels: usize,
    mc: &McConfig,
) -> Result<Vec<MiConvergenceRow>> {
    if n_levels < 2 {
        return invalid(format!("n_levels must be at least 2, got {n_levels}"));
    }
    mc.require_paths(100)?;
    spec.check_grid(base_grid)?;
    let mut grids = vec![base_grid.clone()];
    for _ in 1..n_levels {
        let next = grids.last().unwrap().refine(2)?;
        grids.push(next);
    }
    let drift = spec.drift();
    let message = spec.message();
    let est = run_paths(mc, n_levels, |i| {
        let mut r = rng::stream(mc.seed, i);
        let k = message.sample_index(&mut r);
        let m = message.alphabet()[k];
        let mut b = BrownianPath::sample_with(&grids[0], &mut r);
        let mut out = Vec::with_capacity(n_levels);
        for (level, g) in grids.iter().enumerate() {
            if level > 0 {
                b = b.bridge_refine_with(g, &mut r).expect("refinement nests");
            }
            let y = em_values(drift, m, g.points(), b.values());
            out.push(plugin_integrand(spec, g.points(), &y, k));
        }
        out
    });
    Ok(grids
        .iter()
        .zip(est)
        .enumerate()
        .map(|(level, (g, e))| MiConvergenceRow {
            level,
            steps: g.steps(),
            delta: g.max_step(),
            value: e.value,
            stderr: e.stderr,
        })
        .collect())
}
