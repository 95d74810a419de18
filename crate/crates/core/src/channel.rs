//! A channel instance (drift, message, horizon, power limit), falsification
//! probes for the drift's declared constants, and the average-power audit.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::brownian::BrownianPath;
use crate::discretize::{em_values, step_drift_integral};
use crate::drift::{ChannelDrift, Drift};
use crate::error::{invalid, Result};
use crate::grid::{approx_eq, TimeGrid};
use crate::mc::{run_scalar, McConfig};
use crate::message::Message;
use crate::path::PathPrefix;
use crate::rng;
use crate::stats::{Estimate, KahanSum};

/// Relative slack allowed before an observed ratio counts as a violation.
pub const CONDITION_RTOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ChannelSpec {
    drift: ChannelDrift,
    message: Message,
    horizon: f64,
    power_limit: f64,
}

impl ChannelSpec {
    pub fn new(drift: ChannelDrift, message: Message, horizon: f64, power_limit: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return invalid(format!("horizon must be positive, got {horizon}"));
        }
        if !(power_limit.is_finite() && power_limit > 0.0) {
            return invalid(format!("power limit must be positive, got {power_limit}"));
        }
        if let Some(m) = message.alphabet().iter().find(|&&m| !drift.supports(m)) {
            return invalid(format!("drift {} has no input for symbol {m}", drift.name()));
        }
        Ok(Self {
            drift,
            message,
            horizon,
            power_limit,
        })
    }

    pub fn drift(&self) -> &dyn Drift {
        self.drift.as_ref()
    }

    pub fn drift_arc(&self) -> &ChannelDrift {
        &self.drift
    }

    pub fn message(&self) -> &Message {
        &self.message
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn power_limit(&self) -> f64 {
        self.power_limit
    }

    /// `P·T/2`, the upper bound on `I(M; Y₀ᵀ)` under the power constraint.
    pub fn half_pt(&self) -> f64 {
        0.5 * self.power_limit * self.horizon
    }

    pub(crate) fn check_grid(&self, grid: &TimeGrid) -> Result<()> {
        if !approx_eq(grid.horizon(), self.horizon) {
            return invalid(format!(
                "grid horizon {} differs from channel horizon {}",
                grid.horizon(),
                self.horizon
            ));
        }
        Ok(())
    }
}

/// Largest ratios seen while probing a drift against its declared constants.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub probes: usize,
    pub declared_lipschitz: f64,
    pub declared_growth: f64,
    /// max `|g(s₁,m,y) − g(t₁,m,z)| / (|s₁ − t₁| + ‖y − z‖)`
    pub max_lipschitz_ratio: f64,
    /// max `|g(s,m,y)| / (1 + ‖y‖)`
    pub max_growth_ratio: f64,
    /// max `|g(s,m,y) − g(s,m,z)|`, only probed for drifts declared
    /// feedback-free.
    pub max_prefix_sensitivity: f64,
    pub lipschitz_violated: bool,
    pub growth_violated: bool,
    pub feedback_violated: bool,
}

impl ConditionReport {
    pub fn any_violation(&self) -> bool {
        self.lipschitz_violated || self.growth_violated || self.feedback_violated
    }
}

fn random_walk<R: Rng>(r: &mut R, times: &[f64], scale: f64) -> Vec<f64> {
    let mut y = Vec::with_capacity(times.len());
    y.push(0.0);
    for w in times.windows(2) {
        let z: f64 = r.sample(StandardNormal);
        let last = *y.last().unwrap();
        y.push(last + scale * z * (w[1] - w[0]).sqrt());
    }
    y
}

/// Probes the drift on random prefixes of `grid`: pairs of output paths
/// (near and far apart, over several magnitudes) and pairs of times within
/// the step after the prefix end. A violation is an observed ratio above
/// the declared constant by more than [`CONDITION_RTOL`] relative.
pub fn check_conditions(
    drift: &dyn Drift,
    message: &Message,
    grid: &TimeGrid,
    probes: usize,
    seed: u64,
) -> Result<ConditionReport> {
    if probes == 0 {
        return invalid("probes must be at least 1");
    }
    let times = grid.points();
    let n = grid.steps();
    let mut r = rng::stream(seed, 0);
    let (mut lip, mut grow, mut sens) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..probes {
        let m = message.alphabet()[r.random_range(0..message.len())];
        let k = r.random_range(0..=n);
        let t = &times[..=k];
        let scale = r.random_range(-3.0f64..3.0).exp();
        let y = random_walk(&mut r, t, scale);
        let z: Vec<f64> = if r.random_bool(0.5) {
            let eps = r.random_range(-9.0f64..1.0).exp();
            let d = random_walk(&mut r, t, eps);
            let shift = eps * r.random_range(-1.0..1.0);
            y.iter().zip(d).map(|(a, b)| a + b + shift).collect()
        } else {
            random_walk(&mut r, t, scale)
        };
        let (lo, hi) = if k < n {
            (times[k], times[k + 1])
        } else {
            (times[n], times[n])
        };
        let s1 = r.random_range(lo..=hi);
        let t1 = if r.random_bool(0.5) {
            s1
        } else {
            r.random_range(lo..=hi)
        };

        let py = PathPrefix::new(t, &y);
        let pz = PathPrefix::new(t, &z);
        let gy = drift.eval(s1, m, &py);
        let gz = drift.eval(t1, m, &pz);
        let dist = y.iter().zip(&z).fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
        let denom = (s1 - t1).abs() + dist;
        if denom > 0.0 {
            lip = lip.max((gy - gz).abs() / denom);
        }
        grow = grow.max(gy.abs() / (1.0 + py.sup_norm()));
        if !drift.feedback() {
            sens = sens.max((gy - drift.eval(s1, m, &pz)).abs());
        }
    }
    let exceeds = |obs: f64, declared: f64| obs > declared * (1.0 + CONDITION_RTOL);
    Ok(ConditionReport {
        probes,
        declared_lipschitz: drift.lipschitz(),
        declared_growth: drift.growth(),
        max_lipschitz_ratio: lip,
        max_growth_ratio: grow,
        max_prefix_sensitivity: sens,
        lipschitz_violated: exceeds(lip, drift.lipschitz()),
        growth_violated: exceeds(grow, drift.growth()),
        feedback_violated: sens > 0.0,
    })
}

/// Per-path time average `(1/T) Σ δᵢ gᵢ²` along an EM trajectory, where
/// `gᵢ = Gᵢ/δᵢ` is the step drift the simulator applied.
pub(crate) fn path_power(drift: &dyn Drift, m: f64, times: &[f64], y: &[f64]) -> f64 {
    let mut sum = KahanSum::new();
    for i in 0..times.len() - 1 {
        let dt = times[i + 1] - times[i];
        let g = step_drift_integral(
            drift,
            m,
            &PathPrefix::new(&times[..=i], &y[..=i]),
            times[i],
            times[i + 1],
        );
        sum.add(g * g / dt);
    }
    sum.value() / (times[times.len() - 1] - times[0])
}

/// Monte Carlo estimate of `(1/T) ∫₀ᵀ E[g²(s, M, Y₀ˢ)] ds` along EM
/// trajectories on `grid`, with batch-means standard error.
pub fn estimate_average_power(spec: &ChannelSpec, grid: &TimeGrid, mc: &McConfig) -> Result<Estimate> {
    mc.require_paths(2)?;
    spec.check_grid(grid)?;
    let times = grid.points();
    let drift = spec.drift();
    let message = spec.message();
    Ok(run_scalar(mc, |i| {
        let mut r = rng::stream(mc.seed, i);
        let m = message.alphabet()[message.sample_index(&mut r)];
        let b = BrownianPath::sample_with(grid, &mut r);
        let y = em_values(drift, m, times, b.values());
        path_power(drift, m, times, &y)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drift::{self, FnDrift};
    use std::sync::Arc;

    fn grid() -> TimeGrid {
        TimeGrid::even(1.0, 16).unwrap()
    }

    #[test]
    fn spec_validation() {
        let msg = Message::antipodal(0.5).unwrap();
        assert!(ChannelSpec::new(drift::zero(), msg.clone(), 0.0, 1.0).is_err());
        assert!(ChannelSpec::new(drift::zero(), msg.clone(), 1.0, -1.0).is_err());
        let three = Message::uniform(vec![-1.0, 0.0, 1.0]).unwrap();
        assert!(ChannelSpec::new(drift::constant_antipodal(1.0).unwrap(), three, 1.0, 1.0).is_err());
        let spec = ChannelSpec::new(drift::zero(), msg, 2.0, 3.0).unwrap();
        assert_eq!(spec.half_pt(), 3.0);
    }

    #[test]
    fn antipodal_passes_with_zero_path_ratio() {
        let d = drift::constant_antipodal(1.0).unwrap();
        let rep = check_conditions(d.as_ref(), &Message::antipodal(0.5).unwrap(), &grid(), 10_000, 1).unwrap();
        assert!(!rep.any_violation(), "{rep:?}");
        assert_eq!(rep.max_lipschitz_ratio, 0.0);
        assert_eq!(rep.max_prefix_sensitivity, 0.0);
    }

    #[test]
    fn builtin_feedback_drifts_pass() {
        let msg = Message::antipodal(0.5).unwrap();
        let sat = drift::saturated_feedback(2.0).unwrap();
        let rep = check_conditions(sat.as_ref(), &msg, &grid(), 10_000, 2).unwrap();
        assert!(!rep.any_violation(), "{rep:?}");
        assert!(rep.max_lipschitz_ratio > 0.5 * 2.0);
        let sk = drift::sk_linear_feedback(1.0, vec![(-1.0, -1.0), (1.0, 1.0)], 0.125).unwrap();
        let rep = check_conditions(sk.as_ref(), &msg, &grid(), 10_000, 3).unwrap();
        assert!(!rep.any_violation(), "{rep:?}");
        let rep = check_conditions(drift::zero().as_ref(), &msg, &grid(), 10_000, 4).unwrap();
        assert!(!rep.any_violation());
    }

    #[test]
    fn mislabeled_drift_is_caught() {
        let liar = FnDrift::new("liar", 0.1, 1.0, true, |_, m, p| (m + p.last()).tanh());
        let rep = check_conditions(&liar, &Message::antipodal(0.5).unwrap(), &grid(), 10_000, 5).unwrap();
        assert!(rep.lipschitz_violated);
        assert!(rep.max_lipschitz_ratio > 0.5);
    }

    #[test]
    fn hidden_feedback_is_caught() {
        let liar = FnDrift::new("liar", 1.0, 1.0, false, |_, m, p| 0.5 * (m + p.last()).tanh());
        let rep = check_conditions(&liar, &Message::antipodal(0.5).unwrap(), &grid(), 1000, 6).unwrap();
        assert!(rep.feedback_violated);
        assert!(check_conditions(&liar, &Message::antipodal(0.5).unwrap(), &grid(), 0, 6).is_err());
    }

    #[test]
    fn antipodal_power_is_one() {
        for p_plus in [0.5, 0.1] {
            let spec = ChannelSpec::new(
                drift::constant_antipodal(1.0).unwrap(),
                Message::antipodal(p_plus).unwrap(),
                1.0,
                2.0,
            )
            .unwrap();
            let e = estimate_average_power(&spec, &grid(), &McConfig::new(200, 1)).unwrap();
            assert!((e.value - 1.0).abs() < 1e-12);
            assert!(e.stderr < 1e-12);
        }
    }

    #[test]
    fn zero_drift_power_is_exactly_zero() {
        let spec = ChannelSpec::new(Arc::new(drift::ZeroDrift), Message::antipodal(0.5).unwrap(), 1.0, 1.0).unwrap();
        for seed in 0..3 {
            let e = estimate_average_power(&spec, &grid(), &McConfig::new(50, seed)).unwrap();
            assert_eq!(e.value, 0.0);
            assert_eq!(e.stderr, 0.0);
        }
        assert!(estimate_average_power(&spec, &grid(), &McConfig::new(1, 0)).is_err());
    }

    #[test]
    fn sk_linear_power_decays_with_horizon() {
        let theta = vec![(-1.0, -1.0), (1.0, 1.0)];
        let msg = Message::antipodal(0.5).unwrap();
        let power = |t: f64| {
            let g = TimeGrid::even(t, 64).unwrap();
            let d = drift::sk_linear_feedback(1.0, theta.clone(), g.step(0)).unwrap();
            let spec = ChannelSpec::new(d, msg.clone(), t, 10.0).unwrap();
            estimate_average_power(&spec, &g, &McConfig::new(4000, 7)).unwrap()
        };
        let (p1, p8) = (power(1.0), power(8.0));
        assert!(p8.value + 3.0 * p8.combined_stderr(&p1) < p1.value, "{p1:?} {p8:?}");
    }
}
