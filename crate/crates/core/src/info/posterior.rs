//! Posterior over the message given a discretized output path.

use crate::channel::ChannelSpec;
use crate::discretize::{step_drift_integral, step_log_likelihood, EmPath};
use crate::drift::Drift;
use crate::error::Result;
use crate::message::Message;
use crate::path::PathPrefix;
use crate::stats::KahanSum;

/// `μ_{M | Y⁽ⁿ⁾}` as a pmf aligned with the message alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorWeights {
    weights: Vec<f64>,
}

impl PosteriorWeights {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Posterior mean of an arbitrary per-symbol quantity.
    pub fn mean_of(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

/// Running log-likelihoods `−A₃(m, ·)` of every hypothesis along a path.
pub(crate) struct LogLikelihoods {
    acc: Vec<KahanSum>,
    g: Vec<f64>,
}

impl LogLikelihoods {
    pub(crate) fn new(k: usize) -> Self {
        Self {
            acc: vec![KahanSum::new(); k],
            g: vec![0.0; k],
        }
    }

    /// Step drift integrals `Gᵢ(m)` of every hypothesis for step `i`.
    pub(crate) fn step_integrals(
        &mut self,
        drift: &dyn Drift,
        message: &Message,
        times: &[f64],
        y: &[f64],
        i: usize,
    ) -> &[f64] {
        let prefix = PathPrefix::new(&times[..=i], &y[..=i]);
        for (g, &m) in self.g.iter_mut().zip(message.alphabet()) {
            *g = step_drift_integral(drift, m, &prefix, times[i], times[i + 1]);
        }
        &self.g
    }

    /// Adds step `i` using the integrals from the last `step_integrals` call.
    pub(crate) fn absorb(&mut self, dy: f64, dt: f64) {
        for (a, &g) in self.acc.iter_mut().zip(&self.g) {
            a.add(step_log_likelihood(g, dy, dt));
        }
    }

    pub(crate) fn run(drift: &dyn Drift, message: &Message, times: &[f64], y: &[f64]) -> Self {
        let mut ll = Self::new(message.len());
        for i in 0..times.len() - 1 {
            ll.step_integrals(drift, message, times, y, i);
            ll.absorb(y[i + 1] - y[i], times[i + 1] - times[i]);
        }
        ll
    }

    pub(crate) fn values(&self) -> Vec<f64> {
        self.acc.iter().map(KahanSum::value).collect()
    }
}

/// Normalizes `p_m · exp(ℓ_m)` in log-space. Symbols with zero prior mass
/// get weight 0; otherwise a weight underflows only when its log-likelihood
/// trails the best one by more than ~700 nats.
pub(crate) fn normalize(prior: &[f64], ll: &[f64], out: &mut [f64]) {
    let max = prior
        .iter()
        .zip(ll)
        .filter(|(&p, _)| p > 0.0)
        .map(|(_, &l)| l)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for ((o, &p), &l) in out.iter_mut().zip(prior).zip(ll) {
        *o = if p > 0.0 { p * (l - max).exp() } else { 0.0 };
        total += *o;
    }
    for o in out.iter_mut() {
        *o /= total;
    }
}

/// `log Σ_m p_m e^{d_m}` where `d_m = ℓ_m − ℓ_M` is relative to the true
/// message (so some `d_m = 0`). When every `d_m` is small this is evaluated
/// as `ln_1p(Σ p_m expm1(d_m))`, which is exactly 0 when all `d_m` are 0.
pub(crate) fn log_mixture_ratio(prior: &[f64], d: &[f64]) -> f64 {
    let dmax = prior
        .iter()
        .zip(d)
        .filter(|(&p, _)| p > 0.0)
        .map(|(_, &x)| x)
        .fold(f64::NEG_INFINITY, f64::max);
    if dmax < 1.0 {
        let s: f64 = prior
            .iter()
            .zip(d)
            .filter(|(&p, _)| p > 0.0)
            .map(|(&p, &x)| p * x.exp_m1())
            .sum();
        s.ln_1p()
    } else {
        let s: f64 = prior
            .iter()
            .zip(d)
            .filter(|(&p, _)| p > 0.0)
            .map(|(&p, &x)| p * (x - dmax).exp())
            .sum();
        dmax + s.ln()
    }
}

/// `w(m) ∝ p_M(m) · exp(−A₃(m, em))`.
pub fn posterior_weights(spec: &ChannelSpec, em: &EmPath) -> Result<PosteriorWeights> {
    spec.check_grid(em.grid())?;
    let ll = LogLikelihoods::run(spec.drift(), spec.message(), em.grid().points(), em.values()).values();
    let mut weights = vec![0.0; ll.len()];
    normalize(spec.message().prior(), &ll, &mut weights);
    Ok(PosteriorWeights { weights })
}
