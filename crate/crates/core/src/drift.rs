//! Channel input functionals `g(s, m, y₀ˢ)`.
//!
//! A drift sees the message symbol and a [`PathPrefix`] of the channel
//! output. Discretized simulation freezes the prefix at the left end of each
//! step while `s` runs over the step, so the builtin feedback drifts read
//! the output at the end of the prefix they are handed.
//!
//! Every drift declares constants for the uniform Lipschitz condition
//!
//! ```text
//! |g(s₁, m, y₀^{s₂}) − g(t₁, m, z₀^{t₂})| ≤ L (|s₁ − t₁| + ‖y₀^{s₂} − z₀^{t₂}‖)
//! ```
//!
//! and the linear growth condition `|g(s, m, y₀ˢ)| ≤ L (1 + ‖y₀ˢ‖)`. They are
//! claims, probed by [`crate::channel::check_conditions`].

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::message::Symbol;
use crate::path::PathPrefix;

pub trait Drift: Send + Sync + fmt::Debug {
    fn eval(&self, s: f64, m: Symbol, prefix: &PathPrefix<'_>) -> f64;

    /// Declared Lipschitz constant (time and sup-norm).
    fn lipschitz(&self) -> f64;

    /// Declared linear-growth constant.
    fn growth(&self) -> f64;

    /// Whether the drift reads the output prefix.
    fn feedback(&self) -> bool;

    fn supports(&self, _m: Symbol) -> bool {
        true
    }

    fn name(&self) -> String;

    fn try_eval(&self, s: f64, m: Symbol, prefix: &PathPrefix<'_>) -> Result<f64> {
        if !self.supports(m) {
            return invalid(format!("drift {} has no input for symbol {m}", self.name()));
        }
        Ok(self.eval(s, m, prefix))
    }
}

pub type ChannelDrift = Arc<dyn Drift>;

/// `g ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroDrift;

impl Drift for ZeroDrift {
    fn eval(&self, _s: f64, _m: Symbol, _prefix: &PathPrefix<'_>) -> f64 {
        0.0
    }
    fn lipschitz(&self) -> f64 {
        0.0
    }
    fn growth(&self) -> f64 {
        0.0
    }
    fn feedback(&self) -> bool {
        false
    }
    fn name(&self) -> String {
        "zero".into()
    }
}

/// `g(s, m, ·) = a·m` for `m ∈ {−1, +1}`: antipodal signalling without
/// feedback.
#[derive(Debug, Clone, Copy)]
pub struct ConstantAntipodal {
    a: f64,
}

impl ConstantAntipodal {
    pub fn new(a: f64) -> Result<Self> {
        if !a.is_finite() {
            return invalid("antipodal amplitude must be finite");
        }
        Ok(Self { a })
    }

    pub fn amplitude(&self) -> f64 {
        self.a
    }
}

impl Drift for ConstantAntipodal {
    fn eval(&self, _s: f64, m: Symbol, _prefix: &PathPrefix<'_>) -> f64 {
        self.a * m
    }
    fn lipschitz(&self) -> f64 {
        0.0
    }
    fn growth(&self) -> f64 {
        self.a.abs()
    }
    fn feedback(&self) -> bool {
        false
    }
    fn supports(&self, m: Symbol) -> bool {
        m == 1.0 || m == -1.0
    }
    fn name(&self) -> String {
        format!("constant_antipodal(a={})", self.a)
    }
}

/// Linear feedback on the receiver's running average:
/// `g(s, m, y) = γ·(θ_m − y(τ)/max(τ, s_floor))` where `τ` is the end of the
/// prefix. The floor keeps the drift bounded near `τ = 0`.
#[derive(Debug, Clone)]
pub struct SkLinearFeedback {
    gamma: f64,
    theta: Vec<(Symbol, f64)>,
    s_floor: f64,
}

impl SkLinearFeedback {
    pub fn new(gamma: f64, theta: Vec<(Symbol, f64)>, s_floor: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return invalid("feedback gain must be finite");
        }
        if !(s_floor.is_finite() && s_floor > 0.0) {
            return invalid("s_floor must be positive");
        }
        if theta.is_empty() || theta.iter().any(|(m, t)| !(m.is_finite() && t.is_finite())) {
            return invalid("theta map must be nonempty and finite");
        }
        Ok(Self { gamma, theta, s_floor })
    }

    pub fn theta(&self, m: Symbol) -> Option<f64> {
        self.theta.iter().find(|(k, _)| *k == m).map(|(_, t)| *t)
    }

    fn max_theta(&self) -> f64 {
        self.theta.iter().fold(0.0f64, |a, (_, t)| a.max(t.abs()))
    }
}

impl Drift for SkLinearFeedback {
    /// Evaluating an unknown symbol yields NaN; use [`Drift::try_eval`] for
    /// a checked call.
    fn eval(&self, _s: f64, m: Symbol, prefix: &PathPrefix<'_>) -> f64 {
        let theta = self.theta(m).unwrap_or(f64::NAN);
        let tau = prefix.end_time().max(self.s_floor);
        self.gamma * (theta - prefix.last() / tau)
    }
    fn lipschitz(&self) -> f64 {
        self.gamma.abs() / self.s_floor
    }
    fn growth(&self) -> f64 {
        self.gamma.abs() * self.max_theta().max(1.0 / self.s_floor)
    }
    fn feedback(&self) -> bool {
        true
    }
    fn supports(&self, m: Symbol) -> bool {
        self.theta(m).is_some()
    }
    fn name(&self) -> String {
        format!("sk_linear_feedback(gamma={}, s_floor={})", self.gamma, self.s_floor)
    }
}

/// `g(s, m, y) = L·tanh(m + y(τ))`: Lipschitz in the sup-norm with constant
/// `L` and bounded by `L`.
#[derive(Debug, Clone, Copy)]
pub struct SaturatedFeedback {
    l: f64,
}

impl SaturatedFeedback {
    pub fn new(l: f64) -> Result<Self> {
        if !(l.is_finite() && l > 0.0) {
            return invalid("saturation constant L must be positive");
        }
        Ok(Self { l })
    }
}

impl Drift for SaturatedFeedback {
    fn eval(&self, _s: f64, m: Symbol, prefix: &PathPrefix<'_>) -> f64 {
        self.l * (m + prefix.last()).tanh()
    }
    fn lipschitz(&self) -> f64 {
        self.l
    }
    fn growth(&self) -> f64 {
        self.l
    }
    fn feedback(&self) -> bool {
        true
    }
    fn name(&self) -> String {
        format!("saturated_feedback(L={})", self.l)
    }
}

type DriftFn = dyn Fn(f64, Symbol, &PathPrefix<'_>) -> f64 + Send + Sync;

/// A drift from a closure with caller-declared constants.
pub struct FnDrift {
    name: String,
    f: Box<DriftFn>,
    lipschitz: f64,
    growth: f64,
    feedback: bool,
}

impl FnDrift {
    pub fn new<F>(name: impl Into<String>, lipschitz: f64, growth: f64, feedback: bool, f: F) -> Self
    where
        F: Fn(f64, Symbol, &PathPrefix<'_>) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            f: Box::new(f),
            lipschitz,
            growth,
            feedback,
        }
    }
}

impl fmt::Debug for FnDrift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnDrift")
            .field("name", &self.name)
            .field("lipschitz", &self.lipschitz)
            .field("growth", &self.growth)
            .field("feedback", &self.feedback)
            .finish()
    }
}

impl Drift for FnDrift {
    fn eval(&self, s: f64, m: Symbol, prefix: &PathPrefix<'_>) -> f64 {
        (self.f)(s, m, prefix)
    }
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
    fn growth(&self) -> f64 {
        self.growth
    }
    fn feedback(&self) -> bool {
        self.feedback
    }
    fn name(&self) -> String {
        self.name.clone()
    }
}

pub fn zero() -> ChannelDrift {
    Arc::new(ZeroDrift)
}

pub fn constant_antipodal(a: f64) -> Result<ChannelDrift> {
    Ok(Arc::new(ConstantAntipodal::new(a)?))
}

pub fn sk_linear_feedback(gamma: f64, theta: Vec<(Symbol, f64)>, s_floor: f64) -> Result<ChannelDrift> {
    Ok(Arc::new(SkLinearFeedback::new(gamma, theta, s_floor)?))
}

pub fn saturated_feedback(l: f64) -> Result<ChannelDrift> {
    Ok(Arc::new(SaturatedFeedback::new(l)?))
}
