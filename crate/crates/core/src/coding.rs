//! `(T, e^{TR}, P)` feedback codes: a Schalkwijk-Kailath style linear
//! scheme and its Monte Carlo error-rate curve.
//!
//! Message `m ∈ {1, …, K}`, `K = ⌈e^{TR}⌉`, is sent as the lattice point
//! `θ_m = −1 + 2(m−1)/(K−1)`. Transmitter and receiver both run the
//! recursion
//!
//! ```text
//! gᵢ      = γᵢ (θ − θ̂ᵢ),            γᵢ = c·√P′ / σᵢ
//! θ̂ᵢ₊₁   = θ̂ᵢ + σᵢ² γᵢ ΔYᵢ / (1 + σᵢ² γᵢ² δᵢ)
//! σᵢ₊₁²  = σᵢ² / (1 + σᵢ² γᵢ² δᵢ)
//! ```
//!
//! starting from `θ̂₀ = 0` and `σ₀² = Var(θ_M)`. `σᵢ²` is the exact
//! mean-square error of `θ̂ᵢ`, so the transmitted power is `c²P′` on
//! average; `P′ = 0.9·P` and the gain scale `c` is fitted by a power probe
//! to absorb what the discretization changes. The decoder picks the lattice
//! point nearest to the final `θ̂`.

use rand::Rng;

use crate::brownian::BrownianPath;
use crate::channel::ChannelSpec;
use crate::drift::{ChannelDrift, Drift};
use crate::error::{invalid, Result};
use crate::grid::{approx_eq, TimeGrid};
use crate::mc::{run_paths, McConfig};
use crate::message::{Message, Symbol};
use crate::path::PathPrefix;
use crate::rng;
use crate::stats::{wilson, KahanSum};

/// Fraction of the power limit the scheme targets.
pub const POWER_FRACTION: f64 = 0.9;
/// Paths in the gain-calibration probe.
pub const CALIBRATION_PATHS: usize = 4000;
const CALIBRATION_SEED: u64 = 0x5eed_5c0d_e000_0001;

#[derive(Debug, Clone, PartialEq)]
pub struct CodeConfig {
    /// Nats per second.
    pub rate: f64,
    pub horizon: f64,
    pub power: f64,
    pub grid: TimeGrid,
}

impl CodeConfig {
    pub fn new(rate: f64, horizon: f64, power: f64, grid: TimeGrid) -> Result<Self> {
        let cfg = Self {
            rate,
            horizon,
            power,
            grid,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Same rate, power and step size at a different horizon. The base grid
    /// must be even and the new horizon a multiple of its step.
    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        if !self.grid.is_even() {
            return invalid("horizon sweeps need an even base grid");
        }
        let dt = self.grid.step(0);
        let n = (horizon / dt).round();
        if n < 1.0 || !approx_eq(n * dt, horizon) {
            return invalid(format!("horizon {horizon} is not a multiple of the step {dt}"));
        }
        Self::new(self.rate, horizon, self.power, TimeGrid::even(horizon, n as usize)?)
    }

    fn validate(&self) -> Result<()> {
        if !(self.rate.is_finite() && self.rate > 0.0) {
            return invalid(format!("rate must be positive, got {}", self.rate));
        }
        if !(self.power.is_finite() && self.power > 0.0) {
            return invalid(format!("power must be positive, got {}", self.power));
        }
        if !approx_eq(self.grid.horizon(), self.horizon) {
            return invalid(format!(
                "grid ends at {} but the horizon is {}",
                self.grid.horizon(),
                self.horizon
            ));
        }
        let k = self.message_count();
        if k < 2 {
            return invalid(format!("code has {k} message(s); at least 2 are needed"));
        }
        Ok(())
    }

    /// `⌈e^{TR}⌉`. The exponent is shaved by a relative 1e-12 so that an
    /// integer `e^{TR}` computed with rounding error does not gain a message.
    pub fn message_count(&self) -> usize {
        let x = (self.horizon * self.rate).exp();
        if !x.is_finite() || x > 1e9 {
            return usize::MAX;
        }
        (x * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }

    pub fn lattice(&self) -> Vec<Symbol> {
        lattice(self.message_count())
    }
}

fn lattice(k: usize) -> Vec<Symbol> {
    let last = (k - 1) as f64;
    (0..k).map(|j| -1.0 + 2.0 * j as f64 / last).collect()
}

/// Lattice index nearest to `x`, ties toward the smaller index.
fn nearest_index(x: f64, k: usize) -> usize {
    let pos = (x + 1.0) * (k - 1) as f64 / 2.0;
    if pos.is_nan() || pos <= 0.0 {
        return 0;
    }
    ((pos - 0.5).ceil() as usize).min(k - 1)
}

/// Receiver state `(θ̂, σ²)`.
#[derive(Debug, Clone, Copy)]
struct Tracker {
    estimate: f64,
    var: f64,
    /// `c²P′`, the constant value of `σ²γ²`.
    gain2: f64,
}

impl Tracker {
    fn new(var0: f64, gain2: f64) -> Self {
        Self {
            estimate: 0.0,
            var: var0,
            gain2,
        }
    }

    fn gamma(&self) -> f64 {
        (self.gain2 / self.var).sqrt()
    }

    fn input(&self, theta: f64) -> f64 {
        self.gamma() * (theta - self.estimate)
    }

    fn update(&mut self, dy: f64, dt: f64) {
        let denom = 1.0 + self.gain2 * dt;
        self.estimate += self.var * self.gamma() * dy / denom;
        self.var /= denom;
    }
}

/// The transmitter as a channel drift. `eval` replays the receiver over
/// the prefix it is handed, so it works on any grid; the declared constants
/// are computed for the grid the drift was built for.
#[derive(Debug, Clone)]
pub struct SkTrackingDrift {
    var0: f64,
    gain2: f64,
    lipschitz: f64,
    growth: f64,
}

impl SkTrackingDrift {
    /// `gain2 = c²P′`; `var0` is the prior variance of the lattice.
    pub fn new(var0: f64, gain2: f64, grid: &TimeGrid) -> Result<Self> {
        if !(var0.is_finite() && var0 > 0.0) {
            return invalid(format!("prior variance must be positive, got {var0}"));
        }
        if !(gain2.is_finite() && gain2 > 0.0) {
            return invalid(format!("gain must be positive, got {gain2}"));
        }
        // |Δg| ≤ γₖ Σ_{i<k} |aᵢ| · 2‖Δy‖, aᵢ the update coefficient of ΔYᵢ
        let mut t = Tracker::new(var0, gain2);
        let mut coef_sum = 0.0;
        let mut lipschitz: f64 = 0.0;
        let mut growth: f64 = t.gamma();
        for i in 0..grid.steps() {
            let dt = grid.step(i);
            coef_sum += t.var * t.gamma() / (1.0 + gain2 * dt);
            t.update(0.0, dt);
            lipschitz = lipschitz.max(2.0 * t.gamma() * coef_sum);
            growth = growth.max(t.gamma()).max(2.0 * t.gamma() * coef_sum);
        }
        Ok(Self {
            var0,
            gain2,
            lipschitz,
            growth,
        })
    }

    fn track(&self, prefix: &PathPrefix<'_>) -> Tracker {
        let (t, y) = (prefix.times(), prefix.values());
        let mut tr = Tracker::new(self.var0, self.gain2);
        for i in 1..t.len() {
            tr.update(y[i] - y[i - 1], t[i] - t[i - 1]);
        }
        tr
    }
}

impl Drift for SkTrackingDrift {
    fn eval(&self, _s: f64, m: Symbol, prefix: &PathPrefix<'_>) -> f64 {
        self.track(prefix).input(m)
    }
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
    fn growth(&self) -> f64 {
        self.growth
    }
    fn feedback(&self) -> bool {
        true
    }
    fn supports(&self, m: Symbol) -> bool {
        (-1.0..=1.0).contains(&m)
    }
    fn name(&self) -> String {
        "sk_tracking".into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionResult {
    /// 1-based message indices.
    pub sent_index: usize,
    pub decoded_index: usize,
    pub sent: Symbol,
    pub decoded: Symbol,
    pub error: bool,
    /// `(1/T) Σ δᵢ gᵢ²` along this transmission.
    pub realized_power: f64,
}

/// A calibrated code: configuration, lattice and gain.
#[derive(Debug, Clone)]
pub struct SkCode {
    cfg: CodeConfig,
    lattice: Vec<Symbol>,
    var0: f64,
    gain_scale: f64,
    drift: SkTrackingDrift,
}

impl SkCode {
    /// Builds the code and fits the gain scale `c` so that the probe's mean
    /// power equals `0.9·P`. The probe uses a fixed seed, so the same
    /// configuration always yields the same code.
    pub fn calibrate(cfg: &CodeConfig) -> Result<Self> {
        cfg.validate()?;
        let lattice = cfg.lattice();
        let k = lattice.len() as f64;
        let var0 = lattice.iter().map(|t| t * t).sum::<f64>() / k;
        let target = POWER_FRACTION * cfg.power;
        let mut code = Self::with_gain_scale(cfg, lattice, var0, target, 1.0)?;
        let probe = McConfig::new(CALIBRATION_PATHS, CALIBRATION_SEED);
        let measured = code.run_trials(&probe)[1].value;
        let c = (target / measured).sqrt();
        code = Self::with_gain_scale(cfg, code.lattice, var0, target, c)?;
        Ok(code)
    }

    fn with_gain_scale(cfg: &CodeConfig, lattice: Vec<Symbol>, var0: f64, target: f64, c: f64) -> Result<Self> {
        let drift = SkTrackingDrift::new(var0, c * c * target, &cfg.grid)?;
        Ok(Self {
            cfg: cfg.clone(),
            lattice,
            var0,
            gain_scale: c,
            drift,
        })
    }

    pub fn config(&self) -> &CodeConfig {
        &self.cfg
    }

    pub fn lattice(&self) -> &[Symbol] {
        &self.lattice
    }

    pub fn gain_scale(&self) -> f64 {
        self.gain_scale
    }

    pub fn drift(&self) -> &SkTrackingDrift {
        &self.drift
    }

    /// The code as a channel with a uniform message over the lattice.
    pub fn channel_spec(&self) -> Result<ChannelSpec> {
        let drift: ChannelDrift = std::sync::Arc::new(self.drift.clone());
        ChannelSpec::new(
            drift,
            Message::uniform(self.lattice.clone())?,
            self.cfg.horizon,
            self.cfg.power,
        )
    }

    /// Sends message `msg_index` (1-based) over the noise path `b`, which
    /// must live on the code grid or a grid it nests in.
    pub fn transmit(&self, msg_index: usize, b: &BrownianPath) -> Result<TransmissionResult> {
        let k = self.lattice.len();
        if msg_index == 0 || msg_index > k {
            return invalid(format!("message index {msg_index} is outside 1..={k}"));
        }
        let grid = &self.cfg.grid;
        let b = if b.grid() == grid { b.clone() } else { b.restrict(grid)? };
        Ok(self.transmit_values(msg_index, grid.points(), b.values()))
    }

    fn transmit_values(&self, msg_index: usize, times: &[f64], b: &[f64]) -> TransmissionResult {
        let theta = self.lattice[msg_index - 1];
        let mut tr = Tracker::new(self.var0, self.drift.gain2);
        let mut power = KahanSum::new();
        let (mut d, mut y_prev) = (0.0, 0.0);
        for i in 0..times.len() - 1 {
            let dt = times[i + 1] - times[i];
            let g = dt * tr.input(theta);
            power.add(g * g / dt);
            d += g;
            let y = d + b[i + 1];
            tr.update(y - y_prev, dt);
            y_prev = y;
        }
        let j = nearest_index(tr.estimate, self.lattice.len());
        TransmissionResult {
            sent_index: msg_index,
            decoded_index: j + 1,
            sent: theta,
            decoded: self.lattice[j],
            error: j + 1 != msg_index,
            realized_power: power.value() / (times[times.len() - 1] - times[0]),
        }
    }

    /// One trial per path index: uniform message, then Brownian noise on
    /// the code grid. Returns estimates of `[P_e, power]`.
    fn run_trials(&self, mc: &McConfig) -> Vec<crate::stats::Estimate> {
        let grid = &self.cfg.grid;
        let k = self.lattice.len();
        run_paths(mc, 2, |i| {
            let mut r = rng::stream(mc.seed, i);
            let idx = r.random_range(1..=k);
            let b = BrownianPath::sample_with(grid, &mut r);
            let t = self.transmit_values(idx, grid.points(), b.values());
            vec![if t.error { 1.0 } else { 0.0 }, t.realized_power]
        })
    }
}

/// Calibrates the code for `cfg` and sends one message.
pub fn sk_transmit(cfg: &CodeConfig, msg_index: usize, b: &BrownianPath) -> Result<TransmissionResult> {
    SkCode::calibrate(cfg)?.transmit(msg_index, b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRateRow {
    pub horizon: f64,
    pub messages: usize,
    pub trials: usize,
    pub errors: usize,
    pub p_e: f64,
    /// Half-width of the one-sigma Wilson interval.
    pub stderr: f64,
    pub realized_power_mean: f64,
    pub realized_power_stderr: f64,
    pub gain_scale: f64,
    /// Mean realized power exceeds `P` by more than three standard errors.
    pub power_violation: bool,
}

/// `P_e^{(T)}` and realized power for each horizon, at the rate, power and
/// step size of `cfg_base`. Trial `i` at horizon index `h` uses the stream
/// `(subseed(seed, h), i)`.
pub fn error_rate_curve(
    cfg_base: &CodeConfig,
    horizons: &[f64],
    n_trials: usize,
    seed: u64,
) -> Result<Vec<ErrorRateRow>> {
    if n_trials < 100 {
        return invalid(format!("n_trials must be at least 100, got {n_trials}"));
    }
    let mut rows = Vec::with_capacity(horizons.len());
    for (h, &horizon) in horizons.iter().enumerate() {
        let cfg = cfg_base.with_horizon(horizon)?;
        let code = SkCode::calibrate(&cfg)?;
        let est = code.run_trials(&McConfig::new(n_trials, rng::subseed(seed, h as u64)));
        let errors = (est[0].value * n_trials as f64).round() as usize;
        let (_, half) = wilson(errors, n_trials, 1.0);
        let power = est[1];
        rows.push(ErrorRateRow {
            horizon,
            messages: code.lattice().len(),
            trials: n_trials,
            errors,
            p_e: errors as f64 / n_trials as f64,
            stderr: half,
            realized_power_mean: power.value,
            realized_power_stderr: power.stderr,
            gain_scale: code.gain_scale(),
            power_violation: power.value > cfg.power + 3.0 * power.stderr,
        });
    }
    Ok(rows)
}
