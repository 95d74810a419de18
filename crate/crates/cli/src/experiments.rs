//! The six studies. Each returns its tables, a JSON summary and the
//! invariants it checked; nothing here touches the filesystem.

use serde_json::{json, Map, Value};

use fbchan::channel::{check_conditions, estimate_average_power};
use fbchan::coding::{error_rate_curve, CodeConfig};
use fbchan::discretize::{fit_strong_rate, strong_error_study};
use fbchan::info::{bpsk_awgn_oracle, capacity_band, mi_bound_chain, mi_cmmse, mi_convergence_study, mi_plugin};
use fbchan::{drift, rng, ChannelSpec, McConfig, Message, Reduction, TimeGrid};

use crate::config::{ChannelChoice, Experiment, ExperimentConfig};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    /// Floats use the shortest representation that parses back to the same
    /// value.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x}"),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub summary: Map<String, Value>,
    pub checks: Vec<Check>,
}

pub fn build_channel(cfg: &ExperimentConfig) -> Result<ChannelSpec, CliError> {
    let choice = cfg
        .channel
        .as_ref()
        .ok_or_else(|| CliError::Runtime(format!("{} needs a channel", cfg.experiment)))?;
    let g = match *choice {
        ChannelChoice::Zero => drift::zero(),
        ChannelChoice::ConstantAntipodal { amplitude } => drift::constant_antipodal(amplitude)?,
        ChannelChoice::SaturatedFeedback { lipschitz } => drift::saturated_feedback(lipschitz)?,
        ChannelChoice::SkLinearFeedback {
            gamma,
            s_floor,
            theta_plus,
            theta_minus,
        } => drift::sk_linear_feedback(
            gamma,
            vec![(-1.0, theta_minus), (1.0, theta_plus)],
            s_floor.unwrap_or(cfg.horizon / 8.0),
        )?,
    };
    Ok(ChannelSpec::new(
        g,
        Message::antipodal(cfg.p_plus)?,
        cfg.horizon,
        cfg.power,
    )?)
}

pub fn run(cfg: &ExperimentConfig, reduction: Reduction) -> Result<Outcome, CliError> {
    let mc = McConfig::new(cfg.n_paths, cfg.seed).with_reduction(reduction);
    match cfg.experiment {
        Experiment::EmError => em_error(cfg, &mc),
        Experiment::MiConverge => mi_converge(cfg, &mc),
        Experiment::MiCrosscheck => mi_crosscheck(cfg, &mc),
        Experiment::CapacitySweep => capacity_sweep(cfg),
        Experiment::SkDemo => sk_demo(cfg),
        Experiment::PowerAudit => power_audit(cfg, &mc),
    }
}

fn doubling_grids(cfg: &ExperimentConfig) -> Result<Vec<TimeGrid>, CliError> {
    (0..cfg.levels)
        .map(|k| Ok(TimeGrid::even(cfg.horizon, cfg.steps << k)?))
        .collect()
}

fn em_error(cfg: &ExperimentConfig, mc: &McConfig) -> Result<Outcome, CliError> {
    let spec = build_channel(cfg)?;
    let rows = strong_error_study(&spec, &doubling_grids(cfg)?, cfg.ref_factor, mc)?;
    let mut out = Outcome::default();
    out.tables.push(Table {
        file: "em_error.csv".into(),
        header: vec!["steps", "delta_s", "mean_sq_sup_error", "stderr"],
        rows: rows
            .iter()
            .map(|r| vec![r.steps.into(), r.delta.into(), r.mean_sq_error.into(), r.stderr.into()])
            .collect(),
    });
    let slope = fit_strong_rate(&rows);
    out.summary.insert("fitted_slope".into(), json!(slope));
    let max_err = rows.iter().map(|r| r.mean_sq_error).fold(0.0, f64::max);
    if matches!(cfg.channel, Some(ChannelChoice::Zero)) {
        out.checks.push(Check::new(
            "zero_drift_error_exactly_zero",
            max_err == 0.0,
            format!("max error {max_err}"),
        ));
    } else if !spec.drift().feedback() {
        // EM is exact for drifts constant along the path; only rounding remains
        out.checks.push(Check::new(
            "path_free_drift_error_at_rounding_level",
            max_err < 1e-20,
            format!("max error {max_err}"),
        ));
    } else {
        let passed = slope.is_some_and(|s| s >= 0.8);
        out.checks.push(Check::new(
            "strong_rate_slope_at_least_0.8",
            passed,
            format!("slope {slope:?}"),
        ));
    }
    Ok(out)
}

fn mi_converge(cfg: &ExperimentConfig, mc: &McConfig) -> Result<Outcome, CliError> {
    let spec = build_channel(cfg)?;
    let base = TimeGrid::even(cfg.horizon, cfg.steps)?;
    let rows = mi_convergence_study(&spec, &base, cfg.levels, mc)?;
    let mut out = Outcome::default();
    out.tables.push(Table {
        file: "mi_converge.csv".into(),
        header: vec!["level", "steps", "delta_s", "mi_nats", "stderr_nats"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.level.into(),
                    r.steps.into(),
                    r.delta.into(),
                    r.value.into(),
                    r.stderr.into(),
                ]
            })
            .collect(),
    });
    let finest = rows[rows.len() - 1];
    let prev = rows[rows.len() - 2];
    out.summary.insert("finest_mi_nats".into(), json!(finest.value));
    out.summary.insert("finest_stderr_nats".into(), json!(finest.stderr));

    let worst_drop = rows
        .windows(2)
        .map(|w| (w[0].value - w[1].value) - 3.0 * w[0].stderr.hypot(w[1].stderr))
        .fold(f64::NEG_INFINITY, f64::max);
    out.checks.push(Check::new(
        "nested_levels_non_decreasing_within_3se",
        worst_drop <= 0.0,
        format!("largest excess drop {worst_drop}"),
    ));
    let gap = (finest.value - prev.value).abs();
    let tol = 3.0 * finest.stderr.hypot(prev.stderr);
    out.checks.push(Check::new(
        "finest_levels_agree_within_3se",
        gap <= tol,
        format!("|Δ| = {gap}, 3se = {tol}"),
    ));
    let entropy = spec.message().entropy();
    out.checks.push(Check::new(
        "mi_at_most_message_entropy",
        finest.value <= entropy + 3.0 * finest.stderr,
        format!("mi {} vs H(M) {entropy}", finest.value),
    ));
    match cfg.channel {
        Some(ChannelChoice::Zero) => {
            let all_zero = rows.iter().all(|r| r.value == 0.0 && r.stderr == 0.0);
            out.checks
                .push(Check::new("zero_drift_mi_exactly_zero", all_zero, String::new()));
        }
        Some(ChannelChoice::ConstantAntipodal { amplitude }) if cfg.p_plus == 0.5 => {
            let oracle = bpsk_awgn_oracle(amplitude * amplitude * cfg.horizon)?;
            out.summary.insert("oracle_mi_nats".into(), json!(oracle));
            let err = (finest.value - oracle).abs();
            let tol = (3.0 * finest.stderr).max(0.01);
            out.checks.push(Check::new(
                "finest_level_matches_oracle",
                err <= tol,
                format!("|mi − oracle| = {err}, tolerance {tol}"),
            ));
        }
        _ => {}
    }
    Ok(out)
}

fn mi_crosscheck(cfg: &ExperimentConfig, mc: &McConfig) -> Result<Outcome, CliError> {
    let spec = build_channel(cfg)?;
    let grid = TimeGrid::even(cfg.horizon, cfg.steps)?;
    let p = mi_plugin(&spec, &grid, mc)?;
    let c = mi_cmmse(&spec, &grid, mc)?;
    let b = mi_bound_chain(&spec, &grid, mc)?;
    let mut out = Outcome::default();
    out.tables.push(Table {
        file: "mi_crosscheck.csv".into(),
        header: vec![
            "steps",
            "delta_s",
            "plugin_nats",
            "plugin_stderr_nats",
            "cmmse_nats",
            "cmmse_stderr_nats",
            "b_log_nats",
            "b_power_nats",
            "b_power_stderr_nats",
            "half_pt_nats",
        ],
        rows: vec![vec![
            grid.steps().into(),
            grid.max_step().into(),
            p.value.into(),
            p.stderr.into(),
            c.value.into(),
            c.stderr.into(),
            b.b_log.into(),
            b.b_power.into(),
            b.b_power_stderr.into(),
            b.b_half_pt.into(),
        ]],
    });
    out.summary.insert("plugin_nats".into(), json!(p.value));
    out.summary.insert("cmmse_nats".into(), json!(c.value));
    let tol = 3.0 * p.combined_stderr(&c);
    out.checks.push(Check::new(
        "plugin_and_cmmse_agree_within_3se",
        (p.value - c.value).abs() <= tol,
        format!("|Δ| = {}, 3se = {tol}", (p.value - c.value).abs()),
    ));
    out.checks.push(Check::new(
        "plugin_below_b_log",
        p.value <= b.b_log + 3.0 * p.stderr,
        format!("{} ≤ {} + 3·{}", p.value, b.b_log, p.stderr),
    ));
    out.checks.push(Check::new(
        "b_log_below_b_power",
        b.b_log <= b.b_power,
        format!("{} ≤ {}", b.b_log, b.b_power),
    ));
    out.checks.push(Check::new(
        "b_power_below_half_pt",
        b.b_power <= b.b_half_pt + 3.0 * b.b_power_stderr,
        format!("{} ≤ {} + 3·{}", b.b_power, b.b_half_pt, b.b_power_stderr),
    ));
    Ok(out)
}

fn capacity_sweep(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut bands = cfg.bandwidths.clone();
    bands.sort_by(f64::total_cmp);
    bands.dedup();
    let half = cfg.power / 2.0;
    let caps = bands
        .iter()
        .map(|&w| capacity_band(cfg.power, w))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Outcome::default();
    out.tables.push(Table {
        file: "capacity_sweep.csv".into(),
        header: vec!["bandwidth_hz", "capacity_nats_per_s", "half_power_nats_per_s"],
        rows: bands
            .iter()
            .zip(&caps)
            .map(|(&w, &c)| vec![w.into(), c.into(), half.into()])
            .collect(),
    });
    out.summary.insert("half_power_nats_per_s".into(), json!(half));
    out.summary
        .insert("widest_band_capacity_nats_per_s".into(), json!(caps.last()));
    out.checks.push(Check::new(
        "capacity_increasing_in_bandwidth",
        caps.windows(2).all(|w| w[0] < w[1]),
        String::new(),
    ));
    out.checks.push(Check::new(
        "capacity_below_half_power",
        caps.iter().all(|&c| c <= half),
        String::new(),
    ));
    Ok(out)
}

fn sk_demo(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let h0 = cfg.horizons[0];
    let n0 = (h0 / cfg.sk_step).round().max(1.0) as usize;
    let base = CodeConfig::new(cfg.rate, h0, cfg.power, TimeGrid::even(h0, n0)?)?;
    let rows = error_rate_curve(&base, &cfg.horizons, cfg.n_trials, cfg.seed)?;
    let mut out = Outcome::default();
    out.tables.push(Table {
        file: "sk_demo.csv".into(),
        header: vec![
            "horizon_s",
            "messages",
            "trials",
            "errors",
            "p_e",
            "p_e_stderr",
            "realized_power",
            "realized_power_stderr",
            "power_limit",
            "gain_scale",
            "rate_nats_per_s",
        ],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.horizon.into(),
                    r.messages.into(),
                    r.trials.into(),
                    r.errors.into(),
                    r.p_e.into(),
                    r.stderr.into(),
                    r.realized_power_mean.into(),
                    r.realized_power_stderr.into(),
                    cfg.power.into(),
                    r.gain_scale.into(),
                    cfg.rate.into(),
                ]
            })
            .collect(),
    });
    out.summary.insert("capacity_nats_per_s".into(), json!(cfg.power / 2.0));
    out.summary
        .insert("rate_over_capacity".into(), json!(cfg.rate / (cfg.power / 2.0)));
    let violations: Vec<f64> = rows.iter().filter(|r| r.power_violation).map(|r| r.horizon).collect();
    out.checks.push(Check::new(
        "realized_power_within_limit",
        violations.is_empty(),
        format!("violating horizons {violations:?}"),
    ));
    if cfg.rate < cfg.power / 2.0 {
        let worst = rows
            .windows(2)
            .map(|w| (w[1].p_e - w[0].p_e) - 2.0 * w[0].stderr.hypot(w[1].stderr))
            .fold(f64::NEG_INFINITY, f64::max);
        out.checks.push(Check::new(
            "error_rate_decreasing_within_2se",
            rows.len() < 2 || worst <= 0.0,
            format!("largest excess rise {worst}"),
        ));
    }
    Ok(out)
}

fn power_audit(cfg: &ExperimentConfig, mc: &McConfig) -> Result<Outcome, CliError> {
    let spec = build_channel(cfg)?;
    let grid = TimeGrid::even(cfg.horizon, cfg.steps)?;
    let power = estimate_average_power(&spec, &grid, mc)?;
    let rep = check_conditions(
        spec.drift(),
        spec.message(),
        &grid,
        cfg.probes,
        rng::subseed(cfg.seed, 1),
    )?;
    let mut out = Outcome::default();
    out.tables.push(Table {
        file: "power_audit.csv".into(),
        header: vec![
            "channel",
            "horizon_s",
            "steps",
            "average_power",
            "average_power_stderr",
            "power_limit",
            "declared_lipschitz",
            "max_lipschitz_ratio",
            "declared_growth",
            "max_growth_ratio",
            "feedback",
        ],
        rows: vec![vec![
            spec.drift().name().as_str().into(),
            cfg.horizon.into(),
            grid.steps().into(),
            power.value.into(),
            power.stderr.into(),
            cfg.power.into(),
            rep.declared_lipschitz.into(),
            rep.max_lipschitz_ratio.into(),
            rep.declared_growth.into(),
            rep.max_growth_ratio.into(),
            spec.drift().feedback().into(),
        ]],
    });
    out.summary.insert("average_power".into(), json!(power.value));
    out.summary.insert("average_power_stderr".into(), json!(power.stderr));
    out.checks.push(Check::new(
        "average_power_within_limit",
        power.value <= cfg.power + 3.0 * power.stderr,
        format!("{} ≤ {} + 3·{}", power.value, cfg.power, power.stderr),
    ));
    out.checks.push(Check::new(
        "declared_constants_hold",
        !rep.any_violation(),
        format!(
            "lipschitz {} / {}, growth {} / {}, prefix sensitivity {}",
            rep.max_lipschitz_ratio,
            rep.declared_lipschitz,
            rep.max_growth_ratio,
            rep.declared_growth,
            rep.max_prefix_sensitivity
        ),
    ));
    Ok(out)
}
