//! Flat TOML experiment configuration.
//!
//! Every key is optional except `experiment` and `seed`; the seed may also
//! come from `--seed`. Unknown keys, and channel parameters that do not
//! belong to the selected channel, are errors.

use std::fmt;
use std::path::{Path, PathBuf};

use toml::{Table, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    EmError,
    MiConverge,
    MiCrosscheck,
    CapacitySweep,
    SkDemo,
    PowerAudit,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::EmError,
        Experiment::MiConverge,
        Experiment::MiCrosscheck,
        Experiment::CapacitySweep,
        Experiment::SkDemo,
        Experiment::PowerAudit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::EmError => "em-error",
            Experiment::MiConverge => "mi-converge",
            Experiment::MiCrosscheck => "mi-crosscheck",
            Experiment::CapacitySweep => "capacity-sweep",
            Experiment::SkDemo => "sk-demo",
            Experiment::PowerAudit => "power-audit",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }

    /// Whether the experiment simulates a configured channel.
    pub fn needs_channel(self) -> bool {
        !matches!(self, Experiment::CapacitySweep | Experiment::SkDemo)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelChoice {
    Zero,
    ConstantAntipodal {
        amplitude: f64,
    },
    SaturatedFeedback {
        lipschitz: f64,
    },
    SkLinearFeedback {
        gamma: f64,
        s_floor: Option<f64>,
        theta_plus: f64,
        theta_minus: f64,
    },
}

/// Name, parameter keys and a one-line description of each channel.
pub const CHANNELS: [(&str, &[&str], &str); 4] = [
    ("zero", &[], "g = 0; carries no information"),
    ("constant_antipodal", &["amplitude"], "g = a·m for m = ±1, no feedback"),
    (
        "saturated_feedback",
        &["lipschitz"],
        "g = L·tanh(m + y(s)), bounded feedback",
    ),
    (
        "sk_linear_feedback",
        &["gamma", "s_floor", "theta_plus", "theta_minus"],
        "g = γ(θ_m − y(s)/max(s, s_floor)), linear feedback",
    ),
];

impl ChannelChoice {
    pub fn name(&self) -> &'static str {
        match self {
            ChannelChoice::Zero => "zero",
            ChannelChoice::ConstantAntipodal { .. } => "constant_antipodal",
            ChannelChoice::SaturatedFeedback { .. } => "saturated_feedback",
            ChannelChoice::SkLinearFeedback { .. } => "sk_linear_feedback",
        }
    }
}

const GENERAL_KEYS: [&str; 18] = [
    "experiment",
    "channel",
    "seed",
    "horizon",
    "power",
    "p_plus",
    "steps",
    "levels",
    "ref_factor",
    "n_paths",
    "probes",
    "bandwidths",
    "rate",
    "horizons",
    "sk_step",
    "n_trials",
    "output_dir",
    "deterministic",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub channel: Option<ChannelChoice>,
    pub seed: u64,
    /// Seconds.
    pub horizon: f64,
    pub power: f64,
    pub p_plus: f64,
    pub steps: usize,
    pub levels: usize,
    pub ref_factor: usize,
    pub n_paths: usize,
    pub probes: usize,
    /// Hz.
    pub bandwidths: Vec<f64>,
    /// Nats per second.
    pub rate: f64,
    pub horizons: Vec<f64>,
    /// Seconds.
    pub sk_step: f64,
    pub n_trials: usize,
    pub output_dir: Option<PathBuf>,
    pub deterministic: bool,
    /// The parsed file, echoed into the manifest.
    pub raw: Table,
}

/// Values supplied on the command line that take part in validation.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
}

struct Reader<'a> {
    table: &'a Table,
    errors: Vec<String>,
}

impl<'a> Reader<'a> {
    fn err(&mut self, key: &str, msg: impl fmt::Display) {
        self.errors.push(format!("field `{key}`: {msg}"));
    }

    fn float(&mut self, key: &str, default: f64, check: fn(f64) -> bool, what: &str) -> f64 {
        match self.table.get(key) {
            None => default,
            Some(Value::Float(x)) if check(*x) => *x,
            Some(Value::Integer(i)) if check(*i as f64) => *i as f64,
            Some(v) => {
                self.err(key, format!("expected {what}, got {v}"));
                default
            }
        }
    }

    fn opt_float(&mut self, key: &str, check: fn(f64) -> bool, what: &str) -> Option<f64> {
        self.table
            .contains_key(key)
            .then(|| self.float(key, f64::NAN, check, what))
    }

    fn count(&mut self, key: &str, default: usize, min: usize) -> usize {
        match self.table.get(key) {
            None => default,
            Some(Value::Integer(i)) if *i >= min as i64 => *i as usize,
            Some(v) => {
                self.err(key, format!("expected an integer ≥ {min}, got {v}"));
                default
            }
        }
    }

    fn float_list(&mut self, key: &str, default: &[f64]) -> Vec<f64> {
        match self.table.get(key) {
            None => default.to_vec(),
            Some(Value::Array(a)) if !a.is_empty() => {
                let xs: Vec<f64> = a
                    .iter()
                    .filter_map(|v| match v {
                        Value::Float(x) => Some(*x),
                        Value::Integer(i) => Some(*i as f64),
                        _ => None,
                    })
                    .collect();
                if xs.len() != a.len() || xs.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                    self.err(key, "expected a list of positive numbers");
                }
                xs
            }
            Some(v) => {
                self.err(key, format!("expected a nonempty list of positive numbers, got {v}"));
                default.to_vec()
            }
        }
    }

    fn string(&mut self, key: &str) -> Option<&'a str> {
        match self.table.get(key) {
            None => None,
            Some(Value::String(s)) => Some(s.as_str()),
            Some(v) => {
                self.err(key, format!("expected a string, got {v}"));
                None
            }
        }
    }
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

fn real(x: f64) -> bool {
    x.is_finite()
}

fn probability(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

/// Full schema check of a parsed table. Collects every error it finds.
pub fn from_table(table: Table, overrides: &Overrides) -> Result<ExperimentConfig, CliError> {
    let mut r = Reader {
        table: &table,
        errors: Vec::new(),
    };
    let channel_params: Vec<&str> = CHANNELS.iter().flat_map(|c| c.1.iter().copied()).collect();
    for key in table.keys() {
        if !GENERAL_KEYS.contains(&key.as_str()) && !channel_params.contains(&key.as_str()) {
            r.err(key, "unknown key");
        }
    }

    let experiment = match r.string("experiment") {
        None if !table.contains_key("experiment") => {
            r.err("experiment", "missing");
            None
        }
        None => None,
        Some(s) => {
            let e = Experiment::parse(s);
            if e.is_none() {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
                r.err(
                    "experiment",
                    format!("unknown experiment `{s}`; available: {}", names.join(", ")),
                );
            }
            e
        }
    };

    let seed = match (overrides.seed, table.get("seed")) {
        (Some(s), _) => s,
        (None, Some(Value::Integer(i))) if *i >= 0 => *i as u64,
        (None, Some(v)) => {
            r.err("seed", format!("expected a nonnegative integer, got {v}"));
            0
        }
        (None, None) => {
            r.err("seed", "missing (set it in the config or pass --seed)");
            0
        }
    };

    let horizon = r.float("horizon", 1.0, positive, "a positive number of seconds");
    let power = r.float("power", 2.0, positive, "a positive number");
    let p_plus = r.float("p_plus", 0.5, probability, "a probability in [0, 1]");
    let steps = r.count("steps", 8, 1);
    let levels = r.count("levels", 4, 2);
    let ref_factor = r.count("ref_factor", 64, 16);
    let n_paths = r.count("n_paths", 2000, 100);
    let probes = r.count("probes", 200, 1);
    let bandwidths = r.float_list("bandwidths", &[1.0, 10.0, 100.0]);
    let rate = r.float("rate", 0.4, positive, "a positive rate in nats/s");
    let horizons = r.float_list("horizons", &[2.0, 4.0, 8.0]);
    let sk_step = r.float("sk_step", 1.0 / 32.0, positive, "a positive step in seconds");
    let n_trials = r.count("n_trials", 1000, 100);
    let output_dir = r.string("output_dir").map(PathBuf::from);
    let deterministic = match table.get("deterministic") {
        None => false,
        Some(Value::Boolean(b)) => *b,
        Some(v) => {
            r.err("deterministic", format!("expected true or false, got {v}"));
            false
        }
    };

    let channel = read_channel(&mut r, experiment);

    if r.errors.is_empty() {
        Ok(ExperimentConfig {
            experiment: experiment.expect("checked above"),
            channel,
            seed,
            horizon,
            power,
            p_plus,
            steps,
            levels,
            ref_factor,
            n_paths,
            probes,
            bandwidths,
            rate,
            horizons,
            sk_step,
            n_trials,
            output_dir,
            deterministic,
            raw: table,
        })
    } else {
        Err(CliError::Config(r.errors))
    }
}

fn read_channel(r: &mut Reader<'_>, experiment: Option<Experiment>) -> Option<ChannelChoice> {
    let name = r.string("channel");
    if name.is_none() && !r.table.contains_key("channel") && experiment.is_some_and(Experiment::needs_channel) {
        r.err("channel", "missing; this experiment simulates a channel");
    }
    let known = name.and_then(|n| CHANNELS.iter().find(|c| c.0 == n));
    if let (Some(n), None) = (name, known) {
        let names: Vec<_> = CHANNELS.iter().map(|c| c.0).collect();
        r.err(
            "channel",
            format!("unknown channel `{n}`; available: {}", names.join(", ")),
        );
    }
    let allowed: &[&str] = known.map(|c| c.1).unwrap_or(&[]);
    for (_, params, _) in CHANNELS {
        for p in params {
            if r.table.contains_key(*p) && !allowed.contains(p) {
                r.err(p, format!("not a parameter of channel `{}`", name.unwrap_or("<none>")));
            }
        }
    }
    Some(match known?.0 {
        "zero" => ChannelChoice::Zero,
        "constant_antipodal" => ChannelChoice::ConstantAntipodal {
            amplitude: r.float("amplitude", 1.0, real, "a finite number"),
        },
        "saturated_feedback" => ChannelChoice::SaturatedFeedback {
            lipschitz: r.float("lipschitz", 1.0, positive, "a positive number"),
        },
        _ => ChannelChoice::SkLinearFeedback {
            gamma: r.float("gamma", 1.0, real, "a finite number"),
            s_floor: r.opt_float("s_floor", positive, "a positive number of seconds"),
            theta_plus: r.float("theta_plus", 1.0, real, "a finite number"),
            theta_minus: r.float("theta_minus", -1.0, real, "a finite number"),
        },
    })
}

pub fn parse_str(text: &str, overrides: &Overrides) -> Result<ExperimentConfig, CliError> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Config(vec![format!("syntax: {}", e.message())]))?;
    from_table(table, overrides)
}

pub fn load(path: &Path, overrides: &Overrides) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_str(&text, overrides)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn errors(text: &str) -> Vec<String> {
        match parse_str(text, &Overrides::default()) {
            Err(CliError::Config(e)) => e,
            other => panic!("expected config errors, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config() {
        let c = parse_str("experiment = \"capacity-sweep\"\nseed = 3\n", &Overrides::default()).unwrap();
        assert_eq!(c.experiment, Experiment::CapacitySweep);
        assert_eq!(c.seed, 3);
        assert_eq!(c.bandwidths, vec![1.0, 10.0, 100.0]);
        assert!(c.channel.is_none());
    }

    #[test]
    fn negative_paths_named() {
        let e = errors("experiment = \"mi-converge\"\nchannel = \"zero\"\nseed = 1\nn_paths = -5\n");
        assert_eq!(e.len(), 1);
        assert!(e[0].contains("n_paths"), "{e:?}");
    }

    #[test]
    fn unknown_channel_lists_available() {
        let e = errors("experiment = \"mi-converge\"\nchannel = \"nope\"\nseed = 1\n");
        assert!(e[0].contains("sk_linear_feedback") && e[0].contains("zero"), "{e:?}");
    }

    #[test]
    fn typos_and_foreign_parameters_rejected() {
        let e = errors("experiment = \"em-error\"\nchannel = \"zero\"\nseed = 1\nn_path = 10\nlipschitz = 2.0\n");
        assert_eq!(e.len(), 2, "{e:?}");
        assert!(e.iter().any(|m| m.contains("`n_path`: unknown key")));
        assert!(e.iter().any(|m| m.contains("`lipschitz`: not a parameter")));
    }

    #[test]
    fn seed_is_mandatory_unless_overridden() {
        let text = "experiment = \"capacity-sweep\"\n";
        assert!(errors(text)[0].contains("seed"));
        let c = parse_str(text, &Overrides { seed: Some(9) }).unwrap();
        assert_eq!(c.seed, 9);
    }

    #[test]
    fn all_errors_collected() {
        let e = errors("experiment = \"bogus\"\nhorizon = -1\npower = \"x\"\n");
        assert!(e.len() >= 4, "{e:?}");
    }

    #[test]
    fn channel_parameters_parsed() {
        let c = parse_str(
            "experiment = \"power-audit\"\nchannel = \"sk_linear_feedback\"\nseed = 0\ngamma = 0.5\ns_floor = 0.25\n",
            &Overrides::default(),
        )
        .unwrap();
        assert_eq!(
            c.channel,
            Some(ChannelChoice::SkLinearFeedback {
                gamma: 0.5,
                s_floor: Some(0.25),
                theta_plus: 1.0,
                theta_minus: -1.0
            })
        );
    }
}
