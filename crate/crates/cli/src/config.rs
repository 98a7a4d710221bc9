//! Sweep configuration: key=value files, flag values, and validation.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use qudit_bell::thresholds::{Inequality, DEFAULT_TOLERANCE};
use qudit_bell::{
    IterationPolicy, NoiseKind, OffsetConvention, PhaseConvention, Protocol, StateVariant,
};
use thiserror::Error;

pub const DEFAULT_D_CAP: usize = 16;
pub const EXTENDED_D_CAP: usize = 32;
pub const DEFAULT_TRIALS: usize = 50;
pub const DEFAULT_QUBITS: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("invalid value for '{field}': {message}")]
    Invalid { field: String, message: String },
    #[error("config line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("config line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("cannot read config file {path}: {message}")]
    Io { path: String, message: String },
}

impl ConfigError {
    fn invalid(field: &str, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// Field the diagnostic refers to, when there is one.
    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::Invalid { field, .. } => Some(field),
            ConfigError::UnknownKey { key, .. } => Some(key),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InequalitySelection {
    Cglmp,
    Zg,
    #[default]
    Both,
}

impl InequalitySelection {
    pub fn inequalities(self) -> &'static [Inequality] {
        match self {
            InequalitySelection::Cglmp => &[Inequality::Cglmp],
            InequalitySelection::Zg => &[Inequality::ZohrenGill],
            InequalitySelection::Both => &[Inequality::Cglmp, Inequality::ZohrenGill],
        }
    }
}

impl FromStr for InequalitySelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cglmp" => Ok(InequalitySelection::Cglmp),
            "zg" => Ok(InequalitySelection::Zg),
            "both" => Ok(InequalitySelection::Both),
            other => Err(format!(
                "unknown inequality '{other}' (expected cglmp, zg or both)"
            )),
        }
    }
}

/// Partially specified configuration. Every source (file, flags) produces
/// one of these and later sources win field by field.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigOverrides {
    pub d_min: Option<usize>,
    pub d_max: Option<usize>,
    pub noise: Option<Vec<NoiseKind>>,
    pub p: Option<Vec<f64>>,
    pub iterations: Option<Vec<IterationPolicy>>,
    pub state: Option<StateVariant>,
    pub convention: Option<PhaseConvention>,
    pub offset: Option<OffsetConvention>,
    pub inequality: Option<InequalitySelection>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub tolerance: Option<f64>,
    pub extended_range: Option<bool>,
    pub qubits: Option<usize>,
    pub trials: Option<usize>,
}

impl ConfigOverrides {
    /// Fields set in `other` replace those in `self`.
    pub fn merge(self, other: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            d_min: other.d_min.or(self.d_min),
            d_max: other.d_max.or(self.d_max),
            noise: other.noise.or(self.noise),
            p: other.p.or(self.p),
            iterations: other.iterations.or(self.iterations),
            state: other.state.or(self.state),
            convention: other.convention.or(self.convention),
            offset: other.offset.or(self.offset),
            inequality: other.inequality.or(self.inequality),
            format: other.format.or(self.format),
            out: other.out.or(self.out),
            seed: other.seed.or(self.seed),
            jobs: other.jobs.or(self.jobs),
            tolerance: other.tolerance.or(self.tolerance),
            extended_range: other.extended_range.or(self.extended_range),
            qubits: other.qubits.or(self.qubits),
            trials: other.trials.or(self.trials),
        }
    }

    /// Sets one field from its textual value. Keys accept `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key.replace('-', "_").as_str() {
            "d_min" => self.d_min = Some(parse_count("d_min", value)?),
            "d_max" => self.d_max = Some(parse_count("d_max", value)?),
            "noise" => self.noise = Some(parse_noise_list(value)?),
            "p" => self.p = Some(parse_p_list(value)?),
            "iterations" => self.iterations = Some(parse_policy_list(value)?),
            "state" => self.state = Some(parse_state(value)?),
            "convention" => self.convention = Some(parse_field("convention", value)?),
            "offset" => self.offset = Some(parse_field("offset", value)?),
            "inequality" => self.inequality = Some(parse_field("inequality", value)?),
            "format" => self.format = Some(parse_field("format", value)?),
            "out" => {
                if value.is_empty() {
                    return Err(ConfigError::invalid("out", "empty path"));
                }
                self.out = Some(PathBuf::from(value));
            }
            "seed" => self.seed = Some(parse_field("seed", value)?),
            "jobs" => self.jobs = Some(parse_count("jobs", value)?),
            "tolerance" => self.tolerance = Some(parse_float("tolerance", value)?),
            "extended_range" => self.extended_range = Some(parse_field("extended_range", value)?),
            "qubits" => self.qubits = Some(parse_count("qubits", value)?),
            "trials" => self.trials = Some(parse_count("trials", value)?),
            _ => {
                return Err(ConfigError::UnknownKey {
                    line: 0,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }
}

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
/// List values are comma separated. A key given twice is an error.
pub fn parse_config_text(text: &str) -> Result<ConfigOverrides, ConfigError> {
    let mut out = ConfigOverrides::default();
    let mut seen: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                message: format!("expected key=value, found '{content}'"),
            });
        };
        let key = key.trim().replace('-', "_");
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                message: "missing key".into(),
            });
        }
        if seen.contains(&key) {
            return Err(ConfigError::Syntax {
                line,
                message: format!("key '{key}' given more than once"),
            });
        }
        out.set(&key, value).map_err(|e| match e {
            ConfigError::UnknownKey { key, .. } => ConfigError::UnknownKey { line, key },
            other => other,
        })?;
        seen.push(key);
    }
    Ok(out)
}

pub fn load_config_file(path: &std::path::Path) -> Result<ConfigOverrides, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config_text(&text)
}

fn parse_field<T: FromStr>(field: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| ConfigError::invalid(field, format!("'{value}': {e}")))
}

fn parse_count(field: &str, value: &str) -> Result<usize, ConfigError> {
    parse_field(field, value)
}

fn parse_float(field: &str, value: &str) -> Result<f64, ConfigError> {
    let x: f64 = parse_field(field, value)?;
    if !x.is_finite() {
        return Err(ConfigError::invalid(
            field,
            format!("'{value}' is not finite"),
        ));
    }
    Ok(x)
}

fn split_list(field: &str, value: &str) -> Result<Vec<String>, ConfigError> {
    let items: Vec<String> = value
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(ConfigError::invalid(field, "list is empty"));
    }
    Ok(items)
}

pub fn parse_noise_list(value: &str) -> Result<Vec<NoiseKind>, ConfigError> {
    split_list("noise", value)?
        .iter()
        .map(|s| parse_field("noise", s))
        .collect()
}

/// Comma-separated probabilities, each finite and inside `[0, 1]`.
pub fn parse_p_list(value: &str) -> Result<Vec<f64>, ConfigError> {
    let ps = split_list("p", value)?
        .iter()
        .map(|s| parse_float("p", s))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(bad) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(ConfigError::invalid(
            "p",
            format!("{bad} is outside [0, 1]"),
        ));
    }
    Ok(ps)
}

pub fn parse_policy_list(value: &str) -> Result<Vec<IterationPolicy>, ConfigError> {
    split_list("iterations", value)?
        .iter()
        .map(|s| parse_field("iterations", s))
        .collect()
}

/// `max`, `app` or `rev`; `rev-wrapped` selects the mod-d reversal.
pub fn parse_state(value: &str) -> Result<StateVariant, ConfigError> {
    parse_field("state", value)
}

/// Fully resolved settings shared by every subcommand.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub d_min: usize,
    pub d_max: usize,
    pub noise: Vec<NoiseKind>,
    pub p: Vec<f64>,
    pub iterations: Vec<IterationPolicy>,
    pub protocol: Protocol,
    pub inequality: InequalitySelection,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub jobs: usize,
    pub tolerance: f64,
}

impl SweepConfig {
    pub fn dimensions(&self) -> std::ops::RangeInclusive<usize> {
        self.d_min..=self.d_max
    }
}

fn d_bounds(o: &ConfigOverrides, cap: usize) -> Result<(usize, usize), ConfigError> {
    let d_min = o.d_min.unwrap_or(2);
    let d_max = o.d_max.unwrap_or(DEFAULT_D_CAP.min(cap));
    if d_min < 2 {
        return Err(ConfigError::invalid("d_min", format!("{d_min} is below 2")));
    }
    if d_max > cap {
        let hint = if cap < EXTENDED_D_CAP {
            " (use --extended-range to allow up to 32)"
        } else {
            ""
        };
        return Err(ConfigError::invalid(
            "d_max",
            format!("{d_max} exceeds the cap of {cap}{hint}"),
        ));
    }
    if d_min > d_max {
        return Err(ConfigError::invalid(
            "d_min",
            format!("{d_min} is greater than d_max = {d_max}"),
        ));
    }
    Ok((d_min, d_max))
}

/// Validates a merged configuration for the sweep subcommands.
pub fn resolve(o: &ConfigOverrides) -> Result<SweepConfig, ConfigError> {
    let cap = if o.extended_range.unwrap_or(false) {
        EXTENDED_D_CAP
    } else {
        DEFAULT_D_CAP
    };
    let (d_min, d_max) = d_bounds(o, cap)?;
    let noise = o
        .noise
        .clone()
        .ok_or_else(|| ConfigError::invalid("noise", "at least one noise kind is required"))?;
    if noise.is_empty() {
        return Err(ConfigError::invalid("noise", "list is empty"));
    }
    let p = o.p.clone().unwrap_or_else(|| vec![1.0]);
    if p.is_empty() {
        return Err(ConfigError::invalid("p", "list is empty"));
    }
    if let Some(bad) = p.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(ConfigError::invalid(
            "p",
            format!("{bad} is outside [0, 1]"),
        ));
    }
    let iterations = o
        .iterations
        .clone()
        .unwrap_or_else(|| vec![IterationPolicy::Single]);
    if iterations.is_empty() {
        return Err(ConfigError::invalid("iterations", "list is empty"));
    }
    let jobs = o.jobs.unwrap_or(1);
    if jobs == 0 {
        return Err(ConfigError::invalid("jobs", "must be at least 1"));
    }
    let tolerance = o.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(ConfigError::invalid(
            "tolerance",
            format!("{tolerance} is outside (0, 1)"),
        ));
    }
    Ok(SweepConfig {
        d_min,
        d_max,
        noise,
        p,
        iterations,
        protocol: Protocol {
            variant: o.state.unwrap_or_default(),
            convention: o.convention.unwrap_or_default(),
            offset: o.offset.unwrap_or_default(),
        },
        inequality: o.inequality.unwrap_or_default(),
        format: o.format.unwrap_or_default(),
        out: o.out.clone(),
        seed: o.seed.unwrap_or(0),
        jobs,
        tolerance,
    })
}

/// `d_max` for the fit check; always capped at 16.
pub fn resolve_fit_d_max(o: &ConfigOverrides) -> Result<usize, ConfigError> {
    let d_max = o.d_max.unwrap_or(DEFAULT_D_CAP);
    if !(2..=DEFAULT_D_CAP).contains(&d_max) {
        return Err(ConfigError::invalid(
            "d_max",
            format!("{d_max} is outside 2..=16"),
        ));
    }
    Ok(d_max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub qubits: usize,
    pub trials: usize,
    pub seed: u64,
}

pub fn resolve_verify(o: &ConfigOverrides) -> Result<VerifyConfig, ConfigError> {
    let qubits = o.qubits.unwrap_or(DEFAULT_QUBITS);
    if !(1..=qudit_bell::circuit::MAX_QUBITS).contains(&qubits) {
        return Err(ConfigError::invalid(
            "qubits",
            format!("{qubits} is outside 1..=5"),
        ));
    }
    let trials = o.trials.unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(ConfigError::invalid("trials", "must be at least 1"));
    }
    Ok(VerifyConfig {
        qubits,
        trials,
        seed: o.seed.unwrap_or(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_noise() -> ConfigOverrides {
        ConfigOverrides {
            noise: Some(vec![NoiseKind::Depolarizing]),
            ..Default::default()
        }
    }

    #[test]
    fn parses_a_config_file() {
        let text = "# figure 3a\nd_min = 2\nd-max=8\nnoise = depolarizing, dephasing\n\
                    p = 1, 0.99,0.95 # trailing\niterations = single,linear,3\nstate=app\nformat=json\n";
        let o = parse_config_text(text).unwrap();
        assert_eq!(o.d_min, Some(2));
        assert_eq!(o.d_max, Some(8));
        assert_eq!(
            o.noise,
            Some(vec![NoiseKind::Depolarizing, NoiseKind::Dephasing])
        );
        assert_eq!(o.p, Some(vec![1.0, 0.99, 0.95]));
        assert_eq!(
            o.iterations,
            Some(vec![
                IterationPolicy::Single,
                IterationPolicy::Linear,
                IterationPolicy::Fixed(3)
            ])
        );
        assert_eq!(o.state, Some(StateVariant::App));
        assert_eq!(o.format, Some(OutputFormat::Json));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        assert!(matches!(
            parse_config_text("d_min=2\nbogus"),
            Err(ConfigError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_config_text("\ncolour=red"),
            Err(ConfigError::UnknownKey { line: 2, .. })
        ));
        assert!(matches!(
            parse_config_text("p=1\np=0.5"),
            Err(ConfigError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_config_text("=3"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn flags_override_file() {
        let file = parse_config_text("d_max=8\np=0.5\nseed=3").unwrap();
        let flags = ConfigOverrides {
            d_max: Some(4),
            ..Default::default()
        };
        let merged = file.merge(flags);
        assert_eq!(merged.d_max, Some(4));
        assert_eq!(merged.p, Some(vec![0.5]));
        assert_eq!(merged.seed, Some(3));
    }

    #[test]
    fn errors_name_the_field() {
        let mut o = with_noise();
        o.d_max = Some(17);
        assert_eq!(resolve(&o).unwrap_err().field(), Some("d_max"));
        o.extended_range = Some(true);
        assert_eq!(resolve(&o).unwrap().d_max, 17);
        o.d_max = Some(33);
        assert_eq!(resolve(&o).unwrap_err().field(), Some("d_max"));

        let mut o = with_noise();
        o.d_min = Some(1);
        assert_eq!(resolve(&o).unwrap_err().field(), Some("d_min"));
        o.d_min = Some(9);
        o.d_max = Some(4);
        assert_eq!(resolve(&o).unwrap_err().field(), Some("d_min"));

        assert_eq!(
            resolve(&ConfigOverrides::default()).unwrap_err().field(),
            Some("noise")
        );
        let mut o = with_noise();
        o.noise = Some(vec![]);
        assert_eq!(resolve(&o).unwrap_err().field(), Some("noise"));
        assert_eq!(parse_noise_list(" , ").unwrap_err().field(), Some("noise"));
        assert_eq!(parse_p_list("0.5,1.5").unwrap_err().field(), Some("p"));
        assert_eq!(parse_p_list("nan").unwrap_err().field(), Some("p"));
        assert_eq!(
            parse_policy_list("twice").unwrap_err().field(),
            Some("iterations")
        );
    }

    #[test]
    fn defaults() {
        let c = resolve(&with_noise()).unwrap();
        assert_eq!((c.d_min, c.d_max), (2, 16));
        assert_eq!(c.p, vec![1.0]);
        assert_eq!(c.iterations, vec![IterationPolicy::Single]);
        assert_eq!(c.protocol, Protocol::default());
        assert_eq!(c.format, OutputFormat::Csv);
        assert_eq!(c.jobs, 1);
    }

    #[test]
    fn fit_and_verify_limits() {
        let mut o = ConfigOverrides::default();
        assert_eq!(resolve_fit_d_max(&o), Ok(16));
        o.d_max = Some(17);
        o.extended_range = Some(true);
        assert_eq!(resolve_fit_d_max(&o).unwrap_err().field(), Some("d_max"));

        let mut o = ConfigOverrides::default();
        assert_eq!(resolve_verify(&o).unwrap().qubits, 3);
        o.qubits = Some(6);
        assert_eq!(resolve_verify(&o).unwrap_err().field(), Some("qubits"));
        o.qubits = Some(1);
        o.trials = Some(0);
        assert_eq!(resolve_verify(&o).unwrap_err().field(), Some("trials"));
    }
}
