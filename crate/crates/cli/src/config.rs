//! Run configuration: command-line flags layered over an optional flat TOML
//! file layered over built-in defaults.

use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use decoherence::oracle::OracleConfig;
use decoherence::{sample_points, ScenarioParams, Spacing};
use serde::Deserialize;

use crate::error::{CliError, Result};

pub const DEFAULT_SIGMA_OVER_D: f64 = 0.05;
pub const DEFAULT_TEMPERATURE: f64 = 1.0;
pub const DEFAULT_GAMMA: f64 = 0.0;
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_QUADRATURE_BUDGET: usize = 200;
pub const DEFAULT_OUT: &str = "out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeScale {
    Linear,
    Log,
}

impl From<TimeScale> for Spacing {
    fn from(s: TimeScale) -> Self {
        match s {
            TimeScale::Linear => Spacing::Linear,
            TimeScale::Log => Spacing::Log,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Svg,
}

/// Flags shared by every subcommand. Times are in units of `t_mix`, lengths
/// in units of `d`, temperature and friction in units of `E = 1/(m d^2)`.
#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioArgs {
    /// Flat TOML file with any of the keys below (snake_case); flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Slit width over slit separation [default: 0.05]
    #[arg(long, global = true)]
    pub sigma_over_d: Option<f64>,

    /// Bath temperature T/E [default: 1]
    #[arg(long, global = true)]
    pub temperature: Option<f64>,

    /// Friction gamma/E [default: 0]
    #[arg(long, global = true)]
    pub gamma: Option<f64>,

    /// Particle mass [default: 1]
    #[arg(long, global = true)]
    pub mass: Option<f64>,

    /// Slit separation d [default: 1]
    #[arg(long, global = true)]
    pub slit_separation: Option<f64>,

    /// First sample time, in units of t_mix
    #[arg(long, global = true)]
    pub t_min: Option<f64>,

    /// Last sample time, in units of t_mix
    #[arg(long, global = true)]
    pub t_max: Option<f64>,

    /// Number of sample times
    #[arg(long, global = true)]
    pub t_count: Option<usize>,

    /// Spacing of sample times
    #[arg(long, global = true, value_enum)]
    pub t_scale: Option<TimeScale>,

    /// Half-width of the x grid, in units of d
    #[arg(long, global = true)]
    pub x_span: Option<f64>,

    /// Number of x grid points
    #[arg(long, global = true)]
    pub x_count: Option<usize>,

    /// Output directory [default: out]
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Output formats [default: csv,svg]
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,

    /// Relative tolerance of the oracle quadrature [default: 1e-12]
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    /// Subinterval budget of each adaptive quadrature [default: 200]
    #[arg(long, global = true)]
    pub quadrature_budget: Option<usize>,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub sigma_over_d: Option<f64>,
    pub temperature: Option<f64>,
    pub gamma: Option<f64>,
    pub mass: Option<f64>,
    pub slit_separation: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_count: Option<usize>,
    pub t_scale: Option<TimeScale>,
    pub x_span: Option<f64>,
    pub x_count: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Vec<Format>>,
    pub tolerance: Option<f64>,
    pub quadrature_budget: Option<usize>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config file: {e}")))
    }

    pub fn load(path: &PathBuf) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }
}

/// Time axis request; unset fields take the subcommand's defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TimeGridSpec {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub count: Option<usize>,
    pub scale: Option<TimeScale>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sigma_over_d: f64,
    pub temperature: f64,
    pub gamma: f64,
    pub mass: f64,
    pub slit_separation: f64,
    /// True when `temperature` or `gamma` came from a flag or the file.
    pub bath_overridden: bool,
    pub time: TimeGridSpec,
    pub x_span: Option<f64>,
    pub x_count: Option<usize>,
    pub out: PathBuf,
    /// True when `out` came from a flag or the file.
    pub out_given: bool,
    pub formats: Vec<Format>,
    pub tolerance: f64,
    pub quadrature_budget: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::resolve(&ScenarioArgs::default(), &FileConfig::default()).expect("defaults are valid")
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Validation(format!("--{name} must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn from_args(args: &ScenarioArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Self::resolve(args, &file)
    }

    pub fn resolve(args: &ScenarioArgs, file: &FileConfig) -> Result<Self> {
        let temperature = args.temperature.or(file.temperature);
        let gamma = args.gamma.or(file.gamma);
        let cfg = Self {
            sigma_over_d: args.sigma_over_d.or(file.sigma_over_d).unwrap_or(DEFAULT_SIGMA_OVER_D),
            temperature: temperature.unwrap_or(DEFAULT_TEMPERATURE),
            gamma: gamma.unwrap_or(DEFAULT_GAMMA),
            mass: args.mass.or(file.mass).unwrap_or(1.0),
            slit_separation: args.slit_separation.or(file.slit_separation).unwrap_or(1.0),
            bath_overridden: temperature.is_some() || gamma.is_some(),
            time: TimeGridSpec {
                min: args.t_min.or(file.t_min),
                max: args.t_max.or(file.t_max),
                count: args.t_count.or(file.t_count),
                scale: args.t_scale.or(file.t_scale),
            },
            x_span: args.x_span.or(file.x_span),
            x_count: args.x_count.or(file.x_count),
            out: args.out.clone().or(file.out.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            out_given: args.out.is_some() || file.out.is_some(),
            formats: args
                .format
                .clone()
                .or(file.format.clone())
                .unwrap_or_else(|| vec![Format::Csv, Format::Svg]),
            tolerance: args.tolerance.or(file.tolerance).unwrap_or(DEFAULT_TOLERANCE),
            quadrature_budget: args
                .quadrature_budget
                .or(file.quadrature_budget)
                .unwrap_or(DEFAULT_QUADRATURE_BUDGET),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        self.params()?;
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(CliError::Validation(format!(
                "--tolerance must lie in (0, 1), got {}",
                self.tolerance
            )));
        }
        if self.quadrature_budget == 0 {
            return Err(CliError::Validation("--quadrature-budget must be at least 1".into()));
        }
        if let Some(span) = self.x_span {
            positive("x-span", span)?;
        }
        if matches!(self.x_count, Some(n) if n < 2) {
            return Err(CliError::Validation("--x-count must be at least 2".into()));
        }
        if self.formats.is_empty() {
            return Err(CliError::Validation("--format needs at least one of csv, svg".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ScenarioParams<f64>> {
        self.params_with(self.temperature, self.gamma)
    }

    /// Scenario with this run's geometry and the given bath (in units of `E`).
    pub fn params_with(&self, temperature: f64, gamma: f64) -> Result<ScenarioParams<f64>> {
        Ok(ScenarioParams::with_units(
            self.mass,
            self.slit_separation,
            self.sigma_over_d,
            temperature,
            gamma,
        )?)
    }

    /// Sample times in units of `t_mix`, filling unset fields from `default`.
    pub fn times(&self, default: TimeGridSpec) -> Result<Vec<f64>> {
        let min = self.time.min.or(default.min).unwrap_or(0.0);
        let max = self.time.max.or(default.max).unwrap_or(1.0);
        let count = self.time.count.or(default.count).unwrap_or(1);
        let scale = self.time.scale.or(default.scale).unwrap_or(TimeScale::Linear);
        Ok(sample_points(min, max, count, scale.into())?)
    }

    pub fn oracle_config(&self) -> OracleConfig<f64> {
        OracleConfig::default()
            .with_tolerance(self.tolerance)
            .with_budget(self.quadrature_budget)
    }

    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }

    /// One-line record of every setting, for output file headers.
    pub fn describe(&self) -> String {
        format!(
            "sigma_over_d={} temperature={} gamma={} mass={} slit_separation={} tolerance={} quadrature_budget={}",
            self.sigma_over_d,
            self.temperature,
            self.gamma,
            self.mass,
            self.slit_separation,
            self.tolerance,
            self.quadrature_budget
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.sigma_over_d, 0.05);
        assert_eq!(cfg.temperature, 1.0);
        assert_eq!(cfg.gamma, 0.0);
        assert!(!cfg.bath_overridden);
        assert_eq!(cfg.formats, vec![Format::Csv, Format::Svg]);
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = FileConfig::parse("sigma_over_d = 0.02\ngamma = 0.1\nt_scale = \"log\"\nformat = [\"csv\"]\n").unwrap();
        let args = ScenarioArgs {
            gamma: Some(0.2),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(&args, &file).unwrap();
        assert_eq!(cfg.sigma_over_d, 0.02);
        assert_eq!(cfg.gamma, 0.2);
        assert_eq!(cfg.temperature, 1.0);
        assert_eq!(cfg.time.scale, Some(TimeScale::Log));
        assert_eq!(cfg.formats, vec![Format::Csv]);
        assert!(cfg.bath_overridden);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(FileConfig::parse("sigma = 0.1"), Err(CliError::Validation(_))));
    }

    #[test]
    fn invalid_scenario_names_invariant() {
        let args = ScenarioArgs {
            sigma_over_d: Some(0.5),
            ..Default::default()
        };
        match RunConfig::resolve(&args, &FileConfig::default()) {
            Err(CliError::Validation(msg)) => assert!(msg.contains("sigma"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn time_defaults_fill_gaps() {
        let args = ScenarioArgs {
            t_count: Some(3),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(&args, &FileConfig::default()).unwrap();
        let ts = cfg
            .times(TimeGridSpec {
                min: Some(1.0),
                max: Some(100.0),
                count: Some(400),
                scale: Some(TimeScale::Log),
            })
            .unwrap();
        assert_eq!(ts.len(), 3);
        assert!((ts[1] - 10.0).abs() < 1e-12);
    }
}
