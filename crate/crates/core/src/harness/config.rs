//! Flat `key = value` experiment configuration files.
//!
//! One assignment per line, `#` starts a comment, lists are comma separated.
//! Unknown keys are errors.

use std::path::PathBuf;
use std::str::FromStr;

use crate::assignment::Strategy;
use crate::error::{Error, Result};
use crate::power::PowerPolicy;
use crate::topology::SimConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    NumAps,
    NumUes,
    NumPilots,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::NumAps => "num_aps",
            SweepVariable::NumUes => "num_ues",
            SweepVariable::NumPilots => "num_pilots",
        }
    }

    pub fn apply(self, sim: &mut SimConfig, value: usize) {
        match self {
            SweepVariable::NumAps => sim.num_aps = value,
            SweepVariable::NumUes => sim.num_ues = value,
            SweepVariable::NumPilots => sim.num_pilots = value,
        }
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "num_aps" => Ok(SweepVariable::NumAps),
            "num_ues" => Ok(SweepVariable::NumUes),
            "num_pilots" => Ok(SweepVariable::NumPilots),
            other => Err(Error::Config(format!("unknown sweep variable `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub sim: SimConfig,
    pub strategies: Vec<Strategy>,
    pub power_policy: PowerPolicy,
    pub sweep: Option<Sweep>,
    pub output_path: Option<PathBuf>,
    /// Min-rate updates for the greedy strategy; `2K` when unset.
    pub greedy_iterations: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            sim: SimConfig::default(),
            strategies: vec![
                Strategy::Random,
                Strategy::Greedy,
                Strategy::Repulsive,
                Strategy::Oracle,
            ],
            power_policy: PowerPolicy::MaxMin,
            sweep: None,
            output_path: None,
            greedy_iterations: None,
        }
    }
}

pub fn parse_list<T: FromStr<Err = Error>>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(T::from_str)
        .collect()
}

pub fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|e| Error::Config(format!("bad integer `{t}`: {e}")))
        })
        .collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut sweep_var: Option<SweepVariable> = None;
        let mut sweep_values: Option<Vec<usize>> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| perr(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());

            fn num<T: FromStr>(value: &str, key: &str) -> std::result::Result<T, String>
            where
                T::Err: std::fmt::Display,
            {
                value
                    .parse::<T>()
                    .map_err(|e| format!("bad value `{value}` for `{key}`: {e}"))
            }
            let relabel = |e: Error| perr(e.to_string());

            let sim = &mut cfg.sim;
            match key {
                "area_side" => sim.area_side = num(value, key).map_err(perr)?,
                "num_aps" => sim.num_aps = num(value, key).map_err(perr)?,
                "num_ues" => sim.num_ues = num(value, key).map_err(perr)?,
                "num_pilots" => sim.num_pilots = num(value, key).map_err(perr)?,
                "coherence_len" => sim.coherence_len = num(value, key).map_err(perr)?,
                "bandwidth" => sim.bandwidth = num(value, key).map_err(perr)?,
                "pilot_tx_power" => sim.pilot_tx_power = num(value, key).map_err(perr)?,
                "uplink_tx_power" => sim.uplink_tx_power = num(value, key).map_err(perr)?,
                "noise_figure" => sim.noise_figure = num(value, key).map_err(perr)?,
                "noise_temp" => sim.noise_temp = num(value, key).map_err(perr)?,
                "boltzmann" => sim.boltzmann = num(value, key).map_err(perr)?,
                "shadowing_sigma" => sim.shadowing_sigma = num(value, key).map_err(perr)?,
                "realizations" => sim.realizations = num(value, key).map_err(perr)?,
                "seed" => sim.seed = num(value, key).map_err(perr)?,
                "strategies" => cfg.strategies = parse_list(value).map_err(relabel)?,
                "power_policy" => cfg.power_policy = value.parse().map_err(relabel)?,
                "greedy_iterations" => {
                    cfg.greedy_iterations = Some(num(value, key).map_err(perr)?)
                }
                "output_path" => cfg.output_path = Some(PathBuf::from(value)),
                "sweep_var" => sweep_var = Some(value.parse().map_err(relabel)?),
                "sweep_values" => sweep_values = Some(parse_usize_list(value).map_err(relabel)?),
                other => return Err(perr(format!("unknown key `{other}`"))),
            }
        }

        cfg.sweep = match (sweep_var, sweep_values) {
            (Some(variable), Some(values)) => Some(Sweep { variable, values }),
            (None, None) => None,
            _ => {
                return Err(Error::Config(
                    "sweep_var and sweep_values must be given together".into(),
                ))
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        if self.strategies.is_empty() {
            return Err(Error::Config("no strategies selected".into()));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() || sweep.values.contains(&0) {
                return Err(Error::Config("sweep values must be positive".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_file() {
        let text = "\
# small scenario
num_aps = 50
num_ues = 12   # trailing comment
num_pilots = 3
realizations = 7
seed = 99
strategies = random, repulsive,oracle
power_policy = full
sweep_var = num_aps
sweep_values = 10, 20
output_path = out.csv
";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!((cfg.sim.num_aps, cfg.sim.num_ues, cfg.sim.num_pilots), (50, 12, 3));
        assert_eq!(cfg.sim.seed, 99);
        assert_eq!(
            cfg.strategies,
            vec![Strategy::Random, Strategy::Repulsive, Strategy::Oracle]
        );
        assert_eq!(cfg.power_policy, PowerPolicy::Full);
        assert_eq!(
            cfg.sweep,
            Some(Sweep {
                variable: SweepVariable::NumAps,
                values: vec![10, 20]
            })
        );
        assert_eq!(cfg.output_path, Some(PathBuf::from("out.csv")));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = ExperimentConfig::parse("num_aps = 5\nnum_ues = many\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert_eq!(err.exit_code(), 2);
        let err = ExperimentConfig::parse("colour = blue").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = ExperimentConfig::parse("strategies = random, kmeans").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(ExperimentConfig::parse("bandwidth = 0").is_err());
        assert!(ExperimentConfig::parse("sweep_var = num_ues").is_err());
        assert!(ExperimentConfig::parse("sweep_var = num_ues\nsweep_values = 0,3").is_err());
    }
}
