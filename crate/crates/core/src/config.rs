//! JSON experiment configs.
//!
//! ```json
//! {
//!   "experiment": {"kind": "bounds", "theorem": 1, "T": 2000, "record_stride": 50},
//!   "problem": {"family": "strongly-convex-quadratic", "n": 8, "d": 10, "mu": 0.1, "L": 1,
//!               "delta": 1, "sigma_noise": 1, "seed": 1},
//!   "schedule": {"strategy": "increasing", "a": 1, "s": 0.5},
//!   "stepsize": {"policy": "inverse-time"},
//!   "seeds": {"count": 200},
//!   "output": "results/bounds"
//! }
//! ```
//!
//! `schedule` may also be a list of schedules for the multi-strategy
//! experiment kinds. Unknown keys are rejected everywhere.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{Experiment, ExperimentSpec, StepsizeSpec};
use crate::objectives::ProblemSpec;
use crate::schedules::ScheduleSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedsSpec {
    List(Vec<u64>),
    Range {
        count: u64,
        #[serde(default)]
        base: u64,
    },
}

impl SeedsSpec {
    /// The seeds, each shifted by `offset`.
    pub fn resolve(&self, offset: u64) -> Vec<u64> {
        match self {
            SeedsSpec::List(v) => v.iter().map(|s| s.wrapping_add(offset)).collect(),
            SeedsSpec::Range { count, base } => (0..*count).map(|k| base.wrapping_add(k).wrapping_add(offset)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Experiment,
    pub problem: ProblemSpec,
    pub schedule: OneOrMany<ScheduleSpec>,
    pub stepsize: StepsizeSpec,
    pub seeds: SeedsSpec,
    pub output: PathBuf,
}

impl ConfigFile {
    /// Parses and validates; errors carry serde's line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let config: ConfigFile = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {} column {}: {e}", e.line(), e.column())))?;
        config.spec(0).validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn spec(&self, seed_offset: u64) -> ExperimentSpec {
        ExperimentSpec {
            experiment: self.experiment.clone(),
            problem: self.problem.clone(),
            schedules: self.schedule.to_vec(),
            stepsize: self.stepsize,
            seeds: self.seeds.resolve(seed_offset),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOUNDS: &str = r#"{
        "experiment": {"kind": "bounds", "theorem": 1, "T": 2000, "record_stride": 50},
        "problem": {"family": "strongly-convex-quadratic", "n": 8, "d": 10, "mu": 0.1, "L": 1,
                    "delta": 1, "sigma_noise": 1, "seed": 1},
        "schedule": {"strategy": "increasing", "a": 1, "s": 0.5},
        "stepsize": {"policy": "inverse-time"},
        "seeds": {"count": 3, "base": 10},
        "output": "out"
    }"#;

    #[test]
    fn parses_example() {
        let c = ConfigFile::parse(BOUNDS).unwrap();
        assert_eq!(c.seeds.resolve(0), vec![10, 11, 12]);
        assert_eq!(c.seeds.resolve(5), vec![15, 16, 17]);
        assert_eq!(c.spec(0).schedules.len(), 1);
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = BOUNDS.replace("\"record_stride\": 50", "\"record_stride\": 50, \"bogus\": 1");
        let err = ConfigFile::parse(&text).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(err.contains("bogus"), "{err}");
        let text = BOUNDS.replace("\"output\": \"out\"", "\"output\": \"out\", \"extra\": true");
        assert!(ConfigFile::parse(&text).is_err());
    }

    #[test]
    fn validation_runs_before_compute() {
        let text = BOUNDS.replace(r#"{"strategy": "increasing", "a": 1, "s": 0.5}"#, r#"{"strategy": "explicit", "H": [1000, 999]}"#);
        let err = ConfigFile::parse(&text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("Σ H_i must equal T"));
    }

    #[test]
    fn schedule_lists_and_seed_lists() {
        let text = BOUNDS
            .replace(r#""kind": "bounds", "theorem": 1, "T": 2000, "record_stride": 50"#, r#""kind": "strategy-compare", "T": 2000"#)
            .replace(
                r#"{"strategy": "increasing", "a": 1, "s": 0.5}"#,
                r#"[{"strategy": "increasing", "a": 1, "s": 0.5}, {"strategy": "fixed", "H": 4}]"#,
            )
            .replace(r#"{"count": 3, "base": 10}"#, "[4, 2]");
        let c = ConfigFile::parse(&text).unwrap();
        assert_eq!(c.schedule.to_vec().len(), 2);
        assert_eq!(c.seeds.resolve(0), vec![4, 2]);
    }
}
