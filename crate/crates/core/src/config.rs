//! JSON run configuration.
//!
//! Unknown keys are rejected anywhere in the tree, with the dotted path of the
//! offending key in the error.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::grid::GeometryCase;
use crate::lab::{log_grid, Direction};
use crate::monotone::MonotoneGraph;
use crate::problem::{InitialData, PermeabilitySchedule, ProblemSpec, Reaction, SolverConfig, Source};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryCase,
    pub physics: PhysicsConfig,
    #[serde(default)]
    pub alpha: PermeabilitySchedule,
    pub time: TimeConfig,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub experiment: ExperimentConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    #[serde(default = "one")]
    pub kappa: f64,
    #[serde(default)]
    pub beta: MonotoneGraph,
    /// Reaction on `Ω₁`, and on `Ω₂` unless `pi2` is given.
    #[serde(default)]
    pub pi: Reaction,
    #[serde(default)]
    pub pi2: Option<Reaction>,
    #[serde(default)]
    pub sources: Sources,
    pub initial: InitialData,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sources {
    #[serde(default)]
    pub g1: Source,
    #[serde(default)]
    pub g2: Source,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_final: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    /// Yosida parameter; defaults to `time.dt`.
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default = "default_newton_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_newton_max")]
    pub newton_max: usize,
    #[serde(default = "default_delta_switch")]
    pub delta_switch: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            lambda: None,
            newton_tol: default_newton_tol(),
            newton_max: default_newton_max(),
            delta_switch: default_delta_switch(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub alpha_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub lambda_grid: Option<Vec<f64>>,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    /// Only used by `mosco`.
    #[serde(default)]
    pub direction: Option<Direction>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            alpha_grid: None,
            lambda_grid: None,
            tau: default_tau(),
            seed: default_seed(),
            jobs: default_jobs(),
            direction: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Write every `field_stride`-th state to `fields.csv`.
    #[serde(default = "default_stride")]
    pub field_stride: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            field_stride: default_stride(),
        }
    }
}

fn one() -> f64 {
    1.0
}
fn default_newton_tol() -> f64 {
    1e-12
}
fn default_newton_max() -> usize {
    50
}
fn default_delta_switch() -> f64 {
    1e-3
}
fn default_tau() -> f64 {
    0.1
}
fn default_seed() -> u64 {
    42
}
fn default_jobs() -> usize {
    1
}
fn default_stride() -> usize {
    1
}

impl RunConfig {
    /// Parses, rejects unknown keys, and validates.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: Value =
            serde_json::from_str(text).map_err(|e| Error::config("<root>", format!("invalid JSON: {e}")))?;
        let mut track = serde_path_to_error::Track::new();
        let de = serde_path_to_error::Deserializer::new(&raw, &mut track);
        let config = RunConfig::deserialize(de).map_err(|e| {
            let message = e.to_string();
            let mut path = track.path().to_string();
            if let Some(key) = unknown_field(&message) {
                path = if path == "." {
                    key.to_string()
                } else {
                    format!("{path}.{key}")
                };
            }
            Error::config(if path == "." { "<root>".to_string() } else { path }, message)
        })?;
        let resolved = serde_json::to_value(&config).expect("config serializes");
        reject_unknown(&raw, &resolved, "")?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.problem().validate()?;
        self.solver().validate()?;
        self.alpha.validate(self.time.t_final)?;
        if let Some(grid) = &self.experiment.alpha_grid {
            if grid.is_empty() {
                return Err(Error::config("experiment.alpha_grid", "must not be empty"));
            }
        }
        if let Some(grid) = &self.experiment.lambda_grid {
            if grid.is_empty() {
                return Err(Error::config("experiment.lambda_grid", "must not be empty"));
            }
        }
        if !(self.experiment.tau > 0.0 && self.experiment.tau.is_finite()) {
            return Err(Error::config("experiment.tau", "must be positive"));
        }
        if self.experiment.jobs == 0 {
            return Err(Error::config("experiment.jobs", "must be at least 1"));
        }
        if self.output.field_stride == 0 {
            return Err(Error::config("output.field_stride", "must be at least 1"));
        }
        Ok(())
    }

    pub fn problem(&self) -> ProblemSpec {
        ProblemSpec {
            geometry: self.geometry,
            kappa: self.physics.kappa,
            beta: self.physics.beta,
            pi1: self.physics.pi.clone(),
            pi2: self.physics.pi2.clone().unwrap_or_else(|| self.physics.pi.clone()),
            g1: self.physics.sources.g1.clone(),
            g2: self.physics.sources.g2.clone(),
            initial: self.physics.initial.clone(),
            t_final: self.time.t_final,
            seed: self.experiment.seed,
        }
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            dt: self.time.dt,
            lambda: self.solver.lambda.unwrap_or(self.time.dt),
            newton_tol: self.solver.newton_tol,
            newton_max: self.solver.newton_max,
            switch_gap: self.solver.delta_switch,
        }
    }

    /// Configured `α` grid, or the default for the given study.
    pub fn alpha_grid(&self, study: Study) -> Vec<f64> {
        self.experiment.alpha_grid.clone().unwrap_or_else(|| match study {
            Study::RateToZero => log_grid(1e-4, 1e-1, 7),
            Study::RateToInfinity => log_grid(1e1, 1e4, 7),
            Study::Audit => log_grid(1e-2, 1e4, 7),
            Study::Mosco(Direction::ToZero) => (1..=6).map(|n| 10f64.powi(-n)).collect(),
            Study::Mosco(Direction::ToInfinity) => (1..=6).map(|n| 10f64.powi(n)).collect(),
        })
    }

    /// Configured `λ` grid, or `[λ]` from the solver block.
    pub fn lambda_grid(&self) -> Vec<f64> {
        self.experiment
            .lambda_grid
            .clone()
            .unwrap_or_else(|| vec![self.solver().lambda])
    }
}

/// Experiments with a default `α` grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Study {
    RateToZero,
    RateToInfinity,
    Audit,
    Mosco(Direction),
}

/// The key named by serde's "unknown field `key`" message, if any.
fn unknown_field(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("unknown field `")?;
    rest.split('`').next()
}

/// Every key of `raw` must survive a round trip through the typed config.
fn reject_unknown(raw: &Value, resolved: &Value, path: &str) -> Result<()> {
    let join = |key: &str| {
        if path.is_empty() {
            key.to_string()
        } else {
            format!("{path}.{key}")
        }
    };
    match (raw, resolved) {
        (Value::Object(a), Value::Object(b)) => {
            for (key, value) in a {
                match b.get(key) {
                    Some(other) => reject_unknown(value, other, &join(key))?,
                    None => return Err(Error::config(join(key), "unknown key")),
                }
            }
            Ok(())
        }
        (Value::Array(a), Value::Array(b)) => {
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                reject_unknown(x, y, &format!("{path}[{i}]"))?;
            }
            Ok(())
        }
        _ => Ok(()),
    }
}
