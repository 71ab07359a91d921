//! Scenario files: a TOML document describing one experiment.
//!
//! ```toml
//! name = "quadratic_demo"
//! temperature = 0.5
//! hurst = [0.3, 0.7]
//! epsilon_ladder = [0.0625, 0.03125, 0.015625, 0.0078125]
//! replicates = 1000
//! master_seed = 42
//! x_init = [0.5, -0.5]
//! checkpoints = [0.25, 0.5, 0.75, 1.0]
//!
//! [energy]
//! name = "quadratic"
//! params = [2.0, 0.5, 0.5, 1.0, 0.0, 0.0]
//!
//! [grid]
//! t_end = 1.0
//! n_steps = 1024
//! ```
//!
//! Unknown keys are rejected. Every constraint is checked by [`Run::new`]
//! before any computation starts.

use std::path::Path;

use fracanneal_core::analysis::default_ladder;
use fracanneal_core::sde::{builtin_energy, BuiltinEnergy};
use fracanneal_core::{HurstParam, TimeGrid};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const DEFAULT_REPLICATES: usize = 10_000;
pub const DEFAULT_STEPS: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergySpec {
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_steps")]
    pub n_steps: usize,
}

fn default_t_end() -> f64 {
    1.0
}

fn default_steps() -> usize {
    DEFAULT_STEPS
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            t_end: default_t_end(),
            n_steps: DEFAULT_STEPS,
        }
    }
}

fn default_replicates() -> usize {
    DEFAULT_REPLICATES
}

/// The file as written. Optional fields are filled in by [`Run::new`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// One Hurst exponent per dimension.
    pub hurst: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_ladder: Option<Vec<f64>>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_init: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergySpec>,
    #[serde(default)]
    pub grid: GridSpec,
}

impl Scenario {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::config(format!("{}: {}", path.display(), e.message)))
    }

    /// The scenario as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario is always representable")
    }
}

fn field(path: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::config(format!("{path}: {reason}"))
}

/// A validated scenario with every default resolved.
#[derive(Debug, Clone)]
pub struct Run {
    /// Effective scenario, defaults and seed override applied.
    pub scenario: Scenario,
    pub grid: TimeGrid,
    pub hurst: Vec<HurstParam>,
    pub ladder: Vec<f64>,
    pub checkpoints: Vec<f64>,
    pub energy: Option<BuiltinEnergy>,
}

impl Run {
    pub fn new(mut scenario: Scenario, seed_override: Option<u64>) -> CliResult<Self> {
        if let Some(seed) = seed_override {
            scenario.master_seed = seed;
        }
        let s = &scenario;
        if s.name.is_empty()
            || !s
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
        {
            return Err(field("name", "must be a non-empty identifier of [A-Za-z0-9_.-]"));
        }
        if s.hurst.is_empty() {
            return Err(field("hurst", "needs one value per dimension"));
        }
        let hurst = s
            .hurst
            .iter()
            .enumerate()
            .map(|(i, &h)| HurstParam::new(h).map_err(|e| field(&format!("hurst[{i}]"), e)))
            .collect::<CliResult<Vec<_>>>()?;
        if let Some(t) = s.temperature {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(field("temperature", format!("must be nonnegative and finite, got {t}")));
            }
        }
        let grid = TimeGrid::new(s.grid.t_end, s.grid.n_steps).map_err(|e| field("grid", e))?;
        let ladder = s.epsilon_ladder.clone().unwrap_or_else(default_ladder);
        for (i, e) in ladder.iter().enumerate() {
            if !(*e > 0.0 && e.is_finite()) {
                return Err(field(&format!("epsilon_ladder[{i}]"), format!("must be positive, got {e}")));
            }
        }
        if ladder.windows(2).any(|w| w[1] >= w[0]) {
            return Err(field("epsilon_ladder", "must be strictly decreasing"));
        }
        if s.replicates == 0 {
            return Err(field("replicates", "must be at least 1"));
        }
        if let Some(x) = &s.x_init {
            if x.len() != hurst.len() {
                return Err(field(
                    "x_init",
                    format!("has {} entries but hurst has {}", x.len(), hurst.len()),
                ));
            }
            if let Some(i) = x.iter().position(|v| !v.is_finite()) {
                return Err(field(&format!("x_init[{i}]"), "must be finite"));
            }
        }
        let checkpoints = s
            .checkpoints
            .clone()
            .unwrap_or_else(|| [0.25, 0.5, 0.75, 1.0].iter().map(|f| f * grid.t_end()).collect());
        if checkpoints.is_empty() {
            return Err(field("checkpoints", "must not be empty"));
        }
        for (i, &t) in checkpoints.iter().enumerate() {
            grid.index_of(t)
                .map_err(|_| field(&format!("checkpoints[{i}]"), format!("{t} is not a grid node")))?;
        }
        if checkpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(field("checkpoints", "must be strictly increasing"));
        }
        let energy = match &s.energy {
            Some(spec) => {
                let g = builtin_energy(&spec.name, &spec.params).map_err(|e| field("energy", e))?;
                use fracanneal_core::sde::EnergyFunction;
                if g.dim() != hurst.len() {
                    return Err(field(
                        "energy",
                        format!("`{}` has dimension {} but hurst has {}", spec.name, g.dim(), hurst.len()),
                    ));
                }
                Some(g)
            }
            None => None,
        };
        scenario.epsilon_ladder = Some(ladder.clone());
        scenario.checkpoints = Some(checkpoints.clone());
        Ok(Self {
            scenario,
            grid,
            hurst,
            ladder,
            checkpoints,
            energy,
        })
    }

    pub fn dims(&self) -> usize {
        self.hurst.len()
    }

    pub fn seed(&self) -> u64 {
        self.scenario.master_seed
    }

    pub fn replicates(&self) -> usize {
        self.scenario.replicates
    }

    pub fn require_energy(&self) -> CliResult<&BuiltinEnergy> {
        self.energy.as_ref().ok_or_else(|| field("energy", "required by this command"))
    }

    pub fn require_temperature(&self) -> CliResult<f64> {
        self.scenario
            .temperature
            .ok_or_else(|| field("temperature", "required by this command"))
    }

    pub fn require_x_init(&self) -> CliResult<&[f64]> {
        self.scenario
            .x_init
            .as_deref()
            .ok_or_else(|| field("x_init", "required by this command"))
    }

    pub fn require_two_dims(&self) -> CliResult<()> {
        if self.dims() != 2 {
            return Err(field(
                "hurst",
                format!("this command needs exactly 2 dimensions, got {}", self.dims()),
            ));
        }
        Ok(())
    }

    pub fn require_replicates(&self, min: usize) -> CliResult<()> {
        if self.replicates() < min {
            return Err(field("replicates", format!("this command needs at least {min}")));
        }
        Ok(())
    }
}
