use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::deep::DeepConfig;
use crate::env::Environment;
use crate::envs::grid::{four_rooms_env, maze_env_with, DistanceMetric, GridSpec, GRID_HORIZON};
use crate::envs::lq::{lq_env, LqParams};
use crate::envs::multipop::{multipop_env, MultiPopParams, DEFAULT_INTERACTION, POPULATIONS};
use crate::envs::sis::{sis_env, SisParams};
use crate::envs::toy::toy_env;
use crate::error::{Error, Result};
use crate::types::{EpsilonSchedule, SolverParams};

/// A complete experiment description, as read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub environment: EnvironmentConfig,
    pub solver: SolverConfig,
    #[serde(default)]
    pub neural: DeepConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum EnvironmentConfig {
    Toy,
    Sis(SisParams),
    Lq(LqParams),
    FourRooms(GridConfig),
    Maze(MazeConfig),
    Multipop(MultiPopConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n_t: usize,
    /// Custom map file; the bundled layout when absent.
    pub map: Option<PathBuf>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n_t: GRID_HORIZON, map: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MazeConfig {
    pub n_t: usize,
    pub map: Option<PathBuf>,
    pub distance: DistanceMetric,
}

impl Default for MazeConfig {
    fn default() -> Self {
        Self { n_t: GRID_HORIZON, map: None, distance: DistanceMetric::Manhattan }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultiPopConfig {
    pub n_t: usize,
    pub map: Option<PathBuf>,
    pub interaction: [[f64; POPULATIONS]; POPULATIONS],
}

impl Default for MultiPopConfig {
    fn default() -> Self {
        Self { n_t: GRID_HORIZON, map: None, interaction: DEFAULT_INTERACTION }
    }
}

fn load_grid(map: &Option<PathBuf>, bundled: &str, n_t: usize) -> Result<GridSpec> {
    match map {
        Some(path) => GridSpec::parse(&std::fs::read_to_string(path)?, n_t),
        None => GridSpec::parse(bundled, n_t),
    }
}

impl EnvironmentConfig {
    pub fn build(&self) -> Result<Box<dyn Environment>> {
        use crate::envs::grid::{CHASE_MAP, FOUR_ROOMS_MAP, MAZE_MAP};
        Ok(match self {
            EnvironmentConfig::Toy => Box::new(toy_env()),
            EnvironmentConfig::Sis(p) => Box::new(sis_env(p.clone())?),
            EnvironmentConfig::Lq(p) => Box::new(lq_env(p.clone())?),
            EnvironmentConfig::FourRooms(g) => Box::new(four_rooms_env(load_grid(&g.map, FOUR_ROOMS_MAP, g.n_t)?)?),
            EnvironmentConfig::Maze(g) => Box::new(maze_env_with(load_grid(&g.map, MAZE_MAP, g.n_t)?, g.distance)?),
            EnvironmentConfig::Multipop(g) => Box::new(multipop_env(MultiPopParams {
                grid: load_grid(&g.map, CHASE_MAP, g.n_t)?,
                interaction: g.interaction,
            })?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[serde(alias = "banach_picard")]
    Bp,
    #[serde(alias = "fictitious_play")]
    Fp,
    #[serde(alias = "policy_iteration")]
    Pi,
    Omd,
    Momd,
    #[serde(alias = "boltzmann")]
    Bi,
    DAfp,
    DMomd,
    DBp,
    DPi,
    DBi,
}

impl SolverKind {
    pub fn is_deep(self) -> bool {
        matches!(self, Self::DAfp | Self::DMomd | Self::DBp | Self::DPi | Self::DBi)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Bp => "bp",
            Self::Fp => "fp",
            Self::Pi => "pi",
            Self::Omd => "omd",
            Self::Momd => "momd",
            Self::Bi => "bi",
            Self::DAfp => "d_afp",
            Self::DMomd => "d_momd",
            Self::DBp => "d_bp",
            Self::DPi => "d_pi",
            Self::DBi => "d_bi",
        }
    }
}

/// Solver choice and every constant of [`SolverParams`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub name: Option<SolverKind>,
    pub tau: f64,
    pub alpha: f64,
    pub eta: f64,
    pub soft_br: bool,
    pub iterations: usize,
    pub inner_steps: usize,
    pub batch_size: usize,
    pub epsilon: EpsilonSchedule,
    pub learning_rate: f64,
    pub avg_learning_rate: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let p = SolverParams::default();
        Self {
            name: None,
            tau: p.tau,
            alpha: p.alpha,
            eta: p.eta,
            soft_br: p.soft_br,
            iterations: p.iterations,
            inner_steps: p.inner_steps,
            batch_size: p.batch_size,
            epsilon: p.epsilon,
            learning_rate: p.learning_rate,
            avg_learning_rate: p.avg_learning_rate,
            seed: p.seed,
        }
    }
}

impl SolverConfig {
    pub fn kind(&self) -> Result<SolverKind> {
        self.name.ok_or_else(|| config_err("solver.name", "missing solver name"))
    }

    pub fn params(&self) -> SolverParams {
        SolverParams {
            tau: self.tau,
            alpha: self.alpha,
            eta: self.eta,
            soft_br: self.soft_br,
            iterations: self.iterations,
            inner_steps: self.inner_steps,
            batch_size: self.batch_size,
            epsilon: self.epsilon,
            learning_rate: self.learning_rate,
            avg_learning_rate: self.avg_learning_rate,
            seed: self.seed,
            record_policies: false,
        }
    }
}

/// Axes of a cartesian sweep; empty axes are not swept.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub solver: Vec<SolverKind>,
    pub tau: Vec<f64>,
    pub alpha: Vec<f64>,
    pub eta: Vec<f64>,
    #[serde(alias = "learning_rate")]
    pub lr: Vec<f64>,
    pub hidden: Vec<Vec<usize>>,
    pub seed: Vec<u64>,
}

impl SweepConfig {
    pub fn is_empty(&self) -> bool {
        self.solver.is_empty()
            && self.tau.is_empty()
            && self.alpha.is_empty()
            && self.eta.is_empty()
            && self.lr.is_empty()
            && self.hidden.is_empty()
            && self.seed.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Fill the `wall_seconds` column with measured time instead of zeros.
    /// Off by default so that reruns give byte-identical files.
    pub wall_time: bool,
}

pub(crate) fn config_err(path: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config { path: path.into(), reason: reason.into() }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| config_err("<document>", e.to_string()))?;
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_err(path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| config_err(path.as_ref().display().to_string(), e.to_string()))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.kind()?;
        self.solver.params().validate().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => config_err(format!("solver.{name}"), reason),
            other => other,
        })?;
        self.neural.validate().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => config_err(format!("neural.{name}"), reason),
            other => other,
        })?;
        if self.sweep.tau.iter().any(|t| !(*t > 0.0)) {
            return Err(config_err("sweep.tau", "temperatures must be > 0"));
        }
        if self.sweep.alpha.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(config_err("sweep.alpha", "values must lie in [0, 1]"));
        }
        if self.sweep.lr.iter().any(|l| !(*l > 0.0)) {
            return Err(config_err("sweep.lr", "learning rates must be > 0"));
        }
        Ok(())
    }

    /// `key = value` lines for every leaf of the resolved configuration.
    pub fn flattened(&self) -> Vec<(String, String)> {
        let value = serde_json::to_value(self).expect("configs serialize");
        let mut out = Vec::new();
        flatten("", &value, &mut out);
        out
    }
}

fn flatten(prefix: &str, v: &serde_json::Value, out: &mut Vec<(String, String)>) {
    use serde_json::Value;
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), "none".into())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}
