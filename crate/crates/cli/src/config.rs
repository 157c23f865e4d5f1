//! Command configuration files: JSON, or TOML when the file ends in `.toml`.
//! Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use parahyp::geometry::{with_csv_base_dir, WarpingDescriptor};
use parahyp::network::Resolution;
use parahyp::problem::RadialProblem;
use serde::de::DeserializeOwned;
use serde::Deserialize;

/// Parses `path`; relative CSV references inside resolve against its
/// directory.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    with_csv_base_dir(&base, || {
        if is_toml {
            toml::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
        } else {
            serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
        }
    })
}

/// Resolves a path named inside a config file relative to that file.
pub fn relative_to(config: &Path, named: &Path) -> PathBuf {
    if named.is_absolute() {
        named.to_path_buf()
    } else {
        config.parent().unwrap_or(Path::new("")).join(named)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub dimension: usize,
    pub warping: WarpingDescriptor,
    /// Exponent in the volume criterion; defaults to the dimension.
    #[serde(default)]
    pub n_exponent: Option<usize>,
    pub rho: f64,
}

/// Exactly one of the three sources.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    #[serde(default)]
    pub catalog: Option<String>,
    #[serde(default)]
    pub problem: Option<RadialProblem>,
    #[serde(default)]
    pub model: Option<ModelConfig>,
}

pub enum ClassifyTarget {
    Catalog(String),
    Problem(RadialProblem),
    Model(ModelConfig),
}

impl ClassifyConfig {
    pub fn target(self) -> Result<ClassifyTarget> {
        match (self.catalog, self.problem, self.model) {
            (Some(name), None, None) => Ok(ClassifyTarget::Catalog(name)),
            (None, Some(p), None) => Ok(ClassifyTarget::Problem(p)),
            (None, None, Some(m)) => Ok(ClassifyTarget::Model(m)),
            _ => bail!("classify config needs exactly one of `catalog`, `problem`, `model`"),
        }
    }
}

#[derive(Debug, Default, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PotentialMethod {
    #[default]
    ClosedForm,
    FiniteDifference,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub problem: RadialProblem,
    pub outer_radius: f64,
    pub nodes: usize,
    #[serde(default)]
    pub method: PotentialMethod,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    /// The walk is absorbed at `problem.rho` and `outer_radius`.
    pub problem: RadialProblem,
    pub outer_radius: f64,
    pub start: f64,
    pub n_paths: usize,
    pub dt_max: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub max_steps: Option<u64>,
    /// Optional per-path CSV log, relative to the config file.
    #[serde(default)]
    pub exit_log: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub dimension: usize,
    pub warping: WarpingDescriptor,
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub schedule: Vec<Resolution>,
    /// Edge list of the finest network, relative to the config file.
    #[serde(default)]
    pub edge_list: Option<PathBuf>,
}
