//! Experiment configuration files.
//!
//! A config is parsed and checked in full before any channel is built;
//! unknown keys are rejected at every level.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::error::{arg_err, Error, Result};
use crate::metrics::{AscentConfig, ExtensionIndex};
use crate::minmax::GdaConfig;
use crate::noise::{GateVariant, NoiseSpec};

/// Reads `path` and deserializes it, mapping failures to [`Error::Io`] or
/// [`Error::Parse`] with the offending line and column.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Golden-section search for one parameter, GDA otherwise.
    #[default]
    Auto,
    Golden,
    Gda,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub method: Method,
    pub restarts: usize,
    pub max_iters: usize,
    pub step: f64,
    pub fd_step: f64,
    pub rel_tol: f64,
    pub stall_iters: usize,
    pub stall_tol: f64,
    /// Restart budget used to certify a reported optimum.
    pub certify_restarts: usize,
    pub grid_points: usize,
    pub mean_samples: usize,
    pub reference_states: usize,
    /// Interval width at which golden-section search stops.
    pub golden_tol: f64,
    pub gda_max_outer: usize,
    pub gda_learning_rate: f64,
    pub gda_fd_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let a = AscentConfig::default();
        let g = GdaConfig::default();
        Self {
            method: Method::Auto,
            restarts: a.restarts,
            max_iters: a.max_iters,
            step: a.step,
            fd_step: a.fd_step,
            rel_tol: a.rel_tol,
            stall_iters: a.stall_iters,
            stall_tol: a.stall_tol,
            certify_restarts: g.certify_restarts,
            grid_points: 101,
            mean_samples: 2000,
            reference_states: 8,
            golden_tol: 1e-4,
            gda_max_outer: g.max_outer,
            gda_learning_rate: g.learning_rate,
            gda_fd_step: g.fd_step,
        }
    }
}

impl OptimizerConfig {
    pub fn ascent(&self, seed: u64) -> AscentConfig {
        AscentConfig {
            restarts: self.restarts,
            max_iters: self.max_iters,
            step: self.step,
            fd_step: self.fd_step,
            rel_tol: self.rel_tol,
            stall_iters: self.stall_iters,
            stall_tol: self.stall_tol,
            seed,
        }
    }

    pub fn gda(&self, seed: u64) -> GdaConfig {
        GdaConfig {
            max_outer: self.gda_max_outer,
            learning_rate: self.gda_learning_rate,
            fd_step: self.gda_fd_step,
            ascent: self.ascent(seed),
            certify_restarts: self.certify_restarts,
            ..GdaConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        self.gda(0).validate()?;
        if self.grid_points < 2 {
            return Err(arg_err("optimizer.grid_points must be >= 2"));
        }
        if self.mean_samples == 0 {
            return Err(arg_err("optimizer.mean_samples must be >= 1"));
        }
        if !(self.golden_tol > 0.0 && self.golden_tol.is_finite()) {
            return Err(arg_err("optimizer.golden_tol must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub sweep_csv: Option<PathBuf>,
    pub sweep_summary: Option<PathBuf>,
    pub optimize_json: Option<PathBuf>,
}

fn default_variants() -> Vec<GateVariant> {
    GateVariant::ALL.to_vec()
}

fn default_extension_dims() -> Vec<usize> {
    vec![1, 2, 4]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default = "default_variants")]
    pub variants: Vec<GateVariant>,
    /// Extension sizes `m` reported per optimum; `m = 1` is the plain cost.
    #[serde(default = "default_extension_dims")]
    pub extension_dims: Vec<usize>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
    /// Additional channel files checked by `validate`, relative to the
    /// config file.
    #[serde(default)]
    pub channels: Vec<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            noise: NoiseSpec::default(),
            variants: default_variants(),
            extension_dims: default_extension_dims(),
            optimizer: OptimizerConfig::default(),
            output: OutputConfig::default(),
            seed: 0,
            channels: Vec::new(),
        }
    }
}

/// A parsed config together with the directory relative paths resolve
/// against.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let config: ExperimentConfig = read_json(path)?;
        config.validate()?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { config, base_dir })
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Loads every extra channel file listed in the config.
    pub fn extra_channels(&self) -> Result<Vec<(PathBuf, Channel)>> {
        self.config
            .channels
            .iter()
            .map(|p| {
                let path = self.resolve(p);
                read_json(&path).map(|c| (path, c))
            })
            .collect()
    }
}

/// System dimension of the two-qubit gate experiments.
pub const GATE_DIM: usize = 4;

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.noise.qubits().len() != 2 {
            return Err(arg_err(format!("noise must describe 2 qubits, got {}", self.noise.qubits().len())));
        }
        if self.variants.is_empty() {
            return Err(arg_err("variants must not be empty"));
        }
        for (i, v) in self.variants.iter().enumerate() {
            if self.variants[..i].contains(v) {
                return Err(arg_err(format!("variant {v:?} listed twice")));
            }
        }
        if self.extension_dims.is_empty() {
            return Err(arg_err("extension_dims must not be empty"));
        }
        for &m in &self.extension_dims {
            ExtensionIndex::new(m, GATE_DIM)?;
        }
        self.optimizer.validate()
    }

    pub fn extensions(&self) -> Vec<ExtensionIndex> {
        self.extension_dims.iter().map(|&m| ExtensionIndex::new(m, GATE_DIM).expect("validated")).collect()
    }

    /// The mixture family needs both gate variants.
    pub fn require_mixture(&self) -> Result<()> {
        if GateVariant::ALL.iter().all(|v| self.variants.contains(v)) {
            Ok(())
        } else {
            Err(arg_err("sweep and optimize need both variants: [\"direct\", \"hadamard_conjugated\"]"))
        }
    }
}
