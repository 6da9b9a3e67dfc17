use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::controller::{ControllerConfig, Mode};
use crate::error::{Error, Result};

/// One controller variant to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub mode: Mode,
    #[serde(default = "default_rho")]
    pub rho: f64,
}

fn default_rho() -> f64 {
    1.05
}

impl AlgorithmSpec {
    pub fn base() -> Self {
        Self {
            mode: Mode::Base,
            rho: default_rho(),
        }
    }

    pub fn fast(rho: f64) -> Self {
        Self {
            mode: Mode::Fast,
            rho,
        }
    }

    /// File-name friendly label, e.g. `base` or `fast_rho1.05`.
    pub fn label(&self) -> String {
        match self.mode {
            Mode::Base => "base".to_string(),
            Mode::Fast => format!("fast_rho{}", self.rho),
        }
    }
}

/// Full description of an experiment. Every CLI flag has a field here, so a
/// JSON file with the same keys can stand in for the flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Real nodes (the fictitious node is added on top).
    pub nodes: usize,
    /// Real classes (the null class is added on top).
    pub classes: usize,
    pub resources: usize,
    pub beta: f64,
    pub horizon: u64,
    pub runs: usize,
    /// Run `r` draws arrivals, costs and decisions from `seed + r`.
    pub seed: u64,
    /// Run `r` uses the instance sampled from `instance_seed + r`.
    pub instance_seed: u64,
    /// Optional arrival law over all classes including the null class.
    pub arrival_prob: Option<Vec<f64>>,
    pub algorithms: Vec<AlgorithmSpec>,
    pub exploration: bool,
    pub kappa_scale: Option<f64>,
    /// Keep every `s`-th slot in the CSV files; defaults to 10 for `T >= 10^4`, else 1.
    pub downsample: Option<u64>,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub slot_duration_s: f64,
    /// Also write the per-slot decision log.
    pub write_events: bool,
    /// Also write the final observation state of run 0 for each algorithm.
    pub dump_state: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            nodes: 10,
            classes: 3,
            resources: 2,
            beta: 0.1,
            horizon: 10_000,
            runs: 50,
            seed: 1,
            instance_seed: 1_000_000,
            arrival_prob: None,
            algorithms: vec![AlgorithmSpec::base()],
            exploration: true,
            kappa_scale: None,
            downsample: None,
            jobs: None,
            out: None,
            slot_duration_s: crate::environment::DEFAULT_SLOT_DURATION_S,
            write_events: false,
            dump_state: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidArgument("runs must be at least 1".into()));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidArgument("horizon must be at least 1".into()));
        }
        if self.nodes == 0 || self.classes == 0 || self.resources == 0 {
            return Err(Error::InvalidArgument(
                "nodes, classes and resources must be positive".into(),
            ));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidArgument("no algorithm to run".into()));
        }
        if self.downsample == Some(0) {
            return Err(Error::InvalidArgument("downsample must be at least 1".into()));
        }
        for alg in &self.algorithms {
            self.controller_config(alg).validate(self.nodes + 1)?;
        }
        Ok(())
    }

    pub fn controller_config(&self, alg: &AlgorithmSpec) -> ControllerConfig {
        ControllerConfig {
            mode: alg.mode,
            rho: alg.rho,
            exploration: self.exploration,
            kappa_scale: self.kappa_scale,
            ..ControllerConfig::base(self.horizon)
        }
    }

    pub fn effective_downsample(&self) -> u64 {
        self.downsample
            .unwrap_or(if self.horizon >= 10_000 { 10 } else { 1 })
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        self.seed.wrapping_add(run as u64)
    }

    pub fn run_instance_seed(&self, run: usize) -> u64 {
        self.instance_seed.wrapping_add(run as u64)
    }
}
