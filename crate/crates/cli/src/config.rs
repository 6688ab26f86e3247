use std::path::{Path, PathBuf};

use oy_lattice::fields::TestFunction;
use oy_lattice::special::SUPPORTED_N;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Observation horizon, either on the microscopic clock `s` or the
/// macroscopic clock `t = s/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    Micro(f64),
    Macro(f64),
}

impl Horizon {
    pub fn t_macro(self, n: u32) -> f64 {
        match self {
            Horizon::Micro(s) => s / n as f64,
            Horizon::Macro(t) => t,
        }
    }

    pub fn t_micro(self, n: u32) -> f64 {
        match self {
            Horizon::Micro(s) => s,
            Horizon::Macro(t) => t * n as f64,
        }
    }

    fn value(self) -> f64 {
        match self {
            Horizon::Micro(v) | Horizon::Macro(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub n_grid: Vec<u32>,
    /// Lattice size override; sized from the horizon when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<usize>,
    /// Finest time step. Refinement studies also run at `2·dt`.
    pub dt: f64,
    pub horizon: Horizon,
    pub replicas: u64,
    /// Draws per `n` for the static experiments.
    #[serde(default)]
    pub samples: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub l_grid: Vec<usize>,
    #[serde(default)]
    pub eps_grid: Vec<f64>,
    #[serde(default)]
    pub test_functions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// CLI flag overrides; any `Some` wins over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<u32>,
    pub dt: Option<f64>,
    pub replicas: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Deserialize)]
struct ManifestShape {
    config: ExperimentConfig,
}

impl ExperimentConfig {
    /// Reads either a bare config or a run manifest.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        if value.get("config").is_some() {
            Ok(serde_json::from_value::<ManifestShape>(value)?.config)
        } else {
            Ok(serde_json::from_value(value)?)
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(n) = o.n {
            self.n_grid = vec![n];
        }
        if let Some(dt) = o.dt {
            self.dt = dt;
        }
        if let Some(r) = o.replicas {
            self.replicas = r;
        }
        if let Some(s) = o.seed {
            self.master_seed = s;
        }
        if let Some(p) = &o.out {
            self.output = Some(p.clone());
        }
    }

    pub fn test_function(&self, i: usize) -> Result<TestFunction, CliError> {
        let label = self
            .test_functions
            .get(i)
            .map(String::as_str)
            .unwrap_or("gaussian");
        Ok(TestFunction::from_label(label)?)
    }

    /// Every violated invariant, not just the first.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.replicas == 0 {
            out.push("replicas must be at least 1".to_string());
        }
        if self.n_grid.is_empty() {
            out.push("n_grid is empty".to_string());
        }
        for n in &self.n_grid {
            if !SUPPORTED_N.contains(n) {
                out.push(format!("n = {n} not in supported grid {SUPPORTED_N:?}"));
            }
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            out.push(format!("dt = {} must be positive", self.dt));
        } else if self.dt > 0.01 {
            out.push(format!("dt = {} exceeds the stability cap 0.01", self.dt));
        }
        let h = self.horizon.value();
        if !(h > 0.0 && h.is_finite()) {
            out.push(format!("horizon {h} must be positive"));
        }
        if self.lattice == Some(0) {
            out.push("lattice size J must be positive".to_string());
        }
        if self.l_grid.contains(&0) {
            out.push("l_grid entries must be positive".to_string());
        }
        if self.eps_grid.iter().any(|e| !(*e > 0.0)) {
            out.push("eps_grid entries must be positive".to_string());
        }
        for label in &self.test_functions {
            if TestFunction::from_label(label).is_err() {
                out.push(format!("unknown test function {label:?}"));
            }
        }
        out
    }
}
