use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::stats::{LineFit, Summary, TwoTermFit};

/// One pass/fail comparison of a measured value against its threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    /// Human-readable acceptance rule, e.g. `"≤ 0.01"`.
    pub threshold: String,
    pub passed: bool,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        measured: f64,
        threshold: impl Into<String>,
        passed: bool,
    ) -> Self {
        Self {
            name: name.into(),
            measured,
            threshold: threshold.into(),
            passed,
        }
    }
}

/// Everything an experiment measured, keyed by functional name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub summaries: BTreeMap<String, Summary>,
    pub ks: BTreeMap<String, f64>,
    pub fits: BTreeMap<String, LineFit>,
    pub two_term_fits: BTreeMap<String, TwoTermFit>,
    pub values: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>) -> Self {
        Self {
            experiment: experiment.into(),
            ..Self::default()
        }
    }

    pub fn check(
        &mut self,
        name: impl Into<String>,
        measured: f64,
        threshold: impl Into<String>,
        passed: bool,
    ) {
        self.checks
            .push(Check::new(name, measured, threshold, passed));
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }
}
