//! One function per registry entry. Each returns the report with its
//! pass/fail checks plus the raw per-replica rows for the CSV.

mod field;
mod scaling;
mod stationary;

pub use field::{decomposition_residual, field_variance, qv_limit};
pub use scaling::{bg2_scaling, bg3_scaling, ec2_cauchy};
pub use stationary::{
    generator_identities, moment_scaling, oracle_equivalence, quadrature_check, static_moments,
    stationarity,
};

use oy_lattice::estimators::ExperimentReport;
use oy_lattice::fields::TrackerConfig;
use oy_lattice::ModelParams;

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// One CSV row: a single functional of one replica at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub n: u32,
    pub replica: Option<u64>,
    pub functional: String,
    pub l_or_eps: Option<f64>,
    pub t: f64,
    pub value: f64,
}

impl Row {
    pub fn new(n: u32, functional: impl Into<String>, t: f64, value: f64) -> Self {
        Self {
            n,
            replica: None,
            functional: functional.into(),
            l_or_eps: None,
            t,
            value,
        }
    }

    pub fn replica(mut self, r: u64) -> Self {
        self.replica = Some(r);
        self
    }

    pub fn at(mut self, l_or_eps: f64) -> Self {
        self.l_or_eps = Some(l_or_eps);
        self
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: ExperimentReport,
    pub rows: Vec<Row>,
}

/// Parameters for a moving-frame run. Without an override the lattice is
/// the smallest one that keeps every tracker's support and blocks inside.
pub(crate) fn frame_params(
    config: &ExperimentConfig,
    n: u32,
    trackers: &[TrackerConfig],
) -> Result<ModelParams, CliError> {
    let t_macro = config.horizon.t_macro(n);
    let probe = ModelParams::new(n, 1, config.dt, t_macro)?;
    let reach = trackers
        .iter()
        .map(|t| t.tf.reach())
        .fold(0.0_f64, f64::max);
    let margin = trackers.iter().map(|t| t.margin(&probe)).max().unwrap_or(1);
    let params = match config.lattice {
        Some(lattice) => ModelParams::new(n, lattice, config.dt, t_macro)?,
        None => ModelParams::with_horizon(n, config.dt, t_macro, reach, margin)?,
    };
    params.check_frame(reach, margin)?;
    Ok(params)
}

/// Label used for per-`n` keys in the report maps.
pub(crate) fn key(name: &str, n: u32) -> String {
    format!("{name}[n={n}]")
}
