use std::fs;
use std::path::{Path, PathBuf};

use oy_lattice::estimators::ExperimentReport;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::experiments::Row;

/// 17 significant digits round-trip every `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
pub struct Summary<'a> {
    pub passed: bool,
    #[serde(flatten)]
    pub report: &'a ExperimentReport,
}

#[derive(Serialize)]
pub struct Manifest<'a> {
    pub config: &'a ExperimentConfig,
    pub master_seed: u64,
    pub version: &'static str,
}

pub fn summary_json(report: &ExperimentReport) -> Result<String, CliError> {
    let s = Summary {
        passed: report.passed(),
        report,
    };
    Ok(serde_json::to_string_pretty(&s)?)
}

pub fn write_csv(path: &Path, experiment: &str, rows: &[Row]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["experiment", "replica", "functional", "n", "l_or_eps", "t", "value"])?;
    for r in rows {
        w.write_record([
            experiment.to_string(),
            r.replica.map(|i| i.to_string()).unwrap_or_default(),
            r.functional.clone(),
            r.n.to_string(),
            r.l_or_eps.map(fmt_f64).unwrap_or_default(),
            fmt_f64(r.t),
            fmt_f64(r.value),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `<name>.csv`, `<name>.json` and `<name>.manifest.json` into `dir`.
pub fn write_all(
    dir: &Path,
    config: &ExperimentConfig,
    report: &ExperimentReport,
    rows: &[Row],
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir)?;
    let name = &config.experiment;
    let csv_path = dir.join(format!("{name}.csv"));
    let json_path = dir.join(format!("{name}.json"));
    let manifest_path = dir.join(format!("{name}.manifest.json"));
    write_csv(&csv_path, name, rows)?;
    fs::write(&json_path, summary_json(report)?)?;
    let manifest = Manifest {
        config,
        master_seed: config.master_seed,
        version: env!("CARGO_PKG_VERSION"),
    };
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(vec![csv_path, json_path, manifest_path])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_round_trip() {
        for x in [0.1, -0.125, 1.0 / 3.0, f64::MIN_POSITIVE, 6.02214076e23] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
