use oy_lattice::estimators::{pairwise_sum, run_replicas, ExperimentReport, ReplicaPlan, Summary};
use oy_lattice::fields::{TestFunction, TrackerConfig};

use super::{frame_params, key, Outcome, Row};
use crate::config::ExperimentConfig;
use crate::error::CliError;

fn trackers(config: &ExperimentConfig) -> Result<Vec<TrackerConfig>, CliError> {
    let count = config.test_functions.len().max(1);
    (0..count)
        .map(|i| Ok(TrackerConfig::new(config.test_function(i)?)))
        .collect()
}

pub fn field_variance(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut report = ExperimentReport::new(&config.experiment);
    let mut rows = Vec::new();
    let tf = config.test_function(0)?;
    let configs = vec![TrackerConfig::new(tf)];
    for &n in &config.n_grid {
        let params = frame_params(config, n, &configs)?;
        let plan = ReplicaPlan::new(config.replicas, config.master_seed, params)?;
        let runs = run_replicas(&plan, &configs)?;
        let x0: Vec<f64> = runs.iter().map(|r| r[0].x0).collect();
        let xt: Vec<f64> = runs.iter().map(|r| r[0].x).collect();
        for (i, x) in xt.iter().enumerate() {
            rows.push(Row::new(n, format!("X[{}]", tf.label), params.t_macro, *x).replica(i as u64));
        }
        let norm = tf.l2_norm_sq();
        let s0 = Summary::from_samples(&x0)?;
        let st = Summary::from_samples(&xt)?;
        report.summaries.insert(key("X_0", n), s0);
        report.summaries.insert(key("X_t", n), st);
        report.values.insert(key("phi_l2_norm_sq", n), norm);
        report.values.insert(key("variance_ratio_t0", n), s0.variance / norm);
        let ratio = st.variance / norm;
        report.check(key("Var[X_t] / ||φ||²", n), ratio, "∈ [0.9, 1.1]", (0.9..=1.1).contains(&ratio));
    }
    Ok(Outcome { report, rows })
}

pub fn qv_limit(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut report = ExperimentReport::new(&config.experiment);
    let mut rows = Vec::new();
    let configs = trackers(config)?;
    for &n in &config.n_grid {
        let params = frame_params(config, n, &configs)?;
        let plan = ReplicaPlan::new(config.replicas, config.master_seed, params)?;
        let runs = run_replicas(&plan, &configs)?;
        for (k, c) in configs.iter().enumerate() {
            let label = c.tf.label;
            let realized: Vec<f64> = runs.iter().map(|r| r[k].realized_qv).collect();
            let qv: Vec<f64> = runs.iter().map(|r| r[k].qv).collect();
            let rate: Vec<f64> = runs.iter().map(|r| r[k].qv_rate(&params)).collect();
            for (i, r) in runs.iter().enumerate() {
                let t = params.t_macro;
                rows.push(Row::new(n, format!("realized_qv[{label}]"), t, r[k].realized_qv).replica(i as u64));
                rows.push(Row::new(n, format!("qv[{label}]"), t, r[k].qv).replica(i as u64));
            }
            let ratio = pairwise_sum(&realized) / pairwise_sum(&qv);
            let rs = Summary::from_samples(&rate)?;
            let energy = c.tf.energy();
            let rel = rs.mean / energy - 1.0;
            let tag = format!("{label}, n={n}");
            report.summaries.insert(format!("qv_rate[{tag}]"), rs);
            report.values.insert(format!("dphi_l2_norm_sq[{tag}]"), energy);
            report.check(
                format!("realized/predicted QV [{tag}]"),
                ratio,
                "∈ [0.95, 1.05]",
                (0.95..=1.05).contains(&ratio),
            );
            report.check(
                format!("QV rate vs ||φ'||² [{tag}]"),
                rel,
                "relative error ≤ 0.15",
                rel.abs() <= 0.15,
            );
        }
    }
    Ok(Outcome { report, rows })
}

pub fn decomposition_residual(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut report = ExperimentReport::new(&config.experiment);
    let mut rows = Vec::new();
    let configs = if config.test_functions.is_empty() {
        [TestFunction::gaussian(), TestFunction::hermite(), TestFunction::bump()]
            .into_iter()
            .map(TrackerConfig::new)
            .collect()
    } else {
        trackers(config)?
    };
    for &n in &config.n_grid {
        let params = frame_params(config, n, &configs)?;
        let plan = ReplicaPlan::new(config.replicas, config.master_seed, params)?;
        let runs = run_replicas(&plan, &configs)?;
        for (k, c) in configs.iter().enumerate() {
            let label = c.tf.label;
            let mut worst = 0.0_f64;
            let mut worst_gap = 0.0_f64;
            for (i, r) in runs.iter().enumerate() {
                let f = &r[k];
                worst = worst.max(f.max_residual);
                worst_gap = worst_gap.max(f.decomposition_gap().abs());
                rows.push(Row::new(n, format!("max_residual[{label}]"), params.t_macro, f.max_residual).replica(i as u64));
            }
            let tag = format!("{label}, n={n}");
            report.values.insert(format!("max_cumulative_gap[{tag}]"), worst_gap);
            report.check(format!("max step residual [{tag}]"), worst, "≤ 1e-10", worst <= 1e-10);
        }
    }
    Ok(Outcome { report, rows })
}
