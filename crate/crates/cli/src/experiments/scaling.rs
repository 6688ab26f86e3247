use oy_lattice::estimators::{
    fit_power_law, fit_two_term, pairwise_sum, run_replicas, ExperimentReport, ReplicaPlan, Summary,
};
use oy_lattice::fields::{TrackerConfig, TrajectoryFunctionals};

use super::{frame_params, key, Outcome, Row};
use crate::config::ExperimentConfig;
use crate::error::CliError;

fn mean_sq(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.map(|x| x * x).collect();
    pairwise_sum(&v) / v.len() as f64
}

/// `D(l)` per block length, the mean squared sup of the order-2 error.
fn block_errors(
    runs: &[Vec<TrajectoryFunctionals>],
    ls: &[usize],
    cubic: bool,
) -> Vec<f64> {
    ls.iter()
        .map(|&l| {
            mean_sq(runs.iter().map(|r| {
                if cubic {
                    r[0].sup_bg3_at(l).unwrap_or(f64::NAN)
                } else {
                    r[0].sup_bg2_at(l).unwrap_or(f64::NAN)
                }
            }))
        })
        .collect()
}

fn run_blocks(
    config: &ExperimentConfig,
    n: u32,
    cubic: bool,
) -> Result<(Vec<usize>, Vec<Vec<TrajectoryFunctionals>>, f64), CliError> {
    let mut tracker = TrackerConfig::new(config.test_function(0)?);
    tracker.l_grid = config.l_grid.clone();
    tracker.cubic = cubic;
    let configs = vec![tracker];
    let params = frame_params(config, n, &configs)?;
    let ls = configs[0].block_lengths(&params);
    let plan = ReplicaPlan::new(config.replicas, config.master_seed, params)?;
    Ok((ls, run_replicas(&plan, &configs)?, params.t_macro))
}

pub fn bg2_scaling(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut report = ExperimentReport::new(&config.experiment);
    let mut rows = Vec::new();
    for &n in &config.n_grid {
        let (ls, runs, t) = run_blocks(config, n, false)?;
        let d = block_errors(&runs, &ls, false);
        for (l, v) in ls.iter().zip(&d) {
            rows.push(Row::new(n, "D", t, *v).at(*l as f64));
            report.values.insert(format!("D[n={n}, l={l}]"), *v);
        }
        let lf: Vec<f64> = ls.iter().map(|&l| l as f64).collect();
        let sqrt_n = (n as f64).sqrt();
        let fit = fit_two_term(&lf, &d, sqrt_n)?;
        report.two_term_fits.insert(key("D", n), fit);
        if let Some(l) = fit.argmin(sqrt_n) {
            report.values.insert(key("fitted_argmin", n), l);
        }
        let (imin, dmin) = d
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, v)| if *v < acc.1 { (i, *v) } else { acc });
        report.values.insert(key("argmin_l", n), ls[imin] as f64);
        report.check(
            key("argmin strictly interior", n),
            ls[imin] as f64,
            format!("{} < l* < {}", ls[0], ls[ls.len() - 1]),
            imin > 0 && imin + 1 < ls.len(),
        );
        report.check(key("two-term fit R²", n), fit.r2, "≥ 0.8", fit.r2 >= 0.8);
        let gain = dmin / d[0];
        report.check(key("D(l*) / D(2)", n), gain, "≤ 0.5", gain <= 0.5);
    }
    Ok(Outcome { report, rows })
}

pub fn bg3_scaling(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut report = ExperimentReport::new(&config.experiment);
    let mut rows = Vec::new();
    for &n in &config.n_grid {
        let (ls, runs, t) = run_blocks(config, n, true)?;
        let d2 = block_errors(&runs, &ls, false);
        let d3 = block_errors(&runs, &ls, true);
        for ((l, a), b) in ls.iter().zip(&d2).zip(&d3) {
            rows.push(Row::new(n, "D", t, *a).at(*l as f64));
            rows.push(Row::new(n, "D3", t, *b).at(*l as f64));
        }
        let min2 = d2.iter().copied().fold(f64::INFINITY, f64::min);
        let min3 = d3.iter().copied().fold(f64::INFINITY, f64::min);
        report.values.insert(key("min_D", n), min2);
        report.values.insert(key("min_D3", n), min3);
        let ratio = min3 / min2;
        report.check(key("min D3 / min D", n), ratio, "≤ 0.25", ratio <= 0.25);
    }
    Ok(Outcome { report, rows })
}

pub fn ec2_cauchy(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut report = ExperimentReport::new(&config.experiment);
    let mut rows = Vec::new();
    let eps = &config.eps_grid;
    for &n in &config.n_grid {
        let mut tracker = TrackerConfig::new(config.test_function(0)?);
        tracker.eps_grid = eps.iter().flat_map(|&e| [e, e / 2.0]).collect();
        let configs = vec![tracker];
        let params = frame_params(config, n, &configs)?;
        let plan = ReplicaPlan::new(config.replicas, config.master_seed, params)?;
        let runs = run_replicas(&plan, &configs)?;
        let mut vars = Vec::new();
        for &e in eps {
            let diff: Vec<f64> = runs
                .iter()
                .map(|r| {
                    let f = &r[0];
                    f.a_eps(e, &params).unwrap_or(f64::NAN) - f.a_eps(e / 2.0, &params).unwrap_or(f64::NAN)
                })
                .collect();
            for (i, x) in diff.iter().enumerate() {
                rows.push(Row::new(n, "A_eps - A_eps/2", params.t_macro, *x).replica(i as u64).at(e));
            }
            let s = Summary::from_samples(&diff)?;
            report.summaries.insert(format!("difference[n={n}, eps={e}]"), s);
            vars.push(s.variance);
        }
        let fit = fit_power_law(eps, &vars)?;
        report.fits.insert(key("variance_vs_eps", n), fit);
        report.check(
            key("log-log slope", n),
            fit.slope,
            "1 ± 0.4",
            (fit.slope - 1.0).abs() <= 0.4,
        );
    }
    Ok(Outcome { report, rows })
}
