use oy_lattice::dynamics::{
    drift, euler_step, h_step, init_stationary, log_partition_recursion, quadrature_partition,
    GridPaths, HState, LatticeState, NoObserver, NoiseBlock, Stepper,
};
use oy_lattice::estimators::{
    fit_power_law, ks_critical_1pct, ks_statistic, pairwise_sum, ExperimentReport, ReplicaPlan,
    Summary,
};
use oy_lattice::fields::{generator_monomial, Monomial};
use oy_lattice::special::{sample_u, stationary_cdf, trigamma};
use oy_lattice::ModelParams;

use super::{key, Outcome, Row};
use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Draws `config.samples` stationary increments per `n`, split across
/// `config.replicas` independent streams.
fn draw_u(config: &ExperimentConfig, params: &ModelParams) -> Result<Vec<Vec<f64>>, CliError> {
    let plan = ReplicaPlan::new(config.replicas, config.master_seed, *params)?;
    let chunks = config.replicas;
    let per = config.samples / chunks;
    let extra = config.samples % chunks;
    Ok(plan.map(|i, rng| {
        let m = per + u64::from(i < extra);
        Ok((0..m).map(|_| sample_u(params, rng)).collect())
    })?)
}

pub fn static_moments(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut report = ExperimentReport::new(&config.experiment);
    let mut rows = Vec::new();
    for &n in &config.n_grid {
        let params = ModelParams::new(n, 1, config.dt, 0.0)?;
        let chunks = draw_u(config, &params)?;
        for (i, c) in chunks.iter().enumerate() {
            let w: Vec<f64> = c.iter().map(|u| 1.0 - (-u).exp()).collect();
            rows.push(Row::new(n, "chunk_mean_W", 0.0, pairwise_sum(&w) / w.len() as f64).replica(i as u64));
            rows.push(Row::new(n, "chunk_mean_u", 0.0, pairwise_sum(c) / c.len() as f64).replica(i as u64));
        }
        let u: Vec<f64> = chunks.into_iter().flatten().collect();
        let w: Vec<f64> = u.iter().map(|u| 1.0 - (-u).exp()).collect();
        let exact_w = -0.5 * params.beta2();
        let exact_u_var = trigamma(params.nu)?;
        report.values.insert(key("exact_E_W", n), exact_w);
        report.values.insert(key("exact_Var_W", n), params.sigma2);
        report.values.insert(key("exact_E_u", n), params.rho);
        report.values.insert(key("exact_Var_u", n), exact_u_var);

        let sw = Summary::from_samples(&w)?;
        let su = Summary::from_samples(&u)?;
        let vw_se = Summary::variance_se(&w)?;
        let vu_se = Summary::variance_se(&u)?;
        report.summaries.insert(key("W", n), sw);
        report.summaries.insert(key("u", n), su);
        let z = |est: f64, exact: f64, se: f64| (est - exact) / se;
        for (name, est, exact, se) in [
            ("E_W", sw.mean, exact_w, sw.se),
            ("Var_W", sw.variance, params.sigma2, vw_se),
            ("E_u", su.mean, params.rho, su.se),
            ("Var_u", su.variance, exact_u_var, vu_se),
        ] {
            let zval = z(est, exact, se);
            report.values.insert(key(&format!("empirical_{name}"), n), est);
            report.check(key(&format!("{name} z-score"), n), zval, "|z| ≤ 3", zval.abs() <= 3.0);
        }
    }
    Ok(Outcome { report, rows })
}

pub fn moment_scaling(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut report = ExperimentReport::new(&config.experiment);
    let mut rows = Vec::new();
    let mut ns = Vec::new();
    let mut m2 = Vec::new();
    let mut m4 = Vec::new();
    for &n in &config.n_grid {
        let params = ModelParams::new(n, 1, config.dt, 0.0)?;
        let exact2 = trigamma(params.nu)?;
        let u: Vec<f64> = draw_u(config, &params)?.into_iter().flatten().collect();
        let q: Vec<f64> = u.iter().map(|x| (x - params.rho).powi(4)).collect();
        let s4 = Summary::from_samples(&q)?;
        report.summaries.insert(key("centered_4th_moment", n), s4);
        report.values.insert(key("centered_2nd_moment", n), exact2);
        rows.push(Row::new(n, "centered_2nd_moment", 0.0, exact2).at(2.0));
        rows.push(Row::new(n, "centered_4th_moment", 0.0, s4.mean).at(4.0));
        ns.push(n as f64);
        m2.push(exact2);
        m4.push(s4.mean);
    }
    for (k, ys) in [(2, &m2), (4, &m4)] {
        let fit = fit_power_law(&ns, ys)?;
        let target = -(k as f64) / 4.0;
        report.fits.insert(format!("k={k}"), fit);
        report.check(
            format!("slope k={k}"),
            fit.slope,
            format!("{target} ± 0.05"),
            (fit.slope - target).abs() <= 0.05,
        );
    }
    Ok(Outcome { report, rows })
}

/// Fine and coarse runs on one Brownian path: each coarse step uses the
/// normalised sum of two fine noise blocks, and both start from the same
/// stationary draw.
pub fn stationarity(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    const POOL_TIMES: u64 = 8;
    let mut report = ExperimentReport::new(&config.experiment);
    let mut rows = Vec::new();
    let n = config.n_grid[0];
    let lattice = config.lattice.unwrap_or(64);
    let t_macro = config.horizon.t_macro(n);
    let fine = ModelParams::new(n, lattice, config.dt, t_macro)?;
    let coarse = ModelParams::new(n, lattice, 2.0 * config.dt, t_macro)?;
    let coarse_steps = coarse.steps();
    if coarse_steps % POOL_TIMES != 0 {
        return Err(CliError::Config(vec![format!(
            "horizon must span a multiple of {POOL_TIMES} coarse steps"
        )]));
    }
    let pool_every = coarse_steps / POOL_TIMES;
    let plan = ReplicaPlan::new(config.replicas, config.master_seed, fine)?;
    let pooled = plan.map(|_, rng| {
        let u0 = init_stationary(&fine, rng);
        let mut f = Stepper::new(fine, u0.clone())?;
        let mut c = Stepper::new(coarse, u0)?;
        let mut a = NoiseBlock::zeros(lattice);
        let mut b = NoiseBlock::zeros(lattice);
        let mut sum = NoiseBlock::zeros(lattice);
        let mut out_f = Vec::new();
        let mut out_c = Vec::new();
        for k in 1..=coarse_steps {
            a.refill(rng);
            b.refill(rng);
            for ((s, x), y) in sum.xi.iter_mut().zip(&a.xi).zip(&b.xi) {
                *s = (x + y) / std::f64::consts::SQRT_2;
            }
            f.step_with_noise(&a, &mut NoObserver)?;
            f.step_with_noise(&b, &mut NoObserver)?;
            c.step_with_noise(&sum, &mut NoObserver)?;
            if k % pool_every == 0 {
                out_f.extend_from_slice(&f.state().u);
                out_c.extend_from_slice(&c.state().u);
            }
        }
        Ok((out_f, out_c))
    })?;
    let mut fine_pool = Vec::new();
    let mut coarse_pool = Vec::new();
    for (f, c) in pooled {
        fine_pool.extend(f);
        coarse_pool.extend(c);
    }
    let cdf = |x: f64| stationary_cdf(&fine, x);
    let ks_f = ks_statistic(&fine_pool, cdf)?;
    let ks_c = ks_statistic(&coarse_pool, cdf)?;
    let m = fine_pool.len();
    report.ks.insert(format!("dt={}", config.dt), ks_f);
    report.ks.insert(format!("dt={}", 2.0 * config.dt), ks_c);
    report.values.insert("pooled_samples".into(), m as f64);
    report.values.insert("ks_null_1pct".into(), ks_critical_1pct(m));
    report.summaries.insert("u_fine".into(), Summary::from_samples(&fine_pool)?);
    report.summaries.insert("u_coarse".into(), Summary::from_samples(&coarse_pool)?);
    report.values.insert("exact_E_u".into(), fine.rho);
    rows.push(Row::new(n, "ks", fine.t_micro(), ks_f).at(config.dt));
    rows.push(Row::new(n, "ks", coarse.t_micro(), ks_c).at(2.0 * config.dt));
    report.check("pooled samples", m as f64, "≥ 100000", m >= 100_000);
    report.check(format!("KS at dt={}", config.dt), ks_f, "≤ 0.01", ks_f <= 0.01);
    report.check(
        "KS decreases under halving",
        ks_c - ks_f,
        "KS(2dt) - KS(dt) > 0",
        ks_f < ks_c,
    );
    Ok(Outcome { report, rows })
}

pub fn oracle_equivalence(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut report = ExperimentReport::new(&config.experiment);
    let mut rows = Vec::new();
    let n = config.n_grid[0];
    let lattice = config.lattice.unwrap_or(64);
    let params = ModelParams::new(n, lattice, config.dt, config.horizon.t_macro(n))?;
    let plan = ReplicaPlan::new(config.replicas, config.master_seed, params)?;
    let gaps = plan.map(|_, rng| {
        let mut u = init_stationary(&params, rng);
        let mut h = HState::from_lattice(&u);
        let mut noise = NoiseBlock::zeros(lattice);
        let mut worst = 0.0_f64;
        for _ in 0..params.steps() {
            noise.refill(rng);
            u = euler_step(&u, &noise, &params)?;
            h = h_step(&h, &noise, &params)?;
            for (j, x) in u.u.iter().enumerate() {
                worst = worst.max((x - (h.h[j + 1] - h.h[j])).abs());
            }
        }
        Ok(worst)
    })?;
    for (i, g) in gaps.iter().enumerate() {
        rows.push(Row::new(n, "max_gap", params.t_micro(), *g).replica(i as u64));
    }
    let worst = gaps.iter().fold(0.0_f64, |m, g| m.max(*g));
    report.values.insert("steps".into(), params.steps() as f64);
    report.check("max |u_j - (h_j - h_{j-1})|", worst, "≤ 1e-10", worst <= 1e-10);
    Ok(Outcome { report, rows })
}

/// `|Q/H - 1|` between the trapezoid value `Q` and the recursion value `H`.
fn relative_gap(paths: &GridPaths, beta: f64) -> oy_lattice::Result<f64> {
    let q = quadrature_partition(paths, beta)?;
    let h = log_partition_recursion(paths, beta)?;
    Ok((q.ln() - h).exp_m1().abs())
}

pub fn quadrature_check(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    const LEVEL: usize = 2;
    let mut report = ExperimentReport::new(&config.experiment);
    let mut rows = Vec::new();
    let n = config.n_grid[0];
    let params = ModelParams::new(n, 1, config.dt, 0.0)?;
    let beta = params.beta;
    // on this experiment the horizon is the polymer time t
    let t = config.horizon.t_macro(n);
    let steps = (t / config.dt).round() as usize;
    if !steps.is_multiple_of(2) || steps == 0 {
        return Err(CliError::Config(vec![format!(
            "t/dt = {steps} must be a positive even number"
        )]));
    }
    let plan = ReplicaPlan::new(config.replicas, config.master_seed, params)?;
    let pairs = plan.map(|_, rng| {
        let fine = GridPaths::sample(LEVEL, steps, config.dt, rng);
        let coarse = fine.coarsen(2)?;
        Ok((relative_gap(&fine, beta)?, relative_gap(&coarse, beta)?))
    })?;
    let fine: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let coarse: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    for (i, (f, c)) in pairs.iter().enumerate() {
        rows.push(Row::new(n, "relative_gap", t, *f).replica(i as u64).at(config.dt));
        rows.push(Row::new(n, "relative_gap", t, *c).replica(i as u64).at(2.0 * config.dt));
    }
    let mf = pairwise_sum(&fine) / fine.len() as f64;
    let mc = pairwise_sum(&coarse) / coarse.len() as f64;
    report.values.insert("beta".into(), beta);
    report.values.insert(format!("mean_relative_gap[dt={}]", 2.0 * config.dt), mc);
    report.check(format!("relative gap at dt={}", config.dt), mf, "≤ 0.01", mf <= 0.01);
    report.check("gap decreases under halving", mc - mf, "gap(2dt) - gap(dt) > 0", mf < mc);

    let mut rng = oy_lattice::estimators::replica_rng(config.master_seed, u64::MAX);
    let flat = quadrature_partition(&GridPaths::sample(LEVEL, steps, config.dt, &mut rng), 0.0)?;
    report.check("β = 0 gives t", (flat - t).abs(), "|Z - t| ≤ 1e-12", (flat - t).abs() <= 1e-12);
    Ok(Outcome { report, rows })
}

pub fn generator_identities(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    const SLOT: usize = 3;
    const STEPS: u64 = 10;
    let mut report = ExperimentReport::new(&config.experiment);
    let mut rows = Vec::new();
    let n = config.n_grid[0];
    // lower-triangular drift: slots beyond j + 1 never influence the monomials
    let lattice = config.lattice.unwrap_or(SLOT + 1);
    let delta = STEPS as f64 * config.dt;
    let params = ModelParams::new(n, lattice, config.dt, delta / n as f64)?;
    let plan = ReplicaPlan::new(config.replicas, config.master_seed, params)?;
    let per_replica = plan.map(|_, rng| {
        let u0 = init_stationary(&params, rng);
        drift(&u0, &params)?;
        let g = Monomial::ALL
            .iter()
            .map(|&m| generator_monomial(&u0, m, SLOT, &params))
            .collect::<Result<Vec<_>, _>>()?;
        let f0 = Monomial::ALL
            .iter()
            .map(|&m| m.eval(&u0, SLOT))
            .collect::<Result<Vec<_>, _>>()?;
        let mut stepper = Stepper::new(params, u0)?;
        stepper.run(STEPS, rng, &mut NoObserver)?;
        let end: &LatticeState = stepper.state();
        let d = Monomial::ALL
            .iter()
            .zip(&f0)
            .map(|(&m, f)| Ok((m.eval(end, SLOT)? - f) / delta))
            .collect::<Result<Vec<_>, oy_lattice::Error>>()?;
        Ok((d, g))
    })?;
    report.values.insert("delta".into(), delta);
    for (k, m) in Monomial::ALL.iter().enumerate() {
        let diff: Vec<f64> = per_replica.iter().map(|(d, g)| d[k] - g[k]).collect();
        let d: Vec<f64> = per_replica.iter().map(|(d, _)| d[k]).collect();
        let g: Vec<f64> = per_replica.iter().map(|(_, g)| g[k]).collect();
        let sd = Summary::from_samples(&diff)?;
        report.summaries.insert(format!("dynkin_fd[{}]", m.name()), Summary::from_samples(&d)?);
        report.summaries.insert(format!("generator[{}]", m.name()), Summary::from_samples(&g)?);
        report.summaries.insert(format!("difference[{}]", m.name()), sd);
        rows.push(Row::new(n, format!("dynkin_fd[{}]", m.name()), delta, sd.mean));
        if matches!(m, Monomial::Square | Monomial::Cube) {
            let z = sd.z(0.0);
            report.check(format!("{} z-score", m.name()), z, "|z| ≤ 3", z.abs() <= 3.0);
        }
    }
    Ok(Outcome { report, rows })
}
