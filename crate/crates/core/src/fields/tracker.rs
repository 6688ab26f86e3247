//! Per-step accumulation of trajectory functionals in the moving frame.
//!
//! Two kinds of quantity are kept:
//!
//! * Dynkin buckets (`drift`, `frame`, `martingale`, `qv`, `realized_qv`) are
//!   exact increments of `X^n(φ)`, so that
//!   `X_s - X_0 = drift + frame + martingale` holds to rounding.
//! * Diagnostic time integrals (`s_acc`, `b_acc`, `btilde`, `q`, …) are
//!   integrals in macroscopic time `t = s/n`; each step adds
//!   `(dt/n) · integrand(s)`.

use serde::{Deserialize, Serialize};

use super::discrete::Frame;
use super::test_function::TestFunction;
use crate::dynamics::{LatticeState, StepObserver, StepView};
use crate::error::{Error, Result};
use crate::special::ModelParams;

/// ε values for the regularised quadratic term.
pub const DEFAULT_EPS_GRID: [f64; 5] = [0.05, 0.1, 0.2, 0.4, 0.8];

/// Block length for a given ε: `max(2, round(ε√n))`.
pub fn eps_to_l(eps: f64, params: &ModelParams) -> usize {
    ((eps * params.sqrt_n()).round() as usize).max(2)
}

#[derive(Debug, Clone)]
pub struct TrackerConfig {
    pub tf: TestFunction,
    /// Block lengths for `Q(l)` and the sup trackers.
    pub l_grid: Vec<usize>,
    /// ε values whose block length is added to the tracked set.
    pub eps_grid: Vec<f64>,
    /// Also track the order-3 products and `(W→^l_{j+1})³`.
    pub cubic: bool,
    /// Record `X` every this many steps; `None` means `⌈1/(10 dt)⌉`.
    pub sample_every: Option<u64>,
}

impl TrackerConfig {
    pub fn new(tf: TestFunction) -> Self {
        Self {
            tf,
            l_grid: Vec::new(),
            eps_grid: Vec::new(),
            cubic: false,
            sample_every: None,
        }
    }

    /// Sorted, deduplicated block lengths implied by the grids.
    pub fn block_lengths(&self, params: &ModelParams) -> Vec<usize> {
        let mut ls: Vec<usize> = self
            .l_grid
            .iter()
            .copied()
            .chain(self.eps_grid.iter().map(|&e| eps_to_l(e, params)))
            .collect();
        ls.sort_unstable();
        ls.dedup();
        ls
    }

    /// Extra slots needed right of the support for block reads.
    pub fn margin(&self, params: &ModelParams) -> usize {
        self.block_lengths(params).last().map_or(0, |l| l + 1) + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFunctionals {
    /// Block lengths indexing `q`, `q3`, `sup_bg2`, `sup_bg3`.
    pub ls: Vec<usize>,
    pub x0: f64,
    pub x: f64,
    /// `(s, X_s)` at the sampling cadence, starting with `s = 0`.
    pub samples: Vec<(f64, f64)>,
    pub drift: f64,
    pub frame: f64,
    pub martingale: f64,
    pub qv: f64,
    pub realized_qv: f64,
    pub s_acc: f64,
    pub b_acc: f64,
    pub btilde: f64,
    pub btilde3: f64,
    pub q: Vec<f64>,
    pub q3: Vec<f64>,
    /// `sup_t |B̃ - Q(l)|`.
    pub sup_bg2: Vec<f64>,
    /// `sup_t |B̃3 - Q3(l)|`.
    pub sup_bg3: Vec<f64>,
    /// Largest per-step relative residual of the Dynkin identity.
    pub max_residual: f64,
    pub steps: u64,
    pub s: f64,
}

impl TrajectoryFunctionals {
    fn index(&self, l: usize) -> Option<usize> {
        self.ls.binary_search(&l).ok()
    }

    pub fn q_at(&self, l: usize) -> Option<f64> {
        self.index(l).map(|i| self.q[i])
    }

    pub fn q3_at(&self, l: usize) -> Option<f64> {
        self.index(l).and_then(|i| self.q3.get(i).copied())
    }

    pub fn sup_bg2_at(&self, l: usize) -> Option<f64> {
        self.index(l).map(|i| self.sup_bg2[i])
    }

    pub fn sup_bg3_at(&self, l: usize) -> Option<f64> {
        self.index(l).and_then(|i| self.sup_bg3.get(i).copied())
    }

    /// `A^ε`, the block integral at `l = max(2, round(ε√n))`.
    pub fn a_eps(&self, eps: f64, params: &ModelParams) -> Option<f64> {
        self.q_at(eps_to_l(eps, params))
    }

    /// `X_s - X_0 - (drift + frame + martingale)`.
    pub fn decomposition_gap(&self) -> f64 {
        (self.x - self.x0) - (self.drift + self.frame + self.martingale)
    }

    /// Quadratic variation per unit macroscopic time.
    pub fn qv_rate(&self, params: &ModelParams) -> f64 {
        self.qv * params.n as f64 / self.s
    }
}

struct PhiCache {
    s: f64,
    first: usize,
    phi: Vec<f64>,
    dphi: Vec<f64>,
}

/// Observer that accumulates [`TrajectoryFunctionals`] for one test function.
pub struct FieldTracker {
    config: TrackerConfig,
    sample_every: u64,
    out: TrajectoryFunctionals,
    cache: Option<PhiCache>,
    // scratch, indexed from the first slot of the current range
    phi0: Vec<f64>,
    dphi0: Vec<f64>,
    phi1: Vec<f64>,
    dphi1: Vec<f64>,
    prefix: Vec<f64>,
}

impl FieldTracker {
    /// Checks that the frame stays inside the lattice (with room for the
    /// longest block) up to `params.t_micro()`, and records `X_0`.
    pub fn new(
        config: TrackerConfig,
        params: &ModelParams,
        initial: &LatticeState,
    ) -> Result<Self> {
        if initial.len() != params.lattice {
            return Err(Error::Contract(format!(
                "state has {} slots, params expect {}",
                initial.len(),
                params.lattice
            )));
        }
        let margin = config.margin(params);
        params.check_frame(config.tf.reach(), margin)?;
        if config.l_grid.contains(&0) {
            return Err(Error::InvalidParams(
                "block length l must be positive".into(),
            ));
        }
        if config.eps_grid.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::InvalidParams("ε values must be positive".into()));
        }
        let sample_every = match config.sample_every {
            Some(0) => {
                return Err(Error::InvalidParams(
                    "sample cadence must be positive".into(),
                ))
            }
            Some(k) => k,
            None => (1.0 / (10.0 * params.dt)).ceil().max(1.0) as u64,
        };
        let ls = config.block_lengths(params);
        let k = ls.len();
        let x0 = super::discrete::field_x(initial, &config.tf, params)?;
        let cubic = config.cubic;
        Ok(Self {
            config,
            sample_every,
            out: TrajectoryFunctionals {
                ls,
                x0,
                x: x0,
                samples: vec![(initial.s, x0)],
                drift: 0.0,
                frame: 0.0,
                martingale: 0.0,
                qv: 0.0,
                realized_qv: 0.0,
                s_acc: 0.0,
                b_acc: 0.0,
                btilde: 0.0,
                btilde3: 0.0,
                q: vec![0.0; k],
                q3: if cubic { vec![0.0; k] } else { Vec::new() },
                sup_bg2: vec![0.0; k],
                sup_bg3: if cubic { vec![0.0; k] } else { Vec::new() },
                max_residual: 0.0,
                steps: 0,
                s: initial.s,
            },
            cache: None,
            phi0: Vec::new(),
            dphi0: Vec::new(),
            phi1: Vec::new(),
            dphi1: Vec::new(),
            prefix: Vec::new(),
        })
    }

    pub fn functionals(&self) -> &TrajectoryFunctionals {
        &self.out
    }

    pub fn into_functionals(self) -> TrajectoryFunctionals {
        self.out
    }

    /// Fills `phi`/`dphi` over slots `first..first+len` at frame `s`, reusing
    /// cached values computed for the same `s`.
    fn evaluate(
        tf: &TestFunction,
        params: &ModelParams,
        s: f64,
        first: usize,
        len: usize,
        cache: Option<&PhiCache>,
        phi: &mut Vec<f64>,
        dphi: &mut Vec<f64>,
    ) {
        let frame = Frame::at(s, params);
        phi.clear();
        dphi.clear();
        for j in first..first + len {
            let hit = cache.and_then(|c| {
                (c.s == s && j >= c.first && j < c.first + c.phi.len())
                    .then(|| (c.phi[j - c.first], c.dphi[j - c.first]))
            });
            let (p, d) = hit.unwrap_or_else(|| {
                let x = frame.x(j);
                (tf.phi(x), tf.dphi(x))
            });
            phi.push(p);
            dphi.push(d);
        }
    }

    fn accumulate(&mut self, view: &StepView<'_>) -> Result<()> {
        let params = view.params;
        let lattice = params.lattice;
        let (before, after, wbar, xi) = (view.before, view.after, view.wbar, &view.noise.xi);
        if before.len() != lattice || after.len() != lattice || xi.len() != lattice + 1 {
            return Err(Error::Contract(
                "step data does not match lattice size".into(),
            ));
        }
        if before.s != self.out.s {
            return Err(Error::Contract(format!(
                "tracker at s = {}, step starts at s = {}",
                self.out.s, before.s
            )));
        }
        let tf = self.config.tf;
        let (lo0, _) = Frame::at(before.s, params).support(&tf, lattice)?;
        let (_, hi1) = Frame::at(after.s, params).support(&tf, lattice)?;
        // one slot of padding on each side so ∇ and Δ see the zeros
        let a = lo0.saturating_sub(1).max(1);
        let b = (hi1 + 1).min(lattice);
        let len = b + 1 - a;

        let cache = self.cache.take();
        Self::evaluate(
            &tf,
            params,
            before.s,
            a,
            len,
            cache.as_ref(),
            &mut self.phi0,
            &mut self.dphi0,
        );
        Self::evaluate(
            &tf,
            params,
            after.s,
            a,
            len,
            None,
            &mut self.phi1,
            &mut self.dphi1,
        );

        let dt = params.dt;
        let rho = params.rho;
        let sqrt_n = params.sqrt_n();
        let half_n = 0.5 * params.n as f64;
        let half_sqrt_n = 0.5 * sqrt_n;
        let phi0 = &self.phi0;
        let phi1 = &self.phi1;
        let p0 = |j: usize| -> f64 {
            if j < a || j > b {
                0.0
            } else {
                phi0[j - a]
            }
        };
        let w = |j: usize| -> f64 {
            if j == 0 {
                0.0
            } else {
                wbar[j - 1]
            }
        };

        let mut drift = 0.0;
        let mut frame = 0.0;
        let mut noise = 0.0;
        let mut x_before = 0.0;
        let mut x_after = 0.0;
        let mut scale = 0.0;
        let mut sym = 0.0;
        let mut anti = 0.0;
        let mut btilde = 0.0;
        let mut btilde3 = 0.0;
        for j in a..=b {
            let i = j - a;
            let (f0, f1) = (phi0[i], phi1[i]);
            let u = before.u[j - 1];
            let v = after.u[j - 1];
            let wj = wbar[j - 1];
            let wm = w(j - 1);
            drift += (wm - wj) * f0;
            frame += (v - rho) * (f1 - f0);
            noise += f0 * (xi[j] - xi[j - 1]);
            x_before += (u - rho) * f0;
            x_after += (v - rho) * f1;
            scale += ((u - rho) * f0).abs() + ((v - rho) * f1).abs();

            let grad = half_sqrt_n * (p0(j + 1) - p0(j - 1));
            let lap = half_n * (p0(j + 1) + p0(j - 1) - 2.0 * f0);
            sym += wj * lap;
            anti += wj * grad - (u - rho) * self.dphi0[i];
            btilde += wm * wj * grad;
            if self.config.cubic {
                btilde3 += wm * wj * w(j + 1) * grad;
            }
        }
        let drift = drift * dt;
        let amp = params.beta * dt.sqrt();
        let dm = amp * noise;

        // exact quadratic variation of dm: coefficient of ξ_i is φ_i - φ_{i+1}
        let mut qv = 0.0;
        for i in (a - 1)..=b {
            let c = p0(i) - p0(i + 1);
            qv += c * c;
        }
        let qv = amp * amp * qv;

        // block sums over W̄ for j ∈ [a, b + 1], blocks up to l_max long
        let l_max = self.out.ls.last().copied().unwrap_or(0);
        let need = b + 1 + l_max;
        if l_max > 0 && need > lattice {
            return Err(Error::BlockOutOfRange {
                start: b + 1,
                end: need,
                lattice,
            });
        }
        let c_int = dt / params.n as f64;
        if l_max > 0 {
            self.prefix.clear();
            self.prefix.push(0.0);
            let mut acc = 0.0;
            for j in a..need {
                acc += wbar[j - 1];
                self.prefix.push(acc);
            }
            let prefix = &self.prefix;
            // W→^l_j for j ≥ a
            let block = |l: usize, j: usize| (prefix[j - a + l] - prefix[j - a]) / l as f64;
            for (k, &l) in self.out.ls.iter().enumerate() {
                let recenter = params.sigma2 / l as f64;
                let mut q = 0.0;
                let mut q3 = 0.0;
                for j in a..=b {
                    let grad = half_sqrt_n * (p0(j + 1) - p0(j - 1));
                    if grad == 0.0 {
                        continue;
                    }
                    let m = block(l, j);
                    q += (m * m - recenter) * grad;
                    if self.config.cubic {
                        let m1 = block(l, j + 1);
                        q3 += m1 * m1 * m1 * grad;
                    }
                }
                self.out.q[k] += c_int * sqrt_n * q;
                if self.config.cubic {
                    self.out.q3[k] += c_int * sqrt_n * q3;
                }
            }
        }

        let o = &mut self.out;
        o.drift += drift;
        o.frame += frame;
        o.martingale += dm;
        o.qv += qv;
        o.realized_qv += dm * dm;
        o.s_acc += c_int * 0.5 * sym;
        o.b_acc += c_int * sqrt_n * anti;
        o.btilde += c_int * sqrt_n * btilde;
        o.btilde3 += c_int * sqrt_n * btilde3;
        for k in 0..o.ls.len() {
            o.sup_bg2[k] = o.sup_bg2[k].max((o.btilde - o.q[k]).abs());
            if self.config.cubic {
                o.sup_bg3[k] = o.sup_bg3[k].max((o.btilde3 - o.q3[k]).abs());
            }
        }
        let residual = (x_after - x_before) - (drift + frame + dm);
        if scale > 0.0 {
            o.max_residual = o.max_residual.max(residual.abs() / scale);
        }
        o.x = x_after;
        o.steps += 1;
        o.s = after.s;
        if o.steps.is_multiple_of(self.sample_every) {
            o.samples.push((after.s, x_after));
        }

        // the post-step frame is next step's pre-step frame
        self.cache = Some(PhiCache {
            s: after.s,
            first: a,
            phi: std::mem::take(&mut self.phi1),
            dphi: std::mem::take(&mut self.dphi1),
        });
        if let Some(old) = cache {
            self.phi1 = old.phi;
            self.dphi1 = old.dphi;
        }
        Ok(())
    }
}

impl StepObserver for FieldTracker {
    fn observe(&mut self, view: &StepView<'_>) -> Result<()> {
        self.accumulate(view)
    }
}

/// Several trackers driven by the same trajectory.
pub struct TrackerSet(pub Vec<FieldTracker>);

impl StepObserver for TrackerSet {
    fn observe(&mut self, view: &StepView<'_>) -> Result<()> {
        for t in self.0.iter_mut() {
            t.accumulate(view)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{init_stationary, NoiseBlock, Stepper};
    use crate::fields::discrete::{discretize, field_x, grad_n};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(n: u32, t_macro: f64, dt: f64, config: &TrackerConfig) -> ModelParams {
        let probe = ModelParams::new(n, 1, dt, t_macro).unwrap();
        ModelParams::with_horizon(n, dt, t_macro, config.tf.reach(), config.margin(&probe)).unwrap()
    }

    #[test]
    fn eps_mapping() {
        let p = ModelParams::new(1024, 10, 1e-3, 0.0).unwrap();
        let ls: Vec<_> = [0.05, 0.1, 0.2, 0.4, 0.8]
            .iter()
            .map(|&e| eps_to_l(e, &p))
            .collect();
        assert_eq!(ls, vec![2, 3, 6, 13, 26]);
    }

    #[test]
    fn deterministic_flat_state() {
        let mut config = TrackerConfig::new(TestFunction::gaussian());
        config.l_grid = vec![2, 4];
        let params = setup(16, 0.25, 0.01, &config);
        let flat = LatticeState::new(0.0, vec![params.rho; params.lattice]);
        let mut tracker = FieldTracker::new(config, &params, &flat).unwrap();
        let mut stepper = Stepper::new(params, flat).unwrap();
        let zero = NoiseBlock::zeros(params.lattice);
        for _ in 0..10 {
            stepper.step_with_noise(&zero, &mut tracker).unwrap();
        }
        let f = tracker.functionals();
        assert_eq!(f.martingale, 0.0);
        assert_eq!(f.realized_qv, 0.0);
        // one-step QV, constant in time up to the frame position
        let phi = discretize(
            &TestFunction::gaussian(),
            &Frame::at(0.0, &params),
            params.lattice,
        )
        .unwrap();
        let mut c2 = phi[0] * phi[0] + phi[params.lattice - 1].powi(2);
        for w in phi.windows(2) {
            c2 += (w[0] - w[1]).powi(2);
        }
        let one = params.beta2() * params.dt * c2;
        assert!((f.qv / (10.0 * one) - 1.0).abs() < 1e-2);
        assert!(f.decomposition_gap().abs() < 1e-12);
    }

    #[test]
    fn identity_and_field_agree_with_direct_evaluation() {
        let mut config = TrackerConfig::new(TestFunction::hermite());
        config.l_grid = vec![2, 3];
        config.eps_grid = vec![0.8];
        config.cubic = true;
        let params = setup(64, 0.02, 5e-3, &config);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let u0 = init_stationary(&params, &mut rng);
        let mut tracker = FieldTracker::new(config, &params, &u0).unwrap();
        let mut stepper = Stepper::new(params, u0).unwrap();
        stepper.run(params.steps(), &mut rng, &mut tracker).unwrap();
        let f = tracker.functionals().clone();
        let direct = field_x(stepper.state(), &TestFunction::hermite(), &params).unwrap();
        assert!((f.x - direct).abs() < 1e-12);
        assert!(f.max_residual < 1e-12, "residual {}", f.max_residual);
        assert!(f.decomposition_gap().abs() < 1e-10 * (1.0 + f.x.abs()));
        assert!((f.realized_qv / f.qv - 1.0).abs() < 0.2);
        assert_eq!(f.ls, vec![2, 3, 6]);
        assert!(f.a_eps(0.8, &params).is_some());
        assert_eq!(f.samples[0].1, f.x0);
        assert_eq!(f.samples.len() as u64, 1 + params.steps() / 20);
    }

    #[test]
    fn q_integrand_matches_direct_sum() {
        // One step from a random state: the increment of Q(l) equals
        // (dt/n)√n Σ_j q_stat(l, j) ∇φ_j.
        let mut config = TrackerConfig::new(TestFunction::gaussian());
        config.l_grid = vec![3];
        config.cubic = true;
        let params = setup(16, 0.5, 1e-3, &config);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let u0 = init_stationary(&params, &mut rng);
        let mut tracker = FieldTracker::new(config, &params, &u0).unwrap();
        let mut stepper = Stepper::new(params, u0.clone()).unwrap();
        stepper.step(&mut rng, &mut tracker).unwrap();
        let f = tracker.functionals();

        let phi = discretize(
            &TestFunction::gaussian(),
            &Frame::at(0.0, &params),
            params.lattice,
        )
        .unwrap();
        let grad = grad_n(&phi, &params);
        let mut q = 0.0;
        let mut q3 = 0.0;
        let mut bt = 0.0;
        let mut bt3 = 0.0;
        let w: Vec<f64> =
            u0.u.iter()
                .map(|&x| crate::dynamics::centered_w(x, &params))
                .collect();
        let wb = |j: usize| if j == 0 { 0.0 } else { w[j - 1] };
        for j in 1..params.lattice - 4 {
            let g = grad[j - 1];
            q += crate::fields::q_stat(&u0, &params, 3, j).unwrap() * g;
            q3 += crate::fields::cubic_q_stat(&u0, &params, 3, j + 1).unwrap() * g;
            bt += wb(j - 1) * wb(j) * g;
            bt3 += wb(j - 1) * wb(j) * wb(j + 1) * g;
        }
        let c = params.dt / params.n as f64 * params.sqrt_n();
        assert!((f.q_at(3).unwrap() - c * q).abs() < 1e-15);
        assert!((f.q3_at(3).unwrap() - c * q3).abs() < 1e-15);
        assert!((f.btilde - c * bt).abs() < 1e-15);
        assert!((f.btilde3 - c * bt3).abs() < 1e-15);
        assert_eq!(f.sup_bg2_at(3).unwrap(), (f.btilde - f.q[0]).abs());
    }

    #[test]
    fn rejects_short_lattice() {
        let config = TrackerConfig::new(TestFunction::gaussian());
        let params = ModelParams::new(16, 40, 1e-3, 1.0).unwrap();
        let state = LatticeState::new(0.0, vec![0.0; 40]);
        assert!(FieldTracker::new(config, &params, &state).is_err());
    }
}
