//! Explicit Euler–Maruyama integration of the increment system
//!
//! ```text
//! du_j = (W̄_{j-1} - W̄_j) dt + β (dB_j - dB_{j-1}),   W̄_j = 1 - e^{-u_j} + β²/2,  W̄_0 = 0
//! ```
//!
//! The drift of `u_j` only involves `u_{j-1}` and `u_j`, so the first `J`
//! slots form an autonomous system and truncating on the right is exact.
//! No taming is applied: a step whose drift exceeds `1/dt` in magnitude aborts
//! the run instead.

use rand::Rng;

use super::state::{HState, LatticeState, NoiseBlock};
use crate::error::{Error, Result};
use crate::special::{sample_u, ModelParams};

/// Read access handed to observers after each step.
pub struct StepView<'a> {
    /// Index of the step just taken, starting at 0.
    pub step: u64,
    pub params: &'a ModelParams,
    pub before: &'a LatticeState,
    /// `W̄_j` evaluated on `before`.
    pub wbar: &'a [f64],
    pub noise: &'a NoiseBlock,
    pub after: &'a LatticeState,
}

pub trait StepObserver {
    fn observe(&mut self, view: &StepView<'_>) -> Result<()>;
}

impl<F> StepObserver for F
where
    F: FnMut(&StepView<'_>) -> Result<()>,
{
    fn observe(&mut self, view: &StepView<'_>) -> Result<()> {
        self(view)
    }
}

/// Observer that ignores every step.
pub struct NoObserver;

impl StepObserver for NoObserver {
    fn observe(&mut self, _view: &StepView<'_>) -> Result<()> {
        Ok(())
    }
}

/// `d_j = W̄_{j-1} - W̄_j` with `W̄_0 = 0`.
pub fn drift(state: &LatticeState, params: &ModelParams) -> Result<Vec<f64>> {
    let mut wbar = vec![0.0; state.len()];
    fill_wbar(&state.u, params, &mut wbar, step_index(state.s, params.dt))?;
    let mut prev = 0.0;
    Ok(wbar
        .iter()
        .map(|&w| {
            let d = prev - w;
            prev = w;
            d
        })
        .collect())
}

/// `W̄_j = 1 - e^{-u_j} + β²/2`.
pub fn centered_w(u: f64, params: &ModelParams) -> f64 {
    1.0 - (-u).exp() + 0.5 * params.beta2()
}

fn fill_wbar(u: &[f64], params: &ModelParams, out: &mut [f64], step: u64) -> Result<()> {
    let half_b2 = 0.5 * params.beta2();
    for (i, (&x, w)) in u.iter().zip(out.iter_mut()).enumerate() {
        let e = (-x).exp();
        if !e.is_finite() {
            return Err(Error::DriftOverflow {
                step,
                slot: i + 1,
                value: x,
            });
        }
        *w = 1.0 - e + half_b2;
    }
    Ok(())
}

fn step_index(s: f64, dt: f64) -> u64 {
    (s / dt).round() as u64
}

/// One Euler–Maruyama step into `next`; `wbar` receives `W̄` of `current`.
fn advance(
    current: &LatticeState,
    noise: &NoiseBlock,
    params: &ModelParams,
    step: u64,
    wbar: &mut [f64],
    next: &mut LatticeState,
) -> Result<()> {
    let lattice = current.len();
    if noise.xi.len() != lattice + 1 || wbar.len() != lattice || next.u.len() != lattice {
        return Err(Error::Contract(format!(
            "step buffers mismatch lattice size {lattice} (noise {}, wbar {}, next {})",
            noise.xi.len(),
            wbar.len(),
            next.u.len()
        )));
    }
    let dt = params.dt;
    let limit = 1.0 / dt;
    let amp = params.beta * dt.sqrt();
    let half_b2 = 0.5 * params.beta2();
    let mut prev = 0.0;
    for i in 0..lattice {
        let x = current.u[i];
        let e = (-x).exp();
        if !e.is_finite() {
            return Err(Error::DriftOverflow {
                step,
                slot: i + 1,
                value: x,
            });
        }
        let w = 1.0 - e + half_b2;
        wbar[i] = w;
        let d = prev - w;
        if d.abs() > limit {
            return Err(Error::Unstable {
                step,
                slot: i + 1,
                drift: d,
                limit,
            });
        }
        let y = x + d * dt + amp * (noise.xi[i + 1] - noise.xi[i]);
        if !y.is_finite() {
            return Err(Error::NonFinite { step, slot: i + 1 });
        }
        next.u[i] = y;
        prev = w;
    }
    next.s = current.s + dt;
    Ok(())
}

/// `u_j ← u_j + d_j dt + β(ξ_j - ξ_{j-1})√dt`, `s ← s + dt`.
pub fn euler_step(
    state: &LatticeState,
    noise: &NoiseBlock,
    params: &ModelParams,
) -> Result<LatticeState> {
    let mut next = state.clone();
    let mut wbar = vec![0.0; state.len()];
    advance(
        state,
        noise,
        params,
        step_index(state.s, params.dt),
        &mut wbar,
        &mut next,
    )?;
    Ok(next)
}

/// Log-partition step driven by the same noise block:
/// `h_0 ← h_0 + θ dt + β ξ_0 √dt`, `h_j ← h_j + e^{-(h_j - h_{j-1})} dt + β ξ_j √dt`.
///
/// Differencing reproduces [`euler_step`] exactly: for `j ≥ 2` the drift of
/// `h_j - h_{j-1}` is `e^{-u_j} - e^{-u_{j-1}}`, and for `j = 1` it is
/// `e^{-u_1} - θ = -β²/2 - W_1`.
pub fn h_step(state: &HState, noise: &NoiseBlock, params: &ModelParams) -> Result<HState> {
    if noise.xi.len() != state.h.len() {
        return Err(Error::Contract(format!(
            "noise block of {} entries for {} log-partition slots",
            noise.xi.len(),
            state.h.len()
        )));
    }
    let dt = params.dt;
    let amp = params.beta * dt.sqrt();
    let step = step_index(state.s, dt);
    let mut h = Vec::with_capacity(state.h.len());
    h.push(state.h[0] + params.theta * dt + amp * noise.xi[0]);
    for j in 1..state.h.len() {
        let e = (-(state.h[j] - state.h[j - 1])).exp();
        let y = state.h[j] + e * dt + amp * noise.xi[j];
        if !y.is_finite() {
            return Err(Error::NonFinite { step, slot: j });
        }
        h.push(y);
    }
    Ok(HState { s: state.s + dt, h })
}

/// I.i.d. stationary increments at `s = 0`.
pub fn init_stationary<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> LatticeState {
    let u = (0..params.lattice).map(|_| sample_u(params, rng)).collect();
    LatticeState::new(0.0, u)
}

/// Sequential integrator for one replica with preallocated buffers.
pub struct Stepper {
    params: ModelParams,
    current: LatticeState,
    next: LatticeState,
    wbar: Vec<f64>,
    noise: NoiseBlock,
    step: u64,
}

impl Stepper {
    /// Validates the lattice size and the stability policy
    /// `dt ≤ min(0.01, 1/(4 max e^{-u}))` on the initial state.
    pub fn new(params: ModelParams, initial: LatticeState) -> Result<Self> {
        if initial.len() != params.lattice {
            return Err(Error::Contract(format!(
                "state has {} slots, params expect {}",
                initial.len(),
                params.lattice
            )));
        }
        initial.check_finite(0)?;
        let max_dt = ModelParams::max_stable_dt(&initial.u);
        if params.dt > max_dt * (1.0 + 1e-12) {
            return Err(Error::InvalidParams(format!(
                "dt = {} violates the stability bound {max_dt:.3e} on the initial state",
                params.dt
            )));
        }
        let lattice = params.lattice;
        Ok(Self {
            next: initial.clone(),
            current: initial,
            wbar: vec![0.0; lattice],
            noise: NoiseBlock::zeros(lattice),
            params,
            step: 0,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn state(&self) -> &LatticeState {
        &self.current
    }

    pub fn into_state(self) -> LatticeState {
        self.current
    }

    /// Steps taken so far.
    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    /// Draws a fresh noise block and advances one step.
    pub fn step<R, O>(&mut self, rng: &mut R, observer: &mut O) -> Result<()>
    where
        R: Rng + ?Sized,
        O: StepObserver + ?Sized,
    {
        self.noise.refill(rng);
        self.advance_with_current_noise(observer)
    }

    /// Advances one step with caller-supplied noise (pathwise comparisons).
    pub fn step_with_noise<O>(&mut self, noise: &NoiseBlock, observer: &mut O) -> Result<()>
    where
        O: StepObserver + ?Sized,
    {
        if noise.xi.len() != self.noise.xi.len() {
            return Err(Error::Contract(format!(
                "noise block serves J = {}, lattice has J = {}",
                noise.lattice(),
                self.params.lattice
            )));
        }
        self.noise.xi.copy_from_slice(&noise.xi);
        self.advance_with_current_noise(observer)
    }

    pub fn run<R, O>(&mut self, steps: u64, rng: &mut R, observer: &mut O) -> Result<()>
    where
        R: Rng + ?Sized,
        O: StepObserver + ?Sized,
    {
        for _ in 0..steps {
            self.step(rng, observer)?;
        }
        Ok(())
    }

    fn advance_with_current_noise<O>(&mut self, observer: &mut O) -> Result<()>
    where
        O: StepObserver + ?Sized,
    {
        advance(
            &self.current,
            &self.noise,
            &self.params,
            self.step,
            &mut self.wbar,
            &mut self.next,
        )?;
        observer.observe(&StepView {
            step: self.step,
            params: &self.params,
            before: &self.current,
            wbar: &self.wbar,
            noise: &self.noise,
            after: &self.next,
        })?;
        std::mem::swap(&mut self.current, &mut self.next);
        self.step += 1;
        Ok(())
    }
}
