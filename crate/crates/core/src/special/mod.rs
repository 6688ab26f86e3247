//! Scaled model constants, special functions and exact samplers for the
//! stationary log-gamma law.
//!
//! Under the stationary measure every increment `u_j` is distributed as
//! `-ln X + ½ ln n` with `X ~ Gamma(√n + ½)`, and `e^{-u} = β²X`. Everything
//! the dynamical experiments compare against is derived from this law.

mod functions;
mod law;

pub use functions::{digamma, trigamma};
pub use law::{sample_gamma, sample_u, stationary_cdf, stationary_tail};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scaling parameters accepted by [`ModelParams::new`]; all are powers of four.
pub const SUPPORTED_N: [u32; 5] = [16, 64, 256, 1024, 4096];

/// Every constant of the scaled model, derived from `n`, together with the
/// lattice size and time discretisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: u32,
    /// Disorder strength `n^{-1/4}`.
    pub beta: f64,
    /// Boundary tilt `1 + 1/(2√n)`.
    pub theta: f64,
    /// Gamma shape `β^{-2} θ = √n + ½`.
    pub nu: f64,
    /// Stationary variance of `W = 1 - e^{-u}`: `β² + β⁴/2`.
    pub sigma2: f64,
    /// Stationary mean of `u`: `½ ln n - ψ₀(ν)`.
    pub rho: f64,
    /// Frame offset sequence value `n^{1/4}`.
    pub a_n: f64,
    /// Number of lattice slots `J`.
    pub lattice: usize,
    /// Microscopic time step.
    pub dt: f64,
    /// Macroscopic horizon; the microscopic horizon is `n · t_macro`.
    pub t_macro: f64,
}

impl ModelParams {
    pub fn new(n: u32, lattice: usize, dt: f64, t_macro: f64) -> Result<Self> {
        if !SUPPORTED_N.contains(&n) {
            return Err(Error::InvalidParams(format!(
                "n = {n} is not in the supported grid {SUPPORTED_N:?}"
            )));
        }
        if lattice == 0 {
            return Err(Error::InvalidParams(
                "lattice size J must be positive".into(),
            ));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParams(format!("dt = {dt} must be positive")));
        }
        if !(t_macro >= 0.0) || !t_macro.is_finite() {
            return Err(Error::InvalidParams(format!(
                "t_macro = {t_macro} must be non-negative"
            )));
        }
        let nf = n as f64;
        let sqrt_n = nf.sqrt();
        let beta = 1.0 / sqrt_n.sqrt();
        let beta2 = beta * beta;
        let nu = sqrt_n + 0.5;
        Ok(Self {
            n,
            beta,
            theta: 1.0 + 0.5 / sqrt_n,
            nu,
            sigma2: beta2 + 0.5 * beta2 * beta2,
            rho: 0.5 * nf.ln() - digamma(nu)?,
            a_n: sqrt_n.sqrt(),
            lattice,
            dt,
            t_macro,
        })
    }

    /// Lattice sized so that a test function of support radius `radius`
    /// (plus `margin` extra slots on the right) never leaves the lattice over
    /// the macroscopic horizon.
    pub fn with_horizon(n: u32, dt: f64, t_macro: f64, radius: f64, margin: usize) -> Result<Self> {
        let probe = Self::new(n, 1, dt, t_macro)?;
        let edge = probe.right_edge(probe.t_micro(), radius);
        let lattice = edge.floor() as usize + 1 + margin;
        Self::new(n, lattice, dt, t_macro)
    }

    pub fn sqrt_n(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    pub fn beta2(&self) -> f64 {
        self.beta * self.beta
    }

    /// Microscopic horizon `n · t_macro`.
    pub fn t_micro(&self) -> f64 {
        self.n as f64 * self.t_macro
    }

    /// Number of Euler steps covering the microscopic horizon.
    pub fn steps(&self) -> u64 {
        (self.t_micro() / self.dt).round() as u64
    }

    /// Frame offset `a_n √n` in lattice units.
    pub fn frame_offset(&self) -> f64 {
        self.a_n * self.sqrt_n()
    }

    /// Rightmost lattice coordinate touched by a support of radius `radius`
    /// at microscopic time `s`.
    pub fn right_edge(&self, s: f64, radius: f64) -> f64 {
        s + self.frame_offset() + radius * self.sqrt_n()
    }

    /// Checks `J > n·T + a_n√n + R√n + margin`, i.e. the moving frame never
    /// exits the lattice on the right.
    pub fn check_frame(&self, radius: f64, margin: usize) -> Result<()> {
        let edge = self.right_edge(self.t_micro(), radius) + margin as f64;
        if (self.lattice as f64) <= edge {
            return Err(Error::InvalidParams(format!(
                "J = {} does not exceed n·T + a_n√n + R√n + margin = {edge:.3} (R = {radius})",
                self.lattice
            )));
        }
        Ok(())
    }

    /// Largest stable step for a given state: `min(0.01, 1/(4 max e^{-u}))`.
    pub fn max_stable_dt(u: &[f64]) -> f64 {
        let peak = u.iter().fold(0.0_f64, |m, &x| m.max((-x).exp()));
        if peak > 0.0 {
            0.01_f64.min(0.25 / peak)
        } else {
            0.01
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_constants_for_supported_grid() {
        for &n in &SUPPORTED_N {
            let p = ModelParams::new(n, 10, 1e-3, 0.0).unwrap();
            let sqrt_n = (n as f64).sqrt();
            assert!((p.beta2() * sqrt_n - 1.0).abs() < 1e-15);
            assert!((p.nu - p.theta / p.beta2()).abs() < 1e-12);
            assert!((p.sigma2 - (1.0 / sqrt_n + 0.5 / n as f64)).abs() < 1e-15);
        }
    }

    #[test]
    fn frame_sequence_is_increasing_and_sublinear() {
        let ps: Vec<_> = SUPPORTED_N
            .iter()
            .map(|&n| ModelParams::new(n, 10, 1e-3, 0.0).unwrap())
            .collect();
        for w in ps.windows(2) {
            assert!(w[1].a_n > w[0].a_n);
            assert!(w[1].a_n / w[1].sqrt_n() < w[0].a_n / w[0].sqrt_n());
        }
    }

    #[test]
    fn rho_at_sixteen() {
        let p = ModelParams::new(16, 10, 1e-3, 0.0).unwrap();
        assert!((p.rho - (-0.0025766)).abs() < 5e-8);
    }

    #[test]
    fn rejects_unsupported_and_degenerate_inputs() {
        assert!(ModelParams::new(100, 10, 1e-3, 1.0).is_err());
        assert!(ModelParams::new(16, 0, 1e-3, 1.0).is_err());
        assert!(ModelParams::new(16, 10, 0.0, 1.0).is_err());
        assert!(ModelParams::new(16, 10, 1e-3, -1.0).is_err());
    }

    #[test]
    fn horizon_sizing_satisfies_frame_invariant() {
        let p = ModelParams::with_horizon(256, 1e-2, 0.05, 9.0, 70).unwrap();
        p.check_frame(9.0, 70).unwrap();
        let tight = ModelParams::new(256, p.lattice - 71, 1e-2, 0.05).unwrap();
        assert!(tight.check_frame(9.0, 70).is_err());
    }
}
