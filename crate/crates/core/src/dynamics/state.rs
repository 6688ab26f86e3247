use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Microscopic time plus the increments `u_1 … u_J` (stored 0-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeState {
    pub s: f64,
    pub u: Vec<f64>,
}

impl LatticeState {
    pub fn new(s: f64, u: Vec<f64>) -> Self {
        Self { s, u }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// First non-finite slot, reported 1-based.
    pub fn check_finite(&self, step: u64) -> Result<()> {
        match self.u.iter().position(|x| !x.is_finite()) {
            Some(i) => Err(Error::NonFinite { step, slot: i + 1 }),
            None => Ok(()),
        }
    }
}

/// Standard Gaussians `ξ_0 … ξ_J` for one step. `ξ_0` drives the boundary
/// Brownian motion; slot `j` receives `β(ξ_j - ξ_{j-1})√dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseBlock {
    pub xi: Vec<f64>,
}

impl NoiseBlock {
    pub fn zeros(lattice: usize) -> Self {
        Self {
            xi: vec![0.0; lattice + 1],
        }
    }

    pub fn draw<R: Rng + ?Sized>(lattice: usize, rng: &mut R) -> Self {
        let mut block = Self::zeros(lattice);
        block.refill(rng);
        block
    }

    pub fn refill<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for x in self.xi.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
    }

    /// Lattice size this block serves.
    pub fn lattice(&self) -> usize {
        self.xi.len() - 1
    }
}

/// Log partition functions `h_0 … h_J`, `h_j = log Z(s, j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HState {
    pub s: f64,
    pub h: Vec<f64>,
}

impl HState {
    /// Integrates increments with `h_0 = 0`.
    pub fn from_lattice(state: &LatticeState) -> Self {
        let mut h = Vec::with_capacity(state.len() + 1);
        h.push(0.0);
        let mut acc = 0.0;
        for &u in &state.u {
            acc += u;
            h.push(acc);
        }
        Self { s: state.s, h }
    }

    /// `u_j = h_j - h_{j-1}` for `j = 1 … J`.
    pub fn increments(&self) -> Vec<f64> {
        self.h.windows(2).map(|w| w[1] - w[0]).collect()
    }
}
