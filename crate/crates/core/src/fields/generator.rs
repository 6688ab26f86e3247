//! The generator applied to low-order monomials in the increments,
//!
//! ```text
//! LF = (β²/2) Σ_k (∂_{k+1} - ∂_k)² F + Σ_k W̄_k (∂_{k+1} - ∂_k) F
//!    = β² [Σ_k ∂_k² F - Σ_k ∂_k ∂_{k+1} F] + Σ_k (W̄_{k-1} - W̄_k) ∂_k F
//! ```

use serde::{Deserialize, Serialize};

use crate::dynamics::{centered_w, LatticeState};
use crate::error::{Error, Result};
use crate::special::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Monomial {
    /// `u_j²`
    Square,
    /// `u_j³`
    Cube,
    /// `u_{j-1}² u_j`
    PrevSquaredCurrent,
    /// `u_{j-1}² u_{j+1}`
    PrevSquaredNext,
    /// `u_{j-1} u_j u_{j+1}`
    Triple,
}

impl Monomial {
    pub const ALL: [Monomial; 5] = [
        Monomial::Square,
        Monomial::Cube,
        Monomial::PrevSquaredCurrent,
        Monomial::PrevSquaredNext,
        Monomial::Triple,
    ];

    /// `(offset from j, power)` factors.
    pub fn factors(self) -> &'static [(isize, i32)] {
        match self {
            Monomial::Square => &[(0, 2)],
            Monomial::Cube => &[(0, 3)],
            Monomial::PrevSquaredCurrent => &[(-1, 2), (0, 1)],
            Monomial::PrevSquaredNext => &[(-1, 2), (1, 1)],
            Monomial::Triple => &[(-1, 1), (0, 1), (1, 1)],
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "u_j^2" => Ok(Monomial::Square),
            "u_j^3" => Ok(Monomial::Cube),
            "u_{j-1}^2 u_j" => Ok(Monomial::PrevSquaredCurrent),
            "u_{j-1}^2 u_{j+1}" => Ok(Monomial::PrevSquaredNext),
            "u_{j-1} u_j u_{j+1}" => Ok(Monomial::Triple),
            other => Err(Error::Unsupported(format!("monomial {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Monomial::Square => "u_j^2",
            Monomial::Cube => "u_j^3",
            Monomial::PrevSquaredCurrent => "u_{j-1}^2 u_j",
            Monomial::PrevSquaredNext => "u_{j-1}^2 u_{j+1}",
            Monomial::Triple => "u_{j-1} u_j u_{j+1}",
        }
    }

    /// Value of the monomial at slot `j` (1-based).
    pub fn eval(self, state: &LatticeState, j: usize) -> Result<f64> {
        let slots = self.slots(j, state.len())?;
        Ok(slots.iter().map(|&(k, p)| state.u[k - 1].powi(p)).product())
    }

    fn slots(self, j: usize, lattice: usize) -> Result<Vec<(usize, i32)>> {
        // the drift of the leftmost slot reads W̄ one further to the left
        if j < 2 || j + 1 > lattice {
            return Err(Error::InvalidParams(format!(
                "slot j = {j} is not interior for J = {lattice}"
            )));
        }
        Ok(self
            .factors()
            .iter()
            .map(|&(off, p)| ((j as isize + off) as usize, p))
            .collect())
    }
}

/// `L` applied to `monomial` at slot `j`, evaluated on `state`.
pub fn generator_monomial(
    state: &LatticeState,
    monomial: Monomial,
    j: usize,
    params: &ModelParams,
) -> Result<f64> {
    let slots = monomial.slots(j, state.len())?;
    let u = |k: usize| state.u[k - 1];
    let power = |k: usize| slots.iter().find(|s| s.0 == k).map_or(0, |s| s.1);
    // ∂ over the listed slots (each index distinct)
    let deriv = |targets: &[usize]| -> f64 {
        let mut out = 1.0;
        for &(k, p) in &slots {
            let order = targets.iter().filter(|&&t| t == k).count() as i32;
            if order > p {
                return 0.0;
            }
            let mut coef = 1.0;
            for r in 0..order {
                coef *= (p - r) as f64;
            }
            out *= coef * u(k).powi(p - order);
        }
        if targets.iter().any(|t| power(*t) == 0) {
            0.0
        } else {
            out
        }
    };
    let wbar = |k: usize| {
        if k == 0 {
            0.0
        } else {
            centered_w(u(k), params)
        }
    };
    let mut value = 0.0;
    for &(k, _) in &slots {
        value += (wbar(k - 1) - wbar(k)) * deriv(&[k]);
        value += params.beta2() * deriv(&[k, k]);
        if power(k + 1) > 0 {
            value -= params.beta2() * deriv(&[k, k + 1]);
        }
    }
    Ok(value)
}
