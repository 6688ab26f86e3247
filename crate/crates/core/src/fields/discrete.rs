use super::test_function::TestFunction;
use crate::dynamics::{centered_w, LatticeState};
use crate::error::{Error, Result};
use crate::special::ModelParams;

/// Moving evaluation frame: `x_j = (j - center) / scale` with
/// `center = s + a_n √n` and `scale = √n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub center: f64,
    pub scale: f64,
}

impl Frame {
    pub fn at(s: f64, params: &ModelParams) -> Self {
        Self {
            center: s + params.frame_offset(),
            scale: params.sqrt_n(),
        }
    }

    /// Coordinate of slot `j` (1-based).
    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - self.center) / self.scale
    }

    /// 1-based inclusive range of slots where `tf` can be non-zero. The left
    /// end is clipped at slot 1; leaving the lattice on the right is an error.
    pub fn support(&self, tf: &TestFunction, lattice: usize) -> Result<(usize, usize)> {
        let right = self.center + (tf.shift + tf.support_radius) * self.scale;
        if right >= lattice as f64 {
            return Err(Error::SupportClipped {
                edge: right,
                lattice,
            });
        }
        let left = self.center + (tf.shift - tf.support_radius) * self.scale;
        let lo = left.ceil().max(1.0) as usize;
        let hi = right.floor().max(0.0) as usize;
        Ok((lo, hi.max(lo - 1)))
    }
}

/// `φ^n_j = φ(x_j)` for `j = 1 … J`.
pub fn discretize(tf: &TestFunction, frame: &Frame, lattice: usize) -> Result<Vec<f64>> {
    let (lo, hi) = frame.support(tf, lattice)?;
    let mut out = vec![0.0; lattice];
    for j in lo..=hi {
        out[j - 1] = tf.phi(frame.x(j));
    }
    Ok(out)
}

/// `∇^n φ_j = (√n/2)(φ_{j+1} - φ_{j-1})`, zero beyond both ends.
pub fn grad_n(phi: &[f64], params: &ModelParams) -> Vec<f64> {
    let c = 0.5 * params.sqrt_n();
    let at = |i: isize| -> f64 {
        if i < 0 || i as usize >= phi.len() {
            0.0
        } else {
            phi[i as usize]
        }
    };
    (0..phi.len() as isize)
        .map(|i| c * (at(i + 1) - at(i - 1)))
        .collect()
}

/// `Δ^n φ_j = (n/2)(φ_{j+1} + φ_{j-1} - 2φ_j)`, zero beyond both ends.
pub fn lap_n(phi: &[f64], params: &ModelParams) -> Vec<f64> {
    let c = 0.5 * params.n as f64;
    let at = |i: isize| -> f64 {
        if i < 0 || i as usize >= phi.len() {
            0.0
        } else {
            phi[i as usize]
        }
    };
    (0..phi.len() as isize)
        .map(|i| c * (at(i + 1) + at(i - 1) - 2.0 * at(i)))
        .collect()
}

/// `X^n(φ) = Σ_j (u_j - ρ_n) φ^n_j` in the frame at `state.s`.
pub fn field_x(state: &LatticeState, tf: &TestFunction, params: &ModelParams) -> Result<f64> {
    let frame = Frame::at(state.s, params);
    let (lo, hi) = frame.support(tf, state.len())?;
    Ok((lo..=hi)
        .map(|j| (state.u[j - 1] - params.rho) * tf.phi(frame.x(j)))
        .sum())
}

/// `X̃^n(φ) = Σ_j W̄_j ∇^n φ^n_j`.
pub fn field_xtilde(state: &LatticeState, tf: &TestFunction, params: &ModelParams) -> Result<f64> {
    let frame = Frame::at(state.s, params);
    let phi = discretize(tf, &frame, state.len())?;
    let grad = grad_n(&phi, params);
    Ok(state
        .u
        .iter()
        .zip(&grad)
        .filter(|(_, g)| **g != 0.0)
        .map(|(&u, g)| centered_w(u, params) * g)
        .sum())
}

fn check_block(l: usize, j: usize, lattice: usize) -> Result<()> {
    if l == 0 || j == 0 || j + l - 1 > lattice {
        return Err(Error::BlockOutOfRange {
            start: j,
            end: j + l.max(1) - 1,
            lattice,
        });
    }
    Ok(())
}

/// `W→^l_j = (1/l) Σ_{k=j}^{j+l-1} W̄_k` (1-based `j`).
pub fn block_average(
    state: &LatticeState,
    params: &ModelParams,
    l: usize,
    j: usize,
) -> Result<f64> {
    check_block(l, j, state.len())?;
    let sum: f64 = state.u[j - 1..j - 1 + l]
        .iter()
        .map(|&u| centered_w(u, params))
        .sum();
    Ok(sum / l as f64)
}

/// `τ_j Q(l) = (W→^l_j)² - σ_n²/l`.
pub fn q_stat(state: &LatticeState, params: &ModelParams, l: usize, j: usize) -> Result<f64> {
    let b = block_average(state, params, l, j)?;
    Ok(b * b - params.sigma2 / l as f64)
}

/// `(W→^l_j)³`.
pub fn cubic_q_stat(state: &LatticeState, params: &ModelParams, l: usize, j: usize) -> Result<f64> {
    let b = block_average(state, params, l, j)?;
    Ok(b * b * b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32, lattice: usize) -> ModelParams {
        ModelParams::new(n, lattice, 1e-3, 0.0).unwrap()
    }

    fn linear(x: f64) -> f64 {
        x
    }
    fn one(_: f64) -> f64 {
        1.0
    }
    fn zero(_: f64) -> f64 {
        0.0
    }
    fn square(x: f64) -> f64 {
        x * x
    }
    fn two_x(x: f64) -> f64 {
        2.0 * x
    }
    fn two(_: f64) -> f64 {
        2.0
    }

    #[test]
    fn gaussian_peak_on_center() {
        let params = p(16, 200);
        let frame = Frame {
            center: 50.0,
            scale: 4.0,
        };
        let phi = discretize(&TestFunction::gaussian(), &frame, params.lattice).unwrap();
        assert_eq!(phi[49], 1.0);
    }

    #[test]
    fn affine_discretization_and_operators() {
        let params = p(16, 200);
        let tf = TestFunction::new("x", linear, one, zero, 10.0);
        let frame = Frame {
            center: 100.0,
            scale: 4.0,
        };
        let phi = discretize(&tf, &frame, params.lattice).unwrap();
        for j in 70..130 {
            assert!((phi[j + 1] - phi[j] - 0.25).abs() < 1e-14);
        }
        let g = grad_n(&phi, &params);
        let lap = lap_n(&phi, &params);
        for j in 70..130 {
            assert!((g[j] - 1.0).abs() < 1e-12);
            assert!(lap[j].abs() < 1e-11);
        }
        let tf2 = TestFunction::new("x2", square, two_x, two, 10.0);
        let phi2 = discretize(&tf2, &frame, params.lattice).unwrap();
        let lap2 = lap_n(&phi2, &params);
        for j in 70..130 {
            assert!((lap2[j] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn riemann_sum_of_square() {
        let params = p(256, 600);
        let frame = Frame::at(0.0, &params);
        let phi = discretize(&TestFunction::gaussian(), &frame, params.lattice).unwrap();
        let sum: f64 = phi.iter().map(|v| v * v).sum::<f64>() / params.sqrt_n();
        assert!((sum - std::f64::consts::PI.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn clipping_rules() {
        let frame = Frame {
            center: 10.0,
            scale: 4.0,
        };
        let tf = TestFunction::gaussian();
        // left edge at 10 - 36 < 1 is fine
        let (lo, hi) = frame.support(&tf, 100).unwrap();
        assert_eq!((lo, hi), (1, 46));
        assert!(matches!(
            frame.support(&tf, 46),
            Err(Error::SupportClipped { .. })
        ));
    }

    #[test]
    fn field_of_constant_and_single_site() {
        let params = p(16, 200);
        let mut state = LatticeState::new(0.0, vec![params.rho; 200]);
        let tf = TestFunction::gaussian();
        assert_eq!(field_x(&state, &tf, &params).unwrap(), 0.0);
        let k = 12;
        state.u[k - 1] += 1.0;
        let frame = Frame::at(0.0, &params);
        let expect = tf.phi(frame.x(k));
        assert!((field_x(&state, &tf, &params).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn xtilde_of_flat_state_telescopes() {
        let params = p(16, 200);
        // support fully inside the lattice, away from slot 1
        let state = LatticeState::new(40.0, vec![0.0; 200]);
        let v = field_xtilde(&state, &TestFunction::hermite(), &params).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn block_statistics() {
        let params = p(16, 20);
        let state = LatticeState::new(0.0, vec![0.3; 20]);
        let w = centered_w(0.3, &params);
        for l in [1, 2, 5] {
            assert!((block_average(&state, &params, l, 3).unwrap() - w).abs() < 1e-15);
            let q = q_stat(&state, &params, l, 3).unwrap();
            assert!((q - (w * w - params.sigma2 / l as f64)).abs() < 1e-15);
            assert!((cubic_q_stat(&state, &params, l, 3).unwrap() - w.powi(3)).abs() < 1e-15);
        }
        assert!(block_average(&state, &params, 5, 17).is_err());
        assert!(block_average(&state, &params, 4, 17).is_ok());
        assert!(block_average(&state, &params, 0, 1).is_err());
    }
}
