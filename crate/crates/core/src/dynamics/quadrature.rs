//! Chain-integral partition function of the free (zero-boundary) polymer
//!
//! ```text
//! Z(t, m) = ∫_{0<s_1<…<s_{m-1}<t} exp β[B¹(0,s_1) + B²(s_1,s_2) + … + Bᵐ(s_{m-1},t)] ds
//! ```
//!
//! evaluated on a uniform grid. Only meant as a small-level cross-check.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub const MAX_QUADRATURE_LEVEL: usize = 3;

/// Brownian paths `B¹ … Bᵐ` sampled at `i·dt`, `i = 0 … steps`, with `B(0) = 0`.
/// Between grid points they are taken to be linear.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPaths {
    pub dt: f64,
    pub levels: Vec<Vec<f64>>,
}

impl GridPaths {
    pub fn sample<R: Rng + ?Sized>(levels: usize, steps: usize, dt: f64, rng: &mut R) -> Self {
        let sd = dt.sqrt();
        let levels = (0..levels)
            .map(|_| {
                let mut path = Vec::with_capacity(steps + 1);
                let mut b = 0.0;
                path.push(b);
                for _ in 0..steps {
                    let z: f64 = rng.sample(StandardNormal);
                    b += sd * z;
                    path.push(b);
                }
                path
            })
            .collect();
        Self { dt, levels }
    }

    pub fn steps(&self) -> usize {
        self.levels.first().map_or(0, |p| p.len() - 1)
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.steps() as f64
    }

    /// Same paths seen on a grid `factor` times coarser.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.steps().is_multiple_of(factor) {
            return Err(Error::InvalidParams(format!(
                "cannot coarsen {} steps by {factor}",
                self.steps()
            )));
        }
        Ok(Self {
            dt: self.dt * factor as f64,
            levels: self
                .levels
                .iter()
                .map(|p| p.iter().step_by(factor).copied().collect())
                .collect(),
        })
    }

    fn validate(&self) -> Result<()> {
        let m = self.levels.len();
        if m == 0 {
            return Err(Error::InvalidParams("no Brownian paths given".into()));
        }
        let len = self.levels[0].len();
        if len < 2 || self.levels.iter().any(|p| p.len() != len) {
            return Err(Error::InvalidParams(
                "paths must share a grid of at least two points".into(),
            ));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParams(format!(
                "dt = {} must be positive",
                self.dt
            )));
        }
        Ok(())
    }
}

/// Iterated simplex integral by composite trapezoid over the grid.
///
/// Writing `Z_k(s) = e^{βB^k(s)} ∫_0^s Z_{k-1}(r) e^{-βB^k(r)} dr`, the nested
/// trapezoid rule reduces to one cumulative trapezoid per level.
pub fn quadrature_partition(paths: &GridPaths, beta: f64) -> Result<f64> {
    paths.validate()?;
    let m = paths.levels.len();
    if m > MAX_QUADRATURE_LEVEL {
        return Err(Error::Unsupported(format!(
            "quadrature oracle supports level m ≤ {MAX_QUADRATURE_LEVEL}, got {m}"
        )));
    }
    let dt = paths.dt;
    let mut z: Vec<f64> = paths.levels[0].iter().map(|b| (beta * b).exp()).collect();
    for path in &paths.levels[1..] {
        let g: Vec<f64> = z
            .iter()
            .zip(path)
            .map(|(zk, b)| zk * (-beta * b).exp())
            .collect();
        let mut acc = 0.0;
        z[0] = 0.0;
        for i in 1..g.len() {
            acc += 0.5 * dt * (g[i - 1] + g[i]);
            z[i] = (beta * path[i]).exp() * acc;
        }
    }
    let last = *z.last().expect("validated grid");
    if !(last > 0.0) || !last.is_finite() {
        return Err(Error::NonFinite {
            step: paths.steps() as u64,
            slot: m,
        });
    }
    Ok(last)
}

/// Log-partition recursion on the same grid, in log-sum-exp form:
/// `h_k ← h_k + βΔB^k + ln(1 + e^{h_{k-1} - h_k} dt)` with the free-polymer
/// start `h_1 = 0`, `h_k = -∞` for `k ≥ 2` and no boundary level feeding `h_1`.
///
/// Returns `log Z(t, m)`.
pub fn log_partition_recursion(paths: &GridPaths, beta: f64) -> Result<f64> {
    paths.validate()?;
    let m = paths.levels.len();
    let ln_dt = paths.dt.ln();
    let mut h = vec![f64::NEG_INFINITY; m];
    h[0] = 0.0;
    for i in 1..=paths.steps() {
        // descending so h[k-1] is still the pre-step value
        for k in (0..m).rev() {
            let inflow = if k == 0 {
                f64::NEG_INFINITY
            } else {
                h[k - 1] + ln_dt
            };
            let db = paths.levels[k][i] - paths.levels[k][i - 1];
            h[k] = log_add_exp(h[k], inflow) + beta * db;
        }
    }
    let last = h[m - 1];
    if !last.is_finite() {
        return Err(Error::NonFinite {
            step: paths.steps() as u64,
            slot: m,
        });
    }
    Ok(last)
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_beta_gives_simplex_volume() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t: f64 = 1.5;
        for m in 1..=3 {
            let paths = GridPaths::sample(m, 300, t / 300.0, &mut rng);
            let expect = t.powi(m as i32 - 1) / (1..m).product::<usize>().max(1) as f64;
            let got = quadrature_partition(&paths, 0.0).unwrap();
            assert!((got - expect).abs() < 1e-12, "m = {m}: {got} vs {expect}");
        }
    }

    #[test]
    fn level_one_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let paths = GridPaths::sample(1, 100, 0.01, &mut rng);
        let b = *paths.levels[0].last().unwrap();
        assert_eq!(quadrature_partition(&paths, 0.5).unwrap(), (0.5 * b).exp());
        assert!((log_partition_recursion(&paths, 0.5).unwrap() - 0.5 * b).abs() < 1e-12);
    }

    #[test]
    fn level_four_is_unsupported() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let paths = GridPaths::sample(4, 10, 0.1, &mut rng);
        assert!(matches!(
            quadrature_partition(&paths, 0.5),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn level_two_brute_force() {
        // Direct double loop over the trapezoid weights.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let paths = GridPaths::sample(2, 40, 0.025, &mut rng);
        let beta = 0.7;
        let (b1, b2) = (&paths.levels[0], &paths.levels[1]);
        let n = 40;
        let w = |i: usize| if i == 0 || i == n { 0.5 } else { 1.0 };
        let brute: f64 = (0..=n)
            .map(|i| w(i) * paths.dt * (beta * (b1[i] + b2[n] - b2[i])).exp())
            .sum();
        let got = quadrature_partition(&paths, beta).unwrap();
        assert!((got / brute - 1.0).abs() < 1e-13);
    }

    #[test]
    fn recursion_at_zero_beta() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let paths = GridPaths::sample(2, 1000, 1e-3, &mut rng);
        // left Riemann sum of a constant: exactly t
        let h = log_partition_recursion(&paths, 0.0).unwrap();
        assert!(h.abs() < 1e-12);
    }

    #[test]
    fn coarsen_keeps_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let fine = GridPaths::sample(2, 100, 0.01, &mut rng);
        let coarse = fine.coarsen(2).unwrap();
        assert_eq!(coarse.steps(), 50);
        assert!((coarse.horizon() - fine.horizon()).abs() < 1e-15);
        assert_eq!(coarse.levels[1].last(), fine.levels[1].last());
        assert!(fine.coarsen(3).is_err());
    }
}
