use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::{gamma_lr, gamma_ur};

use super::ModelParams;
use crate::error::{Error, Result};

/// Draws from `Gamma(shape)` with unit scale (Marsaglia–Tsang squeeze).
///
/// Shapes below one are boosted: `Gamma(a) = Gamma(a + 1) · U^{1/a}`.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> Result<f64> {
    if !(shape > 0.0) || !shape.is_finite() {
        return Err(Error::Domain {
            func: "sample_gamma",
            value: shape,
        });
    }
    if shape < 1.0 {
        let g = sample_gamma(shape + 1.0, rng)?;
        let u: f64 = rng.random();
        return Ok(g * u.powf(1.0 / shape));
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * z;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = rng.random();
        let z2 = z * z;
        if u < 1.0 - 0.0331 * z2 * z2 {
            return Ok(d * v);
        }
        if u.ln() < 0.5 * z2 + d * (1.0 - v + v.ln()) {
            return Ok(d * v);
        }
    }
}

/// One draw from the stationary marginal: `-ln X + ½ ln n`, `X ~ Gamma(ν)`.
pub fn sample_u<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> f64 {
    let x = sample_gamma(params.nu, rng).expect("ν = √n + ½ is a valid shape");
    0.5 * (params.n as f64).ln() - x.ln()
}

/// `P[u ≤ x]` under the stationary marginal.
///
/// `u ≤ x` iff `X ≥ β^{-2} e^{-x}`, so this is the upper regularised
/// incomplete gamma function at `z = √n e^{-x}`.
pub fn stationary_cdf(params: &ModelParams, x: f64) -> f64 {
    match threshold(params, x) {
        Threshold::Zero => 1.0,
        Threshold::Infinite => 0.0,
        Threshold::Finite(z) => gamma_ur(params.nu, z),
    }
}

/// `P[u > x]`, computed directly (not as `1 - cdf`) to keep the upper tail
/// accurate.
pub fn stationary_tail(params: &ModelParams, x: f64) -> f64 {
    match threshold(params, x) {
        Threshold::Zero => 0.0,
        Threshold::Infinite => 1.0,
        Threshold::Finite(z) => gamma_lr(params.nu, z),
    }
}

enum Threshold {
    Zero,
    Finite(f64),
    Infinite,
}

fn threshold(params: &ModelParams, x: f64) -> Threshold {
    if x.is_nan() {
        return Threshold::Infinite;
    }
    let z = params.sqrt_n() * (-x).exp();
    if z == 0.0 {
        Threshold::Zero
    } else if z.is_infinite() {
        Threshold::Infinite
    } else {
        Threshold::Finite(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p16() -> ModelParams {
        ModelParams::new(16, 8, 1e-3, 0.0).unwrap()
    }

    #[test]
    fn gamma_rejects_bad_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &a in &[0.0, -2.0, f64::NAN, f64::INFINITY] {
            assert!(sample_gamma(a, &mut rng).is_err());
        }
    }

    #[test]
    fn gamma_shape_one_is_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = 200_000;
        let hits = (0..m)
            .filter(|_| sample_gamma(1.0, &mut rng).unwrap() > 1.0)
            .count();
        let p = (-1.0_f64).exp();
        let frac = hits as f64 / m as f64;
        let se = (p * (1.0 - p) / m as f64).sqrt();
        assert!((frac - p).abs() < 3.0 * se, "frac = {frac}");
    }

    #[test]
    fn gamma_small_shape_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = 200_000;
        let a = 0.6;
        let mean = (0..m)
            .map(|_| sample_gamma(a, &mut rng).unwrap())
            .sum::<f64>()
            / m as f64;
        assert!((mean - a).abs() < 3.0 * (a / m as f64).sqrt());
    }

    #[test]
    fn cdf_limits() {
        let p = p16();
        assert_eq!(stationary_cdf(&p, -800.0), 0.0);
        assert_eq!(stationary_cdf(&p, 800.0), 1.0);
        assert!(stationary_cdf(&p, -5.0) < 1e-12);
        assert!(stationary_cdf(&p, 10.0) > 1.0 - 1e-12);
    }

    #[test]
    fn cdf_and_tail_are_complementary() {
        let p = p16();
        for i in -30..=30 {
            let x = i as f64 * 0.1;
            let s = stationary_cdf(&p, x) + stationary_tail(&p, x);
            assert!((s - 1.0).abs() < 1e-13, "x = {x}");
        }
    }
}
