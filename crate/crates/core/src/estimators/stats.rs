use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tree summation; the result depends only on the order of `xs`, and the
/// rounding error grows like `log m` rather than `m`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// Mean, variance and a normal 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// `√(variance / count)`.
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Summary {
    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        if xs.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "summary needs at least 2 samples, got {}",
                xs.len()
            )));
        }
        let m = xs.len() as f64;
        let mean = pairwise_sum(xs) / m;
        let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
        let variance = pairwise_sum(&sq) / (m - 1.0);
        let se = (variance / m).sqrt();
        Ok(Self {
            count: xs.len(),
            mean,
            variance,
            se,
            ci_low: mean - 1.96 * se,
            ci_high: mean + 1.96 * se,
        })
    }

    /// `|mean - target| ≤ k · se`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.se
    }

    /// Distance from `target` in standard errors.
    pub fn z(&self, target: f64) -> f64 {
        (self.mean - target) / self.se
    }

    /// Standard error of the sample variance under a finite fourth moment:
    /// `√((m4 - s⁴ (m-3)/(m-1)) / m)`.
    pub fn variance_se(xs: &[f64]) -> Result<f64> {
        let s = Self::from_samples(xs)?;
        let m = xs.len() as f64;
        let q: Vec<f64> = xs.iter().map(|x| (x - s.mean).powi(4)).collect();
        let m4 = pairwise_sum(&q) / m;
        let v2 = s.variance * s.variance;
        Ok(((m4 - v2 * (m - 3.0) / (m - 1.0)) / m).max(0.0).sqrt())
    }
}

/// Mean over replicas of `(max_t |path(t)|)²`.
pub fn sup_l2(paths: &[Vec<f64>]) -> Result<f64> {
    if paths.is_empty() || paths.iter().any(|p| p.is_empty()) {
        return Err(Error::InsufficientData(
            "sup_l2 needs non-empty paths".into(),
        ));
    }
    let len = paths[0].len();
    if paths.iter().any(|p| p.len() != len) {
        return Err(Error::Contract("paths must share a time grid".into()));
    }
    let sq: Vec<f64> = paths
        .iter()
        .map(|p| {
            let m = p.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            m * m
        })
        .collect();
    Ok(pairwise_sum(&sq) / paths.len() as f64)
}

/// `sup_x |F_m(x) - F(x)|` for the empirical distribution of `samples`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.len() < 100 {
        return Err(Error::InsufficientData(format!(
            "KS statistic needs at least 100 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::Contract("NaN sample".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let m = sorted.len() as f64;
    let mut d = 0.0_f64;
    let mut i = 0;
    while i < sorted.len() {
        // ties: the empirical CDF jumps over the whole run at once
        let x = sorted[i];
        let mut k = i;
        while k + 1 < sorted.len() && sorted[k + 1] == x {
            k += 1;
        }
        let f = cdf(x);
        d = d.max(f - i as f64 / m).max((k + 1) as f64 / m - f);
        i = k + 1;
    }
    Ok(d)
}

/// Critical value of the KS statistic at level α = 1% (asymptotic).
pub fn ks_critical_1pct(m: usize) -> f64 {
    1.63 / (m as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub r2: f64,
}

/// Ordinary least squares `y = intercept + slope · x`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::Contract("fit inputs differ in length".into()));
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "fit needs at least 3 points, got {}",
            xs.len()
        )));
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParams("fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let slope_se = (sse / (m - 2.0) / sxx).sqrt();
    Ok(LineFit {
        slope,
        intercept,
        slope_se,
        r2,
    })
}

/// Least squares on `(ln x, ln y)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParams(
            "power-law fit needs strictly positive data".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    fit_line(&lx, &ly)
}

/// Fit of `D(l) ≈ a · l/√n + b / l²` without intercept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoTermFit {
    pub a: f64,
    pub b: f64,
    pub r2: f64,
}

impl TwoTermFit {
    pub fn predict(&self, l: f64, sqrt_n: f64) -> f64 {
        self.a * l / sqrt_n + self.b / (l * l)
    }

    /// Minimiser of the fitted curve, `(2b√n/a)^{1/3}`, when both terms are
    /// positive.
    pub fn argmin(&self, sqrt_n: f64) -> Option<f64> {
        (self.a > 0.0 && self.b > 0.0).then(|| (2.0 * self.b * sqrt_n / self.a).cbrt())
    }
}

pub fn fit_two_term(ls: &[f64], ds: &[f64], sqrt_n: f64) -> Result<TwoTermFit> {
    if ls.len() != ds.len() {
        return Err(Error::Contract("fit inputs differ in length".into()));
    }
    if ls.len() < 3 {
        return Err(Error::InsufficientData(
            "two-term fit needs at least 3 points".into(),
        ));
    }
    let f: Vec<f64> = ls.iter().map(|l| l / sqrt_n).collect();
    let g: Vec<f64> = ls.iter().map(|l| 1.0 / (l * l)).collect();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let (ff, fg, gg) = (dot(&f, &f), dot(&f, &g), dot(&g, &g));
    let (fd, gd) = (dot(&f, ds), dot(&g, ds));
    let det = ff * gg - fg * fg;
    if det.abs() <= 1e-12 * ff * gg {
        return Err(Error::InvalidParams("two-term design is singular".into()));
    }
    let a = (fd * gg - gd * fg) / det;
    let b = (gd * ff - fd * fg) / det;
    let m = ds.len() as f64;
    let mean = ds.iter().sum::<f64>() / m;
    let sst: f64 = ds.iter().map(|d| (d - mean) * (d - mean)).sum();
    let sse: f64 = ls
        .iter()
        .zip(ds)
        .map(|(l, d)| {
            let r = d - (a * l / sqrt_n + b / (l * l));
            r * r
        })
        .sum();
    let r2 = if sst > 0.0 { 1.0 - sse / sst } else { 1.0 };
    Ok(TwoTermFit { a, b, r2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn summary_of_known_sample() {
        let s = Summary::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-15);
        assert!((s.se - (5.0 / 12.0_f64).sqrt()).abs() < 1e-15);
        assert!((s.ci_high - s.mean - 1.96 * s.se).abs() < 1e-15);
        assert!(Summary::from_samples(&[1.0]).is_err());
    }

    #[test]
    fn sup_l2_examples() {
        assert_eq!(sup_l2(&[vec![3.0; 5], vec![-3.0; 5]]).unwrap(), 9.0);
        let path: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        assert_eq!(sup_l2(&[path]).unwrap(), 1.0);
        assert!(sup_l2(&[]).is_err());
        assert!(sup_l2(&[vec![]]).is_err());
    }

    fn std_normal_cdf(x: f64) -> f64 {
        0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
    }

    #[test]
    fn ks_examples() {
        let median = vec![0.0; 200];
        assert!((ks_statistic(&median, std_normal_cdf).unwrap() - 0.5).abs() < 1e-15);
        let shifted: Vec<f64> = (0..200).map(|i| 10.0 + i as f64 * 1e-3).collect();
        assert!(ks_statistic(&shifted, std_normal_cdf).unwrap() > 1.0 - 1e-12);
        assert!(ks_statistic(&[0.0; 50], std_normal_cdf).is_err());
    }

    #[test]
    fn ks_uniform_grid() {
        // midpoints (i + ½)/m against U(0,1): statistic exactly 1/(2m)
        let m = 400;
        let xs: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect();
        let d = ks_statistic(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - 0.5 / m as f64).abs() < 1e-15);
    }

    #[test]
    fn power_law_exact() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let f = fit_power_law(&xs, &sq).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.r2 - 1.0).abs() < 1e-12);
        let inv: Vec<f64> = xs.iter().map(|x| 3.0 / x).collect();
        let f = fit_power_law(&xs, &inv).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12);
        assert!(fit_power_law(&xs, &[1.0, 0.0, 1.0, 1.0]).is_err());
        assert!(fit_power_law(&xs[..2], &sq[..2]).is_err());
    }

    #[test]
    fn two_term_recovers_coefficients() {
        let sqrt_n = 32.0;
        let ls = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
        let ds: Vec<f64> = ls
            .iter()
            .map(|l| 0.3 * l / sqrt_n + 5.0 / (l * l))
            .collect();
        let f = fit_two_term(&ls, &ds, sqrt_n).unwrap();
        assert!((f.a - 0.3).abs() < 1e-10 && (f.b - 5.0).abs() < 1e-10);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        let l_star = f.argmin(sqrt_n).unwrap();
        let h = 1e-4;
        let slope = (f.predict(l_star + h, sqrt_n) - f.predict(l_star - h, sqrt_n)) / (2.0 * h);
        assert!(slope.abs() < 1e-6);
    }
}
