use crate::error::{Error, Result};

/// A smooth test function with its first two derivatives.
///
/// Values are truncated to exactly zero outside `[shift - R, shift + R]`, so
/// sums over a lattice only need the slots inside the support.
#[derive(Debug, Clone, Copy)]
pub struct TestFunction {
    pub label: &'static str,
    phi: fn(f64) -> f64,
    dphi: fn(f64) -> f64,
    d2phi: fn(f64) -> f64,
    pub support_radius: f64,
    pub shift: f64,
}

/// Labels accepted by [`TestFunction::from_label`].
pub const CATALOG: [&str; 3] = ["gaussian", "hermite", "bump"];

// e^{-x²/2} and its derivatives fall below 1e-14 (with polynomial prefactors)
// only past |x| ≈ 8.5.
const GAUSSIAN_RADIUS: f64 = 9.0;
const BUMP_RADIUS: f64 = 3.0;

fn gauss(x: f64) -> f64 {
    (-0.5 * x * x).exp()
}

fn gauss_d(x: f64) -> f64 {
    -x * gauss(x)
}

fn gauss_d2(x: f64) -> f64 {
    (x * x - 1.0) * gauss(x)
}

fn hermite(x: f64) -> f64 {
    x * gauss(x)
}

fn hermite_d(x: f64) -> f64 {
    (1.0 - x * x) * gauss(x)
}

fn hermite_d2(x: f64) -> f64 {
    (x * x * x - 3.0 * x) * gauss(x)
}

// exp(-1/g), g = 1 - (x/3)²
fn bump(x: f64) -> f64 {
    let g = 1.0 - x * x / 9.0;
    if g <= 0.0 {
        0.0
    } else {
        (-1.0 / g).exp()
    }
}

fn bump_d(x: f64) -> f64 {
    let g = 1.0 - x * x / 9.0;
    if g <= 0.0 {
        return 0.0;
    }
    let a = -2.0 * x / (9.0 * g * g);
    (-1.0 / g).exp() * a
}

fn bump_d2(x: f64) -> f64 {
    let g = 1.0 - x * x / 9.0;
    if g <= 0.0 {
        return 0.0;
    }
    let a = -2.0 * x / (9.0 * g * g);
    let da = -2.0 / (9.0 * g * g) - 8.0 * x * x / (81.0 * g * g * g);
    (-1.0 / g).exp() * (a * a + da)
}

impl TestFunction {
    pub fn new(
        label: &'static str,
        phi: fn(f64) -> f64,
        dphi: fn(f64) -> f64,
        d2phi: fn(f64) -> f64,
        support_radius: f64,
    ) -> Self {
        Self {
            label,
            phi,
            dphi,
            d2phi,
            support_radius,
            shift: 0.0,
        }
    }

    /// `e^{-x²/2}`.
    pub fn gaussian() -> Self {
        Self::new("gaussian", gauss, gauss_d, gauss_d2, GAUSSIAN_RADIUS)
    }

    /// `x e^{-x²/2}`.
    pub fn hermite() -> Self {
        Self::new("hermite", hermite, hermite_d, hermite_d2, GAUSSIAN_RADIUS)
    }

    /// `exp(-1/(1 - (x/3)²))` on `(-3, 3)`.
    pub fn bump() -> Self {
        Self::new("bump", bump, bump_d, bump_d2, BUMP_RADIUS)
    }

    pub fn from_label(label: &str) -> Result<Self> {
        match label {
            "gaussian" => Ok(Self::gaussian()),
            "hermite" => Ok(Self::hermite()),
            "bump" => Ok(Self::bump()),
            other => Err(Error::InvalidParams(format!(
                "unknown test function {other:?}, expected one of {CATALOG:?}"
            ))),
        }
    }

    /// Same profile translated by `dx`.
    pub fn shifted(self, dx: f64) -> Self {
        Self {
            shift: self.shift + dx,
            ..self
        }
    }

    /// Furthest distance from the origin where the function can be non-zero.
    pub fn reach(&self) -> f64 {
        self.shift.abs() + self.support_radius
    }

    pub fn phi(&self, x: f64) -> f64 {
        let y = x - self.shift;
        if y.abs() > self.support_radius {
            0.0
        } else {
            (self.phi)(y)
        }
    }

    pub fn dphi(&self, x: f64) -> f64 {
        let y = x - self.shift;
        if y.abs() > self.support_radius {
            0.0
        } else {
            (self.dphi)(y)
        }
    }

    pub fn d2phi(&self, x: f64) -> f64 {
        let y = x - self.shift;
        if y.abs() > self.support_radius {
            0.0
        } else {
            (self.d2phi)(y)
        }
    }

    /// `∫ φ² dx`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.simpson(|x| {
            let v = self.phi(x);
            v * v
        })
    }

    /// `E(φ) = ∫ (φ')² dx`.
    pub fn energy(&self) -> f64 {
        self.simpson(|x| {
            let v = self.dphi(x);
            v * v
        })
    }

    fn simpson(&self, f: impl Fn(f64) -> f64) -> f64 {
        const PANELS: usize = 20_000;
        let (a, b) = (
            self.shift - self.support_radius,
            self.shift + self.support_radius,
        );
        let h = (b - a) / PANELS as f64;
        let mut acc = f(a) + f(b);
        for i in 1..PANELS {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + h * i as f64);
        }
        acc * h / 3.0
    }
}
