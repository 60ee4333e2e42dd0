//! Small numerical helpers shared by every module.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

/// Compensated sum of complex values (componentwise).
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `e^{i theta} - 1` without cancellation for small `theta`.
#[inline]
pub fn expm1_i(theta: f64) -> Complex64 {
    let (s, c) = (0.5 * theta).sin_cos();
    Complex64::new(-2.0 * s * s, 2.0 * s * c)
}

/// Running complex product with the magnitude kept in log space.
#[derive(Debug, Clone, Copy)]
pub struct LogProduct {
    unit: Complex64,
    log_mag: f64,
    pending: u32,
}

impl Default for LogProduct {
    fn default() -> Self {
        Self { unit: Complex64::new(1.0, 0.0), log_mag: 0.0, pending: 0 }
    }
}

impl LogProduct {
    #[inline]
    pub fn mul(&mut self, z: Complex64) {
        self.unit *= z;
        self.pending += 1;
        if self.pending == 128 {
            self.renormalize();
        }
    }

    fn renormalize(&mut self) {
        let m = self.unit.norm();
        if m > 0.0 && m.is_finite() {
            self.log_mag += m.ln();
            self.unit /= m;
        }
        self.pending = 0;
    }

    pub fn mul_exp(&mut self, w: Complex64) {
        self.log_mag += w.re;
        self.unit *= Complex64::from_polar(1.0, w.im);
    }

    pub fn value(mut self) -> Complex64 {
        self.renormalize();
        if self.log_mag == 0.0 {
            self.unit
        } else {
            self.unit * self.log_mag.exp()
        }
    }

    pub fn log_magnitude(mut self) -> f64 {
        self.renormalize();
        self.log_mag + self.unit.norm().ln()
    }
}

/// Values that can be integrated and summed: reals and complexes.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Gamma function (Lanczos approximation).
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Formats a float with 17 significant digits for reproducible CSV output.
pub fn fmt17(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:.16e}")
    }
}

/// `log log y`, the twice-iterated logarithm.
#[inline]
pub fn log2i(y: f64) -> f64 {
    y.ln().ln()
}
