//! Direct multiplicative sums `M(x; g)` and `Z(x; g)` over a sieved range.

use super::table::SieveTable;
use crate::error::Result;
use crate::numeric::{ComplexSum, CompensatedSum};
use crate::primes::primes_up_to;
use num_complex::Complex64;

/// Multiplicative weights built from `f` and `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GKind {
    Unit,
    /// `z^omega(n)`.
    OmegaPower(Complex64),
    /// `e^{i tau f_R(n)}`.
    CfTwist { tau: f64, r: f64 },
    /// `z^omega(n) e^{i tau f_R(n)}`.
    LevelsetTwist { z: Complex64, tau: f64, r: f64 },
}

/// `M(x; g) = sum_{n <= x} g(n)` and `Z(x; g) = sum_{p <= x} g(p)/p`.
#[derive(Debug, Clone, Copy)]
pub struct MeanValue {
    pub m: Complex64,
    pub z: Complex64,
}

fn powers(z: Complex64, kmax: u32) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(kmax as usize + 1);
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..=kmax {
        out.push(acc);
        acc *= z;
    }
    out
}

impl SieveTable {
    /// Table of `f_R` with the same range, reusing `self` if it already is one.
    fn for_truncation(&self, r: f64) -> Result<Option<SieveTable>> {
        let wanted = self.spec.untruncated().truncated(r)?;
        Ok(if wanted == self.spec { None } else { Some(self.with_truncation(r)?) })
    }

    pub fn direct_mean_value(&self, g: GKind) -> Result<MeanValue> {
        let x = self.x;
        let primes = primes_up_to(x);
        match g {
            GKind::Unit => {
                let z: f64 = primes.iter().map(|&p| 1.0 / p as f64).collect::<CompensatedSum>().value();
                Ok(MeanValue { m: Complex64::new(x as f64, 0.0), z: Complex64::new(z, 0.0) })
            }
            GKind::OmegaPower(zz) => {
                let pw = powers(zz, self.max_omega());
                let mut m = ComplexSum::default();
                for k in 0..=self.max_omega() {
                    m.add(pw[k as usize] * self.pi_k(k) as f64);
                }
                let z: f64 = primes.iter().map(|&p| 1.0 / p as f64).collect::<CompensatedSum>().value();
                Ok(MeanValue { m: m.value(), z: zz * z })
            }
            GKind::CfTwist { tau, r } => self.levelset_twist(Complex64::new(1.0, 0.0), tau, r),
            GKind::LevelsetTwist { z, tau, r } => self.levelset_twist(z, tau, r),
        }
    }

    fn levelset_twist(&self, zz: Complex64, tau: f64, r: f64) -> Result<MeanValue> {
        let other = self.for_truncation(r)?;
        let t = other.as_ref().unwrap_or(self);
        let cache = TwistCache::new(t, tau);
        let mut z = ComplexSum::default();
        for &p in primes_up_to(self.x).iter() {
            z.add(Complex64::from_polar(1.0 / p as f64, tau * t.spec.value(p, 1)) * zz);
        }
        Ok(MeanValue { m: cache.sum_at(zz), z: z.value() })
    }
}

/// Phases `e^{i tau f(n)}` kept for repeated evaluation of `S(x; tau, z)`.
#[derive(Debug, Clone)]
pub struct TwistCache {
    phases: Vec<Complex64>,
    omega: Vec<u8>,
    max_omega: u32,
}

impl TwistCache {
    pub fn new(table: &SieveTable, tau: f64) -> Self {
        let phases = table.f_values().iter().map(|&v| Complex64::from_polar(1.0, tau * v)).collect();
        Self { phases, omega: table.omega_values().to_vec(), max_omega: table.max_omega() }
    }

    pub fn max_omega(&self) -> u32 {
        self.max_omega
    }

    /// `sum_{n <= x} z^omega(n) e^{i tau f(n)}`.
    pub fn sum_at(&self, z: Complex64) -> Complex64 {
        let pw = powers(z, self.max_omega);
        let mut s = ComplexSum::default();
        for (&ph, &w) in self.phases.iter().zip(&self.omega) {
            s.add(ph * pw[w as usize]);
        }
        s.value()
    }

    /// `sum_{omega(n) = k} e^{i tau f(n)}`.
    pub fn level_sum(&self, k: u32) -> Complex64 {
        let mut s = ComplexSum::default();
        for (&ph, &w) in self.phases.iter().zip(&self.omega) {
            if w as u32 == k {
                s.add(ph);
            }
        }
        s.value()
    }
}
