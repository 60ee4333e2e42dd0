//! Limit laws: atomic series, inverted Euler products, and concentration bounds.

mod atomic;
mod cf;
mod concentration;
mod invert;

pub use atomic::{atomic_law, AtomicLaw};
pub use cf::{CharacteristicFunction, DegenerateCf, EulerProductCf, FnCf, GaussianCf};
pub use concentration::{concentration, concentration_integral, concentration_kr, Concentration, QSource};
pub use invert::{check_decay, invert_cf, GridOptions, InvertedLaw, Inversion};

use crate::error::Result;
use std::io::Write;

/// Either construction of `F`.
#[derive(Debug, Clone)]
pub enum LimitLaw {
    Atomic(AtomicLaw),
    Inverted(InvertedLaw),
}

impl LimitLaw {
    pub fn cdf(&self, y: f64) -> f64 {
        match self {
            LimitLaw::Atomic(a) => a.cdf(y),
            LimitLaw::Inverted(l) => l.cdf(y),
        }
    }

    pub fn cdf_left(&self, y: f64) -> f64 {
        match self {
            LimitLaw::Atomic(a) => a.cdf_left(y),
            LimitLaw::Inverted(l) => l.cdf(y),
        }
    }

    /// Sup-norm error of `cdf` against the true law.
    pub fn error_bound(&self) -> f64 {
        match self {
            LimitLaw::Atomic(a) => a.error_bound(),
            LimitLaw::Inverted(l) => l.error_bound(),
        }
    }

    /// Locations of the law's atoms; empty for continuous laws.
    pub fn jump_points(&self) -> Vec<f64> {
        match self {
            LimitLaw::Atomic(a) => a.jump_points(),
            LimitLaw::Inverted(_) => Vec::new(),
        }
    }

    /// Atomic laws write `fm,weight`, inverted laws `y,F,err`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        match self {
            LimitLaw::Atomic(a) => a.write_atoms_csv(w),
            LimitLaw::Inverted(l) => l.write_csv(w),
        }
    }
}
