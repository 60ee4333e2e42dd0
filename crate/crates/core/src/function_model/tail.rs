//! Prime-sum tails `sum_{p > P} h(f(p))/p` from the prime density `1/log t`.
//!
//! Values of `f` on higher prime powers above `P` are ignored; their total weight is
//! at most `sum_{p > P} 1/p^2 < 1/(P log P)`.

use super::family::Family;
use super::spec::AdditiveFunctionSpec;
use crate::error::{Error, Result};
use crate::numeric::QuadValue;
use crate::quadrature::{integrate, QuadOptions};
use std::f64::consts::LN_2;

/// Dyadic blocks summed explicitly before switching to the asymptotic series.
const DYADIC_EXPLICIT_BLOCKS: u32 = 1 << 20;

/// Tail model for one spec beyond one cutoff.
#[derive(Debug, Clone)]
pub struct TailModel {
    family: Family,
    cutoff: f64,
    dyadic_mass: f64,
}

impl TailModel {
    /// Model of the primes `p > cutoff`.
    pub fn new(spec: &AdditiveFunctionSpec, cutoff: f64) -> Result<Self> {
        if !(cutoff >= 3.0) {
            return Err(Error::RejectedInput(format!("tail cutoff must be >= 3, got {cutoff}")));
        }
        if let Some(p) = spec.max_override_prime() {
            if p as f64 > cutoff {
                return Err(Error::TailUnknown(format!("override at p = {p} lies beyond the cutoff {cutoff}")));
            }
        }
        let family = spec.family();
        let dyadic_mass = match family {
            Family::DyadicLog { kappa } | Family::DyadicPow { kappa } => dyadic_tail_mass(&family, kappa, cutoff)?,
            _ => 0.0,
        };
        Ok(Self { family, cutoff, dyadic_mass })
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// `sum_{p > P, f(p) != 0} 1/p`, infinite for families with dense support.
    pub fn support_mass(&self) -> f64 {
        match self.family {
            Family::Zero => 0.0,
            Family::DyadicLog { .. } | Family::DyadicPow { .. } => self.dyadic_mass,
            _ => f64::INFINITY,
        }
    }

    /// Approximates `sum_{p > P} h(f(p))/p`; `h(0)` must vanish.
    pub fn sum<T: QuadValue, H: Fn(f64) -> T>(&self, h: H) -> T {
        let opts = QuadOptions { abs_tol: 1e-16, rel_tol: 1e-11, max_intervals: 400 };
        let lp = self.cutoff.ln();
        match self.family {
            Family::Zero => T::zero(),
            Family::DyadicLog { .. } | Family::DyadicPow { .. } => h(1.0) * self.dyadic_mass,
            Family::LogPow { xi } => {
                // v = (log t)^-xi turns dt/(t log t) into dv/(xi v)
                let v0 = lp.powf(-xi);
                integrate(|v: f64| h(v) * (1.0 / (xi * v)), 0.0, v0, opts).value
            }
            Family::PPow { xi } => u_space(&h, lp, 45.0 / xi, |u| (-xi * u).exp(), opts),
            Family::EulerRatio => u_space(&h, lp, 45.0, |u| -(-(-u).exp()).ln_1p(), opts),
            Family::SigmaRatio => u_space(&h, lp, 45.0, |u| (-u).exp().ln_1p(), opts),
        }
    }
}

/// `int_{log P}^{log P + span} h(f(e^u)) du/u`, split into unit-ish panels.
fn u_space<T: QuadValue, H: Fn(f64) -> T>(h: &H, lp: f64, span: f64, f: impl Fn(f64) -> f64, opts: QuadOptions) -> T {
    let panels = (span / 2.0).ceil().max(1.0) as usize;
    let width = span / panels as f64;
    let mut total = T::zero();
    for k in 0..panels {
        let a = lp + k as f64 * width;
        total = total + integrate(|u: f64| h(f(u)) * (1.0 / u), a, a + width, opts).value;
    }
    total
}

/// `sum_{p > P} 1/p` over the dyadic support, by `log(log b / log a)` per block.
fn dyadic_tail_mass(family: &Family, kappa: f64, cutoff: f64) -> Result<f64> {
    if matches!(family, Family::DyadicLog { .. }) && kappa <= 1.0 {
        return Err(Error::TailUnknown(format!("DYADIC_LOG support mass diverges for kappa = {kappa} <= 1")));
    }
    let log_p = cutoff.ln();
    let n_first = ((cutoff.log2().floor() as u32).max(family.dyadic_n_min())).max(1);
    let n_last = n_first + DYADIC_EXPLICIT_BLOCKS;
    let mut sum = crate::numeric::CompensatedSum::new();
    for n in n_first..=n_last {
        let nf = n as f64;
        let delta = family.dyadic_delta(nf);
        let log_a = nf * LN_2;
        let log_b = log_a + delta.ln_1p();
        if log_b <= log_p {
            continue;
        }
        sum.add((log_b / log_a.max(log_p)).ln());
    }
    // blocks beyond n_last: ln(1 + ln(1+delta)/(n ln 2)) ~ sum_j (-1)^(j+1) delta^j / (j n ln 2)
    let big_n = n_last as f64;
    let mut asym = 0.0;
    for j in 1..=12 {
        let jf = j as f64;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        let term = match family {
            Family::DyadicLog { .. } => {
                let u = big_n.ln();
                u.powf(1.0 - jf * kappa) / (jf * (jf * kappa - 1.0))
            }
            _ => big_n.powf(-jf * kappa) / (jf * jf * kappa),
        };
        asym += sign * term;
    }
    sum.add(asym / LN_2);
    Ok(sum.value())
}
