//! Upper bounds for the concentration function `Q_F(l) = sup_y F(y + l) - F(y)`.

use super::cf::CharacteristicFunction;
use crate::error::{Error, Result};
use crate::function_model::AdditiveFunctionSpec;
use crate::numeric::CompensatedSum;
use crate::primes::primes_up_to;
use crate::quadrature::{integrate_with_breaks, QuadOptions};

/// `c / sqrt(1 + sum_{p <= P_max, |f(p)| > l} 1/p)`.
pub fn concentration_kr(spec: &AdditiveFunctionSpec, ell: f64, p_max: u64, c_kr: f64) -> Result<f64> {
    if !(ell > 0.0) {
        return Err(Error::RejectedInput(format!("window must be positive, got {ell}")));
    }
    let mut s = CompensatedSum::new();
    for &p in primes_up_to(p_max).iter() {
        if spec.value(p, 1).abs() > ell {
            s.add(1.0 / p as f64);
        }
    }
    Ok(c_kr / (1.0 + s.value()).sqrt())
}

/// `l * int_{-1/l}^{1/l} |phi|`, using `|phi(-t)| = |phi(t)|`.
pub fn concentration_integral<C: CharacteristicFunction + ?Sized>(cf: &C, ell: f64, tol: f64) -> Result<f64> {
    if !(ell > 0.0 && ell <= 1.0) {
        return Err(Error::RejectedInput(format!("window must lie in (0, 1], got {ell}")));
    }
    let top = 1.0 / ell;
    let breaks: Vec<f64> = (1..40).map(|k| top / (1u64 << k) as f64).filter(|&b| b > 1e-3).collect();
    let opts = QuadOptions { abs_tol: tol * ell / 2.0, rel_tol: tol, max_intervals: 4000 };
    let r = integrate_with_breaks(|t: f64| cf.eval(t).norm(), 0.0, top, &breaks, opts);
    Ok(2.0 * ell * r.value)
}

/// Which bound produced `Q_F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QSource {
    KolmogorovRogozin,
    Integral,
}

/// The smaller of the two bounds.
#[derive(Debug, Clone, Copy)]
pub struct Concentration {
    pub kr: f64,
    pub integral: f64,
    pub value: f64,
    pub source: QSource,
}

pub fn concentration<C: CharacteristicFunction + ?Sized>(
    spec: &AdditiveFunctionSpec,
    cf: &C,
    ell: f64,
    p_max: u64,
    c_kr: f64,
    c_int: f64,
) -> Result<Concentration> {
    let kr = concentration_kr(spec, ell, p_max, c_kr)?;
    let integral = c_int * concentration_integral(cf, ell.min(1.0), 1e-8)?;
    let (value, source) = if kr <= integral { (kr, QSource::KolmogorovRogozin) } else { (integral, QSource::Integral) };
    Ok(Concentration { kr, integral, value, source })
}
