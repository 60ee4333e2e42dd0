//! Sup-norm distance between an empirical law and a reference distribution.

use crate::error::{Error, Result};
use crate::limit_law::{AtomicLaw, InvertedLaw, LimitLaw};
use crate::sieve::EmpiricalCdf;

/// A distribution function with its left limits and the points carrying mass.
pub trait Distribution {
    fn cdf(&self, y: f64) -> f64;
    fn cdf_left(&self, y: f64) -> f64 {
        self.cdf(y)
    }
    fn jump_points(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl Distribution for LimitLaw {
    fn cdf(&self, y: f64) -> f64 {
        LimitLaw::cdf(self, y)
    }
    fn cdf_left(&self, y: f64) -> f64 {
        LimitLaw::cdf_left(self, y)
    }
    fn jump_points(&self) -> Vec<f64> {
        LimitLaw::jump_points(self)
    }
}

impl Distribution for AtomicLaw {
    fn cdf(&self, y: f64) -> f64 {
        AtomicLaw::cdf(self, y)
    }
    fn cdf_left(&self, y: f64) -> f64 {
        AtomicLaw::cdf_left(self, y)
    }
    fn jump_points(&self) -> Vec<f64> {
        AtomicLaw::jump_points(self)
    }
}

impl Distribution for InvertedLaw {
    fn cdf(&self, y: f64) -> f64 {
        InvertedLaw::cdf(self, y)
    }
}

impl Distribution for EmpiricalCdf {
    fn cdf(&self, y: f64) -> f64 {
        self.eval(y)
    }
    fn cdf_left(&self, y: f64) -> f64 {
        self.eval_left(y)
    }
    fn jump_points(&self) -> Vec<f64> {
        let mut v = self.sorted_values().to_vec();
        v.dedup();
        v
    }
}

/// A continuous distribution given by its CDF.
pub struct ContinuousCdf<F: Fn(f64) -> f64>(pub F);

impl<F: Fn(f64) -> f64> Distribution for ContinuousCdf<F> {
    fn cdf(&self, y: f64) -> f64 {
        (self.0)(y)
    }
}

/// `sup_y |emp(y) - law(y)|` over both one-sided limits at every jump of either function, plus `guard`.
pub fn kolmogorov_distance<L: Distribution + ?Sized>(emp: &EmpiricalCdf, law: &L, guard: f64) -> Result<f64> {
    if !(guard >= 0.0) {
        return Err(Error::RejectedInput(format!("guard must be nonnegative, got {guard}")));
    }
    if guard > 0.1 {
        return Err(Error::GuardTooLarge(guard));
    }
    let s = emp.sorted_values();
    let n = s.len() as f64;
    let mut sup = 0.0f64;
    let mut i = 0;
    while i < s.len() {
        let y = s[i];
        let mut j = i + 1;
        while j < s.len() && s[j] == y {
            j += 1;
        }
        sup = sup.max((i as f64 / n - law.cdf_left(y)).abs()).max((j as f64 / n - law.cdf(y)).abs());
        i = j;
    }
    for y in law.jump_points() {
        sup = sup.max((emp.eval(y) - law.cdf(y)).abs()).max((emp.eval_left(y) - law.cdf_left(y)).abs());
    }
    Ok(sup.min(1.0) + guard)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_distances() {
        let a = EmpiricalCdf::from_values(vec![0.0, 1.0, 1.0, 2.5]).unwrap();
        assert_eq!(kolmogorov_distance(&a, &a.clone(), 0.0).unwrap(), 0.0);
        let at0 = EmpiricalCdf::from_values(vec![0.0]).unwrap();
        let at1 = EmpiricalCdf::from_values(vec![1.0]).unwrap();
        assert_eq!(kolmogorov_distance(&at0, &at1, 0.0).unwrap(), 1.0);
        let tenths = EmpiricalCdf::from_values((1..=10).map(|k| k as f64 / 10.0).collect()).unwrap();
        let uniform = ContinuousCdf(|y: f64| y.clamp(0.0, 1.0));
        assert!((kolmogorov_distance(&tenths, &uniform, 0.0).unwrap() - 0.1).abs() < 1e-15);
        assert!(matches!(kolmogorov_distance(&tenths, &uniform, 0.2), Err(Error::GuardTooLarge(_))));
        assert!((kolmogorov_distance(&tenths, &uniform, 0.01).unwrap() - 0.11).abs() < 1e-15);
    }
}
