//! Characteristic functions: Euler products (unconditional and conditioned on `omega`) and controls.

use crate::error::{Error, Result};
use crate::function_model::{AdditiveFunctionSpec, TailModel};
use crate::numeric::{expm1_i, LogProduct};
use crate::primes::primes_up_to;
use num_complex::Complex64;
use rayon::prelude::*;

pub trait CharacteristicFunction: Sync {
    /// `phi(tau)`.
    fn eval(&self, tau: f64) -> Complex64;

    /// Heuristic bound on the error of `eval(tau)` caused by truncating the product.
    fn tail_error(&self, _tau: f64) -> f64 {
        0.0
    }

    /// `(phi, tail_error)` at `start + m * width + offsets[k]` for `m < panels`, panel by panel.
    fn eval_panels(&self, start: f64, width: f64, panels: usize, offsets: &[f64]) -> Vec<(Complex64, f64)> {
        let taus: Vec<f64> = (0..panels).flat_map(|m| offsets.iter().map(move |&o| start + m as f64 * width + o)).collect();
        taus.par_iter().map(|&t| (self.eval(t), self.tail_error(t))).collect()
    }
}

/// `e^{i tau mean - sd^2 tau^2 / 2}`.
#[derive(Debug, Clone, Copy)]
pub struct GaussianCf {
    pub mean: f64,
    pub sd: f64,
}

impl CharacteristicFunction for GaussianCf {
    fn eval(&self, tau: f64) -> Complex64 {
        Complex64::from_polar((-0.5 * self.sd * self.sd * tau * tau).exp(), self.mean * tau)
    }
}

/// Point mass at `at`.
#[derive(Debug, Clone, Copy)]
pub struct DegenerateCf {
    pub at: f64,
}

impl CharacteristicFunction for DegenerateCf {
    fn eval(&self, tau: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.at * tau)
    }
}

/// Any closure `tau -> phi(tau)`.
pub struct FnCf<F: Fn(f64) -> Complex64 + Sync>(pub F);

impl<F: Fn(f64) -> Complex64 + Sync> CharacteristicFunction for FnCf<F> {
    fn eval(&self, tau: f64) -> Complex64 {
        (self.0)(tau)
    }
}

#[derive(Debug, Clone)]
enum Mode {
    Limit,
    Conditional(f64),
}

/// Euler product over `p <= P_max` times an exponential tail model for `p > P_max`.
#[derive(Debug, Clone)]
pub struct EulerProductCf {
    mode: Mode,
    p_max: u64,
    /// `(1/p or r/(p-1+r), f(p))` for locally strongly additive primes with `f(p) != 0`.
    strong: Vec<(f64, f64)>,
    /// `(coefficient (1 - 1/p)/p^nu, f(p^nu))` for the remaining primes, grouped per prime.
    general: Vec<Vec<(f64, f64)>>,
    tail: TailModel,
}

/// Exponent at which `p^-nu` is negligible for the local series.
fn local_terms(spec: &AdditiveFunctionSpec, p: u64) -> Vec<(f64, f64)> {
    let pf = p as f64;
    let c = 1.0 - 1.0 / pf;
    let last_override = spec.overrides().range((p, 0)..=(p, u32::MAX)).map(|(k, _)| k.1).max().unwrap_or(0);
    let mut out = Vec::new();
    let mut pw = 1.0;
    let mut nu = 1u32;
    loop {
        pw /= pf;
        let v = spec.value(p, nu);
        if v != 0.0 {
            out.push((c * pw, v));
        }
        if (2.0 * pw < 1e-17 && nu >= last_override) || pw == 0.0 {
            break;
        }
        nu += 1;
    }
    out
}

impl EulerProductCf {
    /// `phi_F(tau) = prod_p (1 - 1/p) sum_{nu >= 0} e^{i tau f(p^nu)}/p^nu`.
    pub fn limit(spec: &AdditiveFunctionSpec, p_max: u64) -> Result<Self> {
        if p_max < 100 {
            return Err(Error::RejectedInput(format!("P_max must be >= 100, got {p_max}")));
        }
        let tail = TailModel::new(spec, p_max as f64)?;
        let mut strong = Vec::new();
        let mut general = Vec::new();
        for &p in primes_up_to(p_max).iter() {
            if spec.locally_strong(p) {
                let v = spec.value(p, 1);
                if v != 0.0 {
                    strong.push((1.0 / p as f64, v));
                }
            } else {
                let terms = local_terms(spec, p);
                if !terms.is_empty() {
                    general.push(terms);
                }
            }
        }
        Ok(Self { mode: Mode::Limit, p_max, strong, general, tail })
    }

    /// `phi(tau; r) = prod_p (1 + r e^{i tau f(p)}/(p-1)) / (1 + r/(p-1))`, strongly additive `f` only.
    pub fn conditional(spec: &AdditiveFunctionSpec, r: f64, p_max: u64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::RejectedInput(format!("r must be positive, got {r}")));
        }
        if !spec.is_strongly_additive() {
            return Err(Error::RejectedInput("the conditional law needs a strongly additive function".into()));
        }
        if p_max < 100 {
            return Err(Error::RejectedInput(format!("P_max must be >= 100, got {p_max}")));
        }
        let tail = TailModel::new(spec, p_max as f64)?;
        let strong = primes_up_to(p_max)
            .iter()
            .filter_map(|&p| {
                let v = spec.value(p, 1);
                (v != 0.0).then(|| (r / (p as f64 - 1.0 + r), v))
            })
            .collect();
        Ok(Self { mode: Mode::Conditional(r), p_max, strong, general: Vec::new(), tail })
    }

    pub fn p_max(&self) -> u64 {
        self.p_max
    }

    /// Conditioning parameter, if any.
    pub fn r(&self) -> Option<f64> {
        match self.mode {
            Mode::Limit => None,
            Mode::Conditional(r) => Some(r),
        }
    }

    /// Logarithm of the tail factor for `p > P_max`.
    pub fn tail_log(&self, tau: f64) -> Complex64 {
        let s = self.tail.sum(|v| expm1_i(tau * v));
        match self.mode {
            Mode::Limit => s,
            Mode::Conditional(r) => s * r,
        }
    }

    /// Product over `p <= P_max` only.
    pub fn head(&self, tau: f64) -> Complex64 {
        self.head_product(tau).value()
    }

    fn head_product(&self, tau: f64) -> LogProduct {
        let mut prod = LogProduct::default();
        for &(c, v) in &self.strong {
            prod.mul(Complex64::new(1.0, 0.0) + expm1_i(tau * v) * c);
        }
        for terms in &self.general {
            let mut local = Complex64::new(1.0, 0.0);
            for &(c, v) in terms {
                local += expm1_i(tau * v) * c;
            }
            prod.mul(local);
        }
        prod
    }
}

impl CharacteristicFunction for EulerProductCf {
    fn eval(&self, tau: f64) -> Complex64 {
        if tau == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        if tau < 0.0 {
            return self.eval(-tau).conj();
        }
        let mut prod = self.head_product(tau);
        prod.mul_exp(self.tail_log(tau));
        prod.value()
    }

    fn tail_error(&self, tau: f64) -> f64 {
        if tau == 0.0 {
            return 0.0;
        }
        let tau = tau.abs();
        self.error_from(self.eval(tau).norm(), self.tail_log(tau).norm())
    }

    fn eval_panels(&self, start: f64, width: f64, panels: usize, offsets: &[f64]) -> Vec<(Complex64, f64)> {
        let per = offsets.len();
        let n = panels * per;
        let mut unit = vec![Complex64::new(1.0, 0.0); n];
        let mut log_mag = vec![0.0f64; n];
        let mut local = vec![Complex64::new(0.0, 0.0); n];
        let mut pending = 0;
        let renormalize = |unit: &mut [Complex64], log_mag: &mut [f64]| {
            for (u, l) in unit.iter_mut().zip(log_mag.iter_mut()) {
                let m = u.norm();
                if m > 0.0 && m.is_finite() {
                    *l += m.ln();
                    *u /= m;
                }
            }
        };
        // adds c (e^{i tau v} - 1) at every node into `acc`, rotating panel phases by recurrence
        let add_term = |acc: &mut [Complex64], c: f64, v: f64| {
            let off: Vec<Complex64> = offsets.iter().map(|&o| Complex64::from_polar(1.0, o * v)).collect();
            let rot = Complex64::from_polar(1.0, width * v);
            let mut base = Complex64::from_polar(1.0, start * v);
            for m in 0..panels {
                if m % 256 == 0 {
                    base = Complex64::from_polar(1.0, (start + m as f64 * width) * v);
                }
                let row = &mut acc[m * per..(m + 1) * per];
                for (a, o) in row.iter_mut().zip(&off) {
                    *a += (base * o - 1.0) * c;
                }
                base *= rot;
            }
        };
        for &(c, v) in &self.strong {
            local.iter_mut().for_each(|z| *z = Complex64::new(1.0, 0.0));
            add_term(&mut local, c, v);
            unit.iter_mut().zip(&local).for_each(|(u, z)| *u *= z);
            pending += 1;
            if pending == 64 {
                renormalize(&mut unit, &mut log_mag);
                pending = 0;
            }
        }
        for terms in &self.general {
            local.iter_mut().for_each(|z| *z = Complex64::new(1.0, 0.0));
            for &(c, v) in terms {
                add_term(&mut local, c, v);
            }
            unit.iter_mut().zip(&local).for_each(|(u, z)| *u *= z);
            pending += 1;
            if pending == 64 {
                renormalize(&mut unit, &mut log_mag);
                pending = 0;
            }
        }
        renormalize(&mut unit, &mut log_mag);
        (0..n)
            .into_par_iter()
            .map(|i| {
                let tau = start + (i / per) as f64 * width + offsets[i % per];
                let tl = self.tail_log(tau);
                let phi = Complex64::from_polar((log_mag[i] + tl.re).exp(), tl.im) * unit[i];
                (phi, self.error_from(phi.norm(), tl.norm()))
            })
            .collect()
    }
}

impl EulerProductCf {
    fn error_from(&self, magnitude: f64, tail_log: f64) -> f64 {
        let p = self.p_max as f64;
        magnitude * (1e-3 * tail_log + 4.0 / (p * p.ln()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unity_at_zero_and_hermitian() {
        for spec in [AdditiveFunctionSpec::log_pow(2.0), AdditiveFunctionSpec::sigma_ratio(), AdditiveFunctionSpec::dyadic_log(2.0)] {
            let cf = EulerProductCf::limit(&spec, 1000).unwrap();
            assert_eq!(cf.eval(0.0), Complex64::new(1.0, 0.0));
            for tau in [0.1, 1.0, 7.5] {
                assert_eq!(cf.eval(-tau), cf.eval(tau).conj());
                assert!(cf.eval(tau).norm() <= 1.0 + cf.tail_error(tau));
            }
        }
        let c = EulerProductCf::conditional(&AdditiveFunctionSpec::log_pow(2.0), 0.7, 1000).unwrap();
        assert_eq!(c.eval(0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn panel_batch_matches_pointwise() {
        let offsets = [0.013, 0.2, 0.377];
        for spec in [AdditiveFunctionSpec::log_pow(2.0), AdditiveFunctionSpec::sigma_ratio()] {
            let cf = EulerProductCf::limit(&spec, 2000).unwrap();
            let batch = cf.eval_panels(0.5, 0.4, 600, &offsets);
            for (i, (phi, err)) in batch.iter().enumerate() {
                let tau = 0.5 + (i / 3) as f64 * 0.4 + offsets[i % 3];
                assert!((phi - cf.eval(tau)).norm() < 1e-12, "tau = {tau}");
                assert!((err - cf.tail_error(tau)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_spec_is_one() {
        let z = AdditiveFunctionSpec::zero();
        let cf = EulerProductCf::limit(&z, 1000).unwrap();
        let cc = EulerProductCf::conditional(&z, 2.0, 1000).unwrap();
        for tau in [0.3, 3.0, 30.0] {
            assert_eq!(cf.eval(tau), Complex64::new(1.0, 0.0));
            assert_eq!(cc.eval(tau), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn head_matches_direct_local_series() {
        // independent form: prod (1 - 1/p) sum_{nu >= 0} e^{i tau f(p^nu)} / p^nu
        let spec = AdditiveFunctionSpec::sigma_ratio();
        let cf = EulerProductCf::limit(&spec, 200).unwrap();
        let tau = 2.3;
        let mut direct = Complex64::new(1.0, 0.0);
        for &p in primes_up_to(200).iter() {
            let pf = p as f64;
            let mut local = Complex64::new(1.0, 0.0);
            for nu in 1..60 {
                local += Complex64::from_polar(pf.powi(-(nu as i32)), tau * spec.value(p, nu));
            }
            direct *= local * (1.0 - 1.0 / pf);
        }
        assert!((cf.head(tau) - direct).norm() < 1e-13);
    }

    #[test]
    fn conditional_matches_direct_product() {
        let spec = AdditiveFunctionSpec::log_pow(1.0);
        let (r, tau) = (1.0, 1.7);
        let cf = EulerProductCf::conditional(&spec, r, 10_000).unwrap();
        let mut direct = Complex64::new(1.0, 0.0);
        for &p in primes_up_to(10_000).iter() {
            let q = p as f64 - 1.0;
            direct *= (Complex64::new(1.0, 0.0) + Complex64::from_polar(r / q, tau * spec.value(p, 1))) / (1.0 + r / q);
        }
        assert!((cf.head(tau) - direct).norm() < 1e-12);
    }

    #[test]
    fn rejections() {
        assert!(EulerProductCf::conditional(&AdditiveFunctionSpec::log_pow(1.0), 0.0, 1000).is_err());
        assert!(EulerProductCf::conditional(&AdditiveFunctionSpec::sigma_ratio(), 1.0, 1000).is_err());
        assert!(EulerProductCf::limit(&AdditiveFunctionSpec::zero(), 99).is_err());
    }
}
