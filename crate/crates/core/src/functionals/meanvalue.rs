//! Hypotheses and main term of the mean-value theorem for multiplicative functions.

use super::constants::ConstantsLedger;
use crate::error::{Error, Result};
use crate::function_model::AdditiveFunctionSpec;
use crate::numeric::{gamma, CompensatedSum, ComplexSum, LogProduct};
use crate::primes::primes_up_to;
use crate::sieve::GKind;
use num_complex::Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `1 - sin(2 pi b/A)/(2 pi b/A)`.
pub fn beta_ba(b: f64, big_a: f64) -> f64 {
    let t = 2.0 * std::f64::consts::PI * b / big_a;
    1.0 - t.sin() / t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanValueParams {
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub big_a: f64,
    pub big_b: f64,
    pub rho: f64,
    pub beta: f64,
    pub delta: f64,
    pub eps: f64,
    pub c_g: u8,
}

impl MeanValueParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(a: f64, b: f64, big_a: f64, big_b: f64, rho: f64, delta: f64, eps: f64, c_g: u8, x: f64) -> Result<Self> {
        let bad = |m: String| Err(Error::RejectedInput(m));
        if !(a > 0.0 && a <= 0.25) {
            return bad(format!("a = {a} outside (0, 1/4]"));
        }
        if !(b >= a && b <= 0.5) {
            return bad(format!("b = {b} outside [a, 1/2]"));
        }
        if !(big_a >= 2.0 * b && big_b > 0.0) {
            return bad(format!("need A >= 2b and B > 0, got A = {big_a}, B = {big_b}"));
        }
        if !(rho >= 2.0 * b && rho <= big_a) {
            return bad(format!("rho = {rho} outside [2b, A]"));
        }
        if !(x >= 2.0 && eps > 1.0 / x.ln().sqrt() && eps <= 0.5) {
            return bad(format!("eps = {eps} outside (1/sqrt(log x), 1/2] at x = {x}"));
        }
        if c_g != 1 && c_g != 2 {
            return bad(format!("c_g must be 1 or 2, got {c_g}"));
        }
        let beta = beta_ba(b, big_a);
        if !(delta > 0.0 && delta <= 2.0 * beta * b / (3.0 * c_g as f64) * (1.0 + 1e-12)) {
            return bad(format!("delta = {delta} outside (0, 2 beta b/(3 c_g)]"));
        }
        Ok(Self { a, b, h: (1.0 - b) / b, big_a, big_b, rho, beta, delta, eps, c_g })
    }

    /// The choice for `g = e^{i tau f_R}`: `A = rho = 1`, `b = 1/2`, `beta = 1`, largest `delta`.
    pub fn for_cf_twist(tau: f64, eps: f64, x: f64) -> Result<Self> {
        let c_g = if tau == 0.0 { 1 } else { 2 };
        Self::new(0.25, 0.5, 1.0, 4.0, 1.0, 1.0 / (3.0 * c_g as f64), eps, c_g, x)
    }
}

/// `g` and its majorant `r` on prime powers, with `f_R` already applied.
struct Local {
    spec: Option<AdditiveFunctionSpec>,
    z: Complex64,
    tau: f64,
}

impl Local {
    fn new(spec: &AdditiveFunctionSpec, g: GKind) -> Result<Self> {
        let (z, tau, r) = match g {
            GKind::Unit => (Complex64::new(1.0, 0.0), 0.0, None),
            GKind::OmegaPower(z) => (z, 0.0, None),
            GKind::CfTwist { tau, r } => (Complex64::new(1.0, 0.0), tau, Some(r)),
            GKind::LevelsetTwist { z, tau, r } => (z, tau, Some(r)),
        };
        let spec = match r {
            Some(r) if tau != 0.0 => Some(spec.untruncated().truncated(r)?),
            _ => None,
        };
        Ok(Self { spec, z, tau })
    }

    fn g(&self, p: u64, nu: u32) -> Complex64 {
        match &self.spec {
            Some(s) => self.z * Complex64::from_polar(1.0, self.tau * s.value(p, nu)),
            None => self.z,
        }
    }

    fn r(&self) -> f64 {
        self.z.norm()
    }

    fn is_real(&self) -> bool {
        self.z.im == 0.0 && self.tau == 0.0
    }
}

/// Left side and bound of one inequality.
#[derive(Debug, Clone, Copy)]
pub struct Check {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl Check {
    fn le(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, pass: lhs <= rhs * (1.0 + 1e-12) + 1e-15 }
    }
}

#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub x: f64,
    /// `max_p r(p) <= 2A`.
    pub max_r: Check,
    /// `sum_{p, nu >= 2} r(p^nu) log p^nu / p^nu <= B` over `p <= x`.
    pub higher_powers: Check,
    /// `|g| <= r` on primes and prime squares up to `x`.
    pub dominated: bool,
    /// `g` real-valued (`c_g = 1`) and the declared `c_g` agrees.
    pub c_g_consistent: bool,
    pub cond_23: Check,
    /// At `y = x^eps, sqrt x, x`.
    pub cond_24: Vec<(f64, Check)>,
    pub cond_25: Vec<(f64, Check)>,
}

impl ConditionReport {
    pub fn pass(&self) -> bool {
        self.max_r.pass
            && self.higher_powers.pass
            && self.dominated
            && self.c_g_consistent
            && self.cond_23.pass
            && self.cond_24.iter().all(|c| c.1.pass)
            && self.cond_25.iter().all(|c| c.1.pass)
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut push = |name: &str, c: &Check| {
            if !c.pass {
                out.push(format!("{name}: {:.6e} > {:.6e}", c.lhs, c.rhs));
            }
        };
        push("max r(p)", &self.max_r);
        push("higher powers", &self.higher_powers);
        push("(first sum)", &self.cond_23);
        for (y, c) in &self.cond_24 {
            push(&format!("(second sum at y={y:.4e})"), c);
        }
        for (y, c) in &self.cond_25 {
            push(&format!("(third sum at y={y:.4e})"), c);
        }
        if !self.dominated {
            out.push("|g| <= r fails".into());
        }
        if !self.c_g_consistent {
            out.push("c_g does not match the realness of g".into());
        }
        out
    }
}

/// `sum_{p <= x} (r(p) - Re g(p))/p`.
pub fn lhs_23(spec: &AdditiveFunctionSpec, g: GKind, x: u64) -> Result<f64> {
    let l = Local::new(spec, g)?;
    let r = l.r();
    Ok(primes_up_to(x).iter().map(|&p| (r - l.g(p, 1).re) / p as f64).collect::<CompensatedSum>().value())
}

fn sample_points(x: f64, eps: f64) -> [f64; 3] {
    [x.powf(eps), x.sqrt(), x]
}

pub fn check_thm21_conditions(
    params: &MeanValueParams,
    spec: &AdditiveFunctionSpec,
    g: GKind,
    x: u64,
    c: &ConstantsLedger,
) -> Result<ConditionReport> {
    if x < 3 {
        return Err(Error::RejectedInput(format!("x must be >= 3, got {x}")));
    }
    let l = Local::new(spec, g)?;
    let xf = x as f64;
    let r = l.r();
    let primes = primes_up_to(x);
    let z_eps = xf.powf(params.eps);
    let ys = sample_points(xf, params.eps);

    let mut higher = CompensatedSum::new();
    let mut dominated = true;
    let mut s23 = CompensatedSum::new();
    let mut s24 = [CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new()];
    let mut s25 = [CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new()];
    for &p in primes.iter() {
        let pf = p as f64;
        let lp = pf.ln();
        let gp = l.g(p, 1);
        dominated &= gp.norm() <= r * (1.0 + 1e-12) && l.g(p, 2).norm() <= r * (1.0 + 1e-12);
        let d = r - gp.re;
        s23.add(d / pf);
        for (j, &y) in ys.iter().enumerate() {
            if pf <= y {
                if pf > z_eps {
                    s24[j].add(d.max(0.0).powf(params.h) * lp / pf);
                }
                s25[j].add((r - params.rho) * lp / pf);
            }
        }
        let mut q = pf * pf;
        let mut nu = 2.0;
        while q < 1e300 {
            let term = r * nu * lp / q;
            higher.add(term);
            if term < 1e-20 {
                break;
            }
            q *= pf;
            nu += 1.0;
        }
    }
    let cond_24 = ys
        .iter()
        .zip(&s24)
        .map(|(&y, s)| {
            let rhs = c.get("c_24") * params.eps.powf(params.c_g as f64 * params.delta * params.h) * y.ln();
            (y, Check::le(s.value(), rhs))
        })
        .collect();
    let cond_25 = ys
        .iter()
        .zip(&s25)
        .map(|(&y, s)| (y, Check::le(s.value().abs(), c.get("c_25") * params.eps * y.ln())))
        .collect();
    Ok(ConditionReport {
        x: xf,
        max_r: Check::le(r, 2.0 * params.big_a),
        higher_powers: Check::le(higher.value(), params.big_b),
        dominated,
        c_g_consistent: (params.c_g == 1) == l.is_real() || params.c_g == 2,
        cond_23: Check::le(s23.value(), 0.5 * params.beta * params.b * (1.0 / params.eps).ln()),
        cond_24,
        cond_25,
    })
}

/// Main term and error scale of the asymptotic formula for `M(x; g)`.
#[derive(Debug, Clone, Copy)]
pub struct Prediction {
    pub main: Complex64,
    /// `prod_{p <= x} sum_{p^nu <= x} g(p^nu)/p^nu`.
    pub product: Complex64,
    /// `Z(x; g)`.
    pub z: Complex64,
    /// `c eps^delta e^{Re Z} e^{-gamma rho} x/(Gamma(rho) log x)`.
    pub error_scale: f64,
}

pub fn predicted_mean_value(
    params: &MeanValueParams,
    spec: &AdditiveFunctionSpec,
    g: GKind,
    x: u64,
    c: &ConstantsLedger,
) -> Result<Prediction> {
    if x < 2 {
        return Err(Error::RejectedInput(format!("x must be >= 2, got {x}")));
    }
    let l = Local::new(spec, g)?;
    let xf = x as f64;
    let mut prod = LogProduct::default();
    let mut z = ComplexSum::default();
    for &p in primes_up_to(x).iter() {
        let pf = p as f64;
        let mut local = Complex64::new(1.0, 0.0);
        let mut q = p;
        let mut nu = 1;
        loop {
            local += l.g(p, nu) / q as f64;
            match q.checked_mul(p) {
                Some(n) if n <= x => q = n,
                _ => break,
            }
            nu += 1;
        }
        prod.mul(local);
        z.add(l.g(p, 1) / pf);
    }
    let product = prod.value();
    let z = z.value();
    let pre = (-EULER_GAMMA * params.rho).exp() * xf / (gamma(params.rho) * xf.ln());
    Ok(Prediction {
        main: product * pre,
        product,
        z,
        error_scale: c.get("c_26") * params.eps.powf(params.delta) * z.re.exp() * pre,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_at_documented_points() {
        assert!((beta_ba(0.5, 1.0) - 1.0).abs() < 1e-15);
        assert!((beta_ba(0.25, 0.5) - 1.0).abs() < 1e-15);
        assert!(beta_ba(0.5, 1e6) < 1e-10);
        let mut prev = 1.0;
        for a in [1.5, 2.0, 4.0, 8.0, 100.0] {
            let b = beta_ba(0.5, a);
            assert!(b > 0.0 && b < prev);
            prev = b;
        }
    }

    #[test]
    fn parameter_validation() {
        let x = 1e6;
        assert!(MeanValueParams::for_cf_twist(1.0, 0.3, x).is_ok());
        assert!(MeanValueParams::for_cf_twist(1.0, 0.2, x).is_err());
        assert!(MeanValueParams::new(0.3, 0.5, 1.0, 1.0, 1.0, 0.1, 0.4, 1, x).is_err());
        assert!(MeanValueParams::new(0.25, 0.5, 1.0, 1.0, 1.0, 0.5, 0.4, 1, x).is_err());
        assert!(MeanValueParams::new(0.25, 0.5, 1.0, 1.0, 1.0, 1.0 / 3.0, 0.4, 1, x).is_ok());
    }

    #[test]
    fn unit_function_conditions_are_trivial() {
        let c = ConstantsLedger::default();
        let spec = AdditiveFunctionSpec::log_pow(2.0);
        let p = MeanValueParams::for_cf_twist(0.0, 0.4, 1e5).unwrap();
        let rep = check_thm21_conditions(&p, &spec, GKind::Unit, 100_000, &c).unwrap();
        assert_eq!(rep.cond_23.lhs, 0.0);
        assert!(rep.cond_24.iter().all(|(_, c)| c.lhs == 0.0));
        assert!(rep.cond_25.iter().all(|(_, c)| c.lhs == 0.0));
        let twist = check_thm21_conditions(&p, &spec, GKind::CfTwist { tau: 0.0, r: 100.0 }, 100_000, &c).unwrap();
        assert_eq!(twist.cond_23.lhs, 0.0);
        assert!(rep.pass(), "{:?}", rep.failures());
    }

    #[test]
    fn mertens_control() {
        let c = ConstantsLedger::default();
        let spec = AdditiveFunctionSpec::zero();
        let x = 1_000_000u64;
        let p = MeanValueParams::for_cf_twist(0.0, 0.4, x as f64).unwrap();
        let pr = predicted_mean_value(&p, &spec, GKind::Unit, x, &c).unwrap();
        assert!((pr.main.re - x as f64).abs() / (x as f64) <= 0.02);
        assert_eq!(pr.main.im, 0.0);
        let pz = predicted_mean_value(&p, &spec, GKind::OmegaPower(Complex64::new(1.0, 0.0)), x, &c).unwrap();
        assert_eq!(pz.main, pr.main);
    }

    #[test]
    fn first_sum_stays_below_the_truncation_bound() {
        let spec = AdditiveFunctionSpec::log_pow(2.0);
        let t = super::super::FunctionalTable::new(&spec, 100_000).unwrap();
        let (x, tt, r) = (1_000_000u64, 3.0, 100.0);
        let bound = 2.0 * (r as f64).ln().ln() + 7.0 + 0.5 * tt * tt * t.eta(r).unwrap();
        for tau in [-3.0, -1.0, 0.5, 1.0, 2.0, 3.0] {
            let direct: f64 = primes_up_to(x)
                .iter()
                .map(|&p| (1.0 - (tau * spec.truncated(r).unwrap().value(p, 1)).cos()) / p as f64)
                .sum();
            let lhs = lhs_23(&spec, GKind::CfTwist { tau, r }, x).unwrap();
            assert!((lhs - direct).abs() < 1e-12);
            assert!(lhs <= bound, "tau = {tau}: {lhs} > {bound}");
        }
    }
}
