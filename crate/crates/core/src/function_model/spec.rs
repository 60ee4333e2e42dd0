//! Additive function specification: family rule, overrides, strong additivity and truncation.

use super::family::{DyadicThresholds, Family};
use crate::error::{Error, Result};
use crate::primes::is_prime;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Rule giving `f(p^nu)` for every prime power.
#[derive(Debug, Clone)]
pub struct AdditiveFunctionSpec {
    family: Family,
    overrides: BTreeMap<(u64, u32), f64>,
    strongly_additive: bool,
    truncation: Option<f64>,
    dyadic: Option<Arc<DyadicThresholds>>,
}

impl PartialEq for AdditiveFunctionSpec {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
            && self.overrides == other.overrides
            && self.strongly_additive == other.strongly_additive
            && self.truncation == other.truncation
    }
}

impl AdditiveFunctionSpec {
    pub fn new(family: Family) -> Result<Self> {
        family.validate().map_err(Error::RejectedInput)?;
        let dyadic = family.is_dyadic().then(|| Arc::new(DyadicThresholds::new(&family)));
        Ok(Self { family, overrides: BTreeMap::new(), strongly_additive: family.default_strong(), truncation: None, dyadic })
    }

    pub fn log_pow(xi: f64) -> Self {
        Self::new(Family::LogPow { xi }).expect("valid xi")
    }

    pub fn p_pow(xi: f64) -> Self {
        Self::new(Family::PPow { xi }).expect("valid xi")
    }

    pub fn dyadic_log(kappa: f64) -> Self {
        Self::new(Family::DyadicLog { kappa }).expect("valid kappa")
    }

    pub fn dyadic_pow(kappa: f64) -> Self {
        Self::new(Family::DyadicPow { kappa }).expect("valid kappa")
    }

    pub fn euler_ratio() -> Self {
        Self::new(Family::EulerRatio).expect("no parameter")
    }

    pub fn sigma_ratio() -> Self {
        Self::new(Family::SigmaRatio).expect("no parameter")
    }

    pub fn zero() -> Self {
        Self::new(Family::Zero).expect("no parameter")
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn is_strongly_additive(&self) -> bool {
        self.strongly_additive
    }

    pub fn truncation(&self) -> Option<f64> {
        self.truncation
    }

    pub fn overrides(&self) -> &BTreeMap<(u64, u32), f64> {
        &self.overrides
    }

    pub fn dyadic_thresholds(&self) -> Option<&DyadicThresholds> {
        self.dyadic.as_deref()
    }

    /// Sets the strong-additivity flag; fails if an override on `nu >= 2` exists.
    pub fn with_strong(mut self, strong: bool) -> Result<Self> {
        if strong {
            if let Some(&(p, nu)) = self.overrides.keys().find(|k| k.1 >= 2) {
                return Err(Error::RejectedInput(format!("override on {p}^{nu} conflicts with strong additivity")));
            }
        }
        self.strongly_additive = strong;
        Ok(self)
    }

    pub fn with_override(mut self, p: u64, nu: u32, value: f64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::RejectedInput(format!("override base {p} is not prime")));
        }
        if nu == 0 {
            return Err(Error::RejectedInput("override exponent must be at least 1".into()));
        }
        if !value.is_finite() {
            return Err(Error::RejectedInput(format!("override value {value} is not finite")));
        }
        if self.strongly_additive && nu >= 2 {
            return Err(Error::RejectedInput(format!("override on {p}^{nu} conflicts with strong additivity")));
        }
        self.overrides.insert((p, nu), value);
        Ok(self)
    }

    /// `f_R`; truncating an already truncated spec keeps the smaller cap.
    pub fn truncated(&self, r: f64) -> Result<Self> {
        if !(r >= 3.0) {
            return Err(Error::RejectedInput(format!("truncation R must be >= 3, got {r}")));
        }
        let mut out = self.clone();
        out.truncation = Some(self.truncation.map_or(r, |old| old.min(r)));
        Ok(out)
    }

    pub fn untruncated(&self) -> Self {
        let mut out = self.clone();
        out.truncation = None;
        out
    }

    /// Value before truncation at `p^nu`; `p` must be prime.
    #[inline]
    pub fn raw_value(&self, p: u64, nu: u32) -> f64 {
        let nu = if self.strongly_additive { 1 } else { nu };
        match self.overrides.get(&(p, nu)) {
            Some(&v) => v,
            None => self.family.value(p, nu, self.dyadic.as_deref()),
        }
    }

    /// `f(p^nu)` (or `f_R(p^nu)` when truncated); `p` must be prime.
    #[inline]
    pub fn value(&self, p: u64, nu: u32) -> f64 {
        let v = self.raw_value(p, nu);
        match self.truncation {
            Some(r) if v.abs() > 1.0 && (p as f64).powi(nu as i32) > r => 0.0,
            _ => v,
        }
    }

    /// Checked evaluation at a prime power.
    pub fn eval_prime_power(&self, p: u64, nu: u32) -> Result<f64> {
        if !is_prime(p) {
            return Err(Error::RejectedInput(format!("{p} is not prime")));
        }
        if nu == 0 {
            return Err(Error::RejectedInput("exponent must be at least 1".into()));
        }
        Ok(self.value(p, nu))
    }

    /// `f(n)` by trial-division factorization.
    pub fn eval(&self, n: u64) -> f64 {
        crate::primes::factorize(n).into_iter().map(|(p, nu)| self.value(p, nu)).sum()
    }

    /// Whether `f(p^nu) = f(p)` holds at `p` for every `nu` after truncation.
    pub fn locally_strong(&self, p: u64) -> bool {
        if !self.strongly_additive {
            return false;
        }
        match self.truncation {
            None => true,
            Some(r) => self.raw_value(p, 1).abs() <= 1.0 || p as f64 > r,
        }
    }

    /// Largest prime carrying an override, if any.
    pub fn max_override_prime(&self) -> Option<u64> {
        self.overrides.keys().map(|k| k.0).max()
    }

    /// Canonical text form, also used for hashing.
    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for AdditiveFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "family={}", self.family.name())?;
        match self.family {
            Family::LogPow { xi } | Family::PPow { xi } => write!(f, " xi={xi:?}")?,
            Family::DyadicLog { kappa } | Family::DyadicPow { kappa } => write!(f, " kappa={kappa:?}")?,
            _ => {}
        }
        if self.strongly_additive != self.family.default_strong() {
            write!(f, " strong={}", self.strongly_additive)?;
        }
        if let Some(r) = self.truncation {
            write!(f, " truncation={r:?}")?;
        }
        for (&(p, nu), v) in &self.overrides {
            write!(f, " override={p},{nu},{v:?}")?;
        }
        Ok(())
    }
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::Parse(format!("{key}: cannot parse '{s}' as a real")))
}

impl FromStr for AdditiveFunctionSpec {
    type Err = Error;

    /// Whitespace-separated `key=value` tokens; `#` starts a comment running to end of line.
    fn from_str(text: &str) -> Result<Self> {
        let mut family: Option<String> = None;
        let mut param: Option<(String, f64)> = None;
        let mut strong: Option<bool> = None;
        let mut truncation: Option<f64> = None;
        let mut overrides = Vec::new();
        let tokens = text.lines().map(|l| l.split('#').next().unwrap_or("")).flat_map(str::split_whitespace);
        for tok in tokens {
            let (key, val) = tok.split_once('=').ok_or_else(|| Error::Parse(format!("token '{tok}' is not key=value")))?;
            let dup = || Error::Parse(format!("duplicate key '{key}'"));
            match key {
                "family" => {
                    if family.replace(val.to_ascii_uppercase()).is_some() {
                        return Err(dup());
                    }
                }
                "xi" | "kappa" => {
                    if param.replace((key.to_string(), parse_f64(key, val)?)).is_some() {
                        return Err(Error::Parse("more than one family parameter".into()));
                    }
                }
                "strong" => {
                    let b = val.parse::<bool>().map_err(|_| Error::Parse(format!("strong: expected true/false, got '{val}'")))?;
                    if strong.replace(b).is_some() {
                        return Err(dup());
                    }
                }
                "truncation" => {
                    if truncation.replace(parse_f64(key, val)?).is_some() {
                        return Err(dup());
                    }
                }
                "override" => {
                    let parts: Vec<&str> = val.split(',').collect();
                    if parts.len() != 3 {
                        return Err(Error::Parse(format!("override '{val}' must be p,nu,value")));
                    }
                    let p = parts[0].parse::<u64>().map_err(|_| Error::Parse(format!("override prime '{}'", parts[0])))?;
                    let nu = parts[1].parse::<u32>().map_err(|_| Error::Parse(format!("override exponent '{}'", parts[1])))?;
                    overrides.push((p, nu, parse_f64("override", parts[2])?));
                }
                _ => return Err(Error::Parse(format!("unknown key '{key}'"))),
            }
        }
        let name = family.ok_or_else(|| Error::Parse("missing family".into()))?;
        let need = |expected: &str| -> Result<f64> {
            match &param {
                Some((k, v)) if k == expected => Ok(*v),
                Some((k, _)) => Err(Error::Parse(format!("family {name} takes {expected}, not {k}"))),
                None => Err(Error::Parse(format!("family {name} requires {expected}"))),
            }
        };
        let fam = match name.as_str() {
            "LOGPOW" => Family::LogPow { xi: need("xi")? },
            "PPOW" => Family::PPow { xi: need("xi")? },
            "DYADIC_LOG" => Family::DyadicLog { kappa: need("kappa")? },
            "DYADIC_POW" => Family::DyadicPow { kappa: need("kappa")? },
            "EULER_RATIO" | "SIGMA_RATIO" | "ZERO" => {
                if param.is_some() {
                    return Err(Error::Parse(format!("family {name} takes no parameter")));
                }
                match name.as_str() {
                    "EULER_RATIO" => Family::EulerRatio,
                    "SIGMA_RATIO" => Family::SigmaRatio,
                    _ => Family::Zero,
                }
            }
            other => return Err(Error::Parse(format!("unknown family '{other}'"))),
        };
        let mut spec = AdditiveFunctionSpec::new(fam)?;
        if let Some(s) = strong {
            spec = spec.with_strong(s)?;
        }
        for (p, nu, v) in overrides {
            if spec.overrides.contains_key(&(p, nu)) {
                return Err(Error::Parse(format!("duplicate override for {p}^{nu}")));
            }
            spec = spec.with_override(p, nu, v)?;
        }
        if let Some(r) = truncation {
            spec = spec.truncated(r)?;
        }
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_values() {
        let lp = AdditiveFunctionSpec::log_pow(1.0);
        assert!((lp.eval_prime_power(2, 3).unwrap() - 1.0 / 2f64.ln()).abs() < 1e-15);
        let er = AdditiveFunctionSpec::euler_ratio();
        for nu in 1..5 {
            assert!((er.eval_prime_power(3, nu).unwrap() - 1.5f64.ln()).abs() < 1e-15);
        }
        assert_eq!(AdditiveFunctionSpec::dyadic_pow(1.0).eval_prime_power(5, 1).unwrap(), 1.0);
        let t = AdditiveFunctionSpec::log_pow(2.0).truncated(3.0).unwrap();
        assert!((t.eval_prime_power(2, 1).unwrap() - 2f64.ln().powi(-2)).abs() < 1e-15);
        assert_eq!(t.eval_prime_power(2, 2).unwrap(), 0.0);
    }

    #[test]
    fn non_prime_is_rejected() {
        assert!(matches!(AdditiveFunctionSpec::zero().eval_prime_power(9, 1), Err(Error::RejectedInput(_))));
        assert!(AdditiveFunctionSpec::zero().with_override(4, 1, 1.0).is_err());
    }

    #[test]
    fn sigma_ratio_prime_powers() {
        let s = AdditiveFunctionSpec::sigma_ratio();
        assert!((s.value(2, 2) - (7.0f64 / 4.0).ln()).abs() < 1e-15);
        assert!((s.value(3, 1) - (4.0f64 / 3.0).ln()).abs() < 1e-15);
        assert!(!s.is_strongly_additive());
    }

    #[test]
    fn overrides_take_priority_and_truncation_is_last() {
        let s = AdditiveFunctionSpec::p_pow(1.0).with_override(3, 2, 5.0).unwrap();
        assert_eq!(s.value(3, 2), 5.0);
        assert_eq!(s.truncated(8.0).unwrap().value(3, 2), 0.0);
        assert_eq!(s.truncated(9.0).unwrap().value(3, 2), 5.0);
        assert!(AdditiveFunctionSpec::log_pow(1.0).with_override(3, 2, 1.0).is_err());
    }

    #[test]
    fn parse_print_roundtrip() {
        let text = "family=LOGPOW xi=2 truncation=1000 override=2,1,0.5";
        let s: AdditiveFunctionSpec = text.parse().unwrap();
        assert_eq!(s.value(2, 1), 0.5);
        let again: AdditiveFunctionSpec = s.to_string().parse().unwrap();
        assert_eq!(s, again);
        assert_eq!(s.to_string(), again.to_string());
        let p: AdditiveFunctionSpec = "family=ppow xi=0.1 strong=true # comment\n override=7,1,-3.25".parse().unwrap();
        assert!(p.is_strongly_additive());
        assert_eq!(p.to_string(), "family=PPOW xi=0.1 strong=true override=7,1,-3.25");
    }

    #[test]
    fn parse_errors() {
        for bad in [
            "xi=2",
            "family=LOGPOW",
            "family=LOGPOW kappa=1",
            "family=ZERO xi=1",
            "family=NOPE",
            "family=LOGPOW xi=-1",
            "family=LOGPOW xi=1 truncation=2",
            "family=LOGPOW xi=1 override=2,2,1",
            "family=PPOW xi=1 override=2,1,1 override=2,1,2",
            "family=ZERO family=ZERO",
            "family=ZERO junk",
        ] {
            assert!(bad.parse::<AdditiveFunctionSpec>().is_err(), "{bad}");
        }
    }
}
