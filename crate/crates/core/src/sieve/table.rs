//! Exact per-integer tables of `f(n)` and `omega(n)` with sorted level buckets.

use super::engine::{run, small_primes, DisagreeFold, ValueFold};
use crate::error::{Error, Result};
use crate::function_model::AdditiveFunctionSpec;
use sha2::{Digest, Sha256};
use std::sync::OnceLock;

/// Largest `x` kept in exact mode; beyond it only streamed histograms are available.
pub const EXACT_CAP: u64 = 1 << 32;

/// Default segment length.
pub const DEFAULT_SEGMENT: u64 = 1 << 16;

/// SHA-256 of the canonical spec text.
pub fn spec_hash(spec: &AdditiveFunctionSpec) -> [u8; 32] {
    Sha256::digest(spec.canonical().as_bytes()).into()
}

/// Values of one population sorted by `(omega, f)`.
#[derive(Debug)]
pub(crate) struct Buckets {
    /// `f` values grouped by `omega`, ascending inside each group.
    pub values: Vec<f64>,
    /// `offsets[k]..offsets[k + 1]` is the group `omega = k`.
    pub offsets: Vec<usize>,
    /// All values ascending.
    pub merged: OnceLock<Vec<f64>>,
}

/// `f(n)` and `omega(n)` for `n = 1..=x`.
#[derive(Debug)]
pub struct SieveTable {
    pub(crate) spec: AdditiveFunctionSpec,
    pub(crate) x: u64,
    pub(crate) segment_size: u64,
    pub(crate) f: Vec<f64>,
    pub(crate) omega: Vec<u8>,
    pub(crate) buckets: OnceLock<Buckets>,
}

pub fn build_sieve(spec: &AdditiveFunctionSpec, x: u64, segment_size: u64) -> Result<SieveTable> {
    if x == 0 {
        return Err(Error::EmptyTable);
    }
    if x > EXACT_CAP {
        return Err(Error::RejectedInput(format!("x = {x} exceeds the exact-mode cap {EXACT_CAP}; use the streaming summary")));
    }
    if segment_size < 2 {
        return Err(Error::RejectedInput(format!("segment size must be >= 2, got {segment_size}")));
    }
    let primes = small_primes(x);
    let fold = ValueFold::new(spec, &primes, x);
    let (f, omega) = run(&fold, &primes, x, segment_size);
    Ok(SieveTable { spec: spec.clone(), x, segment_size, f, omega, buckets: OnceLock::new() })
}

impl SieveTable {
    pub fn spec(&self) -> &AdditiveFunctionSpec {
        &self.spec
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn segment_size(&self) -> u64 {
        self.segment_size
    }

    /// `f(n)` for `1 <= n <= x`.
    pub fn f(&self, n: u64) -> f64 {
        self.f[(n - 1) as usize]
    }

    pub fn omega(&self, n: u64) -> u8 {
        self.omega[(n - 1) as usize]
    }

    /// `f(1), ..., f(x)`.
    pub fn f_values(&self) -> &[f64] {
        &self.f
    }

    pub fn omega_values(&self) -> &[u8] {
        &self.omega
    }

    pub fn max_omega(&self) -> u32 {
        self.omega.iter().copied().max().unwrap_or(0) as u32
    }

    pub(crate) fn buckets(&self) -> &Buckets {
        self.buckets.get_or_init(|| {
            let kmax = self.max_omega() as usize;
            let mut counts = vec![0usize; kmax + 2];
            for &w in &self.omega {
                counts[w as usize + 1] += 1;
            }
            for k in 1..counts.len() {
                counts[k] += counts[k - 1];
            }
            let offsets = counts.clone();
            let mut cursor = counts;
            let mut values = vec![0.0; self.f.len()];
            for (&v, &w) in self.f.iter().zip(&self.omega) {
                values[cursor[w as usize]] = v;
                cursor[w as usize] += 1;
            }
            for k in 0..=kmax {
                values[offsets[k]..offsets[k + 1]].sort_unstable_by(f64::total_cmp);
            }
            Buckets { values, offsets, merged: OnceLock::new() }
        })
    }

    fn level_slice(&self, k: u32) -> &[f64] {
        let b = self.buckets();
        let k = k as usize;
        if k + 1 >= b.offsets.len() {
            return &[];
        }
        &b.values[b.offsets[k]..b.offsets[k + 1]]
    }

    /// All `f(n)` ascending.
    pub fn sorted_values(&self) -> &[f64] {
        let b = self.buckets();
        b.merged.get_or_init(|| {
            let mut all = b.values.clone();
            all.sort_unstable_by(f64::total_cmp);
            all
        })
    }

    /// `F_x(y) = #{n <= x : f(n) <= y}/x`.
    pub fn empirical_cdf(&self, y: f64) -> f64 {
        let b = self.buckets();
        let below: usize = b.offsets.windows(2).map(|w| b.values[w[0]..w[1]].partition_point(|&v| v <= y)).sum();
        below as f64 / self.x as f64
    }

    /// `#{n <= x : omega(n) = k}`.
    pub fn pi_k(&self, k: u32) -> u64 {
        self.level_slice(k).len() as u64
    }

    /// CDF of `f` on the level set `omega(n) = k`.
    pub fn levelset_cdf(&self, k: u32, y: f64) -> Result<f64> {
        let s = self.level_slice(k);
        if s.is_empty() {
            return Err(Error::UndefinedDistribution(format!("level set omega = {k} is empty at x = {}", self.x)));
        }
        Ok(s.partition_point(|&v| v <= y) as f64 / s.len() as f64)
    }

    /// Full empirical law as an owned step function.
    pub fn empirical(&self) -> EmpiricalCdf {
        EmpiricalCdf { sorted: self.sorted_values().to_vec(), restriction: None }
    }

    /// Empirical law on the level set `omega(n) = k`.
    pub fn level(&self, k: u32) -> Result<EmpiricalCdf> {
        let s = self.level_slice(k);
        if s.is_empty() {
            return Err(Error::UndefinedDistribution(format!("level set omega = {k} is empty at x = {}", self.x)));
        }
        Ok(EmpiricalCdf { sorted: s.to_vec(), restriction: Some(k) })
    }

    /// Rebuilds the table for `f_R` unless it already is one.
    pub fn with_truncation(&self, r: f64) -> Result<SieveTable> {
        let target = self.spec.untruncated().truncated(r)?;
        build_sieve(&target, self.x, self.segment_size)
    }

    /// Share of `n <= x` (overall and per level set) with `f_R(n) != f(n)`,
    /// counted as those having some `p^nu || n` where the two functions differ.
    pub fn truncation_discrepancy(&self, r: f64) -> Result<Discrepancy> {
        let base = self.spec.untruncated();
        let cut = base.truncated(r)?;
        let primes = small_primes(self.x);
        let fold = DisagreeFold::new(&base, &cut, &primes, self.x);
        let (flags, omega) = run(&fold, &primes, self.x, self.segment_size);
        let kmax = omega.iter().copied().max().unwrap_or(0) as usize;
        let mut hit = vec![0u64; kmax + 1];
        let mut pop = vec![0u64; kmax + 1];
        for (&fl, &w) in flags.iter().zip(&omega) {
            pop[w as usize] += 1;
            if fl {
                hit[w as usize] += 1;
            }
        }
        let total: u64 = hit.iter().sum();
        Ok(Discrepancy {
            overall: total as f64 / self.x as f64,
            per_level: hit.iter().zip(&pop).map(|(&h, &p)| if p == 0 { 0.0 } else { h as f64 / p as f64 }).collect(),
        })
    }
}

/// Output of `truncation_discrepancy`.
#[derive(Debug, Clone)]
pub struct Discrepancy {
    pub overall: f64,
    /// Indexed by `k = omega(n)`.
    pub per_level: Vec<f64>,
}

/// Right-continuous empirical step function.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
    restriction: Option<u32>,
}

impl EmpiricalCdf {
    /// Builds the law of a finite sample.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::UndefinedDistribution("empty sample".into()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::RejectedInput("sample contains NaN".into()));
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self { sorted: values, restriction: None })
    }

    pub fn sample_size(&self) -> usize {
        self.sorted.len()
    }

    pub fn restriction(&self) -> Option<u32> {
        self.restriction
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted
    }

    /// `#{v <= y}/n`.
    pub fn eval(&self, y: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= y) as f64 / self.sorted.len() as f64
    }

    /// Left limit `#{v < y}/n`.
    pub fn eval_left(&self, y: f64) -> f64 {
        self.sorted.partition_point(|&v| v < y) as f64 / self.sorted.len() as f64
    }

    /// Distinct jump locations with the CDF value just after each.
    pub fn jumps(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &v) in self.sorted.iter().enumerate() {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 = (i + 1) as f64 / n,
                _ => out.push((v, (i + 1) as f64 / n)),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv_p() -> AdditiveFunctionSpec {
        // strongly additive f(p) = 1/p
        AdditiveFunctionSpec::p_pow(1.0).with_strong(true).unwrap()
    }

    #[test]
    fn documented_small_table() {
        let t = build_sieve(&inv_p(), 10, 3).unwrap();
        assert!((t.f(10) - 0.7).abs() < 1e-15);
        assert_eq!(t.omega(10), 2);
        assert_eq!((t.f(1), t.omega(1)), (0.0, 0));
        assert_eq!(t.empirical_cdf(0.5), 0.8);
        assert_eq!((t.pi_k(0), t.pi_k(1), t.pi_k(2), t.pi_k(3)), (1, 7, 2, 0));
        assert_eq!(t.levelset_cdf(1, 0.4).unwrap(), 4.0 / 7.0);
        assert_eq!(t.levelset_cdf(0, -1e-300).unwrap(), 0.0);
        assert_eq!(t.levelset_cdf(0, 0.0).unwrap(), 1.0);
        assert!(t.levelset_cdf(3, 0.0).is_err());
        assert_eq!(t.empirical_cdf(-1.0), 0.0);
        let s = build_sieve(&AdditiveFunctionSpec::sigma_ratio(), 10, 4).unwrap();
        assert!((s.f(4) - (7.0f64 / 4.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(matches!(build_sieve(&inv_p(), 0, 16), Err(Error::EmptyTable)));
        assert!(build_sieve(&inv_p(), 10, 1).is_err());
    }

    #[test]
    fn segment_invariance_is_bitwise() {
        let spec = AdditiveFunctionSpec::sigma_ratio();
        let a = build_sieve(&spec, 20_000, 2).unwrap();
        let b = build_sieve(&spec, 20_000, 7919).unwrap();
        let c = build_sieve(&spec, 20_000, 1 << 20).unwrap();
        assert!(a.f.iter().zip(&b.f).all(|(u, v)| u.to_bits() == v.to_bits()));
        assert!(a.f.iter().zip(&c.f).all(|(u, v)| u.to_bits() == v.to_bits()));
        assert_eq!(a.omega, c.omega);
    }

    #[test]
    fn matches_trial_division() {
        let spec = AdditiveFunctionSpec::log_pow(2.0).with_override(3, 1, -0.25).unwrap();
        let t = build_sieve(&spec, 3000, 100).unwrap();
        for n in 1..=3000u64 {
            let fac = crate::primes::factorize(n);
            let expected: f64 = fac.iter().map(|&(p, nu)| spec.value(p, nu)).sum();
            assert!((t.f(n) - expected).abs() < 1e-12, "n = {n}");
            assert_eq!(t.omega(n) as usize, fac.len());
        }
    }

    #[test]
    fn discrepancy_for_logpow_half() {
        // only p = 2 has |f(p)| > 1, so the flagged n are those with 2^nu || n, 2^nu > 10
        let spec = AdditiveFunctionSpec::log_pow(0.5);
        let t = build_sieve(&spec, 1000, 64).unwrap();
        let d = t.truncation_discrepancy(10.0).unwrap();
        let count = (1..=1000u64).filter(|&n| (1u64 << n.trailing_zeros()) > 10).count();
        assert_eq!(d.overall, count as f64 / 1000.0);
        let z = build_sieve(&AdditiveFunctionSpec::zero(), 1000, 64).unwrap();
        assert_eq!(z.truncation_discrepancy(3.0).unwrap().overall, 0.0);
    }

    #[test]
    fn empirical_jumps() {
        let e = EmpiricalCdf::from_values(vec![0.2, 0.1, 0.2]).unwrap();
        assert_eq!(e.jumps(), vec![(0.1, 1.0 / 3.0), (0.2, 1.0)]);
        assert_eq!(e.eval_left(0.2), 1.0 / 3.0);
    }
}
