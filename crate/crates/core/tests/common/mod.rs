//! Reference implementations and invariant checks shared by the integration tests.
#![allow(dead_code)]

use ewlab::function_model::AdditiveFunctionSpec;
use ewlab::functionals::FunctionalTable;
use ewlab::harness::{kolmogorov_distance, Distribution};
use ewlab::sieve::{build_sieve, EmpiricalCdf, SieveTable};
use rand::Rng;

/// Trial division, independent of the crate's factorization.
pub fn trial_division(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut nu = 0;
        while n % d == 0 {
            n /= d;
            nu += 1;
        }
        if nu > 0 {
            out.push((d, nu));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Families evaluated from their defining formulas.
#[derive(Debug, Clone, Copy)]
pub enum Naive {
    LogPow(f64),
    PPow(f64),
    DyadicLog(f64),
    SigmaRatio,
}

impl Naive {
    pub fn spec(self) -> AdditiveFunctionSpec {
        match self {
            Naive::LogPow(xi) => AdditiveFunctionSpec::log_pow(xi),
            Naive::PPow(xi) => AdditiveFunctionSpec::p_pow(xi),
            Naive::DyadicLog(k) => AdditiveFunctionSpec::dyadic_log(k),
            Naive::SigmaRatio => AdditiveFunctionSpec::sigma_ratio(),
        }
    }

    pub fn eval(self, n: u64) -> f64 {
        if let Naive::SigmaRatio = self {
            let sigma: u64 = (1..=n).filter(|d| n % d == 0).sum();
            return (sigma as f64 / n as f64).ln();
        }
        trial_division(n)
            .into_iter()
            .map(|(p, nu)| {
                let pf = p as f64;
                match self {
                    Naive::LogPow(xi) => pf.ln().powf(-xi),
                    Naive::PPow(xi) => {
                        if nu == 1 {
                            pf.powf(-xi)
                        } else {
                            0.0
                        }
                    }
                    Naive::DyadicLog(kappa) => {
                        let mut b = 0u32;
                        while 1u64 << (b + 1) < p {
                            b += 1;
                        }
                        let hi = (1u64 << b) as f64 * (1.0 + (b as f64).ln().powf(-kappa));
                        if b >= 3 && pf <= hi {
                            1.0
                        } else {
                            0.0
                        }
                    }
                    Naive::SigmaRatio => unreachable!(),
                }
            })
            .sum()
    }
}

/// Compares a sieve table with the naive reference; reals to `1e-12`, counts exactly.
pub fn compare_with_naive(kind: Naive, x: u64, segment: u64) -> Result<(), String> {
    let t = build_sieve(&kind.spec(), x, segment).map_err(|e| e.to_string())?;
    let vals: Vec<f64> = (1..=x).map(|n| kind.eval(n)).collect();
    let omega: Vec<u32> = (1..=x).map(|n| trial_division(n).len() as u32).collect();
    for n in 1..=x {
        let i = (n - 1) as usize;
        if (t.f(n) - vals[i]).abs() > 1e-12 {
            return Err(format!("{kind:?}: f({n}) = {} against {}", t.f(n), vals[i]));
        }
        if t.omega(n) as u32 != omega[i] {
            return Err(format!("{kind:?}: omega({n}) = {} against {}", t.omega(n), omega[i]));
        }
    }
    let kmax = *omega.iter().max().unwrap();
    for k in 0..=kmax + 1 {
        let count = omega.iter().filter(|&&w| w == k).count() as u64;
        if t.pi_k(k) != count {
            return Err(format!("{kind:?}: pi_{k} = {} against {count}", t.pi_k(k)));
        }
    }
    let mut probes: Vec<f64> = vals.clone();
    probes.sort_by(f64::total_cmp);
    probes.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let mut mids: Vec<f64> = probes.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    mids.push(probes[0] - 1.0);
    mids.push(probes[probes.len() - 1] + 1.0);
    for &y in &mids {
        let expect = vals.iter().filter(|&&v| v <= y).count() as f64 / x as f64;
        if (t.empirical_cdf(y) - expect).abs() > 1e-12 {
            return Err(format!("{kind:?}: F_x({y}) = {} against {expect}", t.empirical_cdf(y)));
        }
        for k in 0..=kmax {
            let members: Vec<f64> = vals.iter().zip(&omega).filter(|(_, &w)| w == k).map(|(&v, _)| v).collect();
            let expect = members.iter().filter(|&&v| v <= y).count() as f64 / members.len() as f64;
            let got = t.levelset_cdf(k, y).map_err(|e| e.to_string())?;
            if (got - expect).abs() > 1e-12 {
                return Err(format!("{kind:?}: level {k} CDF at {y} = {got} against {expect}"));
            }
        }
    }
    Ok(())
}

/// `h_f(m m') = h_f(m) h_f(m')` over all coprime pairs with `m, m' <= limit`.
pub fn h_multiplicative(spec: &AdditiveFunctionSpec, limit: u64) -> Result<(), String> {
    let cache: Vec<f64> = (1..=limit).map(|m| spec.h_factor(m)).collect();
    for m in 1..=limit {
        for mp in m..=limit {
            if gcd(m, mp) != 1 {
                continue;
            }
            let lhs = spec.h_factor(m * mp);
            let rhs = cache[(m - 1) as usize] * cache[(mp - 1) as usize];
            if (lhs - rhs).abs() > 1e-12 * rhs.abs().max(1.0) {
                return Err(format!("{spec}: h({m}*{mp}) = {lhs} against {rhs}"));
            }
        }
    }
    Ok(())
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Truncating at `r` then at `r2 >= r` equals truncating at `r`; truncated values are `0` or the original.
pub fn truncation_laws(spec: &AdditiveFunctionSpec, r: f64, r2: f64, prime_limit: u64) -> Result<(), String> {
    let once = spec.truncated(r).map_err(|e| e.to_string())?;
    let twice = once.truncated(r2).map_err(|e| e.to_string())?;
    for p in ewlab::primes::primes_up_to(prime_limit).iter().copied() {
        for nu in 1..=4 {
            let (a, b, orig) = (once.value(p, nu), twice.value(p, nu), spec.value(p, nu));
            if a.to_bits() != b.to_bits() {
                return Err(format!("{spec}: idempotence fails at {p}^{nu}: {a} against {b}"));
            }
            if a != 0.0 && a.to_bits() != orig.to_bits() {
                return Err(format!("{spec}: truncated value {a} at {p}^{nu} is neither 0 nor {orig}"));
            }
        }
    }
    Ok(())
}

/// `|S_p(t) - S_p(t/100)| <= t`.
pub fn companions_tail(spec: &AdditiveFunctionSpec, p: u64, tol: f64) -> Result<(), String> {
    let (a, _) = spec.companions(p, tol);
    let (b, _) = spec.companions(p, tol / 100.0);
    if (a - b).abs() > tol {
        return Err(format!("{spec}: S_{p} moves by {} at tolerance {tol}", (a - b).abs()));
    }
    Ok(())
}

/// Sum of level counts, monotone right-continuous `F_x`, and the untwisted mean value.
pub fn table_laws(t: &SieveTable) -> Result<(), String> {
    let x = t.x();
    let total: u64 = (0..=t.max_omega()).map(|k| t.pi_k(k)).sum();
    if total != x {
        return Err(format!("sum of pi_k is {total}, expected {x}"));
    }
    let s = t.sorted_values();
    let mut distinct: Vec<f64> = s.to_vec();
    distinct.dedup();
    let mut prev = 0.0;
    for (i, &v) in distinct.iter().enumerate().step_by((distinct.len() / 500).max(1)) {
        let at = t.empirical_cdf(v);
        // between neighbouring floats there is nothing to the right to check
        let next = distinct.get(i + 1).copied().unwrap_or(v + 2.0);
        let right = 0.5 * (v + next);
        if at < prev || (right > v && right < next && t.empirical_cdf(right) != at) {
            return Err(format!("F_x not monotone or not right-continuous at {v}"));
        }
        prev = at;
    }
    let m = t
        .direct_mean_value(ewlab::sieve::GKind::LevelsetTwist { z: num_complex::Complex64::new(1.0, 0.0), tau: 0.0, r: 100.0 })
        .map_err(|e| e.to_string())?
        .m;
    if (m.re - x as f64).abs() > 1e-9 * x as f64 || m.im.abs() > 1e-9 * x as f64 {
        return Err(format!("untwisted level-set sum {m} differs from {x}"));
    }
    Ok(())
}

/// Tables built with two segment sizes agree bit for bit.
pub fn segment_invariance(spec: &AdditiveFunctionSpec, x: u64, s1: u64, s2: u64) -> Result<(), String> {
    let a = build_sieve(spec, x, s1).map_err(|e| e.to_string())?;
    let b = build_sieve(spec, x, s2).map_err(|e| e.to_string())?;
    let same_f = a.f_values().iter().zip(b.f_values()).all(|(u, v)| u.to_bits() == v.to_bits());
    if !same_f || a.omega_values() != b.omega_values() {
        return Err(format!("{spec}: segments {s1} and {s2} give different tables at x = {x}"));
    }
    Ok(())
}

/// Both eta tails summed directly over primes up to `p_lim` never exceed `eta(y)`.
pub fn eta_majorant(table: &FunctionalTable, y: f64, p_lim: u64) -> Result<(), String> {
    let spec = table.spec();
    let eta = table.eta(y).map_err(|e| e.to_string())?;
    let primes = ewlab::primes::primes_up_to(p_lim);
    let mut second = 0.0;
    for &p in primes.iter() {
        let pf = p as f64;
        let mut q = pf;
        let mut nu = 1;
        while q < 1e30 {
            if q > y {
                let v = spec.value(p, nu);
                second += (v * v).min(1.0) / q;
            }
            q *= pf;
            nu += 1;
        }
    }
    if second > eta * (1.0 + 1e-12) {
        return Err(format!("{spec}: second tail {second} exceeds eta({y}) = {eta}"));
    }
    // the first tail is a supremum over y' >= y of partial sums of f(p)/p
    let mut suffix = 0.0;
    let mut worst: f64 = 0.0;
    for &p in primes.iter().rev() {
        if (p as f64) <= y {
            break;
        }
        let v = spec.value(p, 1);
        if v.abs() <= 1.0 {
            suffix += v / p as f64;
        }
        worst = worst.max(suffix.abs());
    }
    if first_tail_terms_nonnegative(spec) && worst > eta * (1.0 + 1e-12) {
        return Err(format!("{spec}: first tail {worst} exceeds eta({y}) = {eta}"));
    }
    Ok(())
}

/// The first tail has nonnegative terms beyond every override, so partial sums are lower bounds.
fn first_tail_terms_nonnegative(spec: &AdditiveFunctionSpec) -> bool {
    spec.overrides().values().all(|&v| v >= 0.0)
}

/// `B_f(v)^2 - 2` against the direct sum over prime powers.
pub fn b_squared_direct(table: &FunctionalTable, v: f64) -> Result<(), String> {
    let spec = table.spec();
    let b = table.b_f(v).map_err(|e| e.to_string())?;
    let mut s = ewlab::numeric::CompensatedSum::new();
    for &p in ewlab::primes::primes_up_to(v as u64).iter() {
        let pf = p as f64;
        let mut q = pf;
        let mut nu = 1;
        while q <= v {
            let f = spec.value(p, nu);
            s.add(f * f / q);
            q *= pf;
            nu += 1;
        }
    }
    let direct = s.value();
    if (b * b - 2.0 - direct).abs() > 1e-12 * direct.max(1.0) {
        return Err(format!("{spec}: B_f({v})^2 - 2 = {} against {direct}", b * b - 2.0));
    }
    Ok(())
}

/// Sup distance by brute force: every candidate point, both CDFs counted from scratch.
pub fn brute_distance<L: Distribution>(sample: &[f64], law: &L) -> f64 {
    let n = sample.len() as f64;
    let mut pts: Vec<f64> = sample.to_vec();
    pts.extend(law.jump_points());
    let mut best: f64 = 0.0;
    for &y in &pts {
        let le = sample.iter().filter(|&&v| v <= y).count() as f64 / n;
        let lt = sample.iter().filter(|&&v| v < y).count() as f64 / n;
        best = best.max((le - law.cdf(y)).abs()).max((lt - law.cdf_left(y)).abs());
    }
    best.min(1.0)
}

/// Draws a sample whose values repeat, as sieved values do.
pub fn random_sample<R: Rng>(rng: &mut R, n: usize, levels: u32) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0..levels) as f64 * 0.25 + if rng.gen_bool(0.3) { rng.gen::<f64>() } else { 0.0 }).collect()
}

/// Fast distance against the brute-force sup.
pub fn distance_agrees<L: Distribution>(sample: Vec<f64>, law: &L) -> Result<(), String> {
    let brute = brute_distance(&sample, law);
    let emp = EmpiricalCdf::from_values(sample).map_err(|e| e.to_string())?;
    let fast = kolmogorov_distance(&emp, law, 0.0).map_err(|e| e.to_string())?;
    if (fast - brute).abs() > 1e-12 {
        return Err(format!("distance {fast} against brute force {brute}"));
    }
    Ok(())
}

/// Largest `|(1/x) sum (e^{i tau f_R(n)} - 1)| / (|tau| B sqrt(L) + tau^2 B^2 L)` over `taus`, `L = log log R`.
pub fn turan_kubilius_constant(t: &SieveTable, table: &FunctionalTable, r: f64, taus: &[f64]) -> Result<f64, String> {
    let x = t.x() as f64;
    let b = table.b_f(r).map_err(|e| e.to_string())?;
    let l = r.ln().ln();
    let mut worst: f64 = 0.0;
    for &tau in taus {
        let m = t.direct_mean_value(ewlab::sieve::GKind::CfTwist { tau, r }).map_err(|e| e.to_string())?.m;
        let lhs = (m / x - 1.0).norm();
        let scale = tau.abs() * b * l.sqrt() + tau * tau * b * b * l;
        worst = worst.max(lhs / scale);
    }
    Ok(worst)
}
