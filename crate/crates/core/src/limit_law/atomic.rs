//! Atomic limit law `F(y) = prod_p (1 - w_p) sum_{f(m) <= y} h_f(m)/m`.
//!
//! The heaviest `M_cut` integers built from primes `p <= P_cut` are enumerated exactly. Primes above
//! `P_cut` enter through a Poisson number of jumps of the common tail value `c`
//! (the only nonzero value any built-in atomic family takes there).

use crate::error::{Error, Result};
use crate::function_model::{classify, AdditiveFunctionSpec, Family, LawKind, TailModel, DEFAULT_TAIL_TOL};
use crate::numeric::{fmt17, CompensatedSum};
use crate::primes::primes_up_to;
use std::collections::BinaryHeap;
use std::io::Write;

/// Enumerated atoms plus the Poisson tail component.
#[derive(Debug, Clone)]
pub struct AtomicLaw {
    /// Distinct atom locations, ascending, with their weights.
    atoms: Vec<(f64, f64)>,
    cumulative: Vec<f64>,
    poisson: Vec<f64>,
    tail_jump: f64,
    p_cut: u64,
    m_cut: u64,
    /// `prod_{p <= P_cut} (1 - w_p)`.
    pub local_mass: f64,
    /// Total weight of the enumerated atoms.
    pub mass: f64,
    /// `1 - mass`, the weight of the integers not enumerated.
    pub deficit: f64,
    /// Rankin-type upper bound on the unenumerated weight.
    pub deficit_bound: f64,
    /// Largest weight `h_f(m)/m` left out.
    pub weight_threshold: f64,
    /// Error of replacing the primes above `P_cut` by a Poisson law.
    pub poisson_error: f64,
    /// `sum_{p > P_cut} w_p` from the tail model.
    pub tail_rate: f64,
    pub budget_met: bool,
}

/// Admissible prime powers of one prime as `(h(p^nu)/p^nu, f(p^nu))`, heaviest first.
fn local_options(spec: &AdditiveFunctionSpec, p: u64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let pf = p as f64;
    let mut nu = 1u32;
    let mut q = pf;
    while q < 1e300 && nu <= 1100 {
        let v = spec.value(p, nu);
        if v != 0.0 {
            out.push((spec.h_local(p, nu) / q, v));
        }
        nu += 1;
        q *= pf;
    }
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Node {
    weight: f64,
    parent_weight: f64,
    parent_value: f64,
    prime: usize,
    option: usize,
}

impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.weight.total_cmp(&other.weight)
    }
}

/// Best-first enumeration of `m` by weight `h_f(m)/m`, at most `count` atoms including `m = 1`.
///
/// Each set of chosen prime powers has one parent: drop the last option's increment, undo a
/// shift to the next prime, or remove an appended factor. With primes and options sorted by
/// weight every child is no heavier than its parent, so the heap top bounds what is left.
fn enumerate(locals: &[Vec<(f64, f64)>], count: u64, out: &mut Vec<(f64, f64)>) -> f64 {
    let mut heap = BinaryHeap::new();
    out.push((0.0, 1.0));
    let node = |pw: f64, pv: f64, i: usize, o: usize| Node { weight: pw * locals[i][o].0, parent_weight: pw, parent_value: pv, prime: i, option: o };
    if !locals.is_empty() {
        heap.push(node(1.0, 0.0, 0, 0));
    }
    while (out.len() as u64) < count {
        let Some(n) = heap.pop() else { return 0.0 };
        let value = n.parent_value + locals[n.prime][n.option].1;
        out.push((value, n.weight));
        let next = n.prime + 1;
        if next < locals.len() {
            heap.push(node(n.weight, value, next, 0));
            if n.option == 0 {
                heap.push(node(n.parent_weight, n.parent_value, next, 0));
            }
        }
        if n.option + 1 < locals[n.prime].len() {
            heap.push(node(n.parent_weight, n.parent_value, n.prime, n.option + 1));
        }
    }
    heap.peek().map_or(0.0, |n| n.weight)
}

fn poisson_weights(rate: f64) -> Vec<f64> {
    if rate == 0.0 {
        return vec![1.0];
    }
    let mut w = vec![(-rate).exp()];
    let mut j = 1;
    while w.iter().sum::<f64>() < 1.0 - 1e-17 && j < 400 {
        let next = w[j - 1] * rate / j as f64;
        w.push(next);
        j += 1;
    }
    w
}

/// Rankin bound `sum_{a_m <= t} a_m <= t^s prod_p (1 + sum_nu a_{p^nu}^{1-s})` times the local mass.
fn rankin_bound(locals: &[Vec<(f64, f64)>], threshold: f64, local_mass: f64) -> f64 {
    if threshold == 0.0 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for j in 1..=60 {
        let s = j as f64 / 80.0;
        let log_prod: f64 = locals.iter().map(|opts| opts.iter().map(|&(a, _)| a.powf(1.0 - s)).sum::<f64>().ln_1p()).sum();
        best = best.min((log_prod + s * threshold.ln()).exp());
    }
    (best * local_mass).min(1.0)
}

/// Builds the atomic law; refuses continuous laws.
pub fn atomic_law(spec: &AdditiveFunctionSpec, mass_budget: f64, p_cut: u64, m_cut: u64) -> Result<AtomicLaw> {
    let c = classify(spec, 100)?;
    match c.law_kind() {
        LawKind::Atomic => {}
        LawKind::Continuous => {
            return Err(Error::RejectedInput(format!("{} has a continuous limit law (support series diverges)", spec.family())))
        }
        LawKind::NoLimit => return Err(Error::RejectedInput(format!("{} has no limit law", spec.family()))),
        LawKind::Unknown => return Err(Error::RejectedInput("law type undetermined".into())),
    }
    if !(mass_budget > 0.0 && mass_budget <= 1.0) {
        return Err(Error::RejectedInput(format!("mass budget must lie in (0, 1], got {mass_budget}")));
    }
    if p_cut < 3 || m_cut < 1 {
        return Err(Error::RejectedInput("P_cut must be >= 3 and the atom budget >= 1".into()));
    }
    let primes = primes_up_to(p_cut);
    let mut log_mass = CompensatedSum::new();
    let mut locals = Vec::new();
    for &p in primes.iter() {
        let (_, w) = spec.companions(p, DEFAULT_TAIL_TOL);
        if w > 0.0 {
            log_mass.add((-w).ln_1p());
            let opts = local_options(spec, p);
            if !opts.is_empty() {
                locals.push(opts);
            }
        }
    }
    let local_mass = log_mass.value().exp();
    locals.sort_by(|a, b| b[0].0.total_cmp(&a[0].0));
    let mut raw = Vec::new();
    let weight_threshold = enumerate(&locals, m_cut, &mut raw);
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    for (v, w) in raw {
        match atoms.last_mut() {
            Some(last) if last.0 == v => last.1 += w * local_mass,
            _ => atoms.push((v, w * local_mass)),
        }
    }
    let mut acc = CompensatedSum::new();
    let cumulative: Vec<f64> = atoms
        .iter()
        .map(|&(_, w)| {
            acc.add(w);
            acc.value()
        })
        .collect();
    let mass = acc.value();
    let tail = TailModel::new(spec, p_cut as f64)?;
    let tail_rate = tail.support_mass();
    let tail_jump = match spec.family() {
        Family::DyadicLog { .. } | Family::DyadicPow { .. } => 1.0,
        _ => 0.0,
    };
    let poisson = poisson_weights(if tail_jump == 0.0 { 0.0 } else { tail_rate });
    let poisson_error = if tail_rate > 0.0 { 1.0 / p_cut as f64 } else { 0.0 };
    let deficit = (1.0 - mass).max(0.0);
    Ok(AtomicLaw {
        atoms,
        cumulative,
        poisson,
        tail_jump,
        p_cut,
        m_cut,
        local_mass,
        mass,
        deficit,
        deficit_bound: rankin_bound(&locals, weight_threshold, local_mass),
        weight_threshold,
        poisson_error,
        tail_rate,
        budget_met: mass >= mass_budget,
    })
}

impl AtomicLaw {
    fn enumerated_cdf(&self, y: f64, strict: bool) -> f64 {
        let i = if strict { self.atoms.partition_point(|a| a.0 < y) } else { self.atoms.partition_point(|a| a.0 <= y) };
        if i == 0 {
            0.0
        } else {
            self.cumulative[i - 1]
        }
    }

    /// `F(y)`.
    pub fn cdf(&self, y: f64) -> f64 {
        self.poisson.iter().enumerate().map(|(j, &pj)| pj * self.enumerated_cdf(y - j as f64 * self.tail_jump, false)).sum()
    }

    /// `F(y-)`.
    pub fn cdf_left(&self, y: f64) -> f64 {
        self.poisson.iter().enumerate().map(|(j, &pj)| pj * self.enumerated_cdf(y - j as f64 * self.tail_jump, true)).sum()
    }

    /// Every location carrying mass, ascending.
    pub fn jump_points(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = Vec::new();
        for j in 0..self.poisson.len() {
            if self.poisson[j] < 1e-18 && j > 0 {
                break;
            }
            pts.extend(self.atoms.iter().map(|a| a.0 + j as f64 * self.tail_jump));
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Enumerated atoms `(f(m), weight)` before the tail convolution.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn cutoffs(&self) -> (u64, u64) {
        (self.p_cut, self.m_cut)
    }

    /// Sup-norm error bound of `cdf` against the true law.
    pub fn error_bound(&self) -> f64 {
        self.deficit + self.poisson_error
    }

    /// Writes `fm,weight` for the law after the tail convolution.
    pub fn write_atoms_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "fm,weight")?;
        let mut prev = 0.0;
        for y in self.jump_points() {
            let f = self.cdf(y);
            writeln!(w, "{},{}", fmt17(y), fmt17(f - prev))?;
            prev = f;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_a_unit_atom() {
        let law = atomic_law(&AdditiveFunctionSpec::zero(), 0.99, 1000, 1000).unwrap();
        assert_eq!(law.atoms(), &[(0.0, 1.0)]);
        assert_eq!(law.cdf(0.0), 1.0);
        assert_eq!(law.cdf_left(0.0), 0.0);
        assert!(law.budget_met);
    }

    #[test]
    fn continuous_laws_are_refused() {
        assert!(atomic_law(&AdditiveFunctionSpec::log_pow(2.0), 0.9, 1000, 1000).is_err());
        assert!(atomic_law(&AdditiveFunctionSpec::dyadic_log(0.5), 0.9, 1000, 1000).is_err());
    }

    #[test]
    fn mass_at_zero_is_the_local_product() {
        let spec = AdditiveFunctionSpec::dyadic_pow(1.0);
        let law = atomic_law(&spec, 0.9, 10_000, 10_000).unwrap();
        assert!(law.cdf(-1e-9) == 0.0);
        // only m = 1 has f(m) = 0 among the enumerated atoms
        let expected: f64 = primes_up_to(10_000).iter().filter(|&&p| spec.value(p, 1) != 0.0).map(|&p| 1.0 - 1.0 / p as f64).product();
        assert!((law.atoms()[0].1 - expected).abs() < 1e-14);
        assert!((law.cdf(0.0) - expected * (-law.tail_rate).exp()).abs() < 1e-14);
    }

    #[test]
    fn deficit_is_below_rankin_bound_and_shrinks() {
        let spec = AdditiveFunctionSpec::dyadic_pow(1.0);
        let a = atomic_law(&spec, 0.9, 1000, 1000).unwrap();
        let b = atomic_law(&spec, 0.9, 20_000, 20_000).unwrap();
        assert!(a.deficit <= a.deficit_bound && b.deficit <= b.deficit_bound);
        assert!(b.mass > a.mass);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let spec = AdditiveFunctionSpec::dyadic_pow(0.5).with_strong(false).unwrap().with_override(3, 2, 0.0).unwrap();
        let law = atomic_law(&spec, 0.5, 200, 300).unwrap();
        let thr = law.weight_threshold;
        assert!(thr > 0.0);
        // a_m >= thr forces m <= 1/thr since h_f <= 1
        let mut heavy = Vec::new();
        let mut boundary = 0.0;
        for m in 1..=(1.0 / thr) as u64 + 1 {
            let fac = crate::primes::factorize(m);
            if fac.iter().all(|&(p, nu)| p <= 200 && spec.value(p, nu) != 0.0) {
                let a = spec.h_factor(m) / m as f64 * law.local_mass;
                if a > thr * law.local_mass {
                    heavy.push((spec.eval(m), a));
                } else if a == thr * law.local_mass {
                    boundary += a;
                }
            }
        }
        let total: f64 = heavy.iter().map(|b| b.1).sum();
        assert!(total <= law.mass + 1e-13 && law.mass <= total + boundary + 1e-13);
        if boundary == 0.0 {
            for y in [0.0, 1.0, 2.0, 3.0] {
                let s: f64 = heavy.iter().filter(|b| b.0 <= y).map(|b| b.1).sum();
                let e: f64 = law.atoms().iter().filter(|a| a.0 <= y).map(|a| a.1).sum();
                assert!((s - e).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn full_enumeration_has_unit_mass() {
        // admissible m are 1, 5, 7, 35
        let spec = AdditiveFunctionSpec::zero().with_strong(false).unwrap().with_override(5, 1, 1.0).unwrap().with_override(7, 1, 2.0).unwrap();
        let law = atomic_law(&spec, 0.5, 50, 100).unwrap();
        assert_eq!(law.weight_threshold, 0.0);
        assert!((law.mass - 1.0).abs() < 1e-14);
        assert_eq!(law.atoms().len(), 4);
    }
}
