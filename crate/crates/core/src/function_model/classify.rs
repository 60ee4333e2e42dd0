//! Evidence for the convergence criteria of the limit law.

use super::family::Family;
use super::spec::AdditiveFunctionSpec;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::primes::primes_up_to;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Undetermined => "undetermined (partial sums reported)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawKind {
    Atomic,
    Continuous,
    NoLimit,
    Unknown,
}

/// Partial sums over `p <= prime_budget` and the analytic verdicts.
#[derive(Debug, Clone, Copy)]
pub struct Classification {
    pub prime_budget: u64,
    /// `sum min(1, f(p)^2)/p`.
    pub square_sum: f64,
    /// `sum_{|f(p)| <= 1} f(p)/p`.
    pub mean_sum: f64,
    /// `sum_{f(p) != 0} 1/p`.
    pub support_sum: f64,
    /// Both series of the existence criterion converge.
    pub convergent_11: Verdict,
    /// The support series diverges (continuous law).
    pub divergent_12: Verdict,
}

impl Classification {
    pub fn law_kind(&self) -> LawKind {
        match (self.convergent_11, self.divergent_12) {
            (Verdict::Fails, _) => LawKind::NoLimit,
            (Verdict::Holds, Verdict::Holds) => LawKind::Continuous,
            (Verdict::Holds, Verdict::Fails) => LawKind::Atomic,
            _ => LawKind::Unknown,
        }
    }
}

/// Analytic verdicts per family; finitely many overrides and the truncation never change them.
fn analytic(family: Family) -> (Verdict, Verdict) {
    use Verdict::*;
    match family {
        Family::LogPow { .. } | Family::PPow { .. } | Family::EulerRatio | Family::SigmaRatio => (Holds, Holds),
        Family::DyadicLog { kappa } => {
            if kappa > 1.0 {
                (Holds, Fails)
            } else {
                (Fails, Holds)
            }
        }
        Family::DyadicPow { .. } | Family::Zero => (Holds, Fails),
    }
}

pub fn classify(spec: &AdditiveFunctionSpec, prime_budget: u64) -> Result<Classification> {
    if prime_budget < 100 {
        return Err(Error::RejectedInput(format!("prime budget must be >= 100, got {prime_budget}")));
    }
    let mut sq = CompensatedSum::new();
    let mut mean = CompensatedSum::new();
    let mut supp = CompensatedSum::new();
    for &p in primes_up_to(prime_budget).iter() {
        let v = spec.value(p, 1);
        if v == 0.0 {
            continue;
        }
        let inv = 1.0 / p as f64;
        sq.add((v * v).min(1.0) * inv);
        if v.abs() <= 1.0 {
            mean.add(v * inv);
        }
        supp.add(inv);
    }
    let (c11, d12) = analytic(spec.family());
    Ok(Classification {
        prime_budget,
        square_sum: sq.value(),
        mean_sum: mean.value(),
        support_sum: supp.value(),
        convergent_11: c11,
        divergent_12: d12,
    })
}
