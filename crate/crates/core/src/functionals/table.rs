//! Prime-sum functionals of one spec: `alpha_f`, `beta_f`, `eta_f` and `B_f`.

use crate::error::{Error, Result};
use crate::function_model::{AdditiveFunctionSpec, Family, TailModel};
use crate::numeric::CompensatedSum;
use crate::primes::{primes_up_to, PrimeList};

/// Inflation applied to model tails inside the `eta` majorant.
const TAIL_MARGIN: f64 = 0.05;

/// Cumulative sums over the primes up to `P_max`, plus tail models beyond.
#[derive(Debug, Clone)]
pub struct FunctionalTable {
    spec: AdditiveFunctionSpec,
    p_max: u64,
    primes: PrimeList,
    /// `sum_{i < j} u(p_i)/p_i` and `sum_{i < j} u(p_i) log p_i / p_i`.
    u_prefix: Vec<f64>,
    ulog_prefix: Vec<f64>,
    /// `sum_{i >= j, |f(p_i)| <= 1} f(p_i)/p_i`.
    mean_suffix: Vec<f64>,
    /// `max_{i >= j}` of the first `eta` tail with the model tail attached.
    mean_sup: Vec<f64>,
    /// `sum_{i >= j} min(1, f(p_i)^2)/p_i`.
    sq1_suffix: Vec<f64>,
    /// `sum_{i >= j} sum_{nu >= 2} min(1, f(p_i^nu)^2)/p_i^nu`.
    sqh_suffix: Vec<f64>,
    /// `(p^nu, f(p^nu)^2/p^nu)` sorted by `p^nu <= P_max`, and its prefix sums.
    powers: Vec<f64>,
    powers_prefix: Vec<f64>,
    tail: std::result::Result<TailTerms, String>,
}

#[derive(Debug, Clone, Copy)]
struct TailTerms {
    support: f64,
    mean: f64,
    mean_sup: f64,
    square: f64,
    square_full: f64,
}

fn min_sq(v: f64) -> f64 {
    (v * v).min(1.0)
}

fn mean_term(v: f64) -> f64 {
    if v.abs() <= 1.0 {
        v
    } else {
        0.0
    }
}

/// `sup_{y' >= y}` of the model's first tail. Family values beyond every override are
/// nonnegative, so the model tail shrinks with `y` and the supremum sits at `y`.
fn model_mean_sup(spec: &AdditiveFunctionSpec, y: f64) -> Result<f64> {
    let m: f64 = TailModel::new(spec, y)?.sum(mean_term);
    Ok(m.abs() * (1.0 + TAIL_MARGIN))
}

fn tail_terms(spec: &AdditiveFunctionSpec, p: f64) -> Result<TailTerms> {
    let t = TailModel::new(spec, p)?;
    Ok(TailTerms {
        support: t.support_mass(),
        mean: t.sum(mean_term),
        mean_sup: model_mean_sup(spec, p)?,
        square: t.sum(min_sq),
        square_full: t.sum(|v: f64| v * v),
    })
}

/// Upper bound for `sum_{p > P} sum_{nu >= 2} 1/p^nu`, zero when `f` vanishes there.
fn higher_power_tail(spec: &AdditiveFunctionSpec, p: f64) -> f64 {
    if spec.family() == Family::Zero {
        0.0
    } else {
        2.0 / (p * p.ln())
    }
}

impl FunctionalTable {
    pub fn new(spec: &AdditiveFunctionSpec, p_max: u64) -> Result<Self> {
        if p_max < 100 {
            return Err(Error::RejectedInput(format!("P_max must be >= 100, got {p_max}")));
        }
        let primes = primes_up_to(p_max);
        let n = primes.len();
        let tail = tail_terms(spec, p_max as f64).map_err(|e| e.to_string());
        let (tail_mean, tail_mean_sup) = match &tail {
            Ok(t) => (t.mean, t.mean_sup),
            Err(_) => (0.0, 0.0),
        };
        let mut u_prefix = Vec::with_capacity(n + 1);
        let mut ulog_prefix = Vec::with_capacity(n + 1);
        let (mut su, mut sl) = (CompensatedSum::new(), CompensatedSum::new());
        u_prefix.push(0.0);
        ulog_prefix.push(0.0);
        let mut mean = vec![0.0; n];
        let mut sq1 = vec![0.0; n];
        let mut sqh = vec![0.0; n];
        let mut powers: Vec<(f64, f64)> = Vec::with_capacity(n + n / 8);
        for (i, &p) in primes.iter().enumerate() {
            let pf = p as f64;
            let v = spec.value(p, 1);
            if v != 0.0 {
                su.add(1.0 / pf);
                sl.add(pf.ln() / pf);
            }
            u_prefix.push(su.value());
            ulog_prefix.push(sl.value());
            mean[i] = mean_term(v) / pf;
            sq1[i] = min_sq(v) / pf;
            powers.push((pf, v * v / pf));
            let mut q = pf * pf;
            let mut nu = 2;
            let mut h = CompensatedSum::new();
            while q < 1e300 {
                let w = spec.value(p, nu);
                h.add(min_sq(w) / q);
                if q <= p_max as f64 {
                    powers.push((q, w * w / q));
                }
                if 1.0 / q < 1e-22 && spec.overrides().range((p, nu)..=(p, u32::MAX)).next().is_none() {
                    break;
                }
                q *= pf;
                nu += 1;
            }
            sqh[i] = h.value();
        }
        let suffix = |terms: &[f64]| {
            let mut out = vec![0.0; terms.len() + 1];
            let mut s = CompensatedSum::new();
            for i in (0..terms.len()).rev() {
                s.add(terms[i]);
                out[i] = s.value();
            }
            out
        };
        let mean_suffix = suffix(&mean);
        let mut mean_sup = vec![0.0; n + 1];
        let lo = |s: f64| (s + (1.0 - TAIL_MARGIN) * tail_mean).abs().max((s + (1.0 + TAIL_MARGIN) * tail_mean).abs());
        mean_sup[n] = lo(0.0).max(tail_mean_sup);
        for i in (0..n).rev() {
            mean_sup[i] = mean_sup[i + 1].max(lo(mean_suffix[i]));
        }
        powers.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut acc = CompensatedSum::new();
        let powers_prefix: Vec<f64> = std::iter::once(0.0)
            .chain(powers.iter().map(|&(_, w)| {
                acc.add(w);
                acc.value()
            }))
            .collect();
        Ok(Self {
            spec: spec.clone(),
            p_max,
            primes,
            u_prefix,
            ulog_prefix,
            mean_suffix,
            mean_sup,
            sq1_suffix: suffix(&sq1),
            sqh_suffix: suffix(&sqh),
            powers: powers.into_iter().map(|p| p.0).collect(),
            powers_prefix,
            tail: tail.map_err(|e| e),
        })
    }

    pub fn spec(&self) -> &AdditiveFunctionSpec {
        &self.spec
    }

    pub fn p_max(&self) -> u64 {
        self.p_max
    }

    fn tail(&self) -> Result<TailTerms> {
        self.tail.clone().map_err(Error::TailUnknown)
    }

    /// Number of primes `<= y` within the table.
    fn count(&self, y: f64) -> usize {
        self.primes.partition_point(|&p| (p as f64) <= y)
    }

    /// `alpha_f(y) = sum_{p > y} u_f(p)/p`; infinite when the support series diverges.
    pub fn alpha(&self, y: f64) -> Result<f64> {
        if !(y >= 1.0) {
            return Err(Error::RejectedInput(format!("alpha needs y >= 1, got {y}")));
        }
        if y >= self.p_max as f64 {
            return Ok(TailModel::new(&self.spec, y.max(3.0))?.support_mass());
        }
        let n = self.primes.len();
        let j = self.count(y);
        Ok(self.u_prefix[n] - self.u_prefix[j] + self.tail()?.support)
    }

    /// `beta_f(y) = (1/log y) int_1^y alpha_f(t) dt/t`, evaluated exactly as
    /// `alpha_f(y) + (1/log y) sum_{p <= y} u_f(p) log p / p`.
    pub fn beta(&self, y: f64) -> Result<f64> {
        if !(y >= 2.0) {
            return Err(Error::RejectedInput(format!("beta needs y >= 2, got {y}")));
        }
        if y > self.p_max as f64 {
            return Err(Error::RejectedInput(format!("beta at y = {y} needs primes beyond P_max = {}", self.p_max)));
        }
        let a = self.alpha(y)?;
        Ok(a + self.ulog_prefix[self.count(y)] / y.ln())
    }

    /// The two tails of the `eta` condition at `y`, without monotone rounding.
    pub fn eta_tails(&self, y: f64) -> Result<(f64, f64)> {
        if !(y >= 1.0) {
            return Err(Error::RejectedInput(format!("eta needs y >= 1, got {y}")));
        }
        let pm = self.p_max as f64;
        let n = self.primes.len();
        let root = y.sqrt();
        if root > pm {
            return Err(Error::RejectedInput(format!("eta at y = {y} needs primes up to sqrt(y) beyond P_max = {pm}")));
        }
        let jr = self.count(root);
        // prime powers p^nu > y with nu >= 2 and p <= sqrt(y)
        let mut small = CompensatedSum::new();
        for &p in &self.primes[..jr] {
            let pf = p as f64;
            let mut q = pf * pf;
            let mut nu = 2;
            while q <= y {
                q *= pf;
                nu += 1;
            }
            while q < 1e300 {
                small.add(min_sq(self.spec.value(p, nu)) / q);
                if 1.0 / q < 1e-22 {
                    break;
                }
                q *= pf;
                nu += 1;
            }
        }
        if y < pm {
            let t = self.tail()?;
            let j = self.count(y);
            let first = (self.mean_suffix[j] + t.mean).abs();
            let second = self.sq1_suffix[j] + (1.0 + TAIL_MARGIN) * t.square + self.sqh_suffix[jr] + small.value() + higher_power_tail(&self.spec, pm);
            Ok((first, second))
        } else {
            let t = tail_terms(&self.spec, y)?;
            let second = (1.0 + TAIL_MARGIN) * t.square + self.sqh_suffix[jr] - self.sqh_suffix[n] + small.value() + higher_power_tail(&self.spec, pm);
            Ok((t.mean.abs(), second))
        }
    }

    /// Nonincreasing majorant `eta_f(y)` of both tails.
    pub fn eta(&self, y: f64) -> Result<f64> {
        let (_, second) = self.eta_tails(y)?;
        let pm = self.p_max as f64;
        let first = if y < pm { self.mean_sup[self.count(y)] } else { model_mean_sup(&self.spec, y)? };
        Ok(first.max(second))
    }

    /// `B_f(v) = sqrt(2 + sum_{p^nu <= v} f(p^nu)^2 / p^nu)`.
    pub fn b_f(&self, v: f64) -> Result<f64> {
        if !(v >= 1.0) {
            return Err(Error::RejectedInput(format!("B_f needs v >= 1, got {v}")));
        }
        let pm = self.p_max as f64;
        let j = self.powers.partition_point(|&q| q <= v.min(pm));
        let mut s = self.powers_prefix[j];
        if v > pm {
            // primes in (P_max, v] from the difference of two model tails
            let far = TailModel::new(&self.spec, v)?.sum(|w: f64| w * w);
            s += self.tail()?.square_full - far;
        }
        Ok((2.0 + s).sqrt())
    }
}
