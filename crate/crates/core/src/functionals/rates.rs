//! Rate of the atomic case, parameter selection and bounds for the continuous and level-set cases.

use super::constants::ConstantsLedger;
use super::table::FunctionalTable;
use crate::error::{Error, Result};
use crate::function_model::{classify, Family, LawKind};
use crate::limit_law::{Concentration, QSource};
use crate::numeric::{fmt17, log2i};
use std::io::Write;

/// The three summands of the atomic-case rate.
#[derive(Debug, Clone)]
pub struct Rate11 {
    pub x: f64,
    /// `alpha_f(x^{1/log_2 x})`.
    pub alpha_term: f64,
    /// `beta_f(sqrt x)^{1/4}`.
    pub beta_term: f64,
    /// `(log x)^{-1/6}`.
    pub log_term: f64,
    pub total: f64,
    /// Set when the spec lies outside the atomic case.
    pub advisory: Option<String>,
}

pub fn rate_thm11(table: &FunctionalTable, x: f64) -> Result<Rate11> {
    if !(x > std::f64::consts::E.exp()) {
        return Err(Error::RejectedInput(format!("the rate needs log log x > 1, got x = {x}")));
    }
    let advisory = match classify(table.spec(), 1000)?.law_kind() {
        LawKind::Atomic => None,
        k => Some(format!("law kind {k:?}: the atomic-case rate does not apply")),
    };
    let alpha_term = table.alpha(x.powf(1.0 / log2i(x)))?;
    let beta_term = table.beta(x.sqrt())?.powf(0.25);
    let log_term = x.ln().powf(-1.0 / 6.0);
    Ok(Rate11 { x, alpha_term, beta_term, log_term, total: alpha_term + beta_term + log_term, advisory })
}

/// Parameters and bound of the continuous-case rate.
#[derive(Debug, Clone)]
pub struct Thm12 {
    pub x: f64,
    pub eps: f64,
    pub r: f64,
    pub t: f64,
    pub eta_r: f64,
    pub b_r: f64,
    pub q: Concentration,
    /// `2 log_2 R + T^2 eta(R)/2 + 7` against `log(1/eps)/4`.
    pub first_lhs: f64,
    pub first_rhs: f64,
    /// `T^2 eta(x^eps)` against `c eps^{1/3}`.
    pub second_lhs: f64,
    pub second_rhs: f64,
    /// `eta(x^eps) <= eps^{1/3}`.
    pub eps_condition: bool,
    pub feasible: bool,
    pub bound: f64,
}

/// Evaluates the bound at explicit `(eps, R, T)` and records which constraints hold.
pub fn thm12_bound<Q: Fn(f64) -> Result<Concentration>>(
    table: &FunctionalTable,
    x: f64,
    eps: f64,
    r: f64,
    t: f64,
    q: &Q,
    c: &ConstantsLedger,
) -> Result<Thm12> {
    if !(eps > 0.0 && eps < 1.0 && r >= 3.0 && t >= 1.0) {
        return Err(Error::RejectedInput(format!("need 0 < eps < 1, R >= 3, T >= 1; got {eps}, {r}, {t}")));
    }
    let eta_r = table.eta(r)?;
    let eta_z = table.eta(x.powf(eps))?;
    let b_r = table.b_f(r)?;
    let first_lhs = 2.0 * log2i(r) + 0.5 * t * t * eta_r + 7.0;
    let first_rhs = 0.25 * (1.0 / eps).ln();
    let second_lhs = t * t * eta_z;
    let second_rhs = c.get("c_thm12_second") * eps.cbrt();
    let conc = q(1.0 / t)?;
    let bound = c.get("c_113") * (conc.value + eps.powf(1.0 / 6.0) * (t * b_r / eps).ln() + eta_r);
    Ok(Thm12 {
        x,
        eps,
        r,
        t,
        eta_r,
        b_r,
        q: conc,
        first_lhs,
        first_rhs,
        second_lhs,
        second_rhs,
        eps_condition: eta_z <= eps.cbrt(),
        feasible: first_lhs <= first_rhs && second_lhs <= second_rhs && eps > 1.0 / x.ln().sqrt() && x.powf(eps) >= r,
        bound,
    })
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    (0..n).map(|j| lo * (hi / lo).powf(j as f64 / (n - 1) as f64)).collect()
}

/// Largest `T` meeting both constraints for given `(eps, R)`; `None` if below 1.
fn thm12_t_max(table: &FunctionalTable, x: f64, eps: f64, r: f64, c: &ConstantsLedger) -> Result<Option<f64>> {
    let room = 0.25 * (1.0 / eps).ln() - 7.0 - 2.0 * log2i(r);
    if room < 0.0 {
        return Ok(None);
    }
    let eta_r = table.eta(r)?;
    let eta_z = table.eta(x.powf(eps))?;
    let a = if eta_r > 0.0 { (2.0 * room / eta_r).sqrt() } else { f64::INFINITY };
    let b = if eta_z > 0.0 { (c.get("c_thm12_second") * eps.cbrt() / eta_z).sqrt() } else { f64::INFINITY };
    let t = a.min(b).min(1e12);
    Ok((t >= 1.0).then_some(t))
}

/// Grid search maximizing `T`; falls back to `R = T = 3` when nothing is feasible.
pub fn select_params_thm12<Q: Fn(f64) -> Result<Concentration>>(
    table: &FunctionalTable,
    x: f64,
    q: &Q,
    c: &ConstantsLedger,
) -> Result<Thm12> {
    let lx = x.ln();
    let eps_lo = 1.0 / lx.sqrt() * 1.0001;
    let mut best: Option<(f64, f64, f64)> = None;
    if eps_lo < 0.5 {
        for eps in log_grid(eps_lo, 0.5, 24) {
            let z = x.powf(eps);
            if z < 3.0 {
                continue;
            }
            for r in log_grid(3.0, z, 24) {
                if let Some(t) = thm12_t_max(table, x, eps, r, c)? {
                    if best.map_or(true, |b| t > b.2) {
                        best = Some((eps, r, t));
                    }
                }
            }
        }
    }
    match best {
        Some((eps, r, t)) => thm12_bound(table, x, eps, r, t, q, c),
        None => {
            let eps = (2.0 / lx.sqrt()).min(0.5);
            thm12_bound(table, x, eps, 3.0, 3.0, q, c)
        }
    }
}

/// The explicit choices for `LOGPOW` and `PPOW`: `eps = 2/sqrt(log x)`, `R = e^{c (log x)^{1/16}}`,
/// and `T = (log x)^{xi/32}` or `log T = (log x)^{1/24}` respectively.
pub fn remark_params_thm12(family: Family, x: f64, c: &ConstantsLedger) -> Result<(f64, f64, f64)> {
    let lx = x.ln();
    let eps = 2.0 / lx.sqrt();
    if eps >= 1.0 {
        return Err(Error::RejectedInput(format!("x = {x} too small for eps = 2/sqrt(log x) < 1")));
    }
    let r = (c.get("remark_c") * lx.powf(1.0 / 16.0)).exp().max(3.0);
    let t = match family {
        Family::LogPow { xi } => lx.powf(xi / 32.0),
        Family::PPow { .. } => lx.powf(1.0 / 24.0).exp(),
        other => return Err(Error::RejectedInput(format!("no explicit parameter choice for {other}"))),
    };
    Ok((eps, r, t.max(1.0)))
}

/// Parameters and remainder of the level-set rate.
#[derive(Debug, Clone)]
pub struct Thm13 {
    pub x: f64,
    pub k: u32,
    pub r_level: f64,
    pub v: f64,
    pub w: f64,
    pub t: f64,
    pub r: f64,
    pub eta_r: f64,
    pub b_r: f64,
    pub q: Concentration,
    /// `eta(R)^{r/(r+1)} + (log x)^{-r/(r+1)}`.
    pub sigma: f64,
    pub constraints: [bool; 5],
    pub feasible: bool,
    pub frak_r: f64,
}

fn level_ratio(x: f64, k: u32, c: &ConstantsLedger) -> Result<f64> {
    let r = k as f64 / log2i(x);
    let kappa = c.get("kappa");
    if !(r >= kappa && r <= 1.0 / kappa) {
        return Err(Error::RejectedInput(format!("r = k/log log x = {r:.4} outside [{kappa}, {}]", 1.0 / kappa)));
    }
    Ok(r)
}

/// Evaluates the level-set remainder at explicit `(v, T, R)`; `q` bounds the conditional law's concentration.
pub fn thm13_bound<Q: Fn(f64) -> Result<Concentration>>(
    table: &FunctionalTable,
    x: f64,
    k: u32,
    v: f64,
    t: f64,
    r: f64,
    q: &Q,
    c: &ConstantsLedger,
) -> Result<Thm13> {
    if !table.spec().is_strongly_additive() {
        return Err(Error::RejectedInput("the level-set rate needs a strongly additive function".into()));
    }
    let rl = level_ratio(x, k, c)?;
    if !(v > 0.0 && v < 1.0 && t >= 1.0 && r >= 3.0) {
        return Err(Error::RejectedInput(format!("need 0 < v < 1, T >= 1, R >= 3; got {v}, {t}, {r}")));
    }
    let w = v.powf(c.get("c1"));
    let eta_r = table.eta(r)?;
    let eta_w = table.eta(x.powf(w).max(1.0))?;
    let b_r = table.b_f(r)?;
    let constraints = [
        v >= 1.0 / log2i(x) && v <= c.get("c0"),
        r <= (1.0 / v).exp(),
        t >= 1.0,
        t * t * eta_r <= (1.0 / v).ln(),
        t * t * eta_w <= c.get("c_115") * w,
    ];
    let conc = q(1.0 / t)?;
    let e = rl / (rl + 1.0);
    let frak_r = c.get("c_116") * (conc.value + (v + (1.0 / v).ln() / (k as f64).sqrt()) * (t * b_r / v).ln() + eta_r.powf(e));
    Ok(Thm13 {
        x,
        k,
        r_level: rl,
        v,
        w,
        t,
        r,
        eta_r,
        b_r,
        q: conc,
        sigma: eta_r.powf(e) + x.ln().powf(-e),
        constraints,
        feasible: constraints.iter().all(|&b| b),
        frak_r,
    })
}

/// Grid search maximizing `T`; falls back to `v = 1/log_2 x`, `R = 3`, `T = 1` when nothing is feasible.
pub fn select_params_thm13<Q: Fn(f64) -> Result<Concentration>>(
    table: &FunctionalTable,
    x: f64,
    k: u32,
    q: &Q,
    c: &ConstantsLedger,
) -> Result<Thm13> {
    level_ratio(x, k, c)?;
    let v_lo = 1.0 / log2i(x);
    let c0 = c.get("c0");
    let mut best: Option<(f64, f64, f64)> = None;
    if v_lo <= c0 {
        for v in log_grid(v_lo, c0, 16) {
            let w = v.powf(c.get("c1"));
            let eta_w = table.eta(x.powf(w).max(1.0))?;
            let r_hi = (1.0 / v).exp().min((table.p_max() as f64).powi(2));
            for r in log_grid(3.0, r_hi, 16) {
                let eta_r = table.eta(r)?;
                let a = if eta_r > 0.0 { ((1.0 / v).ln() / eta_r).sqrt() } else { f64::INFINITY };
                let b = if eta_w > 0.0 { (c.get("c_115") * w / eta_w).sqrt() } else { f64::INFINITY };
                let t = a.min(b).min(1e12);
                if t >= 1.0 && best.map_or(true, |bst| t > bst.2) {
                    best = Some((v, r, t));
                }
            }
        }
    }
    let (v, r, t) = best.unwrap_or((v_lo.min(0.999), 3.0, 1.0));
    thm13_bound(table, x, k, v, t, r, q, c)
}

/// `v = 1/log_2 x`, `R = log x`, `T = (log_2 x)^{xi/2}` for `LOGPOW[xi]`.
pub fn section1_params_thm13(family: Family, x: f64) -> Result<(f64, f64, f64)> {
    match family {
        Family::LogPow { xi } => {
            let l2 = log2i(x);
            Ok((1.0 / l2, x.ln().max(3.0), l2.powf(xi / 2.0).max(1.0)))
        }
        other => Err(Error::RejectedInput(format!("no explicit level-set parameters for {other}"))),
    }
}

/// One row of the unconditional budget report.
#[derive(Debug, Clone)]
pub struct BudgetRow {
    pub rate: Rate11,
    pub thm12: Option<Thm12>,
    pub alpha: f64,
    pub beta: f64,
}

pub fn write_budget_csv<W: Write>(rows: &[BudgetRow], mut w: W) -> Result<()> {
    writeln!(w, "x,alpha,beta,eta_R,Bf_R,Rx,eps,R,T,bound113")?;
    for row in rows {
        let nan = f64::NAN;
        let t = row.thm12.as_ref();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt17(row.rate.x),
            fmt17(row.alpha),
            fmt17(row.beta),
            fmt17(t.map_or(nan, |t| t.eta_r)),
            fmt17(t.map_or(nan, |t| t.b_r)),
            fmt17(row.rate.total),
            fmt17(t.map_or(nan, |t| t.eps)),
            fmt17(t.map_or(nan, |t| t.r)),
            fmt17(t.map_or(nan, |t| t.t)),
            fmt17(t.map_or(nan, |t| t.bound)),
        )?;
    }
    Ok(())
}

pub fn write_levelset_budget_csv<W: Write>(rows: &[Thm13], mut w: W) -> Result<()> {
    writeln!(w, "x,k,r,v,T,R,sigma,frakR")?;
    for t in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt17(t.x),
            t.k,
            fmt17(t.r_level),
            fmt17(t.v),
            fmt17(t.t),
            fmt17(t.r),
            fmt17(t.sigma),
            fmt17(t.frak_r)
        )?;
    }
    Ok(())
}

/// Concentration provider for tests and for laws without a usable bound.
pub fn trivial_concentration(_ell: f64) -> Result<Concentration> {
    Ok(Concentration { kr: 1.0, integral: f64::INFINITY, value: 1.0, source: QSource::KolmogorovRogozin })
}
