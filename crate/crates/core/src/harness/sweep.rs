//! Distances between empirical laws and the limit law across a range of `x`.

use super::distance::kolmogorov_distance;
use crate::error::{Error, Result};
use crate::function_model::{AdditiveFunctionSpec, Family};
use crate::functionals::{
    rate_thm11, remark_params_thm12, select_params_thm12, thm12_bound, ConstantsLedger, FunctionalTable,
};
use crate::limit_law::{atomic_law, concentration, CharacteristicFunction, EulerProductCf, GridOptions, InvertedLaw, LimitLaw};
use crate::numeric::fmt17;
use crate::sieve::{build_sieve, EmpiricalCdf, DEFAULT_SEGMENT};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Enumerated atomic law against the atomic-case rate.
    Atomic,
    /// Inverted characteristic function of `f` against the continuous-case bound; `f_R` is compared alongside.
    Continuous,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Prime range of the functional table.
    pub table_p_max: u64,
    /// Prime range of the Euler products.
    pub cf_p_max: u64,
    pub p_cut: u64,
    pub m_cut: u64,
    /// Inversion cutoff.
    pub t_int: f64,
    /// Empirical mass left outside the inversion range on each side.
    pub range_quantile: f64,
    pub segment: u64,
    pub constants: ConstantsLedger,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            table_p_max: 1_000_000,
            cf_p_max: 100_000,
            p_cut: 1_000_000,
            m_cut: 1_000_000,
            t_int: 2000.0,
            range_quantile: 1e-4,
            segment: DEFAULT_SEGMENT,
            constants: ConstantsLedger::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DistanceRow {
    pub x: u64,
    /// Sup-norm gap plus `guard`.
    pub distance: f64,
    /// Error of the computed limit law.
    pub guard: f64,
    pub bound: f64,
    /// `distance / bound`.
    pub ratio: f64,
    /// Parameters of the continuous-case bound; `NaN` in the atomic case.
    pub eps: f64,
    pub r: f64,
    pub t: f64,
    pub eta_r: f64,
    /// `sup |F_x(.; R) - F(.; R)|` for the truncated function plus its guard; `NaN` in the atomic case.
    pub truncated_distance: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone)]
pub struct DistanceReport {
    pub spec: String,
    pub mode: SweepMode,
    pub rows: Vec<DistanceRow>,
}

impl DistanceReport {
    /// `max_x D_x / bound_x`.
    pub fn c_hat(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(0.0, f64::max)
    }

    /// Largest over smallest ratio; 1 when every distance vanishes.
    pub fn ratio_spread(&self) -> f64 {
        let hi = self.c_hat();
        let lo = self.rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        if hi == 0.0 {
            1.0
        } else {
            hi / lo
        }
    }

    /// `D_{x'} <= factor D_x` for consecutive grid points.
    pub fn nonincreasing_within(&self, factor: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].distance <= factor * w[0].distance)
    }

    /// Least-squares slope of `log D_x` against `log x`; `NaN` if some distance vanishes.
    pub fn slope(&self) -> f64 {
        if self.rows.iter().any(|r| r.distance <= 0.0) {
            return f64::NAN;
        }
        let pts: Vec<(f64, f64)> = self.rows.iter().map(|r| ((r.x as f64).ln(), r.distance.ln())).collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,distance,guard,bound,ratio,eps,R,T,eta_R,truncated_distance,feasible")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.x,
                fmt17(r.distance),
                fmt17(r.guard),
                fmt17(r.bound),
                fmt17(r.ratio),
                fmt17(r.eps),
                fmt17(r.r),
                fmt17(r.t),
                fmt17(r.eta_r),
                fmt17(r.truncated_distance),
                r.feasible
            )?;
        }
        Ok(())
    }
}

/// Parameters `(eps, R, T)`: the explicit choice where one exists, the searched one otherwise.
fn continuous_params(
    table: &FunctionalTable,
    x: f64,
    c: &ConstantsLedger,
) -> Result<(f64, f64, f64)> {
    match remark_params_thm12(table.spec().family(), x, c) {
        Ok(p) => Ok(p),
        Err(_) => {
            let s = select_params_thm12(table, x, &crate::functionals::trivial_concentration, c)?;
            Ok((s.eps, s.r, s.t))
        }
    }
}

/// Mass the inverted law may leave outside its range on each side.
const OUTSIDE_MASS: f64 = 1e-3;

/// Inverts `cf` on `[lo, hi]`, widening the range until the law's mass outside it is small.
pub fn build_covering<C: CharacteristicFunction + ?Sized>(cf: &C, mut lo: f64, mut hi: f64, t_int: f64) -> Result<InvertedLaw> {
    for _ in 0..4 {
        let law = InvertedLaw::build(cf, GridOptions::new(t_int, lo, hi))?;
        let (_, fs, _) = law.grid();
        let (below, above) = (fs[0].abs(), (1.0 - fs[fs.len() - 1]).abs());
        if below <= OUTSIDE_MASS && above <= OUTSIDE_MASS {
            return Ok(law);
        }
        let w = hi - lo;
        if below > OUTSIDE_MASS {
            lo -= 0.5 * w;
        }
        if above > OUTSIDE_MASS {
            hi += 0.5 * w;
        }
    }
    InvertedLaw::build(cf, GridOptions::new(t_int, lo, hi))
}

/// Range covering all but a quantile of the sample on each side, padded by 1/2.
pub fn sample_range(emp: &EmpiricalCdf, quantile: f64) -> (f64, f64) {
    let s = emp.sorted_values();
    let n = s.len();
    let q = ((n as f64 * quantile) as usize).min(n - 1);
    (s[q] - 0.5, s[n - 1 - q] + 0.5)
}

/// Inverted law of `spec` on a range covering the sample and the law.
pub fn inverted_law_for(spec: &AdditiveFunctionSpec, emp: &EmpiricalCdf, cfg: &SweepConfig) -> Result<(EulerProductCf, InvertedLaw)> {
    let (lo, hi) = sample_range(emp, cfg.range_quantile);
    let cf = EulerProductCf::limit(spec, cfg.cf_p_max)?;
    let law = build_covering(&cf, lo, hi, cfg.t_int)?;
    Ok((cf, law))
}

pub fn convergence_sweep(spec: &AdditiveFunctionSpec, x_grid: &[u64], mode: SweepMode, cfg: &SweepConfig) -> Result<DistanceReport> {
    if x_grid.len() < 3 || x_grid.windows(2).any(|w| w[1] <= w[0]) || x_grid[0] < 16 {
        return Err(Error::RejectedInput("x grid must be increasing with at least 3 points, starting at 16 or more".into()));
    }
    let c = &cfg.constants;
    let table = FunctionalTable::new(spec, cfg.table_p_max)?;
    let mut rows = Vec::with_capacity(x_grid.len());
    match mode {
        SweepMode::Atomic => {
            let law = LimitLaw::Atomic(atomic_law(spec, 1.0, cfg.p_cut, cfg.m_cut)?);
            let guard = law.error_bound();
            for &x in x_grid {
                let emp = build_sieve(spec, x, cfg.segment)?.empirical();
                let d = kolmogorov_distance(&emp, &law, guard)?;
                let bound = rate_thm11(&table, x as f64)?.total;
                let nan = f64::NAN;
                rows.push(DistanceRow { x, distance: d, guard, bound, ratio: d / bound, eps: nan, r: nan, t: nan, eta_r: nan, truncated_distance: nan, feasible: true });
            }
        }
        SweepMode::Continuous => {
            let mut cache: Vec<(AdditiveFunctionSpec, EulerProductCf, InvertedLaw)> = Vec::new();
            let top = build_sieve(spec, *x_grid.last().unwrap(), cfg.segment)?.empirical();
            let law_for = |s: &AdditiveFunctionSpec, cache: &mut Vec<(AdditiveFunctionSpec, EulerProductCf, InvertedLaw)>| -> Result<usize> {
                if let Some(i) = cache.iter().position(|e| &e.0 == s) {
                    return Ok(i);
                }
                let (cf, law) = inverted_law_for(s, &top, cfg)?;
                cache.push((s.clone(), cf, law));
                Ok(cache.len() - 1)
            };
            let full = law_for(spec, &mut cache)?;
            for &x in x_grid {
                let xf = x as f64;
                let (eps, r, t) = continuous_params(&table, xf, c)?;
                let cut = spec.untruncated().truncated(r)?;
                let emp = build_sieve(spec, x, cfg.segment)?.empirical();
                let guard = cache[full].2.error_bound();
                let d = kolmogorov_distance(&emp, &cache[full].2, guard)?;
                let ic = law_for(&cut, &mut cache)?;
                let (_, cf, law_r) = &cache[ic];
                let emp_r = if cut == *spec { emp } else { build_sieve(&cut, x, cfg.segment)?.empirical() };
                let d_r = kolmogorov_distance(&emp_r, law_r, law_r.error_bound())?;
                let q = |ell: f64| concentration(&cut, cf, ell, cfg.cf_p_max, c.get("c_kr"), c.get("c_int"));
                let b = thm12_bound(&table, xf, eps, r, t, &q, c)?;
                rows.push(DistanceRow {
                    x,
                    distance: d,
                    guard,
                    bound: b.bound,
                    ratio: d / b.bound,
                    eps,
                    r,
                    t,
                    eta_r: b.eta_r,
                    truncated_distance: d_r,
                    feasible: b.feasible,
                });
            }
        }
    }
    Ok(DistanceReport { spec: spec.canonical(), mode, rows })
}

/// Whether a family has an atomic or continuous law, for choosing a sweep mode.
pub fn default_mode(spec: &AdditiveFunctionSpec) -> SweepMode {
    match spec.family() {
        Family::LogPow { .. } | Family::PPow { .. } | Family::EulerRatio | Family::SigmaRatio => SweepMode::Continuous,
        _ => SweepMode::Atomic,
    }
}
