//! Level-set experiments: coefficient extraction, the count asymptotic and conditional-law distances.

use super::distance::kolmogorov_distance;
use super::sweep::{build_covering, sample_range, SweepConfig};
use crate::error::{Error, Result};
use crate::functionals::{section1_params_thm13, thm13_bound, ConstantsLedger, FunctionalTable};
use crate::limit_law::{concentration_integral, Concentration, EulerProductCf, QSource};
use crate::numeric::{fmt17, gamma, log2i, CompensatedSum};
use crate::primes::primes_up_to;
use crate::sieve::{SieveTable, TwistCache};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::io::Write;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn level_radius(x: u64, k: u32, c: &ConstantsLedger) -> Result<f64> {
    let r = k as f64 / log2i(x as f64);
    let kappa = c.get("kappa");
    if !(x >= 3 && r >= kappa && r <= 1.0 / kappa) {
        return Err(Error::RejectedInput(format!("r = k/log log x = {r:.4} outside [{kappa}, {}]", 1.0 / kappa)));
    }
    Ok(r)
}

/// Two computations of `sum_{n <= x, omega(n) = k} e^{i tau f_R(n)}`.
#[derive(Debug, Clone, Copy)]
pub struct LevelsetResidual {
    pub direct: Complex64,
    /// `k`-th Fourier coefficient of `z -> S_R(x; tau, z)` on `|z| = k/log log x`.
    pub extracted: Complex64,
    pub residual: f64,
    pub pi_k: u64,
}

pub fn levelset_consistency(
    table: &SieveTable,
    k: u32,
    tau: f64,
    r_cut: f64,
    theta_points: usize,
    c: &ConstantsLedger,
) -> Result<LevelsetResidual> {
    if theta_points < 64 || !theta_points.is_power_of_two() {
        return Err(Error::RejectedInput(format!("theta points must be a power of two >= 64, got {theta_points}")));
    }
    let rho = level_radius(table.x(), k, c)?;
    if table.max_omega() as usize >= theta_points {
        return Err(Error::AliasingRisk { max_omega: table.max_omega(), points: theta_points });
    }
    let target = table.spec().untruncated().truncated(r_cut)?;
    let owned;
    let t = if &target == table.spec() {
        table
    } else {
        owned = table.with_truncation(r_cut)?;
        &owned
    };
    let cache = TwistCache::new(t, tau);
    let direct = cache.level_sum(k);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..theta_points {
        let theta = 2.0 * PI * j as f64 / theta_points as f64;
        let s = cache.sum_at(Complex64::from_polar(rho, theta));
        acc += s * Complex64::from_polar(rho.powi(-(k as i32)), -(k as f64) * theta);
    }
    let extracted = acc / theta_points as f64;
    Ok(LevelsetResidual { direct, extracted, residual: (direct - extracted).norm(), pi_k: t.pi_k(k) })
}

/// Observed `pi_k(x)` against the main term of its asymptotic formula.
#[derive(Debug, Clone, Copy)]
pub struct PikCheck {
    pub x: u64,
    pub k: u32,
    pub r: f64,
    pub observed: u64,
    /// `x e^{-gamma r} L(0; x)^k G_0(r; x)/(k! log x)`.
    pub predicted: f64,
    /// `x e^{-gamma r}/log x` times the exact `z^k` coefficient of `prod_{p <= x} (1 + z/(p-1))`.
    pub predicted_exact: f64,
    pub ratio: f64,
    pub ratio_exact: f64,
    /// `c (v + log(1/v)/sqrt k)` with `v = 1/log log x`.
    pub tolerance: f64,
    pub pass: bool,
}

pub fn verify_pik_asymptotic(table: &SieveTable, k: u32, c: &ConstantsLedger) -> Result<PikCheck> {
    let x = table.x();
    let r = level_radius(x, k, c)?;
    let xf = x as f64;
    let mut l = CompensatedSum::new();
    let mut log_g = CompensatedSum::new();
    let mut e = vec![0.0f64; k as usize + 1];
    e[0] = 1.0;
    for &p in primes_up_to(x).iter() {
        let a = 1.0 / (p as f64 - 1.0);
        l.add(a);
        log_g.add((r * a).ln_1p() - r * a);
        for j in (1..=k as usize).rev() {
            e[j] += e[j - 1] * a;
        }
    }
    let l = l.value();
    let pre = xf * (-EULER_GAMMA * r).exp() / xf.ln();
    let predicted = pre * l.powi(k as i32) * log_g.value().exp() / gamma(k as f64 + 1.0);
    let predicted_exact = pre * e[k as usize];
    let observed = table.pi_k(k);
    let ratio = observed as f64 / predicted;
    let v = 1.0 / log2i(xf);
    let tolerance = c.get("c_pik") * (v + (1.0 / v).ln() / (k as f64).sqrt());
    Ok(PikCheck {
        x,
        k,
        r,
        observed,
        predicted,
        predicted_exact,
        ratio,
        ratio_exact: observed as f64 / predicted_exact,
        tolerance,
        pass: (ratio - 1.0).abs() <= tolerance,
    })
}

#[derive(Debug, Clone)]
pub struct LevelSetRow {
    pub k: u32,
    pub r: f64,
    pub pi_k: u64,
    pub distance: f64,
    pub guard: f64,
    pub v: f64,
    pub t: f64,
    pub r_cut: f64,
    pub sigma: f64,
    pub frak_r: f64,
    pub feasible: bool,
    pub pik: PikCheck,
}

#[derive(Debug, Clone)]
pub struct LevelSetReport {
    pub spec: String,
    pub x: u64,
    pub rows: Vec<LevelSetRow>,
}

impl LevelSetReport {
    /// `max_k distance / remainder`.
    pub fn c_hat(&self) -> f64 {
        self.rows.iter().map(|r| r.distance / r.frak_r).fold(0.0, f64::max)
    }

    /// Whether every distance lies below `c_hat` times its remainder.
    pub fn bounded_by(&self, c_hat: f64) -> bool {
        self.rows.iter().all(|r| r.distance <= c_hat * r.frak_r)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,k,r,pi_k,distance,guard,v,T,R,sigma,frakR,feasible,pik_predicted,pik_ratio")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                self.x,
                r.k,
                fmt17(r.r),
                r.pi_k,
                fmt17(r.distance),
                fmt17(r.guard),
                fmt17(r.v),
                fmt17(r.t),
                fmt17(r.r_cut),
                fmt17(r.sigma),
                fmt17(r.frak_r),
                r.feasible,
                fmt17(r.pik.predicted),
                fmt17(r.pik.ratio)
            )?;
        }
        Ok(())
    }
}

/// Level-set law of `f` against the inverted conditional law for each `k`.
/// `params` fixes `(v, R, T)`; otherwise the explicit choice for `LOGPOW` is used.
pub fn levelset_sweep(
    table: &SieveTable,
    k_list: &[u32],
    params: Option<(f64, f64, f64)>,
    cfg: &SweepConfig,
) -> Result<LevelSetReport> {
    let spec = table.spec().untruncated();
    if !spec.is_strongly_additive() {
        return Err(Error::RejectedInput("level-set sweeps need a strongly additive function".into()));
    }
    let c = &cfg.constants;
    let x = table.x();
    let xf = x as f64;
    let ft = FunctionalTable::new(&spec, cfg.table_p_max)?;
    let (v, r_cut, t) = match params {
        Some(p) => p,
        None => section1_params_thm13(spec.family(), xf)?,
    };
    let mut rows = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let r = level_radius(x, k, c)?;
        let emp = table.level(k)?;
        let cf = EulerProductCf::conditional(&spec, r, cfg.cf_p_max)?;
        let (lo, hi) = sample_range(&emp, cfg.range_quantile);
        let law = build_covering(&cf, lo, hi, cfg.t_int)?;
        let guard = law.error_bound();
        let distance = kolmogorov_distance(&emp, &law, guard)?;
        let qf = |ell: f64| -> Result<Concentration> {
            let integral = c.get("c_int") * concentration_integral(&cf, ell.min(1.0), 1e-8)?;
            Ok(Concentration { kr: f64::INFINITY, integral, value: integral.min(1.0), source: QSource::Integral })
        };
        let b = thm13_bound(&ft, xf, k, v, t, r_cut, &qf, c)?;
        rows.push(LevelSetRow {
            k,
            r,
            pi_k: table.pi_k(k),
            distance,
            guard,
            v,
            t,
            r_cut,
            sigma: b.sigma,
            frak_r: b.frak_r,
            feasible: b.feasible,
            pik: verify_pik_asymptotic(table, k, c)?,
        });
    }
    Ok(LevelSetReport { spec: spec.canonical(), x, rows })
}
