//! Built-in families of additive functions and their closed forms.

use astro_float::{BigFloat, Consts, RoundingMode};
use std::fmt;

/// Family tag with its real parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `f(p) = 1/(log p)^xi`.
    LogPow { xi: f64 },
    /// `f(p) = 1/p^xi`, `f(p^nu) = 0` for `nu >= 2`.
    PPow { xi: f64 },
    /// `f(p) = 1` on `(2^n, 2^n (1 + 1/(log n)^kappa)]`, `n >= 3`.
    DyadicLog { kappa: f64 },
    /// `f(p) = 1` on `(2^n, 2^n (1 + 1/n^kappa)]`, `n >= 1`.
    DyadicPow { kappa: f64 },
    /// `f(n) = log(n/phi(n))`.
    EulerRatio,
    /// `f(n) = log(sigma(n)/n)`.
    SigmaRatio,
    Zero,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::LogPow { .. } => "LOGPOW",
            Family::PPow { .. } => "PPOW",
            Family::DyadicLog { .. } => "DYADIC_LOG",
            Family::DyadicPow { .. } => "DYADIC_POW",
            Family::EulerRatio => "EULER_RATIO",
            Family::SigmaRatio => "SIGMA_RATIO",
            Family::Zero => "ZERO",
        }
    }

    /// Whether the family rule itself is strongly additive.
    pub fn default_strong(&self) -> bool {
        !matches!(self, Family::PPow { .. } | Family::SigmaRatio)
    }

    pub fn is_dyadic(&self) -> bool {
        matches!(self, Family::DyadicLog { .. } | Family::DyadicPow { .. })
    }

    /// Smallest admissible dyadic index.
    pub(crate) fn dyadic_n_min(&self) -> u32 {
        match self {
            Family::DyadicLog { .. } => 3,
            _ => 1,
        }
    }

    /// Relative interval width `delta_n` in double precision.
    pub fn dyadic_delta(&self, n: f64) -> f64 {
        match *self {
            Family::DyadicLog { kappa } => n.ln().powf(-kappa),
            Family::DyadicPow { kappa } => n.powf(-kappa),
            _ => 0.0,
        }
    }

    pub(crate) fn validate(&self) -> Result<(), String> {
        let param = match *self {
            Family::LogPow { xi } | Family::PPow { xi } => Some(("xi", xi)),
            Family::DyadicLog { kappa } | Family::DyadicPow { kappa } => Some(("kappa", kappa)),
            _ => None,
        };
        match param {
            Some((name, v)) if !(v.is_finite() && v > 0.0) => Err(format!("{name} must be positive and finite, got {v}")),
            _ => Ok(()),
        }
    }

    /// Family value at `p^nu`, `p` prime.
    pub(crate) fn value(&self, p: u64, nu: u32, dyadic: Option<&DyadicThresholds>) -> f64 {
        match *self {
            Family::LogPow { xi } => (p as f64).ln().powf(-xi),
            Family::PPow { xi } => {
                if nu == 1 {
                    (p as f64).powf(-xi)
                } else {
                    0.0
                }
            }
            Family::DyadicLog { .. } | Family::DyadicPow { .. } => {
                let t = dyadic.expect("dyadic thresholds are built with the spec");
                if t.contains(p) {
                    1.0
                } else {
                    0.0
                }
            }
            Family::EulerRatio => -(-1.0 / p as f64).ln_1p(),
            Family::SigmaRatio => {
                let pf = p as f64;
                (-pf.powi(-(nu as i32 + 1))).ln_1p() - (-1.0 / pf).ln_1p()
            }
            Family::Zero => 0.0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::LogPow { xi } | Family::PPow { xi } => write!(f, "{}[{}]", self.name(), xi),
            Family::DyadicLog { kappa } | Family::DyadicPow { kappa } => write!(f, "{}[{}]", self.name(), kappa),
            _ => f.write_str(self.name()),
        }
    }
}

const PREC: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

/// Integer upper endpoints `floor(2^n (1 + delta_n))` for every dyadic block.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicThresholds {
    n_min: u32,
    upper: Vec<u64>,
}

impl DyadicThresholds {
    pub fn new(family: &Family) -> Self {
        let n_min = family.dyadic_n_min();
        let mut consts = Consts::new().expect("astro-float constants");
        let mut upper = vec![0u64; 64];
        for n in n_min..64 {
            let frac = floor_scaled_delta(family, n, &mut consts);
            upper[n as usize] = (1u64 << n).saturating_add(frac);
        }
        Self { n_min, upper }
    }

    /// Block index containing `p`, i.e. the `n` with `2^n < p <= 2^(n+1)`.
    #[inline]
    pub fn block(p: u64) -> u32 {
        63 - (p - 1).leading_zeros()
    }

    #[inline]
    pub fn contains(&self, p: u64) -> bool {
        if p < 3 {
            return false;
        }
        let n = Self::block(p);
        n >= self.n_min && p <= self.upper[n as usize]
    }

    /// `floor(2^n (1 + delta_n))`, or 0 when the block is not admissible.
    pub fn upper(&self, n: u32) -> u64 {
        self.upper.get(n as usize).copied().unwrap_or(0)
    }

    pub fn n_min(&self) -> u32 {
        self.n_min
    }
}

/// `floor(2^n delta_n)` with `delta_n` evaluated in 256-bit arithmetic.
fn floor_scaled_delta(family: &Family, n: u32, consts: &mut Consts) -> u64 {
    let approx = (n as f64).exp2() * family.dyadic_delta(n as f64);
    if n > 52 {
        return approx.floor() as u64;
    }
    let nb = BigFloat::from_f64(n as f64, PREC);
    let exponent = match *family {
        Family::DyadicLog { kappa } => nb.ln(PREC, RM, consts).ln(PREC, RM, consts).mul(&BigFloat::from_f64(-kappa, PREC), PREC, RM),
        Family::DyadicPow { kappa } => nb.ln(PREC, RM, consts).mul(&BigFloat::from_f64(-kappa, PREC), PREC, RM),
        _ => unreachable!("only dyadic families have thresholds"),
    };
    let exact = exponent.exp(PREC, RM, consts).mul(&BigFloat::from_f64((n as f64).exp2(), PREC), PREC, RM);
    let le = |c: u64| BigFloat::from_f64(c as f64, PREC).cmp(&exact).is_some_and(|o| o <= 0);
    let mut c = approx.floor().max(0.0) as u64;
    while c > 0 && !le(c) {
        c -= 1;
    }
    while le(c + 1) {
        c += 1;
    }
    c
}
