//! Multiplicative companions `u_f`, `S_p`, `w_p` and `h_f`.

use super::spec::AdditiveFunctionSpec;
use crate::primes::factorize;

/// Default geometric-tail tolerance for `S_p`.
pub const DEFAULT_TAIL_TOL: f64 = 1e-15;

impl AdditiveFunctionSpec {
    /// `u_f(p^nu)`.
    #[inline]
    pub fn u(&self, p: u64, nu: u32) -> bool {
        self.value(p, nu) != 0.0
    }

    /// `(S_p, w_p)` with the `nu`-series cut once the geometric tail drops below `tail_tol`.
    pub fn companions(&self, p: u64, tail_tol: f64) -> (f64, f64) {
        if self.locally_strong(p) {
            return if self.u(p, 1) { (1.0 / (p - 1) as f64, 1.0 / p as f64) } else { (0.0, 0.0) };
        }
        let pf = p as f64;
        let last_override = self.overrides().range((p, 0)..=(p, u32::MAX)).map(|(k, _)| k.1).max().unwrap_or(0);
        let mut s = 0.0;
        let mut pw = 1.0;
        let mut nu = 1u32;
        loop {
            pw /= pf;
            if self.u(p, nu) {
                s += pw;
            }
            if (pw / (pf - 1.0) < tail_tol && nu >= last_override) || pw == 0.0 {
                break;
            }
            nu += 1;
        }
        (s, (1.0 - 1.0 / pf) * s)
    }

    /// Local factor of `h_f` at `p^nu` with `nu >= 1`.
    pub fn h_local(&self, p: u64, nu: u32) -> f64 {
        if !self.u(p, nu) {
            return 0.0;
        }
        if self.locally_strong(p) {
            return 1.0;
        }
        let (_, w) = self.companions(p, DEFAULT_TAIL_TOL);
        (1.0 - 1.0 / p as f64) / (1.0 - w)
    }

    /// `h_f(m) = u_f(m) prod_{p | m} (1 - 1/p)/(1 - w_p)`.
    pub fn h_factor(&self, m: u64) -> f64 {
        factorize(m).into_iter().map(|(p, nu)| self.h_local(p, nu)).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_companions() {
        let lp = AdditiveFunctionSpec::log_pow(1.0);
        assert_eq!(lp.companions(3, DEFAULT_TAIL_TOL), (0.5, 1.0 / 3.0));
        let pp = AdditiveFunctionSpec::p_pow(1.0);
        let (s, w) = pp.companions(2, DEFAULT_TAIL_TOL);
        assert_eq!((s, w), (0.5, 0.25));
        let z = AdditiveFunctionSpec::p_pow(1.0).with_override(7, 1, 0.0).unwrap();
        assert_eq!(z.companions(7, DEFAULT_TAIL_TOL), (0.0, 0.0));
    }

    #[test]
    fn documented_h_values() {
        let pp = AdditiveFunctionSpec::p_pow(1.0);
        assert_eq!(pp.h_factor(1), 1.0);
        // oracle: w_2 = 1/4, so (1/2)/(3/4)
        assert!((pp.h_factor(2) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(pp.h_factor(4), 0.0);
        let lp = AdditiveFunctionSpec::log_pow(2.0);
        assert_eq!(lp.h_factor(2 * 3 * 5 * 7 * 11), 1.0);
    }

    #[test]
    fn sigma_ratio_series_matches_closed_form() {
        // every f(p^nu) != 0 so S_p = 1/(p-1)
        let s = AdditiveFunctionSpec::sigma_ratio();
        for p in [2u64, 3, 5, 101] {
            let (sp, _) = s.companions(p, DEFAULT_TAIL_TOL);
            assert!((sp - 1.0 / (p - 1) as f64).abs() < 2e-15);
        }
    }

    #[test]
    fn truncation_breaks_local_strong_additivity() {
        // f(2) > 1 survives at 2 <= R but 2^nu > R is cut
        let t = AdditiveFunctionSpec::log_pow(2.0).truncated(5.0).unwrap();
        let (s, _) = t.companions(2, DEFAULT_TAIL_TOL);
        assert!((s - 0.75).abs() < 1e-15);
    }
}
