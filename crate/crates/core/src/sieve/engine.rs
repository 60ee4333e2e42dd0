//! Segmented prime-power walk over `1..=x`.
//!
//! Each `n` absorbs its prime powers in ascending prime order; a leftover cofactor
//! above `sqrt(hi)` is a single prime and always comes last. The order, and hence
//! every floating-point result, does not depend on the segment boundaries.

use crate::primes::{isqrt, primes_up_to, PrimeList};
use rayon::prelude::*;

/// Per-integer fold over the prime-power factorization.
pub(crate) trait Fold: Sync {
    type State: Copy + Send;
    type Out: Copy + Send + Default;
    fn init(&self) -> Self::State;
    /// Absorbs `p^nu` with `p = small_primes[idx]`.
    fn small(&self, s: &mut Self::State, idx: usize, nu: u32);
    /// Absorbs a prime `q` dividing `n` exactly once.
    fn large(&self, s: &mut Self::State, q: u64);
    fn finish(&self, s: Self::State) -> Self::Out;
}

/// Primes `<= sqrt(x)`, the only ones handled through `Fold::small`.
pub(crate) fn small_primes(x: u64) -> PrimeList {
    primes_up_to(isqrt(x))
}

/// Largest exponent `nu` with `p^nu <= x`.
pub(crate) fn max_exponent(p: u64, x: u64) -> u32 {
    let mut nu = 0;
    let mut pw = 1u64;
    while let Some(next) = pw.checked_mul(p) {
        if next > x {
            break;
        }
        pw = next;
        nu += 1;
    }
    nu
}

/// Runs one segment `lo..lo + out.len()` (1-based `n`).
pub(crate) fn run_segment<F: Fold>(fold: &F, primes: &[u64], lo: u64, out: &mut [F::Out], omega: &mut [u8]) {
    let len = out.len();
    let hi = lo + len as u64 - 1;
    let mut rem: Vec<u64> = (lo..=hi).collect();
    let mut state = vec![fold.init(); len];
    for w in omega.iter_mut() {
        *w = 0;
    }
    for (idx, &p) in primes.iter().enumerate() {
        if p * p > hi {
            break;
        }
        let first = lo.div_ceil(p) * p;
        let mut n = first;
        while n <= hi {
            let i = (n - lo) as usize;
            let mut nu = 0u32;
            while rem[i] % p == 0 {
                rem[i] /= p;
                nu += 1;
            }
            fold.small(&mut state[i], idx, nu);
            omega[i] += 1;
            n += p;
        }
    }
    for i in 0..len {
        if rem[i] > 1 {
            fold.large(&mut state[i], rem[i]);
            omega[i] += 1;
        }
        out[i] = fold.finish(state[i]);
    }
}

/// Runs the fold over `1..=x`, returning per-`n` outputs and `omega(n)` (index `n - 1`).
pub(crate) fn run<F: Fold>(fold: &F, primes: &[u64], x: u64, segment_size: u64) -> (Vec<F::Out>, Vec<u8>) {
    let mut out = vec![F::Out::default(); x as usize];
    let mut omega = vec![0u8; x as usize];
    let seg = segment_size as usize;
    out.par_chunks_mut(seg).zip(omega.par_chunks_mut(seg)).enumerate().for_each(|(j, (o, w))| {
        run_segment(fold, primes, 1 + (j * seg) as u64, o, w);
    });
    (out, omega)
}

/// Neumaier-compensated additive fold with cached small-prime terms.
pub(crate) struct ValueFold<'a> {
    pub spec: &'a crate::function_model::AdditiveFunctionSpec,
    terms: Vec<Vec<f64>>,
}

impl<'a> ValueFold<'a> {
    pub fn new(spec: &'a crate::function_model::AdditiveFunctionSpec, primes: &[u64], x: u64) -> Self {
        let terms = primes.iter().map(|&p| (1..=max_exponent(p, x)).map(|nu| spec.value(p, nu)).collect()).collect();
        Self { spec, terms }
    }
}

#[inline]
fn neumaier(s: &mut (f64, f64), v: f64) {
    let t = s.0 + v;
    if s.0.abs() >= v.abs() {
        s.1 += (s.0 - t) + v;
    } else {
        s.1 += (v - t) + s.0;
    }
    s.0 = t;
}

impl Fold for ValueFold<'_> {
    type State = (f64, f64);
    type Out = f64;
    fn init(&self) -> (f64, f64) {
        (0.0, 0.0)
    }
    #[inline]
    fn small(&self, s: &mut (f64, f64), idx: usize, nu: u32) {
        neumaier(s, self.terms[idx][nu as usize - 1]);
    }
    #[inline]
    fn large(&self, s: &mut (f64, f64), q: u64) {
        neumaier(s, self.spec.value(q, 1));
    }
    fn finish(&self, s: (f64, f64)) -> f64 {
        s.0 + s.1
    }
}

/// Flags integers with some `p^nu || n` at which two specs disagree.
pub(crate) struct DisagreeFold<'a> {
    a: &'a crate::function_model::AdditiveFunctionSpec,
    b: &'a crate::function_model::AdditiveFunctionSpec,
    flags: Vec<Vec<bool>>,
}

impl<'a> DisagreeFold<'a> {
    pub fn new(a: &'a crate::function_model::AdditiveFunctionSpec, b: &'a crate::function_model::AdditiveFunctionSpec, primes: &[u64], x: u64) -> Self {
        let flags = primes.iter().map(|&p| (1..=max_exponent(p, x)).map(|nu| a.value(p, nu) != b.value(p, nu)).collect()).collect();
        Self { a, b, flags }
    }
}

impl Fold for DisagreeFold<'_> {
    type State = bool;
    type Out = bool;
    fn init(&self) -> bool {
        false
    }
    fn small(&self, s: &mut bool, idx: usize, nu: u32) {
        *s |= self.flags[idx][nu as usize - 1];
    }
    fn large(&self, s: &mut bool, q: u64) {
        *s |= self.a.value(q, 1) != self.b.value(q, 1);
    }
    fn finish(&self, s: bool) -> bool {
        s
    }
}
