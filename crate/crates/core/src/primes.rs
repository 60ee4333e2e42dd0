//! Prime generation and elementary factorization.

use std::ops::Deref;
use std::sync::{Arc, Mutex, OnceLock};

/// Primes `<= limit` by an odd-only sieve of Eratosthenes.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    // index i stands for 2i+1
    let half = limit / 2 + 1;
    let mut composite = vec![false; half];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = (p * p) / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(estimate_pi(limit as f64));
    primes.push(2);
    for (i, &c) in composite.iter().enumerate() {
        let n = 2 * i + 1;
        if n > limit {
            break;
        }
        if !c {
            primes.push(n as u64);
        }
    }
    primes
}

fn estimate_pi(x: f64) -> usize {
    if x < 10.0 {
        4
    } else {
        (1.26 * x / x.ln()) as usize
    }
}

/// Shared, growable cache of the primes up to the largest limit requested so far.
#[derive(Clone)]
pub struct PrimeList {
    all: Arc<Vec<u64>>,
    len: usize,
}

impl Deref for PrimeList {
    type Target = [u64];
    fn deref(&self) -> &[u64] {
        &self.all[..self.len]
    }
}

impl std::fmt::Debug for PrimeList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PrimeList(len={})", self.len)
    }
}

fn cache() -> &'static Mutex<(u64, Arc<Vec<u64>>)> {
    static CACHE: OnceLock<Mutex<(u64, Arc<Vec<u64>>)>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new((0, Arc::new(Vec::new()))))
}

/// Primes `<= limit`, served from a process-wide cache.
pub fn primes_up_to(limit: u64) -> PrimeList {
    let mut guard = cache().lock().expect("prime cache poisoned");
    if guard.0 < limit {
        let target = limit.max(guard.0.saturating_mul(2)).max(1 << 16);
        *guard = (target, Arc::new(sieve_primes(target)));
    }
    let all = Arc::clone(&guard.1);
    let len = all.partition_point(|&p| p <= limit);
    PrimeList { all, len }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization `[(p, nu)]` by trial division, ascending in `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut nu = 0;
            while n % p == 0 {
                n /= p;
                nu += 1;
            }
            out.push((p, nu));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Whether `p^nu > bound`, without overflow.
pub fn prime_power_exceeds(p: u64, nu: u32, bound: f64) -> bool {
    match p.checked_pow(nu) {
        Some(q) => (q as f64) > bound,
        None => true,
    }
}

/// Integer square root.
pub fn isqrt(n: u64) -> u64 {
    let mut r = ((n as f64).sqrt() as u64).min(u32::MAX as u64);
    while r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|q| q <= n) {
        r += 1;
    }
    r
}
