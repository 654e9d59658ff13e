//! Deterministic sieves: a segmented sieve of Eratosthenes for prime lists
//! and a compact smallest-prime-factor table.

use crate::error::{Error, Result};

const SEGMENT: usize = 1 << 18;

/// Largest value accepted by [`SpfTable::new`]. Composite entries up to this
/// bound have a least prime factor below `2^16`, which is what lets the table
/// store `u16` entries.
pub const SPF_MAX: u64 = 1 << 32;

fn small_primes(limit: usize) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// All primes `p <= limit`, ascending.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let root = isqrt(limit) as usize;
    let base = small_primes(root);
    let mut out = Vec::with_capacity(estimate_pi(limit));
    let mut composite = vec![false; SEGMENT];
    let mut lo = 2u64;
    while lo <= limit {
        let hi = (lo + SEGMENT as u64 - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        composite[..len].iter_mut().for_each(|c| *c = false);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let start = (p * p).max(lo.div_ceil(p) * p);
            let mut j = start;
            while j <= hi {
                composite[(j - lo) as usize] = true;
                j += p;
            }
        }
        out.extend((0..len).filter(|&i| !composite[i]).map(|i| lo + i as u64));
        lo = hi + 1;
    }
    out
}

fn estimate_pi(x: u64) -> usize {
    if x < 17 {
        return 8;
    }
    let xf = x as f64;
    (1.26 * xf / xf.ln()) as usize
}

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest-prime-factor table over `[0, bound]`, filled segment by segment.
///
/// Entries hold the least prime factor of composite `n`; a zero entry marks
/// `n` as prime (or `n < 2`).
#[derive(Debug, Clone)]
pub struct SpfTable {
    bound: u64,
    spf: Vec<u16>,
}

impl SpfTable {
    pub fn new(bound: u64) -> Result<Self> {
        if bound > SPF_MAX {
            return Err(Error::BoundTooLarge { value: bound, max: SPF_MAX });
        }
        let size = bound as usize + 1;
        let mut spf = vec![0u16; size];
        let base = small_primes(isqrt(bound) as usize);
        let mut lo = 0usize;
        while lo < size {
            let hi = (lo + SEGMENT).min(size);
            for &p in &base {
                let p = p as usize;
                if p * p >= hi {
                    break;
                }
                let start = (p * p).max(lo.div_ceil(p) * p);
                let mut j = start;
                while j < hi {
                    if spf[j] == 0 {
                        spf[j] = p as u16;
                    }
                    j += p;
                }
            }
            lo = hi;
        }
        Ok(Self { bound, spf })
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Least prime factor of `n`, for `2 <= n <= bound`.
    pub fn least_factor(&self, n: u64) -> u64 {
        match self.spf[n as usize] {
            0 => n,
            p => p as u64,
        }
    }

    /// Prime factorization of `n` as `(p, e)` pairs in ascending order.
    pub fn factor(&self, n: u64) -> Factors<'_> {
        assert!(n <= self.bound, "{n} is outside the table bound {}", self.bound);
        Factors { table: self, rest: n }
    }
}

pub struct Factors<'a> {
    table: &'a SpfTable,
    rest: u64,
}

impl Iterator for Factors<'_> {
    type Item = (u64, u32);

    fn next(&mut self) -> Option<(u64, u32)> {
        if self.rest < 2 {
            return None;
        }
        let p = self.table.least_factor(self.rest);
        let mut e = 0;
        while self.rest.is_multiple_of(p) {
            self.rest /= p;
            e += 1;
        }
        Some((p, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_match_trial_division() {
        let sieved = primes_up_to(100_000);
        let brute: Vec<u64> = (0..=100_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieved, brute);
    }

    #[test]
    fn prime_counts() {
        assert!(primes_up_to(1).is_empty());
        assert_eq!(primes_up_to(2), vec![2]);
        assert_eq!(primes_up_to(1_000_000).len(), 78_498);
    }

    #[test]
    fn spf_is_least_prime_divisor() {
        let table = SpfTable::new(300_000).unwrap();
        for n in 2..=300_000u64 {
            let p = table.least_factor(n);
            assert_eq!(n % p, 0);
            assert!(is_prime(p), "{n}: {p}");
            let brute = (2..).find(|&d| n.is_multiple_of(d)).unwrap();
            if n < 5_000 || n % 97 == 0 {
                assert_eq!(p, brute);
            }
        }
    }

    #[test]
    fn factor_reconstructs() {
        let table = SpfTable::new(1 << 20).unwrap();
        for n in [2u64, 12, 360, 1 << 20, 999_983, 1_048_575] {
            let product: u64 = table.factor(n).map(|(p, e)| p.pow(e)).product();
            assert_eq!(product, n);
        }
        assert_eq!(table.factor(18).collect::<Vec<_>>(), vec![(2, 1), (3, 2)]);
    }

    #[test]
    fn spf_rejects_huge_bound() {
        assert!(SpfTable::new(SPF_MAX + 1).unwrap_err().is_overflow());
    }
}
