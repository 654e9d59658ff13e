//! Prime-factor counts on the Gaussian lattice.
//!
//! For a cell `m + ni` with `s = m^2 + n^2`, a rational prime `q = 3 mod 4`
//! divides `s` to an even power `2a`, and contributes `2a` to `Omega(s)` but
//! only `a` to the Gaussian count (the inert prime `q` itself). Split and
//! ramified primes contribute equally to both.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sieve::{is_prime, SpfTable};

/// Largest box side accepted by [`sieve_box`] and [`quarter_disk`].
pub const MAX_SIDE: u64 = 4000;

/// Landau-Ramanujan constant.
pub const LANDAU_RAMANUJAN: f64 = 0.764_223_653_589_220_7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LatticeCell {
    pub m: u64,
    pub n: u64,
    pub s: u64,
    /// `Omega(m^2 + n^2)` over the integers.
    pub omega_q: u32,
    /// `Omega` of the principal ideal `(m + ni)` in `Z[i]`.
    pub omega_gauss: u32,
    /// Sum of `v_q(s)` over primes `q = 3 mod 4`.
    pub inert_valuation: u32,
    /// No prime `q = 3 mod 4` divides `s`.
    pub in_d: bool,
}

/// Smallest-prime-factor table sized for a set of lattice cells.
#[derive(Debug, Clone)]
pub struct LatticeSieve {
    table: SpfTable,
}

impl LatticeSieve {
    pub fn new(max_norm: u64) -> Result<Self> {
        Ok(LatticeSieve { table: SpfTable::new(max_norm)? })
    }

    pub fn cell(&self, m: u64, n: u64) -> LatticeCell {
        let s = m * m + n * n;
        let mut omega_q = 0;
        let mut inert_valuation = 0;
        for (p, e) in self.table.factor(s) {
            omega_q += e;
            if p % 4 == 3 {
                inert_valuation += e;
            }
        }
        LatticeCell {
            m,
            n,
            s,
            omega_q,
            omega_gauss: omega_q - inert_valuation / 2,
            inert_valuation,
            in_d: inert_valuation == 0,
        }
    }
}

fn side_norm(side: u64, factor: u64) -> Result<u64> {
    if side == 0 {
        return Err(Error::InvalidInput("box side must be at least 1".into()));
    }
    let norm = side
        .checked_mul(side)
        .and_then(|sq| sq.checked_mul(factor))
        .ok_or(Error::BoundTooLarge { value: side, max: MAX_SIDE })?;
    if side > MAX_SIDE {
        return Err(Error::BoundTooLarge { value: side, max: MAX_SIDE });
    }
    Ok(norm)
}

/// The box `1 <= m, n <= N`.
#[derive(Debug, Clone)]
pub struct BoxSieve {
    side: u64,
    sieve: LatticeSieve,
}

pub fn sieve_box(side: u64) -> Result<BoxSieve> {
    let max_norm = side_norm(side, 2)?;
    Ok(BoxSieve { side, sieve: LatticeSieve::new(max_norm)? })
}

impl BoxSieve {
    pub fn side(&self) -> u64 {
        self.side
    }

    pub fn len(&self) -> u64 {
        self.side * self.side
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = LatticeCell> + '_ {
        (1..=self.side).flat_map(move |m| (1..=self.side).map(move |n| self.sieve.cell(m, n)))
    }

    /// Fold every row independently, then combine the row results.
    pub fn fold_rows<T, F, R>(&self, identity: T, fold: F, reduce: R) -> T
    where
        T: Send + Sync + Clone,
        F: Fn(T, &LatticeCell) -> T + Sync,
        R: Fn(T, T) -> T + Sync + Send,
    {
        (1..=self.side)
            .into_par_iter()
            .map(|m| (1..=self.side).fold(identity.clone(), |acc, n| fold(acc, &self.sieve.cell(m, n))))
            .reduce(|| identity.clone(), &reduce)
    }
}

/// `S_N`: cells with `m >= 1`, `n >= 0` and `m^2 + n^2 <= N^2`.
#[derive(Debug, Clone)]
pub struct QuarterDisk {
    radius: u64,
    sieve: LatticeSieve,
}

pub fn quarter_disk(radius: u64) -> Result<QuarterDisk> {
    let max_norm = side_norm(radius, 1)?;
    Ok(QuarterDisk { radius, sieve: LatticeSieve::new(max_norm)? })
}

impl QuarterDisk {
    pub fn radius(&self) -> u64 {
        self.radius
    }

    fn row_len(&self, m: u64) -> u64 {
        let r2 = self.radius * self.radius;
        let rest = r2 - m * m;
        let mut n = (rest as f64).sqrt() as u64;
        while n * n > rest {
            n -= 1;
        }
        while (n + 1) * (n + 1) <= rest {
            n += 1;
        }
        n + 1
    }

    /// `|S_N|`.
    pub fn len(&self) -> u64 {
        (1..=self.radius).map(|m| self.row_len(m)).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cells(&self) -> impl Iterator<Item = LatticeCell> + '_ {
        (1..=self.radius).flat_map(move |m| (0..self.row_len(m)).map(move |n| self.sieve.cell(m, n)))
    }
}

/// Share of the box `[1, N]^2` lying in `D`.
pub fn density_d(side: u64) -> Result<f64> {
    let sieve = sieve_box(side)?;
    let hits = sieve.fold_rows(0u64, |acc, c| acc + u64::from(c.in_d), |a, b| a + b);
    Ok(hits as f64 / sieve.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerProduct {
    pub cutoff: u64,
    /// `prod_{q <= cutoff, q = 3 mod 4} (1 - 1/q^2)`
    pub value: f64,
    /// Value at `cutoff` minus value at `2 * cutoff`.
    pub truncation_bound: f64,
}

fn d_product(primes: &[u64], cutoff: u64) -> f64 {
    primes
        .iter()
        .take_while(|&&q| q <= cutoff)
        .filter(|&&q| q % 4 == 3)
        .map(|&q| 1.0 - 1.0 / (q as f64 * q as f64))
        .product()
}

pub fn euler_product_d(cutoff: u64) -> Result<EulerProduct> {
    if cutoff < 3 {
        return Err(Error::InvalidInput(format!("cutoff must be at least 3, got {cutoff}")));
    }
    let doubled =
        cutoff.checked_mul(2).filter(|&c| c <= 1 << 36).ok_or(Error::BoundTooLarge { value: cutoff, max: 1 << 35 })?;
    let primes = crate::sieve::primes_up_to(doubled);
    let value = d_product(&primes, cutoff);
    Ok(EulerProduct { cutoff, value, truncation_bound: value - d_product(&primes, doubled) })
}

/// `1 / (2 K^2)` for the Landau-Ramanujan constant `K`.
pub fn d_from_landau_ramanujan() -> f64 {
    1.0 / (2.0 * LANDAU_RAMANUJAN * LANDAU_RAMANUJAN)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxDecomposition {
    pub sum_d: f64,
    pub sum_dc: f64,
    pub total: f64,
}

/// Splits `(1/N^2) sum selector(cell)` over the box into the parts on `D`
/// and off `D`.
pub fn box_decomposition<F>(side: u64, selector: F) -> Result<BoxDecomposition>
where
    F: Fn(&LatticeCell) -> f64 + Sync,
{
    let sieve = sieve_box(side)?;
    let sums = sieve.fold_rows(
        Ok((0.0, 0.0, 0.0)),
        |acc: Result<(f64, f64, f64)>, cell| {
            let (d, dc, t) = acc?;
            let v = selector(cell);
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidInput(format!("selector returned {v} outside [0, 1]")));
            }
            Ok(if cell.in_d { (d + v, dc, t + v) } else { (d, dc + v, t + v) })
        },
        |a, b| {
            let (a, b) = (a?, b?);
            Ok((a.0 + b.0, a.1 + b.1, a.2 + b.2))
        },
    )?;
    let area = sieve.len() as f64;
    Ok(BoxDecomposition { sum_d: sums.0 / area, sum_dc: sums.1 / area, total: sums.2 / area })
}

/// Gaussian primes up to a norm bound, one representative per prime ideal:
/// `1 + i`, both `a + bi` and `b + ai` for each `p = a^2 + b^2 = 1 mod 4`
/// with `a > b > 0`, and `q` for each `q = 3 mod 4`.
#[derive(Debug, Clone)]
pub struct GaussianPrimes {
    max_norm: u64,
    /// `(re, im, norm)` sorted by norm.
    primes: Vec<(i64, i64, u64)>,
}

impl GaussianPrimes {
    pub fn up_to(max_norm: u64) -> Self {
        let mut primes = Vec::new();
        for p in (2..=max_norm).filter(|&p| is_prime(p)) {
            match p % 4 {
                2 => primes.push((1, 1, 2)),
                1 => {
                    let (a, b) = two_squares(p);
                    primes.push((a, b, p));
                    primes.push((b, a, p));
                }
                _ => {
                    if p * p <= max_norm {
                        primes.push((p as i64, 0, p * p));
                    }
                }
            }
        }
        primes.sort_by_key(|&(_, _, norm)| norm);
        GaussianPrimes { max_norm, primes }
    }

    /// Number of Gaussian prime factors of `m + ni`, with multiplicity, by
    /// trial division.
    pub fn omega(&self, m: i64, n: i64) -> Result<u32> {
        if m == 0 && n == 0 {
            return Err(Error::InvalidInput("0 has no factorization".into()));
        }
        let norm = (m * m + n * n) as u64;
        if norm > self.max_norm {
            return Err(Error::BoundTooLarge { value: norm, max: self.max_norm });
        }
        let (mut x, mut y) = (m, n);
        let mut rest = norm;
        let mut count = 0;
        for &(a, b, pn) in &self.primes {
            if pn > rest {
                break;
            }
            loop {
                // (x + yi)(a - bi) = (xa + yb) + (ya - xb)i
                let re = x * a + y * b;
                let im = y * a - x * b;
                let pn = pn as i64;
                if re % pn != 0 || im % pn != 0 {
                    break;
                }
                x = re / pn;
                y = im / pn;
                rest /= pn as u64;
                count += 1;
            }
        }
        debug_assert_eq!(rest, 1, "{m} + {n}i not fully factored");
        Ok(count)
    }
}

fn two_squares(p: u64) -> (i64, i64) {
    let mut b = 1u64;
    while 2 * b * b < p {
        let rest = p - b * b;
        let a = (rest as f64).sqrt().round() as u64;
        if a * a == rest {
            return (a as i64, b as i64);
        }
        b += 1;
    }
    unreachable!("{p} = 1 mod 4 is a sum of two squares")
}

/// Largest norm accepted by [`omega_gauss_direct`].
pub const DIRECT_MAX_NORM: u64 = 100_000_000;

/// `Omega` of `(m + ni)` in `Z[i]` by trial division with Gaussian primes.
pub fn omega_gauss_direct(m: i64, n: i64) -> Result<u32> {
    let norm = (m as i128 * m as i128 + n as i128 * n as i128) as u128;
    if norm > DIRECT_MAX_NORM as u128 {
        return Err(Error::BoundTooLarge { value: norm.min(u64::MAX as u128) as u64, max: DIRECT_MAX_NORM });
    }
    GaussianPrimes::up_to(norm as u64).omega(m, n)
}
