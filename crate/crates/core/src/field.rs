//! The rationals and quadratic fields, and how rational primes split in them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sieve::{is_prime, primes_up_to};

/// Largest `|d|` accepted for a quadratic field.
pub const MAX_ABS_D: i64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    Rationals,
    /// `Q(sqrt(d))` for squarefree `d`, together with its discriminant.
    Quadratic {
        d: i64,
        discriminant: i64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Rationals,
    Quadratic,
}

impl FieldSpec {
    pub fn new(kind: FieldKind, d: i64) -> Result<Self> {
        match kind {
            FieldKind::Rationals => Ok(FieldSpec::Rationals),
            FieldKind::Quadratic => Self::quadratic(d),
        }
    }

    pub fn rationals() -> Self {
        FieldSpec::Rationals
    }

    pub fn quadratic(d: i64) -> Result<Self> {
        if d == 0 || d == 1 {
            return Err(Error::InvalidField(format!("d = {d} does not define a quadratic field")));
        }
        if d.unsigned_abs() > MAX_ABS_D as u64 {
            return Err(Error::InvalidField(format!("|d| = {} exceeds {MAX_ABS_D}", d.unsigned_abs())));
        }
        if !is_squarefree(d.unsigned_abs()) {
            return Err(Error::InvalidField(format!("d = {d} is not squarefree")));
        }
        let discriminant = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        Ok(FieldSpec::Quadratic { d, discriminant })
    }

    /// `Q(i)`.
    pub fn gaussian() -> Self {
        Self::quadratic(-1).expect("-1 is squarefree")
    }

    pub fn discriminant(&self) -> Option<i64> {
        match *self {
            FieldSpec::Rationals => None,
            FieldSpec::Quadratic { discriminant, .. } => Some(discriminant),
        }
    }

    pub fn d(&self) -> Option<i64> {
        match *self {
            FieldSpec::Rationals => None,
            FieldSpec::Quadratic { d, .. } => Some(d),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            FieldSpec::Rationals => "Q".to_string(),
            FieldSpec::Quadratic { d: -1, .. } => "Q(i)".to_string(),
            FieldSpec::Quadratic { d, .. } => format!("Q(sqrt({d}))"),
        }
    }
}

fn is_squarefree(n: u64) -> bool {
    let mut n = n;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

/// Kronecker symbol `(a/n)` for `n >= 1`.
pub fn kronecker(a: i64, n: u64) -> i8 {
    assert!(n >= 1, "kronecker symbol needs n >= 1");
    let mut n = n;
    let mut result: i8 = 1;
    // (a/2) factors
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
        n >>= twos;
    }
    // now n odd: Jacobi symbol (a mod n / n)
    let mut a = a.rem_euclid(n as i64) as u64;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && matches!(n % 8, 3 | 5) {
            result = -result;
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplittingType {
    Split,
    Inert,
    Ramified,
}

/// The prime ideals of a field lying over one rational prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeIdealClass {
    pub p: u64,
    /// Residue degree.
    pub f: u32,
    /// Number of distinct prime ideals over `p`.
    pub g: u32,
    pub ramified: bool,
    /// Norm of each prime ideal in the class, `p^f`.
    pub norm: u64,
}

impl PrimeIdealClass {
    pub fn splitting(&self) -> SplittingType {
        match (self.ramified, self.f) {
            (true, _) => SplittingType::Ramified,
            (false, 2) => SplittingType::Inert,
            _ => SplittingType::Split,
        }
    }
}

/// How `p` decomposes in `field`. Over the rationals every prime is reported
/// as `Split`; the matching class has `g = 1`.
pub fn splitting_type(field: &FieldSpec, p: u64) -> Result<SplittingType> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(splitting_of_prime(field, p))
}

fn splitting_of_prime(field: &FieldSpec, p: u64) -> SplittingType {
    match field.discriminant() {
        None => SplittingType::Split,
        Some(disc) => match kronecker(disc, p) {
            0 => SplittingType::Ramified,
            1 => SplittingType::Split,
            _ => SplittingType::Inert,
        },
    }
}

fn class_for(field: &FieldSpec, p: u64) -> PrimeIdealClass {
    let (f, g, ramified) = match (field, splitting_of_prime(field, p)) {
        (FieldSpec::Rationals, _) => (1, 1, false),
        (_, SplittingType::Split) => (1, 2, false),
        (_, SplittingType::Inert) => (2, 1, false),
        (_, SplittingType::Ramified) => (1, 1, true),
    };
    PrimeIdealClass { p, f, g, ramified, norm: p.pow(f) }
}

/// Every prime-ideal class whose prime ideals have norm `<= bound`, sorted by
/// norm. Norms of distinct classes are distinct prime powers, so the order is
/// total.
pub fn prime_ideal_classes_up_to(field: &FieldSpec, bound: u64) -> Vec<PrimeIdealClass> {
    let mut classes: Vec<PrimeIdealClass> =
        primes_up_to(bound).into_iter().map(|p| class_for(field, p)).filter(|c| c.norm <= bound).collect();
    classes.sort_unstable_by_key(|c| c.norm);
    classes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre_euler(a: i64, p: u64) -> i8 {
        let a = a.rem_euclid(p as i64) as u64;
        if a == 0 {
            return 0;
        }
        let mut r = 1u64;
        let mut b = a;
        let mut e = (p - 1) / 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        if r == 1 {
            1
        } else {
            -1
        }
    }

    fn brute_disc(d: i64) -> i64 {
        // minimal polynomial of the standard integral generator
        let (b, c) = if d.rem_euclid(4) == 1 { (-1, (1 - d) / 4) } else { (0, -d) };
        b * b - 4 * c
    }

    #[test]
    fn discriminants() {
        assert_eq!(FieldSpec::quadratic(-1).unwrap().discriminant(), Some(-4));
        assert_eq!(brute_disc(-1), -4);
        assert_eq!(FieldSpec::quadratic(-3).unwrap().discriminant(), Some(-3));
        assert_eq!(FieldSpec::quadratic(2).unwrap().discriminant(), Some(8));
        for d in [-7i64, -5, -2, 2, 3, 5, 6, 7, 10, 13, -15, 21] {
            let f = FieldSpec::quadratic(d).unwrap();
            let disc = f.discriminant().unwrap();
            assert_eq!(disc, brute_disc(d));
            assert!(matches!(disc.rem_euclid(4), 0 | 1));
        }
        assert_eq!(FieldSpec::Rationals.discriminant(), None);
    }

    #[test]
    fn rejects_bad_d() {
        assert!(FieldSpec::quadratic(12).is_err());
        assert!(FieldSpec::quadratic(-4).is_err());
        assert!(FieldSpec::quadratic(0).is_err());
        assert!(FieldSpec::quadratic(1).is_err());
        assert!(FieldSpec::new(FieldKind::Quadratic, 18).is_err());
        assert_eq!(FieldSpec::new(FieldKind::Rationals, 12), Ok(FieldSpec::Rationals));
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in primes_up_to(500).into_iter().skip(1) {
            for a in -60i64..60 {
                assert_eq!(kronecker(a, p), legendre_euler(a, p), "({a}/{p})");
            }
        }
    }

    #[test]
    fn kronecker_at_two() {
        for a in -40i64..40 {
            let expected = if a % 2 == 0 {
                0
            } else if matches!(a.rem_euclid(8), 1 | 7) {
                1
            } else {
                -1
            };
            assert_eq!(kronecker(a, 2), expected);
        }
        assert_eq!(kronecker(5, 1), 1);
    }

    #[test]
    fn gaussian_splitting_examples() {
        let qi = FieldSpec::gaussian();
        assert_eq!(splitting_type(&qi, 5), Ok(SplittingType::Split));
        assert_eq!(splitting_type(&qi, 3), Ok(SplittingType::Inert));
        assert_eq!(splitting_type(&qi, 2), Ok(SplittingType::Ramified));
        assert_eq!(splitting_type(&qi, 9), Err(Error::NotPrime(9)));
        assert_eq!(splitting_type(&FieldSpec::Rationals, 7), Ok(SplittingType::Split));
    }

    #[test]
    fn gaussian_splitting_matches_two_squares() {
        let qi = FieldSpec::gaussian();
        for p in primes_up_to(10_000) {
            let two_squares = (0..=p).take_while(|a| a * a <= p).any(|a| {
                let r = p - a * a;
                let b = (r as f64).sqrt().round() as u64;
                b * b == r
            });
            let t = splitting_type(&qi, p).unwrap();
            match p % 4 {
                1 => assert_eq!(t, SplittingType::Split),
                3 => assert_eq!(t, SplittingType::Inert),
                _ => assert_eq!(t, SplittingType::Ramified),
            }
            assert_eq!(two_squares, t != SplittingType::Inert, "p = {p}");
        }
    }

    #[test]
    fn ramified_iff_divides_discriminant() {
        for d in [-1i64, -3, 2, -5, 6, -15, 33] {
            let field = FieldSpec::quadratic(d).unwrap();
            let disc = field.discriminant().unwrap();
            for p in primes_up_to(2_000) {
                let t = splitting_type(&field, p).unwrap();
                assert_eq!(t == SplittingType::Ramified, disc % p as i64 == 0, "d={d} p={p}");
            }
        }
    }

    #[test]
    fn classes_small() {
        let qi = FieldSpec::gaussian();
        let classes = prime_ideal_classes_up_to(&qi, 10);
        let summary: Vec<_> = classes.iter().map(|c| (c.norm, c.splitting(), c.g)).collect();
        assert_eq!(
            summary,
            vec![(2, SplittingType::Ramified, 1), (5, SplittingType::Split, 2), (9, SplittingType::Inert, 1)]
        );
        let q: Vec<_> = prime_ideal_classes_up_to(&FieldSpec::Rationals, 10).iter().map(|c| c.norm).collect();
        assert_eq!(q, vec![2, 3, 5, 7]);
        assert!(prime_ideal_classes_up_to(&qi, 1).is_empty());
    }

    #[test]
    fn class_shape_invariants() {
        for d in [-1i64, -3, 2, -7] {
            let field = FieldSpec::quadratic(d).unwrap();
            for c in prime_ideal_classes_up_to(&field, 5_000) {
                let expected = match c.splitting() {
                    SplittingType::Split => (1, 2),
                    SplittingType::Inert => (2, 1),
                    SplittingType::Ramified => (1, 1),
                };
                assert_eq!((c.f, c.g), expected);
                assert_eq!(c.norm, c.p.pow(c.f));
            }
        }
    }

    #[test]
    fn classes_are_prefix_closed() {
        let field = FieldSpec::quadratic(-3).unwrap();
        let big = prime_ideal_classes_up_to(&field, 20_000);
        for n in [1u64, 2, 3, 4, 100, 4_999, 20_000] {
            let small = prime_ideal_classes_up_to(&field, n);
            assert_eq!(&big[..small.len()], &small[..]);
        }
    }
}
