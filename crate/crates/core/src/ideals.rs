//! Enumeration of the non-zero ideals of bounded norm.
//!
//! Ideals are never materialized: a record carries only the norm and the
//! two prime-factor counts. The walk is a depth-first search over the prime
//! ideal classes sorted by norm; at every class a local exponent pattern is
//! chosen, so each ideal is produced exactly once by unique factorization.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{prime_ideal_classes_up_to, FieldSpec, PrimeIdealClass};

/// Largest norm bound accepted by the enumerator.
pub const MAX_BOUND: u64 = 2_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IdealRecord {
    pub norm: u64,
    /// Prime ideal factors counted with multiplicity.
    pub big_omega: u32,
    /// Distinct prime ideal factors.
    pub small_omega: u32,
}

impl IdealRecord {
    pub const UNIT: IdealRecord = IdealRecord { norm: 1, big_omega: 0, small_omega: 0 };
}

fn check_bound(bound: u64) -> Result<()> {
    if bound == 0 {
        return Err(Error::InvalidInput("norm bound must be at least 1".into()));
    }
    if bound > MAX_BOUND {
        return Err(Error::BoundTooLarge { value: bound, max: MAX_BOUND });
    }
    Ok(())
}

/// The ideals of `field` with norm at most `bound`.
#[derive(Debug, Clone)]
pub struct IdealEnumerator {
    field: FieldSpec,
    bound: u64,
    classes: Vec<PrimeIdealClass>,
}

pub fn enumerate_ideals(field: &FieldSpec, bound: u64) -> Result<IdealEnumerator> {
    check_bound(bound)?;
    Ok(IdealEnumerator { field: *field, bound, classes: prime_ideal_classes_up_to(field, bound) })
}

impl IdealEnumerator {
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn classes(&self) -> &[PrimeIdealClass] {
        &self.classes
    }

    pub fn iter(&self) -> IdealIter<'_> {
        IdealIter::new(&self.classes, self.bound, IdealRecord::UNIT, 0)
    }

    /// Partition of the walk by the exponent pattern chosen at the smallest
    /// prime class. The branches are disjoint and together cover every ideal.
    pub fn branches(&self) -> Vec<IdealIter<'_>> {
        let Some(first) = self.classes.first() else {
            return vec![self.iter()];
        };
        let mut out = vec![IdealIter::new(&self.classes, self.bound, IdealRecord::UNIT, 1)];
        let mut pattern = Pattern::first(first);
        while let Some(local) = pattern.apply(first, IdealRecord::UNIT, self.bound) {
            out.push(IdealIter::new(&self.classes, self.bound, local, 1));
            pattern.advance(first);
        }
        out
    }

    pub fn histogram(&self) -> WeightHistogram {
        let mut hist = WeightHistogram::empty(self.bound);
        self.iter().for_each(|r| hist.add(&r));
        hist
    }

    /// Same result as [`Self::histogram`], computed over the branches in
    /// parallel.
    pub fn histogram_parallel(&self) -> WeightHistogram {
        let bound = self.bound;
        self.branches()
            .into_par_iter()
            .map(|branch| {
                let mut hist = WeightHistogram::empty(bound);
                branch.for_each(|r| hist.add(&r));
                hist
            })
            .reduce(|| WeightHistogram::empty(bound), |a, b| a.merge(&b).expect("same bound"))
    }
}

/// Exponent pattern at one class: total exponent `t` and, for split classes,
/// how much of it sits on the first of the two conjugate prime ideals.
#[derive(Debug, Clone, Copy)]
struct Pattern {
    total: u32,
    first: u32,
    /// `norm^total`
    power: u64,
}

impl Pattern {
    fn first(class: &PrimeIdealClass) -> Self {
        Pattern { total: 1, first: 0, power: class.norm }
    }

    /// The record obtained by multiplying `base` with this local factor, if
    /// its norm stays within `bound`.
    fn apply(&self, class: &PrimeIdealClass, base: IdealRecord, bound: u64) -> Option<IdealRecord> {
        let norm = base.norm.checked_mul(self.power).filter(|&n| n <= bound)?;
        let distinct = if class.g == 2 && self.first > 0 && self.first < self.total { 2 } else { 1 };
        Some(IdealRecord { norm, big_omega: base.big_omega + self.total, small_omega: base.small_omega + distinct })
    }

    fn advance(&mut self, class: &PrimeIdealClass) {
        if class.g == 2 && self.first < self.total {
            self.first += 1;
        } else {
            self.total += 1;
            self.first = 0;
            self.power = self.power.saturating_mul(class.norm);
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Frame {
    base: IdealRecord,
    class: usize,
    pattern: Pattern,
}

/// Streaming depth-first walk. Memory is proportional to the depth of the
/// search, which is at most `log2(bound)`.
#[derive(Debug, Clone)]
pub struct IdealIter<'a> {
    classes: &'a [PrimeIdealClass],
    bound: u64,
    root: Option<IdealRecord>,
    stack: Vec<Frame>,
}

impl<'a> IdealIter<'a> {
    fn new(classes: &'a [PrimeIdealClass], bound: u64, root: IdealRecord, start: usize) -> Self {
        let mut it = IdealIter { classes, bound, root: Some(root), stack: Vec::with_capacity(64) };
        it.push_children(root, start);
        it
    }

    fn push_children(&mut self, base: IdealRecord, class: usize) {
        if let Some(c) = self.classes.get(class) {
            self.stack.push(Frame { base, class, pattern: Pattern::first(c) });
        }
    }
}

impl Iterator for IdealIter<'_> {
    type Item = IdealRecord;

    fn next(&mut self) -> Option<IdealRecord> {
        if let Some(root) = self.root.take() {
            return Some(root);
        }
        loop {
            let frame = self.stack.last_mut()?;
            let class = &self.classes[frame.class];
            match frame.pattern.apply(class, frame.base, self.bound) {
                Some(child) => {
                    frame.pattern.advance(class);
                    let next_class = frame.class + 1;
                    self.push_children(child, next_class);
                    return Some(child);
                }
                None if frame.pattern.total == 1 => {
                    // classes are sorted by norm: nothing further fits
                    self.stack.pop();
                }
                None => {
                    frame.class += 1;
                    match self.classes.get(frame.class) {
                        Some(c) => frame.pattern = Pattern::first(c),
                        None => {
                            self.stack.pop();
                        }
                    }
                }
            }
        }
    }
}

/// `T_N`, the number of ideals of norm at most `bound`.
pub fn count_ideals(field: &FieldSpec, bound: u64) -> Result<u64> {
    Ok(enumerate_ideals(field, bound)?.iter().count() as u64)
}

/// Empirical density of ideals, `T_N / N`, kept as a reduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RhoEstimate {
    pub numerator: u64,
    pub denominator: u64,
}

impl RhoEstimate {
    pub fn new(count: u64, bound: u64) -> Self {
        let g = gcd(count, bound).max(1);
        RhoEstimate { numerator: count / g, denominator: bound / g }
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn estimate_rho(field: &FieldSpec, bound: u64) -> Result<RhoEstimate> {
    Ok(RhoEstimate::new(count_ideals(field, bound)?, bound))
}

/// Level-set counts `N_k(N)` (by `Omega`) and `pi_k(N)` (by `omega`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightHistogram {
    pub bound: u64,
    pub counts_big: Vec<u64>,
    pub counts_small: Vec<u64>,
    pub total: u64,
}

impl WeightHistogram {
    pub fn empty(bound: u64) -> Self {
        WeightHistogram { bound, counts_big: Vec::new(), counts_small: Vec::new(), total: 0 }
    }

    pub fn add(&mut self, record: &IdealRecord) {
        bump(&mut self.counts_big, record.big_omega as usize);
        bump(&mut self.counts_small, record.small_omega as usize);
        self.total += 1;
    }

    /// Commutative, associative combination of two partial histograms.
    pub fn merge(&self, other: &WeightHistogram) -> Result<WeightHistogram> {
        if self.bound != other.bound {
            return Err(Error::InvalidInput(format!(
                "cannot merge histograms for N = {} and N = {}",
                self.bound, other.bound
            )));
        }
        Ok(WeightHistogram {
            bound: self.bound,
            counts_big: add_counts(&self.counts_big, &other.counts_big),
            counts_small: add_counts(&self.counts_small, &other.counts_small),
            total: self.total + other.total,
        })
    }

    pub fn count_big(&self, k: usize) -> u64 {
        self.counts_big.get(k).copied().unwrap_or(0)
    }

    pub fn count_small(&self, k: usize) -> u64 {
        self.counts_small.get(k).copied().unwrap_or(0)
    }
}

fn bump(counts: &mut Vec<u64>, k: usize) {
    if counts.len() <= k {
        counts.resize(k + 1, 0);
    }
    counts[k] += 1;
}

fn add_counts(a: &[u64], b: &[u64]) -> Vec<u64> {
    (0..a.len().max(b.len())).map(|k| a.get(k).unwrap_or(&0) + b.get(k).unwrap_or(&0)).collect()
}

pub fn build_histogram(field: &FieldSpec, bound: u64) -> Result<WeightHistogram> {
    Ok(enumerate_ideals(field, bound)?.histogram_parallel())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn records(field: &FieldSpec, n: u64) -> Vec<IdealRecord> {
        let mut v: Vec<_> = enumerate_ideals(field, n).unwrap().iter().collect();
        v.sort();
        v
    }

    /// `Omega(n)` by trial division.
    fn big_omega_trial(mut n: u64) -> u32 {
        let mut count = 0;
        let mut d = 2;
        while d * d <= n {
            while n.is_multiple_of(d) {
                n /= d;
                count += 1;
            }
            d += 1;
        }
        count + u32::from(n > 1)
    }

    #[test]
    fn gaussian_ten() {
        let got: Vec<(u64, u32)> = records(&FieldSpec::gaussian(), 10).iter().map(|r| (r.norm, r.big_omega)).collect();
        let expected = vec![(1, 0), (2, 1), (4, 2), (5, 1), (5, 1), (8, 3), (9, 1), (10, 2), (10, 2)];
        assert_eq!(got, expected);
    }

    #[test]
    fn rationals_ten() {
        let got = records(&FieldSpec::Rationals, 10);
        assert_eq!(got.len(), 10);
        for (i, r) in got.iter().enumerate() {
            assert_eq!(r.norm, i as u64 + 1);
            assert_eq!(r.big_omega, big_omega_trial(r.norm));
        }
    }

    #[test]
    fn unit_only() {
        let got = records(&FieldSpec::gaussian(), 1);
        assert_eq!(got, vec![IdealRecord::UNIT]);
    }

    #[test]
    fn rationals_match_trial_division() {
        let got = records(&FieldSpec::Rationals, 5_000);
        assert_eq!(got.len(), 5_000);
        for r in got {
            assert_eq!(r.big_omega, big_omega_trial(r.norm), "n = {}", r.norm);
        }
    }

    #[test]
    fn bound_checks() {
        assert!(enumerate_ideals(&FieldSpec::Rationals, 0).is_err());
        let err = enumerate_ideals(&FieldSpec::Rationals, MAX_BOUND + 1).unwrap_err();
        assert!(err.is_overflow());
    }

    #[test]
    fn counts_and_rho() {
        let qi = FieldSpec::gaussian();
        assert_eq!(count_ideals(&qi, 10).unwrap(), 9);
        assert_eq!(count_ideals(&FieldSpec::Rationals, 1234).unwrap(), 1234);
        let rho = estimate_rho(&qi, 10).unwrap();
        assert_eq!((rho.numerator, rho.denominator), (9, 10));
        assert_eq!(rho.value(), 0.9);
        let one = estimate_rho(&FieldSpec::Rationals, 777).unwrap();
        assert_eq!((one.numerator, one.denominator), (1, 1));
    }

    #[test]
    fn histogram_examples() {
        let h = build_histogram(&FieldSpec::gaussian(), 10).unwrap();
        assert_eq!(h.counts_big, vec![1, 4, 3, 1]);
        assert_eq!(h.total, 9);
        let q = build_histogram(&FieldSpec::Rationals, 10).unwrap();
        assert_eq!(q.counts_small, vec![1, 7, 2]);
        for field in [FieldSpec::Rationals, FieldSpec::gaussian()] {
            let h1 = build_histogram(&field, 1).unwrap();
            assert_eq!(h1.counts_big, vec![1]);
            assert_eq!(h1.total, 1);
        }
    }

    #[test]
    fn parallel_matches_serial() {
        for d in [-1i64, -3, 2, -7, 5] {
            let e = enumerate_ideals(&FieldSpec::quadratic(d).unwrap(), 200_000).unwrap();
            let serial = e.histogram();
            assert_eq!(serial, e.histogram_parallel());
            assert_eq!(serial.counts_big.iter().sum::<u64>(), serial.total);
            assert_eq!(serial.counts_small.iter().sum::<u64>(), serial.total);
        }
    }

    #[test]
    fn branches_partition_the_walk() {
        let e = enumerate_ideals(&FieldSpec::quadratic(-7).unwrap(), 20_000).unwrap();
        let mut from_branches: Vec<_> = e.branches().into_iter().flatten().collect();
        let mut whole: Vec<_> = e.iter().collect();
        from_branches.sort();
        whole.sort();
        assert_eq!(from_branches, whole);
    }

    #[test]
    fn merge_rejects_mismatched_bounds() {
        let a = WeightHistogram::empty(10);
        let b = WeightHistogram::empty(11);
        assert!(a.merge(&b).is_err());
    }
}
