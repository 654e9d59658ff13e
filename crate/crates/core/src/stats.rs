//! Weights `w_N(k)`, their Gaussian model, and the statistics derived from
//! them: Hardy-Ramanujan windows and tails, total variation, shift gaps,
//! Erdos-Kac distances and sign/residue/equidistribution sums over ideals.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::ideals::{build_histogram, enumerate_ideals, WeightHistogram};

/// `log log x`, required to be positive.
pub fn log_log(bound: f64) -> Result<f64> {
    let value = if bound > 1.0 { bound.ln().ln() } else { f64::NAN };
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::LogLogNotPositive(bound))
    }
}

/// Gaussian model of `w_N(k)`: mean and variance both `log log N`.
pub fn gaussian_weight(bound: f64, k: f64) -> Result<f64> {
    let mean = log_log(bound)?;
    Ok(gaussian_density(mean, k))
}

fn gaussian_density(mean: f64, k: f64) -> f64 {
    let z = (k - mean) / mean.sqrt();
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI * mean).sqrt()
}

/// Integer points of `[L - C sqrt(L), L + C sqrt(L)]`, `L = log log N`,
/// clipped below at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalWindow {
    pub bound: f64,
    pub c: f64,
    pub lo: i64,
    pub hi: i64,
    pub empty: bool,
}

impl IntervalWindow {
    pub fn contains(&self, k: i64) -> bool {
        !self.empty && self.lo <= k && k <= self.hi
    }

    /// The integers in the window, ascending.
    pub fn ks(&self) -> impl Iterator<Item = usize> {
        let (lo, hi) = if self.empty { (0, -1) } else { (self.lo, self.hi) };
        (lo..=hi).map(|k| k as usize)
    }

    pub fn len(&self) -> usize {
        if self.empty {
            0
        } else {
            (self.hi - self.lo + 1) as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }
}

pub fn window(bound: f64, c: f64) -> Result<IntervalWindow> {
    if !c.is_finite() || c < 0.0 {
        return Err(Error::InvalidInput(format!("window multiplier C must be a non-negative number, got {c}")));
    }
    let mean = log_log(bound)?;
    let half = c * mean.sqrt();
    let lo = ((mean - half).ceil() as i64).max(0);
    let hi = (mean + half).floor() as i64;
    Ok(IntervalWindow { bound, c, lo, hi, empty: hi < lo })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// `Omega_K`, prime ideal factors with multiplicity.
    BigOmega,
    /// `omega_K`, distinct prime ideal factors.
    SmallOmega,
}

/// Normalized level-set weights of one statistic at one bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightProfile {
    pub bound: u64,
    pub total: u64,
    pub statistic: Statistic,
    pub counts: Vec<u64>,
    pub weights: Vec<f64>,
}

impl WeightProfile {
    pub fn from_histogram(hist: &WeightHistogram, statistic: Statistic) -> Self {
        let counts = match statistic {
            Statistic::BigOmega => hist.counts_big.clone(),
            Statistic::SmallOmega => hist.counts_small.clone(),
        };
        let total = hist.total;
        let weights = counts.iter().map(|&c| c as f64 / total as f64).collect();
        WeightProfile { bound: hist.bound, total, statistic, counts, weights }
    }

    /// Profile over an arbitrary weight table. Weights must be non-negative.
    pub fn from_weights(bound: u64, weights: Vec<f64>) -> Self {
        WeightProfile { bound, total: 0, statistic: Statistic::BigOmega, counts: Vec::new(), weights }
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights.get(k).copied().unwrap_or(0.0)
    }

    pub fn gauss(&self, k: usize) -> Result<f64> {
        gaussian_weight(self.bound as f64, k as f64)
    }

    /// One past the largest `k` carrying weight.
    pub fn support_len(&self) -> usize {
        self.weights.len()
    }
}

impl WeightHistogram {
    pub fn profile(&self, statistic: Statistic) -> WeightProfile {
        WeightProfile::from_histogram(self, statistic)
    }
}

/// `sup_{k in I_{N,C}} |w_N(k) / g_N(k) - 1|`.
pub fn approx_error(profile: &WeightProfile, c: f64) -> Result<f64> {
    let win = window(profile.bound as f64, c)?;
    if win.is_empty() {
        return Err(Error::EmptyWindow { bound: profile.bound as f64, c });
    }
    let mut sup = 0.0f64;
    for k in win.ks() {
        let g = profile.gauss(k)?;
        sup = sup.max((profile.weight(k) / g - 1.0).abs());
    }
    Ok(sup)
}

/// Weight outside the window `I_{N,C}`.
pub fn hr_tail_mass(profile: &WeightProfile, c: f64) -> Result<f64> {
    let win = window(profile.bound as f64, c)?;
    Ok(profile.weights.iter().enumerate().filter(|&(k, _)| !win.contains(k as i64)).map(|(_, w)| w).sum())
}

/// Weight inside the window `I_{N,C}`.
pub fn window_mass(profile: &WeightProfile, c: f64) -> Result<f64> {
    let win = window(profile.bound as f64, c)?;
    Ok(win.ks().map(|k| profile.weight(k)).sum())
}

/// `sum_k |w(k+1) - w(k)|` over all integers, with `w = 0` off the support.
pub fn total_variation(profile: &WeightProfile) -> f64 {
    let w = &profile.weights;
    let mut prev = 0.0;
    let mut tv = 0.0;
    for &x in w.iter().chain(std::iter::once(&0.0)) {
        tv += (x - prev).abs();
        prev = x;
    }
    tv
}

/// A bounded sequence `a(0), a(1), ...` given as a finite table together
/// with a declared bound on `|a|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceTable {
    values: Vec<f64>,
    sup_bound: f64,
}

impl SequenceTable {
    pub fn new(values: Vec<f64>, sup_bound: f64) -> Result<Self> {
        let actual = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if values.iter().any(|v| !v.is_finite()) || sup_bound.is_nan() || actual > sup_bound {
            return Err(Error::InvalidInput(format!(
                "table values reach {actual}, above the declared bound {sup_bound}"
            )));
        }
        Ok(SequenceTable { values, sup_bound })
    }

    pub fn get(&self, k: usize) -> Result<f64> {
        self.values.get(k).copied().ok_or(Error::MissingTableEntry(k))
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapReport {
    pub gap: f64,
    pub bound: f64,
}

impl GapReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.gap <= self.bound + tol
    }
}

/// Difference between the averages of `a(c + 1)` and `a(c)` under the
/// weights, with the bound `|a| * TV`.
pub fn shift_gap(profile: &WeightProfile, a: &SequenceTable) -> Result<GapReport> {
    let mut shifted = 0.0;
    let mut plain = 0.0;
    for (k, &w) in profile.weights.iter().enumerate() {
        shifted += w * a.get(k + 1)?;
        plain += w * a.get(k)?;
    }
    Ok(GapReport { gap: (shifted - plain).abs(), bound: a.sup_bound() * total_variation(profile) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErdosKacGap {
    /// Largest distance between the CDF of `(k - L) / sqrt(L)` and the
    /// standard normal CDF over the grid.
    pub ks_gap: f64,
    /// Largest distance between `w_N(k)` and the normal mass of
    /// `[k - 1/2, k + 1/2]` over `k` in `I_{N,1}`.
    pub binned_gap: f64,
}

pub fn erdos_kac_gap(profile: &WeightProfile, grid: &[f64]) -> Result<ErdosKacGap> {
    let mean = log_log(profile.bound as f64)?;
    let sd = mean.sqrt();
    let standard = Normal::new(0.0, 1.0).expect("valid normal");
    let model = Normal::new(mean, sd).expect("positive variance");

    let mut ks_gap = 0.0f64;
    for &gamma in grid {
        let empirical: f64 =
            profile.weights.iter().enumerate().filter(|&(k, _)| (k as f64 - mean) / sd <= gamma).map(|(_, w)| w).sum();
        ks_gap = ks_gap.max((empirical - standard.cdf(gamma)).abs());
    }

    let mut binned_gap = 0.0f64;
    for k in window(profile.bound as f64, 1.0)?.ks() {
        let kf = k as f64;
        let mass = model.cdf(kf + 0.5) - model.cdf(kf - 0.5);
        binned_gap = binned_gap.max((profile.weight(k) - mass).abs());
    }
    Ok(ErdosKacGap { ks_gap, binned_gap })
}

/// Normal mass of `[k - 1/2, k + 1/2]` for the model with mean and variance
/// `log log N`.
pub fn binned_gaussian(bound: f64, k: usize) -> Result<f64> {
    let mean = log_log(bound)?;
    let model = Normal::new(mean, mean.sqrt()).expect("positive variance");
    Ok(model.cdf(k as f64 + 0.5) - model.cdf(k as f64 - 0.5))
}

/// `(1/T_N) sum (-1)^{Omega(a)}`, accumulated directly over the ideals.
pub fn liouville_sum(field: &FieldSpec, bound: u64) -> Result<f64> {
    let mut signed: i64 = 0;
    let mut total: u64 = 0;
    for record in enumerate_ideals(field, bound)?.iter() {
        signed += if record.big_omega % 2 == 0 { 1 } else { -1 };
        total += 1;
    }
    Ok(signed as f64 / total as f64)
}

/// `sum_k (-1)^k w_N(k)`.
pub fn liouville_from_profile(profile: &WeightProfile) -> f64 {
    profile.weights.iter().enumerate().map(|(k, w)| if k % 2 == 0 { *w } else { -*w }).sum()
}

/// Fractions of ideals whose statistic lies in each residue class mod `m`.
pub fn residue_fractions(profile: &WeightProfile, m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::InvalidInput("modulus must be at least 1".into()));
    }
    let mut counts = vec![0u64; m];
    for (k, &c) in profile.counts.iter().enumerate() {
        counts[k % m] += c;
    }
    Ok(counts.iter().map(|&c| c as f64 / profile.total as f64).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidueDistribution {
    pub modulus: usize,
    pub big_omega: Vec<f64>,
    pub small_omega: Vec<f64>,
}

impl ResidueDistribution {
    /// Largest `|fraction - 1/m|` for the `Omega` fractions.
    pub fn max_deviation(&self) -> f64 {
        let target = 1.0 / self.modulus as f64;
        self.big_omega.iter().fold(0.0f64, |m, f| m.max((f - target).abs()))
    }
}

pub fn residue_distribution(field: &FieldSpec, bound: u64, m: usize) -> Result<ResidueDistribution> {
    let hist = build_histogram(field, bound)?;
    residue_distribution_from(&hist, m)
}

pub fn residue_distribution_from(hist: &WeightHistogram, m: usize) -> Result<ResidueDistribution> {
    Ok(ResidueDistribution {
        modulus: m,
        big_omega: residue_fractions(&hist.profile(Statistic::BigOmega), m)?,
        small_omega: residue_fractions(&hist.profile(Statistic::SmallOmega), m)?,
    })
}

/// Real polynomial, coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Polynomial { coeffs }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Half-open sub-interval `[lo, hi)` of `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitInterval {
    pub lo: f64,
    pub hi: f64,
}

impl UnitInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::DegenerateInterval(lo, hi));
        }
        Ok(UnitInterval { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x < self.hi
    }
}

pub fn fractional_part(x: f64) -> f64 {
    let f = x - x.floor();
    // x - floor(x) can round up to 1.0 for tiny negative x
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Fraction of ideals with `{poly(Omega(a))}` in `interval`, counted over the
/// ideals themselves.
pub fn weyl_distribution(field: &FieldSpec, bound: u64, poly: &Polynomial, interval: UnitInterval) -> Result<f64> {
    let mut hits = 0u64;
    let mut total = 0u64;
    for record in enumerate_ideals(field, bound)?.iter() {
        total += 1;
        if interval.contains(fractional_part(poly.eval(record.big_omega as f64))) {
            hits += 1;
        }
    }
    Ok(hits as f64 / total as f64)
}

/// `sum_k w_N(k) 1_I({poly(k)})`.
pub fn weyl_from_profile(profile: &WeightProfile, poly: &Polynomial, interval: UnitInterval) -> f64 {
    profile
        .weights
        .iter()
        .enumerate()
        .filter(|&(k, _)| interval.contains(fractional_part(poly.eval(k as f64))))
        .map(|(_, w)| w)
        .sum()
}

/// One line of the per-profile table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub k: usize,
    pub count_omega: u64,
    pub count_little_omega: u64,
    pub w: f64,
    /// `None` when `log log N <= 0`.
    pub gauss: Option<f64>,
}

pub fn profile_rows(hist: &WeightHistogram) -> Vec<ProfileRow> {
    let len = hist.counts_big.len().max(hist.counts_small.len());
    (0..len)
        .map(|k| ProfileRow {
            k,
            count_omega: hist.count_big(k),
            count_little_omega: hist.count_small(k),
            w: hist.count_big(k) as f64 / hist.total as f64,
            gauss: gaussian_weight(hist.bound as f64, k as f64).ok(),
        })
        .collect()
}
