//! Acceptance criteria, each checked against an oracle that does not share
//! the code path under test. Used by the `acceptance` test target and by
//! `omega verify`.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ergodic::{
    l2_convergence_check, sandwich_with, scheme_average, AveragingScheme, DynamicalSystem, Observable, Point,
};
use crate::error::Result;
use crate::field::FieldSpec;
use crate::ideals::{build_histogram, count_ideals, enumerate_ideals};
use crate::lattice::{density_d, euler_product_d, sieve_box, GaussianPrimes};
use crate::stats::{
    approx_error, erdos_kac_gap, liouville_sum, residue_distribution, shift_gap, total_variation, SequenceTable,
    Statistic,
};

/// Tolerance for identities that hold exactly up to floating rounding.
pub const EXACT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] AC-{:02} {} ({} ms): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_ms,
            self.detail
        )
    }
}

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    /// Wall-clock limit, if the criterion states one.
    pub limit: Option<Duration>,
    check: fn() -> Result<(bool, String)>,
}

impl Criterion {
    pub fn run(&self) -> CriterionOutcome {
        let start = Instant::now();
        let result = (self.check)();
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = match result {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if let Some(limit) = self.limit {
            if elapsed > limit {
                passed = false;
                detail.push_str(&format!("; runtime {elapsed:?} exceeds {limit:?}"));
            }
        }
        CriterionOutcome { id: self.id, name: self.name, passed, detail, elapsed_ms: elapsed.as_millis() }
    }
}

pub fn criteria() -> Vec<Criterion> {
    let secs = |s| Some(Duration::from_secs(s));
    vec![
        Criterion {
            id: 1,
            name: "ideal counts match divisor sums of the Kronecker character",
            limit: secs(5),
            check: ideal_count_oracle,
        },
        Criterion {
            id: 2,
            name: "ideal density of Q(i) near pi/4",
            limit: secs(10),
            check: gaussian_density_of_ideals,
        },
        Criterion {
            id: 3,
            name: "sign sum over ideals is small and shrinking",
            limit: secs(60),
            check: liouville_decrease,
        },
        Criterion { id: 4, name: "density of D matches the Euler product", limit: secs(60), check: density_of_d },
        Criterion {
            id: 5,
            name: "Gaussian approximation error shrinks on the window",
            limit: secs(120),
            check: approximation_decrease,
        },
        Criterion {
            id: 6,
            name: "total variation of the weights shrinks",
            limit: None,
            check: total_variation_decrease,
        },
        Criterion {
            id: 7,
            name: "shift gap bounded by |a| times total variation",
            limit: None,
            check: shift_gap_bound,
        },
        Criterion { id: 8, name: "sandwich inequalities hold", limit: None, check: sandwich_inequalities },
        Criterion { id: 9, name: "Omega equidistributes mod 3", limit: None, check: residues_mod_three },
        Criterion {
            id: 10,
            name: "Gaussian lattice identity and valuation parity",
            limit: None,
            check: lattice_identity,
        },
        Criterion { id: 11, name: "ideal averages equal weight sums", limit: None, check: two_path_identity },
        Criterion { id: 12, name: "L2 deviation shrinks and equals the sign sum", limit: None, check: l2_witness },
        Criterion { id: 13, name: "binned Erdos-Kac gap shrinks", limit: None, check: erdos_kac_decrease },
    ]
}

pub fn run_all() -> Vec<CriterionOutcome> {
    criteria().iter().map(Criterion::run).collect()
}

/// Kronecker characters of the three test discriminants, in closed form.
fn character(disc: i64, n: u64) -> i64 {
    match disc {
        -4 => match n % 4 {
            1 => 1,
            3 => -1,
            _ => 0,
        },
        -3 => match n % 3 {
            1 => 1,
            2 => -1,
            _ => 0,
        },
        8 => match n % 8 {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        },
        _ => unreachable!("no closed form for discriminant {disc}"),
    }
}

fn ideal_count_oracle() -> Result<(bool, String)> {
    const LIMIT: u64 = 10_000;
    let mut mismatches = Vec::new();
    for d in [-1i64, -3, 2] {
        let field = FieldSpec::quadratic(d)?;
        let disc = field.discriminant().expect("quadratic");
        let mut per_norm = vec![0i64; LIMIT as usize + 1];
        for r in enumerate_ideals(&field, LIMIT)?.iter() {
            per_norm[r.norm as usize] += 1;
        }
        for n in 1..=LIMIT {
            let expected: i64 = (1..=n).filter(|k| n % k == 0).map(|k| character(disc, k)).sum();
            if per_norm[n as usize] != expected {
                mismatches.push(format!("{}: n={n}", field.label()));
            }
        }
    }
    let first = if mismatches.is_empty() {
        String::new()
    } else {
        format!(", first: {:?}", mismatches.iter().take(3).collect::<Vec<_>>())
    };
    Ok((
        mismatches.is_empty(),
        format!("{} mismatches over n <= {LIMIT} for Q(i), Q(sqrt(-3)), Q(sqrt(2)){first}", mismatches.len()),
    ))
}

fn gaussian_density_of_ideals() -> Result<(bool, String)> {
    const N: u64 = 1_000_000;
    let count = count_ideals(&FieldSpec::gaussian(), N)?;
    // generators m + ni with m >= 1, n >= 0 represent each non-zero ideal once
    let lattice: u64 = (1..=1000u64).map(|m| (0..=1000u64).filter(|n| m * m + n * n <= N).count() as u64).sum();
    let ratio = count as f64 / N as f64;
    let dev = (ratio - std::f64::consts::FRAC_PI_4).abs();
    Ok((
        count == lattice && dev <= 2e-3,
        format!("T_N = {count}, lattice count = {lattice}, |T_N/N - pi/4| = {dev:.3e} (tol 2e-3)"),
    ))
}

fn liouville_decrease() -> Result<(bool, String)> {
    let qi = FieldSpec::gaussian();
    let at4 = liouville_sum(&qi, 10_000)?;
    let at6 = liouville_sum(&qi, 1_000_000)?;
    let at7 = liouville_sum(&qi, 10_000_000)?;
    Ok((
        at6.abs() <= 0.01 && at7.abs() < at4.abs(),
        format!("L(1e4) = {at4:.6}, L(1e6) = {at6:.6} (tol 0.01), L(1e7) = {at7:.6}"),
    ))
}

fn density_of_d() -> Result<(bool, String)> {
    let density = density_d(2000)?;
    let product = euler_product_d(1_000_000)?.value;
    let passed = (density - product).abs() <= 0.01 && (0.855..=0.857).contains(&product);
    Ok((passed, format!("density_D(2000) = {density:.6}, product(1e6) = {product:.6} (in [0.855, 0.857]), tol 0.01")))
}

fn qi_profile(n: u64) -> Result<crate::stats::WeightProfile> {
    Ok(build_histogram(&FieldSpec::gaussian(), n)?.profile(Statistic::BigOmega))
}

fn approximation_decrease() -> Result<(bool, String)> {
    let e4 = approx_error(&qi_profile(10_000)?, 1.0)?;
    let e7 = approx_error(&qi_profile(10_000_000)?, 1.0)?;
    Ok((e4.is_finite() && e7.is_finite() && e7 < e4, format!("sup |w/g - 1| on I_(N,1): N=1e4 {e4:.6}, N=1e7 {e7:.6}")))
}

fn total_variation_decrease() -> Result<(bool, String)> {
    let t4 = total_variation(&qi_profile(10_000)?);
    let t7 = total_variation(&qi_profile(10_000_000)?);
    Ok((t7 < t4, format!("TV(1e4) = {t4:.6}, TV(1e7) = {t7:.6}")))
}

fn shift_gap_bound() -> Result<(bool, String)> {
    let profile = qi_profile(1_000_000)?;
    let len = profile.support_len() + 1;
    let mut worst = f64::NEG_INFINITY;
    let mut failures = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sup: f64 = rng.random_range(0.05..=1.0);
        let values = (0..len).map(|_| rng.random_range(-sup..=sup)).collect();
        let report = shift_gap(&profile, &SequenceTable::new(values, sup)?)?;
        worst = worst.max(report.gap - report.bound);
        if !report.holds(EXACT_TOL) {
            failures += 1;
        }
    }
    Ok((failures == 0, format!("100 sequences, {failures} violations, max(gap - bound) = {worst:.3e}")))
}

fn sandwich_inequalities() -> Result<(bool, String)> {
    const N: u64 = 1_000_000;
    let field = FieldSpec::gaussian();
    let system = DynamicalSystem::finite_rotation(16)?;
    let profile = qi_profile(N)?;
    let scheme = AveragingScheme::ideals(field);
    let mut failures = 0;
    for seed in 0..20u64 {
        let a = Observable::random_state_set(16, seed);
        let g = scheme_average(&scheme, &system, &a, Point::Site(0), N)?;
        if !sandwich_with(g, &profile, &a, Point::Site(0), &system, 2.0)?.holds() {
            failures += 1;
        }
    }
    Ok((failures == 0, format!("20 seeded sets on 16 points, {failures} violations")))
}

fn residues_mod_three() -> Result<(bool, String)> {
    let qi = FieldSpec::gaussian();
    let r4 = residue_distribution(&qi, 10_000, 3)?;
    let r7 = residue_distribution(&qi, 10_000_000, 3)?;
    let (d4, d7) = (r4.max_deviation(), r7.max_deviation());
    Ok((
        d7 <= 0.05 && d7 < d4,
        format!("fractions at 1e7 {:.4?}, max |f - 1/3|: 1e4 {d4:.5}, 1e7 {d7:.5} (tol 0.05)", r7.big_omega),
    ))
}

fn lattice_identity() -> Result<(bool, String)> {
    let oracle = GaussianPrimes::up_to(2 * 100 * 100);
    let mut mismatches = 0;
    for cell in sieve_box(100)?.cells() {
        if cell.omega_gauss != oracle.omega(cell.m as i64, cell.n as i64)? {
            mismatches += 1;
        }
    }
    let odd = sieve_box(500)?.cells().filter(|c| c.inert_valuation % 2 != 0).count();
    Ok((
        mismatches == 0 && odd == 0,
        format!("{mismatches} mismatches on [1,100]^2, {odd} odd inert valuations on [1,500]^2"),
    ))
}

fn two_path_identity() -> Result<(bool, String)> {
    const N: u64 = 1_000_000;
    let field = FieldSpec::gaussian();
    let system = DynamicalSystem::finite_rotation(8)?;
    let profile = qi_profile(N)?;
    let scheme = AveragingScheme::ideals(field);
    let mut worst = 0.0f64;
    for seed in 0..10u64 {
        let f = Observable::random_table(8, seed);
        let x = ChaCha8Rng::seed_from_u64(1000 + seed).random_range(0..8u64);
        let direct = scheme_average(&scheme, &system, &f, Point::Site(x), N)?;
        let weighted: f64 =
            profile.weights.iter().enumerate().map(|(k, w)| w * f.evaluate(Point::Site((x + k as u64) % 8))).sum();
        worst = worst.max((direct - weighted).abs());
    }
    Ok((worst <= EXACT_TOL, format!("max |direct - weighted| = {worst:.3e} over 10 pairs (tol 1e-12)")))
}

fn l2_witness() -> Result<(bool, String)> {
    let qi = FieldSpec::gaussian();
    let system = DynamicalSystem::finite_rotation(2)?;
    let scheme = AveragingScheme::ideals(qi);
    let parity = Observable::parity(2);
    let mut values = Vec::new();
    let mut worst = 0.0f64;
    for n in [10_000u64, 10_000_000] {
        let l2 = l2_convergence_check(&system, &scheme, &parity, n)?.value;
        worst = worst.max((l2 - liouville_sum(&qi, n)?.abs()).abs());
        values.push(l2);
    }
    Ok((
        values[1] < values[0] && worst <= EXACT_TOL,
        format!("L2(1e4) = {:.6}, L2(1e7) = {:.6}, max |L2 - |L|| = {worst:.3e}", values[0], values[1]),
    ))
}

fn erdos_kac_decrease() -> Result<(bool, String)> {
    let g4 = erdos_kac_gap(&qi_profile(10_000)?, &[])?.binned_gap;
    let g7 = erdos_kac_gap(&qi_profile(10_000_000)?, &[])?.binned_gap;
    Ok((g7 < g4, format!("binned gap: 1e4 {g4:.6}, 1e7 {g7:.6}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_characters_match_kronecker() {
        for disc in [-4i64, -3, 8] {
            for n in 1..2000u64 {
                assert_eq!(character(disc, n), crate::field::kronecker(disc, n) as i64, "({disc}/{n})");
            }
        }
    }

    #[test]
    fn ids_are_sequential() {
        let ids: Vec<u32> = criteria().iter().map(|c| c.id).collect();
        assert_eq!(ids, (1..=13).collect::<Vec<_>>());
    }
}
