//! One function per subcommand. Each validates its configuration, runs the
//! library operation and packages the result.

use clap::Subcommand;
use omega_core::acceptance::{self, CriterionOutcome};
use omega_core::ergodic::{
    g_operator, l2_convergence_check, sandwich_with, shift_invariance_with, AveragingScheme, DynamicalSystem,
    Observable, SandwichReport,
};
use omega_core::field::FieldSpec;
use omega_core::ideals::{build_histogram, enumerate_ideals, RhoEstimate, WeightHistogram};
use omega_core::lattice::{d_from_landau_ramanujan, density_d, euler_product_d, quarter_disk, sieve_box, EulerProduct};
use omega_core::stats::{
    approx_error, erdos_kac_gap, hr_tail_mass, liouville_from_profile, liouville_sum, log_log, profile_rows,
    residue_distribution_from, shift_gap, total_variation, weyl_distribution, weyl_from_profile, window, window_mass,
    GapReport, IntervalWindow, Polynomial, SequenceTable, Statistic, UnitInterval, WeightProfile,
};
use omega_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{float, Output, Stream, Table};

/// Cutoff for the Euler product reported next to lattice densities.
pub const PRODUCT_CUTOFF: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Number of ideals of norm at most N
    Count,
    /// Level-set counts and weights per k
    Histogram,
    /// Weights, Gaussian model and window membership per k
    Weights,
    /// Distance to the Erdos-Kac normal law
    ErdosKac,
    /// Hardy-Ramanujan window, tail mass and model error
    HardyRamanujan,
    /// Total variation of the weights
    Tv,
    /// Normalized sign sum of (-1)^Omega over ideals
    Liouville,
    /// Distribution of Omega and omega modulo m
    Residues,
    /// Share of ideals with {poly(Omega)} in an interval
    Weyl,
    /// Per-cell table of the box [1, N]^2
    Lattice,
    /// Density of D in the box [1, N]^2
    DensityD,
    /// The quarter disk S_N
    QuarterDisk,
    /// Sandwich inequalities for seeded sets
    Sandwich,
    /// Shift gaps for seeded bounded sequences
    ShiftGap,
    /// L2 deviation of ideal averages from the mean
    L2,
    /// Run every acceptance criterion
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Count => "count",
            Command::Histogram => "histogram",
            Command::Weights => "weights",
            Command::ErdosKac => "erdos-kac",
            Command::HardyRamanujan => "hardy-ramanujan",
            Command::Tv => "tv",
            Command::Liouville => "liouville",
            Command::Residues => "residues",
            Command::Weyl => "weyl",
            Command::Lattice => "lattice",
            Command::DensityD => "density-d",
            Command::QuarterDisk => "quarter-disk",
            Command::Sandwich => "sandwich",
            Command::ShiftGap => "shift-gap",
            Command::L2 => "l2",
            Command::Verify => "verify",
        }
    }

    fn supports_ladder(self) -> bool {
        matches!(
            self,
            Command::Count
                | Command::ErdosKac
                | Command::HardyRamanujan
                | Command::Tv
                | Command::Liouville
                | Command::Residues
                | Command::L2
        )
    }
}

/// Result of a run: rendered output plus whether acceptance failed.
pub struct Outcome {
    pub output: Output,
    pub acceptance_failed: bool,
}

pub fn run(command: Command, config: &RunConfig) -> Result<Outcome> {
    if config.records && command != Command::Count {
        return Err(Error::InvalidInput(format!("{} does not take --records", command.name())));
    }
    if let Some(ladder) = &config.ladder {
        if !command.supports_ladder() || config.records {
            return Err(Error::InvalidInput(format!("{} does not take --ladder ({ladder})", command.name())));
        }
        let output = ladder_run(command, config, &config.bounds()?)?;
        return Ok(Outcome { output, acceptance_failed: false });
    }
    if command == Command::Verify {
        return Ok(verify());
    }
    let output = match command {
        Command::Count => count(config)?,
        Command::Histogram => histogram(config)?,
        Command::Weights => weights(config)?,
        Command::ErdosKac => Output::report(&erdos_kac(config, config.bound()?)?).scalar_from("binned_gap"),
        Command::HardyRamanujan => Output::report(&hardy_ramanujan(config, config.bound()?)?).scalar_from("tail_mass"),
        Command::Tv => Output::report(&tv(config, config.bound()?)?).scalar_from("total_variation"),
        Command::Liouville => Output::report(&liouville(config, config.bound()?)?).scalar_from("value"),
        Command::Residues => residues(config)?,
        Command::Weyl => weyl(config)?,
        Command::Lattice => lattice(config)?,
        Command::DensityD => density(config)?,
        Command::QuarterDisk => disk(config)?,
        Command::Sandwich => sandwich(config)?,
        Command::ShiftGap => shifts(config)?,
        Command::L2 => Output::report(&l2(config, config.bound()?)?).scalar_from("value"),
        Command::Verify => unreachable!("handled above"),
    };
    Ok(Outcome { output, acceptance_failed: false })
}

trait ScalarFrom {
    fn scalar_from(self, key: &str) -> Self;
}

impl ScalarFrom for Output {
    fn scalar_from(self, key: &str) -> Self {
        let value = self.json.get(key).and_then(|v| v.as_f64()).map(float).unwrap_or_default();
        self.with_scalar(value)
    }
}

fn profile(field: &FieldSpec, n: u64) -> Result<(WeightHistogram, WeightProfile)> {
    let hist = build_histogram(field, n)?;
    let p = hist.profile(Statistic::BigOmega);
    Ok((hist, p))
}

#[derive(Serialize)]
struct CountReport {
    field: String,
    n: u64,
    count: u64,
    rho: RhoEstimate,
    rho_value: f64,
}

fn count_report(field: &FieldSpec, n: u64) -> Result<CountReport> {
    let count = enumerate_ideals(field, n)?.iter().count() as u64;
    let rho = RhoEstimate::new(count, n);
    Ok(CountReport { field: field.label(), n, count, rho, rho_value: rho.value() })
}

fn count(config: &RunConfig) -> Result<Output> {
    let field = config.field()?;
    let n = config.bound()?;
    if config.records {
        let report = count_report(&field, n)?;
        return Ok(Output::report(&report).with_stream(Stream::Records(enumerate_ideals(&field, n)?)));
    }
    let report = count_report(&field, n)?;
    Ok(Output::report(&report).with_scalar(report.count))
}

#[derive(Serialize)]
struct HistogramReport {
    field: String,
    n: u64,
    total: u64,
    rows: Vec<omega_core::stats::ProfileRow>,
}

fn histogram(config: &RunConfig) -> Result<Output> {
    let field = config.field()?;
    let n = config.bound()?;
    let hist = build_histogram(&field, n)?;
    let rows = profile_rows(&hist);
    let mut table = Table::new(&["k", "count_omega", "count_little_omega", "w", "gauss"]);
    for r in &rows {
        table.push(vec![
            r.k.to_string(),
            r.count_omega.to_string(),
            r.count_little_omega.to_string(),
            float(r.w),
            r.gauss.map(float).unwrap_or_default(),
        ]);
    }
    let report = HistogramReport { field: field.label(), n, total: hist.total, rows };
    Ok(Output::report(&report).with_table(table))
}

#[derive(Serialize)]
struct WeightRow {
    k: usize,
    w: f64,
    w_little: f64,
    gauss: Option<f64>,
    in_window: bool,
}

#[derive(Serialize)]
struct WeightsReport {
    field: String,
    n: u64,
    c: f64,
    window: IntervalWindow,
    approx_error: Option<f64>,
    tail_mass: f64,
    rows: Vec<WeightRow>,
}

fn weights(config: &RunConfig) -> Result<Output> {
    let field = config.field()?;
    let n = config.bound()?;
    let c = config.window_c()?;
    let (hist, big) = profile(&field, n)?;
    let small = hist.profile(Statistic::SmallOmega);
    let win = window(n as f64, c)?;
    let len = big.support_len().max(small.support_len());
    let rows: Vec<WeightRow> = (0..len)
        .map(|k| WeightRow {
            k,
            w: big.weight(k),
            w_little: small.weight(k),
            gauss: big.gauss(k).ok(),
            in_window: win.contains(k as i64),
        })
        .collect();
    let mut table = Table::new(&["k", "w", "w_little", "gauss", "in_window"]);
    for r in &rows {
        table.push(vec![
            r.k.to_string(),
            float(r.w),
            float(r.w_little),
            r.gauss.map(float).unwrap_or_default(),
            r.in_window.to_string(),
        ]);
    }
    let report = WeightsReport {
        field: field.label(),
        n,
        c,
        window: win,
        approx_error: approx_error(&big, c).ok(),
        tail_mass: hr_tail_mass(&big, c)?,
        rows,
    };
    Ok(Output::report(&report).with_table(table))
}

#[derive(Serialize)]
struct ErdosKacReport {
    field: String,
    n: u64,
    mean: f64,
    ks_gap: f64,
    binned_gap: f64,
    grid: Vec<f64>,
}

/// `-3, -2.75, ..., 3`.
fn default_grid() -> Vec<f64> {
    (-12..=12).map(|i| i as f64 * 0.25).collect()
}

fn erdos_kac(config: &RunConfig, n: u64) -> Result<ErdosKacReport> {
    let field = config.field()?;
    let (_, p) = profile(&field, n)?;
    let grid = default_grid();
    let gap = erdos_kac_gap(&p, &grid)?;
    Ok(ErdosKacReport {
        field: field.label(),
        n,
        mean: log_log(n as f64)?,
        ks_gap: gap.ks_gap,
        binned_gap: gap.binned_gap,
        grid,
    })
}

#[derive(Serialize)]
struct HardyRamanujanReport {
    field: String,
    n: u64,
    c: f64,
    window: IntervalWindow,
    window_mass: f64,
    tail_mass: f64,
    approx_error: Option<f64>,
}

fn hardy_ramanujan(config: &RunConfig, n: u64) -> Result<HardyRamanujanReport> {
    let field = config.field()?;
    let c = config.window_c()?;
    let (_, p) = profile(&field, n)?;
    Ok(HardyRamanujanReport {
        field: field.label(),
        n,
        c,
        window: window(n as f64, c)?,
        window_mass: window_mass(&p, c)?,
        tail_mass: hr_tail_mass(&p, c)?,
        approx_error: approx_error(&p, c).ok(),
    })
}

#[derive(Serialize)]
struct TvReport {
    field: String,
    n: u64,
    total_variation: f64,
}

fn tv(config: &RunConfig, n: u64) -> Result<TvReport> {
    let field = config.field()?;
    let (_, p) = profile(&field, n)?;
    Ok(TvReport { field: field.label(), n, total_variation: total_variation(&p) })
}

#[derive(Serialize)]
struct LiouvilleReport {
    field: String,
    n: u64,
    value: f64,
    via_weights: f64,
}

fn liouville(config: &RunConfig, n: u64) -> Result<LiouvilleReport> {
    let field = config.field()?;
    let (_, p) = profile(&field, n)?;
    Ok(LiouvilleReport {
        field: field.label(),
        n,
        value: liouville_sum(&field, n)?,
        via_weights: liouville_from_profile(&p),
    })
}

#[derive(Serialize)]
struct ResidueReport {
    field: String,
    n: u64,
    m: usize,
    big_omega: Vec<f64>,
    small_omega: Vec<f64>,
    max_deviation: f64,
}

fn residue_report(config: &RunConfig, n: u64) -> Result<ResidueReport> {
    let field = config.field()?;
    let m = config.modulus()?;
    let dist = residue_distribution_from(&build_histogram(&field, n)?, m)?;
    Ok(ResidueReport {
        field: field.label(),
        n,
        m,
        max_deviation: dist.max_deviation(),
        big_omega: dist.big_omega,
        small_omega: dist.small_omega,
    })
}

fn residues(config: &RunConfig) -> Result<Output> {
    let report = residue_report(config, config.bound()?)?;
    let mut table = Table::new(&["residue", "big_omega", "small_omega"]);
    for (l, (b, s)) in report.big_omega.iter().zip(&report.small_omega).enumerate() {
        table.push(vec![l.to_string(), float(*b), float(*s)]);
    }
    Ok(Output::report(&report).with_table(table))
}

#[derive(Serialize)]
struct WeylReport {
    field: String,
    n: u64,
    poly: Polynomial,
    interval: UnitInterval,
    fraction: f64,
    via_weights: f64,
}

fn weyl(config: &RunConfig) -> Result<Output> {
    let field = config.field()?;
    let n = config.bound()?;
    let poly = config.polynomial()?;
    let interval = config.unit_interval()?;
    let (_, p) = profile(&field, n)?;
    let report = WeylReport {
        field: field.label(),
        n,
        fraction: weyl_distribution(&field, n, &poly, interval)?,
        via_weights: weyl_from_profile(&p, &poly, interval),
        poly,
        interval,
    };
    Ok(Output::report(&report).scalar_from("fraction"))
}

#[derive(Serialize)]
struct DensityReport {
    n: u64,
    density: f64,
    euler_product: EulerProduct,
    landau_ramanujan_d: f64,
}

fn density_report(n: u64) -> Result<DensityReport> {
    Ok(DensityReport {
        n,
        density: density_d(n)?,
        euler_product: euler_product_d(PRODUCT_CUTOFF)?,
        landau_ramanujan_d: d_from_landau_ramanujan(),
    })
}

fn lattice(config: &RunConfig) -> Result<Output> {
    let n = config.bound()?;
    let cells = sieve_box(n)?;
    Ok(Output::report(&density_report(n)?).with_stream(Stream::BoxCells(cells)))
}

fn density(config: &RunConfig) -> Result<Output> {
    Ok(Output::report(&density_report(config.bound()?)?).scalar_from("density"))
}

#[derive(Serialize)]
struct DiskReport {
    n: u64,
    size: u64,
    ratio: f64,
    pi_over_4: f64,
}

fn disk(config: &RunConfig) -> Result<Output> {
    let n = config.bound()?;
    let disk = quarter_disk(n)?;
    let size = disk.len();
    let report = DiskReport { n, size, ratio: size as f64 / (n * n) as f64, pi_over_4: std::f64::consts::FRAC_PI_4 };
    Ok(Output::report(&report).with_scalar(size).with_stream(Stream::DiskCells(disk)))
}

/// Union of three seeded intervals in `[0, 1)`.
fn random_intervals(seed: u64) -> Observable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cuts: Vec<f64> = (0..6).map(|_| rng.random_range(0.0..1.0)).collect();
    cuts.sort_by(f64::total_cmp);
    Observable::Intervals(cuts.chunks(2).map(|c| (c[0], c[1])).collect())
}

fn random_set(system: &DynamicalSystem, seed: u64) -> Observable {
    match *system {
        DynamicalSystem::FiniteRotation { m } => Observable::random_state_set(m, seed),
        DynamicalSystem::CircleRotation { .. } => random_intervals(seed),
    }
}

#[derive(Serialize)]
struct SandwichCheck {
    index: u64,
    seed: u64,
    set: Observable,
    report: SandwichReport,
    holds: bool,
}

#[derive(Serialize)]
struct SandwichRun {
    field: String,
    n: u64,
    c: f64,
    system: DynamicalSystem,
    x: omega_core::ergodic::Point,
    seed: u64,
    checks: Vec<SandwichCheck>,
    all_hold: bool,
}

fn sandwich(config: &RunConfig) -> Result<Output> {
    let field = config.field()?;
    let n = config.bound()?;
    let c = config.window_c()?;
    let system = config.system()?;
    let x = config.point(&system)?;
    let (_, p) = profile(&field, n)?;
    let mut checks = Vec::new();
    let mut table = Table::new(&[
        "index",
        "seed",
        "g_value",
        "window_sum",
        "tail_mass",
        "t_value",
        "model_error",
        "tail_inequality",
        "model_inequality",
    ]);
    for index in 0..config.samples {
        let seed = config.seed.wrapping_add(index);
        let set = random_set(&system, seed);
        let g = g_operator(&field, &set, x, &system, n)?;
        let report = sandwich_with(g, &p, &set, x, &system, c)?;
        table.push(vec![
            index.to_string(),
            seed.to_string(),
            float(report.g_value),
            float(report.window_sum),
            float(report.tail_mass),
            float(report.t_value),
            float(report.model_error),
            report.tail_inequality.to_string(),
            report.model_inequality.to_string(),
        ]);
        checks.push(SandwichCheck { index, seed, set, holds: report.holds(), report });
    }
    let all_hold = checks.iter().all(|c| c.holds);
    let run = SandwichRun { field: field.label(), n, c, system, x, seed: config.seed, checks, all_hold };
    Ok(Output::report(&run).with_table(table))
}

#[derive(Serialize)]
struct ShiftCheck {
    index: u64,
    seed: u64,
    sup_bound: f64,
    gap: f64,
    bound: f64,
    holds: bool,
}

#[derive(Serialize)]
struct ShiftRun {
    field: String,
    n: u64,
    seed: u64,
    total_variation: f64,
    checks: Vec<ShiftCheck>,
    system: DynamicalSystem,
    observable: Observable,
    observable_check: GapReport,
    all_hold: bool,
}

pub const GAP_TOLERANCE: f64 = 1e-12;

fn shifts(config: &RunConfig) -> Result<Output> {
    let field = config.field()?;
    let n = config.bound()?;
    let system = config.system()?;
    let x = config.point(&system)?;
    let observable = config.observable(&system)?;
    let (_, p) = profile(&field, n)?;
    let len = p.support_len() + 1;
    let mut checks = Vec::new();
    let mut table = Table::new(&["index", "seed", "sup_bound", "gap", "bound", "holds"]);
    for index in 0..config.samples {
        let seed = config.seed.wrapping_add(index);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sup: f64 = rng.random_range(0.05..=1.0);
        let values = (0..len).map(|_| rng.random_range(-sup..=sup)).collect();
        let r = shift_gap(&p, &SequenceTable::new(values, sup)?)?;
        table.push(vec![
            index.to_string(),
            seed.to_string(),
            float(sup),
            float(r.gap),
            float(r.bound),
            r.holds(GAP_TOLERANCE).to_string(),
        ]);
        checks.push(ShiftCheck {
            index,
            seed,
            sup_bound: sup,
            gap: r.gap,
            bound: r.bound,
            holds: r.holds(GAP_TOLERANCE),
        });
    }
    let observable_check = shift_invariance_with(&p, &system, &observable, x)?;
    let all_hold = checks.iter().all(|c| c.holds) && observable_check.holds(GAP_TOLERANCE);
    let run = ShiftRun {
        field: field.label(),
        n,
        seed: config.seed,
        total_variation: total_variation(&p),
        checks,
        system,
        observable,
        observable_check,
        all_hold,
    };
    Ok(Output::report(&run).with_table(table))
}

#[derive(Serialize)]
struct L2Run {
    field: String,
    n: u64,
    system: DynamicalSystem,
    observable: Observable,
    value: f64,
    exact: bool,
}

fn l2(config: &RunConfig, n: u64) -> Result<L2Run> {
    let field = config.field()?;
    let system = config.system()?;
    let observable = config.observable(&system)?;
    let report = l2_convergence_check(&system, &AveragingScheme::ideals(field), &observable, n)?;
    Ok(L2Run { field: field.label(), n, system, observable, value: report.value, exact: report.exact })
}

#[derive(Serialize)]
struct LadderRow {
    n: u64,
    value: f64,
    decreased: Option<bool>,
}

#[derive(Serialize)]
struct LadderReport {
    command: &'static str,
    statistic: &'static str,
    field: String,
    rows: Vec<LadderRow>,
    strictly_decreasing: bool,
}

/// The same statistic at every N of the ladder, with the decrease table.
fn ladder_run(command: Command, config: &RunConfig, bounds: &[u64]) -> Result<Output> {
    let field = config.field()?;
    let (statistic, values): (&'static str, Vec<f64>) = match command {
        Command::Count => ("rho_value", collect(bounds, |n| Ok(count_report(&field, n)?.rho_value))?),
        Command::ErdosKac => ("binned_gap", collect(bounds, |n| Ok(erdos_kac(config, n)?.binned_gap))?),
        Command::HardyRamanujan => (
            "approx_error",
            collect(bounds, |n| {
                let r = hardy_ramanujan(config, n)?;
                r.approx_error.ok_or(Error::EmptyWindow { bound: n as f64, c: r.c })
            })?,
        ),
        Command::Tv => ("total_variation", collect(bounds, |n| Ok(tv(config, n)?.total_variation))?),
        Command::Liouville => ("abs_value", collect(bounds, |n| Ok(liouville(config, n)?.value.abs()))?),
        Command::Residues => ("max_deviation", collect(bounds, |n| Ok(residue_report(config, n)?.max_deviation))?),
        Command::L2 => ("value", collect(bounds, |n| Ok(l2(config, n)?.value))?),
        other => return Err(Error::InvalidInput(format!("{} does not take --ladder", other.name()))),
    };
    let rows: Vec<LadderRow> = bounds
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(i, (&n, &value))| LadderRow { n, value, decreased: (i > 0).then(|| value < values[i - 1]) })
        .collect();
    let strictly_decreasing = rows.iter().all(|r| r.decreased != Some(false));
    let mut table = Table::new(&["n", statistic, "decreased"]);
    for r in &rows {
        table.push(vec![r.n.to_string(), float(r.value), r.decreased.map(|d| d.to_string()).unwrap_or_default()]);
    }
    let report = LadderReport { command: command.name(), statistic, field: field.label(), rows, strictly_decreasing };
    Ok(Output::report(&report).with_table(table))
}

fn collect(bounds: &[u64], f: impl Fn(u64) -> Result<f64>) -> Result<Vec<f64>> {
    bounds.iter().map(|&n| f(n)).collect()
}

#[derive(Serialize)]
struct VerifyReport {
    criteria: Vec<CriterionOutcome>,
    passed: usize,
    failed: usize,
}

fn verify() -> Outcome {
    let outcomes = acceptance::run_all();
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let lines: Vec<String> = outcomes.iter().map(CriterionOutcome::line).collect();
    let mut table = Table::new(&["id", "name", "passed", "elapsed_ms", "detail"]);
    for o in &outcomes {
        table.push(vec![
            o.id.to_string(),
            o.name.to_string(),
            o.passed.to_string(),
            o.elapsed_ms.to_string(),
            o.detail.clone(),
        ]);
    }
    let report = VerifyReport { passed: outcomes.len() - failed, failed, criteria: outcomes };
    Outcome {
        output: Output::report(&report).with_scalar(lines.join("\n")).with_table(table),
        acceptance_failed: failed > 0,
    }
}
