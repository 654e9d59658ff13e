//! Command-line configuration and its validation.

use clap::{Args, ValueEnum};
use omega_core::ergodic::{DynamicalSystem, Observable, Point};
use omega_core::field::FieldSpec;
use omega_core::stats::{Polynomial, UnitInterval};
use omega_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObservableKind {
    /// `(-1)^y` on a finite rotation
    Parity,
    /// `cos(2 pi x)` on the circle
    Cosine,
    /// seeded values in [-1, 1] on a finite rotation
    Random,
    /// indicator of [lo, hi) on the circle (uses --interval)
    Interval,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Field: `q`, `q-i`, or `quad:<d>` for squarefree d
    #[arg(long, global = true, default_value = "q-i")]
    pub field: String,

    /// Norm bound N (box side for lattice commands); accepts `1e6`
    #[arg(long, global = true, default_value = "1000000")]
    pub n: String,

    /// Comma-separated, strictly increasing list of N values
    #[arg(long, global = true)]
    pub ladder: Option<String>,

    /// Window multiplier C
    #[arg(long, global = true, default_value_t = 2.0)]
    pub c: f64,

    /// Modulus for residue distributions
    #[arg(long, global = true, default_value_t = 3)]
    pub m: usize,

    /// Polynomial coefficients, constant term first
    #[arg(long, global = true, default_value = "0,1.4142135623730951")]
    pub poly: String,

    /// Interval `lo,hi` inside [0, 1)
    #[arg(long, global = true, default_value = "0,0.5")]
    pub interval: String,

    /// Dynamical system: `rot:<m>` or `circle:<alpha>`
    #[arg(long, global = true, default_value = "rot:16")]
    pub system: String,

    /// Starting point (state index or phase)
    #[arg(long, global = true, default_value = "0")]
    pub x: String,

    /// Observable for `shift-gap --system` and `l2`
    #[arg(long, global = true, value_enum)]
    pub observable: Option<ObservableKind>,

    /// Seed for pseudo-random sets and sequences
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Number of pseudo-random sets or sequences
    #[arg(long, global = true, default_value_t = 20)]
    pub samples: u64,

    /// Dump every ideal record (`count` only)
    #[arg(long, global = true)]
    pub records: bool,

    /// Output format; scalar commands print a bare value when omitted
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the output to a file in this directory instead of stdout
    #[arg(long, global = true, env = "OMEGA_OUT_DIR")]
    pub out_dir: Option<std::path::PathBuf>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Parses a positive integer, allowing `1e6` and `1_000_000`.
pub fn parse_count(raw: &str) -> Result<u64, Error> {
    let cleaned = raw.trim().replace('_', "");
    if let Ok(v) = cleaned.parse::<u64>() {
        return Ok(v);
    }
    if !cleaned.is_empty() && cleaned.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::IntegerOverflow(raw.to_string()));
    }
    let f: f64 = cleaned.parse().map_err(|_| invalid(format!("not an integer: {raw:?}")))?;
    if f.is_finite() && f >= u64::MAX as f64 {
        return Err(Error::IntegerOverflow(raw.to_string()));
    }
    if f.fract() != 0.0 || f < 0.0 {
        return Err(invalid(format!("not a non-negative integer: {raw:?}")));
    }
    Ok(f as u64)
}

fn parse_floats(raw: &str) -> Result<Vec<f64>, Error> {
    raw.split(',').map(|s| s.trim().parse::<f64>().map_err(|_| invalid(format!("not a number: {s:?}")))).collect()
}

impl RunConfig {
    pub fn field(&self) -> Result<FieldSpec, Error> {
        match self.field.trim().to_ascii_lowercase().as_str() {
            "q" => Ok(FieldSpec::Rationals),
            "q-i" => Ok(FieldSpec::gaussian()),
            other => {
                let d = other
                    .strip_prefix("quad:")
                    .and_then(|d| d.parse::<i64>().ok())
                    .ok_or_else(|| invalid(format!("unknown field {:?}; use q, q-i or quad:<d>", self.field)))?;
                FieldSpec::quadratic(d)
            }
        }
    }

    pub fn bound(&self) -> Result<u64, Error> {
        let n = parse_count(&self.n)?;
        if n == 0 {
            return Err(invalid("--n must be at least 1"));
        }
        Ok(n)
    }

    /// The ladder if given, else the single bound.
    pub fn bounds(&self) -> Result<Vec<u64>, Error> {
        match &self.ladder {
            None => Ok(vec![self.bound()?]),
            Some(raw) => {
                let list = raw.split(',').map(parse_count).collect::<Result<Vec<_>, _>>()?;
                if list.is_empty() || list[0] == 0 {
                    return Err(invalid("ladder entries must be at least 1"));
                }
                if list.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid(format!("ladder must be strictly increasing: {raw}")));
                }
                Ok(list)
            }
        }
    }

    pub fn window_c(&self) -> Result<f64, Error> {
        if self.c.is_finite() && self.c > 0.0 {
            Ok(self.c)
        } else {
            Err(invalid(format!("--c must be positive, got {}", self.c)))
        }
    }

    pub fn modulus(&self) -> Result<usize, Error> {
        if self.m == 0 {
            return Err(invalid("--m must be at least 1"));
        }
        Ok(self.m)
    }

    pub fn polynomial(&self) -> Result<Polynomial, Error> {
        Ok(Polynomial::new(parse_floats(&self.poly)?))
    }

    pub fn unit_interval(&self) -> Result<UnitInterval, Error> {
        match parse_floats(&self.interval)?.as_slice() {
            [lo, hi] => UnitInterval::new(*lo, *hi),
            _ => Err(invalid(format!("--interval needs two numbers, got {:?}", self.interval))),
        }
    }

    pub fn system(&self) -> Result<DynamicalSystem, Error> {
        let raw = self.system.trim();
        if let Some(m) = raw.strip_prefix("rot:") {
            return DynamicalSystem::finite_rotation(parse_count(m)?);
        }
        if let Some(alpha) = raw.strip_prefix("circle:") {
            let alpha: f64 = alpha.parse().map_err(|_| invalid(format!("bad rotation angle {alpha:?}")))?;
            return DynamicalSystem::circle_rotation(alpha);
        }
        Err(invalid(format!("unknown system {raw:?}; use rot:<m> or circle:<alpha>")))
    }

    pub fn point(&self, system: &DynamicalSystem) -> Result<Point, Error> {
        let point = match system {
            DynamicalSystem::FiniteRotation { .. } => Point::Site(parse_count(&self.x)?),
            DynamicalSystem::CircleRotation { .. } => {
                Point::Phase(self.x.parse().map_err(|_| invalid(format!("bad phase {:?}", self.x)))?)
            }
        };
        // iterating zero steps validates membership
        system.iterate(point, 0)
    }

    pub fn observable(&self, system: &DynamicalSystem) -> Result<Observable, Error> {
        let kind = self.observable.unwrap_or(match system {
            DynamicalSystem::FiniteRotation { .. } => ObservableKind::Parity,
            DynamicalSystem::CircleRotation { .. } => ObservableKind::Cosine,
        });
        let obs = match (kind, system) {
            (ObservableKind::Parity, DynamicalSystem::FiniteRotation { m }) => Observable::parity(*m),
            (ObservableKind::Random, DynamicalSystem::FiniteRotation { m }) => Observable::random_table(*m, self.seed),
            (ObservableKind::Cosine, _) => Observable::Cosine,
            (ObservableKind::Interval, _) => {
                let i = self.unit_interval()?;
                Observable::Intervals(vec![(i.lo, i.hi)])
            }
            (kind, system) => return Err(Error::Incompatible(format!("{kind:?} on {system:?}"))),
        };
        obs.check(system)?;
        Ok(obs)
    }
}
