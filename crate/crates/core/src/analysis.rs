//! Growth classification: is a complexity-vs-time series linear,
//! logarithmic, or bounded?
//!
//! The dichotomy this module measures: along a branching path complexity
//! grows like a constant plus r·n, while a deterministic aperiodic chain
//! grows like a constant plus the number of binary digits of n, and a
//! finite-state system stays bounded. "For all n large enough" is
//! operationalized as a tail window, and "negligible exceptions" as an
//! exception density over the whole prefix — finite data cannot witness an
//! asymptotic quantifier, so both knobs are explicit parameters with pinned
//! defaults.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::complexity::complexity_profile;
use crate::machine::DescriptionMachine;
use crate::multiway::{evolve_path, random_choices};
use crate::rule::RuleSystem;

/// Fraction of the series treated as "n large enough" for typicality.
pub const DEFAULT_TAIL_FRACTION: f64 = 0.5;
/// Relative slope tolerance (±10%) around the nominal r bits/step.
pub const DEFAULT_SLOPE_TOLERANCE: f64 = 0.10;
/// A point is an exception when it misses the fit by more than this many bits.
pub const DEFAULT_EXCEPTION_TOLERANCE_BITS: f64 = 2.0;
/// Largest exception fraction still accepted as "negligible".
pub const DEFAULT_EXCEPTION_DENSITY_MAX: f64 = 0.10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FitError {
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { got: usize, need: usize },
    #[error("regressor is constant; no line is identifiable")]
    DegenerateAbscissa,
    #[error("logarithmic fit requires every index to be at least 1")]
    IndexZero,
}

/// Ordinary least-squares result.
#[derive(Clone, Copy, Debug)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination, clamped to [0, 1]; 1 for a constant
    /// series fitted exactly.
    pub goodness: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthModel {
    Linear,
    Logarithmic,
    Bounded,
}

impl GrowthModel {
    pub fn as_str(self) -> &'static str {
        match self {
            GrowthModel::Linear => "linear",
            GrowthModel::Logarithmic => "logarithmic",
            GrowthModel::Bounded => "bounded",
        }
    }
}

/// A classified series: the winning model, its parameters, and how often the
/// data escapes the fit.
#[derive(Clone, Copy, Debug)]
pub struct GrowthFit {
    pub model: GrowthModel,
    pub slope: f64,
    pub intercept: f64,
    pub goodness: f64,
    pub exception_density: f64,
}

impl GrowthFit {
    pub fn csv_header() -> &'static str {
        "model,slope,intercept,goodness,exception_density"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{:.6},{:.6},{:.6},{:.6}",
            self.model.as_str(),
            self.slope,
            self.intercept,
            self.goodness,
            self.exception_density
        )
    }

    /// Model prediction at index n.
    pub fn predict(&self, n: u64) -> f64 {
        match self.model {
            GrowthModel::Linear => self.slope * n as f64 + self.intercept,
            GrowthModel::Logarithmic => self.slope * digit_count(n) as f64 + self.intercept,
            GrowthModel::Bounded => self.intercept,
        }
    }
}

impl std::fmt::Display for GrowthFit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: slope {:.4}, intercept {:.4}, goodness {:.4}, exceptions {:.4}",
            self.model.as_str(),
            self.slope,
            self.intercept,
            self.goodness,
            self.exception_density
        )
    }
}

/// Number of binary digits of n (the log regressor): ⌈log₂(n+1)⌉.
pub fn digit_count(n: u64) -> u64 {
    64 - n.leading_zeros() as u64
}

fn least_squares(points: &[(f64, f64)]) -> Result<Fit, FitError> {
    if points.len() < 3 {
        return Err(FitError::TooFewPoints {
            got: points.len(),
            need: 3,
        });
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(FitError::DegenerateAbscissa);
    }
    let sxy: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = points.iter().map(|(_, y)| (y - mean_y).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let goodness = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(Fit {
        slope,
        intercept,
        goodness,
    })
}

/// Least squares of value against n.
pub fn fit_linear(series: &[(u64, f64)]) -> Result<Fit, FitError> {
    let points: Vec<(f64, f64)> = series.iter().map(|&(n, v)| (n as f64, v)).collect();
    least_squares(&points)
}

/// Least squares of value against the binary digit count of n.
pub fn fit_log(series: &[(u64, f64)]) -> Result<Fit, FitError> {
    if series.iter().any(|&(n, _)| n == 0) {
        return Err(FitError::IndexZero);
    }
    let points: Vec<(f64, f64)> = series
        .iter()
        .map(|&(n, v)| (digit_count(n) as f64, v))
        .collect();
    least_squares(&points)
}

/// Fraction of indices m ≤ n whose value misses the fit's prediction by more
/// than `tolerance`. Entries with index > n are ignored.
pub fn exception_density(series: &[(u64, f64)], fit: &GrowthFit, tolerance: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let exceptions = series
        .iter()
        .filter(|&&(m, v)| m <= n && (v - fit.predict(m)).abs() > tolerance)
        .count();
    exceptions as f64 / n as f64
}

/// Picks bounded / linear / logarithmic for a series of at least 16 points.
///
/// Bounded fires when the maximum value is attained at least twice in the
/// last half **and** was already attained in the first half — the second
/// clause keeps slowly-growing series (whose fresh maximum sits at the end)
/// out of the bounded bucket. Otherwise the better of the linear and log
/// fits by goodness wins. The returned exception density is measured at
/// `tolerance` over the whole series.
pub fn classify_growth(series: &[(u64, f64)], tolerance: f64) -> Result<GrowthFit, FitError> {
    if series.len() < 16 {
        return Err(FitError::TooFewPoints {
            got: series.len(),
            need: 16,
        });
    }
    let max = series
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let (first, last) = series.split_at(series.len() / 2);
    let in_last = last.iter().filter(|&&(_, v)| v == max).count();
    let in_first = first.iter().any(|&(_, v)| v == max);
    let max_n = series.iter().map(|&(n, _)| n).max().expect("nonempty");

    if in_last >= 2 && in_first {
        let mean = series.iter().map(|&(_, v)| v).sum::<f64>() / series.len() as f64;
        let mut fit = GrowthFit {
            model: GrowthModel::Bounded,
            slope: 0.0,
            intercept: mean,
            goodness: 1.0,
            exception_density: 0.0,
        };
        fit.exception_density = exception_density(series, &fit, tolerance, max_n);
        return Ok(fit);
    }

    let linear = fit_linear(series)?;
    let log = fit_log(series)?;
    let (model, chosen) = if log.goodness > linear.goodness {
        (GrowthModel::Logarithmic, log)
    } else {
        (GrowthModel::Linear, linear)
    };
    let mut fit = GrowthFit {
        model,
        slope: chosen.slope,
        intercept: chosen.intercept,
        goodness: chosen.goodness,
        exception_density: 0.0,
    };
    fit.exception_density = exception_density(series, &fit, tolerance, max_n);
    Ok(fit)
}

/// Knobs for [`typicality_test`]; the defaults match the module constants.
#[derive(Clone, Copy, Debug)]
pub struct TypicalityParams {
    pub tail_fraction: f64,
    pub slope_tolerance: f64,
    pub exception_tolerance: f64,
    pub max_exception_density: f64,
}

impl Default for TypicalityParams {
    fn default() -> Self {
        TypicalityParams {
            tail_fraction: DEFAULT_TAIL_FRACTION,
            slope_tolerance: DEFAULT_SLOPE_TOLERANCE,
            exception_tolerance: DEFAULT_EXCEPTION_TOLERANCE_BITS,
            max_exception_density: DEFAULT_EXCEPTION_DENSITY_MAX,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TypicalityVerdict {
    pub typical: bool,
    pub fit: GrowthFit,
}

/// Is this complexity profile the experience of a typical observer?
///
/// For r ≥ 1: fit a line over the tail window; typical means the slope lands
/// within `slope_tolerance` of r bits per step and the exception density of
/// that line over the whole series stays below the threshold. For r = 0 the
/// nominal growth "constant plus 0·n" degenerates to boundedness, so the
/// bounded classification decides (a periodic chain is typical, a growing
/// one is not). Requires at least 32 points.
pub fn typicality_test(
    series: &[(u64, f64)],
    r: u32,
    params: &TypicalityParams,
) -> Result<TypicalityVerdict, FitError> {
    if series.len() < 32 {
        return Err(FitError::TooFewPoints {
            got: series.len(),
            need: 32,
        });
    }

    if r == 0 {
        let fit = classify_growth(series, params.exception_tolerance)?;
        let typical = fit.model == GrowthModel::Bounded
            && fit.exception_density <= params.max_exception_density;
        return Ok(TypicalityVerdict { typical, fit });
    }

    let tail_len =
        ((series.len() as f64 * params.tail_fraction).ceil() as usize).clamp(3, series.len());
    let tail = &series[series.len() - tail_len..];
    let line = fit_linear(tail)?;
    let mut fit = GrowthFit {
        model: GrowthModel::Linear,
        slope: line.slope,
        intercept: line.intercept,
        goodness: line.goodness,
        exception_density: 0.0,
    };
    let max_n = series.iter().map(|&(n, _)| n).max().expect("nonempty");
    fit.exception_density = exception_density(series, &fit, params.exception_tolerance, max_n);

    let nominal = r as f64;
    let slope_ok = (fit.slope - nominal).abs() <= params.slope_tolerance * nominal;
    let density_ok = fit.exception_density <= params.max_exception_density;
    Ok(TypicalityVerdict {
        typical: slope_ok && density_ok,
        fit,
    })
}

/// Outcome of sampling paths for typical observers. Absence of a typical
/// path among the sampled seeds is evidence of degeneracy, not proof.
#[derive(Clone, Debug)]
pub enum ProbeOutcome {
    EvidenceTypicalFound {
        seed: u64,
        fit: GrowthFit,
        /// True when the path's growth is robustly linear but its slope sits
        /// outside the nominal r window — a model whose labels gain more (or
        /// fewer) bits per step than its branching alone accounts for.
        off_nominal: bool,
    },
    NoTypicalFound,
}

/// Samples one random path per seed (depth steps each) and reports the first
/// whose complexity profile is typical — or, failing the nominal slope
/// window, the first whose profile is still robustly linear (flagged
/// `off_nominal`). Deterministic in (seeds, machine, budget). Requires
/// r ≥ 1: degeneracy is a question about branching models.
pub fn degeneracy_probe<M>(
    rule: &RuleSystem,
    machine: &M,
    budget: u64,
    seeds: &[u64],
    depth: usize,
    params: &TypicalityParams,
) -> Result<ProbeOutcome, FitError>
where
    M: DescriptionMachine + ?Sized,
{
    let r = rule.arity_exponent();
    assert!(r >= 1, "degeneracy probe needs a branching rule (r >= 1)");

    let mut off_nominal_hit: Option<(u64, GrowthFit)> = None;

    for &seed in seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let choices = random_choices(&mut rng, rule.arity(), depth);
        let experience = evolve_path(rule, crate::label::Label::from(1), &choices)
            .expect("affine and in-domain table rules evolve without error");
        let profile = complexity_profile(machine, &experience, budget);
        let series: Vec<(u64, f64)> = profile
            .iter()
            .filter_map(|row| row.value.map(|v| (row.n, v.bits as f64)))
            .collect();

        let verdict = typicality_test(&series, r, params)?;
        if verdict.typical {
            return Ok(ProbeOutcome::EvidenceTypicalFound {
                seed,
                fit: verdict.fit,
                off_nominal: false,
            });
        }

        if off_nominal_hit.is_none() {
            let classified = classify_growth(&series, params.exception_tolerance)?;
            if classified.model == GrowthModel::Linear
                && classified.goodness >= 0.9
                && classified.exception_density <= params.max_exception_density
            {
                off_nominal_hit = Some((seed, classified));
            }
        }
    }

    Ok(match off_nominal_hit {
        Some((seed, fit)) => ProbeOutcome::EvidenceTypicalFound {
            seed,
            fit,
            off_nominal: true,
        },
        None => ProbeOutcome::NoTypicalFound,
    })
}
