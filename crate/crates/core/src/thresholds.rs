//! Threshold search over the channel strength and the noiseless fit check.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use crate::error::{QuditError, ThresholdError};
use crate::inequalities::{cglmp, measure_all, noisy_state, zohren_gill, Protocol};
use crate::noise::{IterationPolicy, NoiseKind, NoiseSpec};

pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Number of evenly spaced probes on `[0, 1]` taken before bisecting.
pub const PRESAMPLES: usize = 9;

/// Relative error allowed between the noiseless `I_d` and
/// `2.97·(1 − 1/(10d))`.
pub const FIT_TOLERANCE: f64 = 0.015;

const MAX_BISECTIONS: usize = 200;
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Inequality {
    Cglmp,
    ZohrenGill,
}

impl Inequality {
    /// Positive when the value violates the local bound.
    pub fn violation_margin(self, value: f64) -> f64 {
        match self {
            Inequality::Cglmp => value - 2.0,
            Inequality::ZohrenGill => 1.0 - value,
        }
    }

    pub fn classical_bound(self) -> f64 {
        match self {
            Inequality::Cglmp => 2.0,
            Inequality::ZohrenGill => 1.0,
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Inequality::Cglmp => "cglmp",
            Inequality::ZohrenGill => "zg",
        })
    }
}

impl FromStr for Inequality {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "cglmp" => Ok(Inequality::Cglmp),
            "zg" | "zohren-gill" => Ok(Inequality::ZohrenGill),
            other => Err(format!(
                "unknown inequality '{other}' (expected cglmp or zg)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdQuery {
    pub d: usize,
    pub kind: NoiseKind,
    pub policy: IterationPolicy,
    pub inequality: Inequality,
    pub protocol: Protocol,
    pub tolerance: f64,
}

impl ThresholdQuery {
    pub fn new(d: usize, kind: NoiseKind, policy: IterationPolicy, inequality: Inequality) -> Self {
        Self {
            d,
            kind,
            policy,
            inequality,
            protocol: Protocol::default(),
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn at_dimension(&self, d: usize) -> Self {
        Self { d, ..*self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdResult {
    pub query: ThresholdQuery,
    pub p_min: f64,
    pub converged: bool,
    /// Pipeline evaluations spent, pre-sampling included.
    pub evaluations: usize,
}

/// Value of the query's inequality with the channel at strength `p`.
pub fn bell_value_at(query: &ThresholdQuery, p: f64) -> Result<f64, QuditError> {
    let spec = NoiseSpec::new(query.kind, p, query.policy)?;
    let rho = noisy_state(query.d, &spec, query.protocol.variant)?;
    let tables = measure_all(&rho, &query.protocol)?;
    Ok(match query.inequality {
        Inequality::Cglmp => cglmp(&tables, query.protocol.offset),
        Inequality::ZohrenGill => zohren_gill(&tables),
    })
}

/// Smallest `p` above which the inequality stays violated all the way to
/// `p = 1`.
///
/// The value is probed at [`PRESAMPLES`] evenly spaced points. The crossing
/// is bracketed between the highest non-violating probe and the next one up,
/// the probes from there to `p = 1` must be monotone, and the bracket is then
/// bisected down to the query tolerance.
pub fn find_threshold(query: &ThresholdQuery) -> Result<ThresholdResult, ThresholdError> {
    if query.tolerance.is_nan() || query.tolerance <= 0.0 {
        return Err(ThresholdError::Tolerance(query.tolerance));
    }
    let margin = |p: f64| -> Result<f64, ThresholdError> {
        Ok(query.inequality.violation_margin(bell_value_at(query, p)?))
    };

    let grid: Vec<f64> = (0..PRESAMPLES)
        .map(|i| i as f64 / (PRESAMPLES - 1) as f64)
        .collect();
    let values = grid
        .iter()
        .map(|&p| bell_value_at(query, p))
        .collect::<Result<Vec<_>, _>>()?;
    let samples: Vec<f64> = values
        .iter()
        .map(|&v| query.inequality.violation_margin(v))
        .collect();
    let mut evaluations = PRESAMPLES;

    if samples[PRESAMPLES - 1] <= 0.0 {
        return Err(ThresholdError::NoViolation {
            value: values[PRESAMPLES - 1],
        });
    }
    let lowest = samples
        .iter()
        .rposition(|&m| m <= 0.0)
        .ok_or(ThresholdError::NoCrossing)?;
    for i in lowest..PRESAMPLES - 1 {
        if samples[i + 1] < samples[i] - MONOTONE_SLACK {
            return Err(ThresholdError::NonMonotone { p: grid[i + 1] });
        }
    }

    let (mut lo, mut hi) = (grid[lowest], grid[lowest + 1]);
    let mut converged = false;
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= query.tolerance {
            converged = true;
            break;
        }
        let mid = 0.5 * (lo + hi);
        evaluations += 1;
        if margin(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    Ok(ThresholdResult {
        query: *query,
        p_min: 0.5 * (lo + hi),
        converged,
        evaluations,
    })
}

/// One threshold search per `(d, template)`, in `d`-major order. A failing
/// cell is recorded and the sweep goes on.
pub fn threshold_sweep(
    d_range: RangeInclusive<usize>,
    templates: &[ThresholdQuery],
) -> Vec<(ThresholdQuery, Result<ThresholdResult, ThresholdError>)> {
    d_range
        .flat_map(|d| templates.iter().map(move |t| t.at_dimension(d)))
        .map(|q| (q, find_threshold(&q)))
        .collect()
}

pub fn fit_value(d: usize) -> f64 {
    2.97 * (1.0 - 1.0 / (10.0 * d as f64))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitRow {
    pub d: usize,
    pub computed: f64,
    pub fit: f64,
    pub relative_error: f64,
    pub within_tolerance: bool,
}

/// Noiseless `I_d` against the empirical fit, for the default protocol.
pub fn fit_check(d_range: RangeInclusive<usize>) -> Result<Vec<FitRow>, QuditError> {
    d_range
        .map(|d| {
            let computed =
                crate::run_experiment(d, &NoiseSpec::noiseless(), &Protocol::default())?.i_d;
            let fit = fit_value(d);
            let relative_error = (computed - fit).abs() / fit;
            Ok(FitRow {
                d,
                computed,
                fit,
                relative_error,
                within_tolerance: relative_error <= FIT_TOLERANCE,
            })
        })
        .collect()
}
