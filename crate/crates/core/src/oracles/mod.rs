//! Independent numerical estimates of the analytic quantities.
//!
//! Nothing in this module calls a closed-form CDF: probabilities come from
//! integrating the density, counting samples, or scanning a grid of the
//! objective.

pub mod quadrature;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::curves::{g_raw, Kappa};
use crate::distributions::{DistParams, FamilyId};
use crate::error::{Error, Result};

pub use quadrature::{integrate, QuadResult};

/// Error bound requested from the integrator.
pub const QUAD_TARGET_TOL: f64 = 1e-12;
/// Largest error bound accepted from [`quadrature_prob`].
pub const QUAD_ACCEPT_TOL: f64 = 1e-10;
const QUAD_MAX_INTERVALS: usize = 4000;
/// Tail truncation: integrate only where pdf ≥ this fraction of its peak.
const TAIL_CUTOFF: f64 = 1e-16;
/// Smallest point count `grid_min` accepts.
pub const MIN_GRID_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    Quadrature,
    MonteCarlo,
    GridMin,
    /// Direct evaluation against a closed-form limit or constant.
    Exact,
}

impl fmt::Display for OracleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleMethod::Quadrature => "quadrature",
            OracleMethod::MonteCarlo => "monte_carlo",
            OracleMethod::GridMin => "grid_min",
            OracleMethod::Exact => "exact",
        })
    }
}

/// One analytic value checked against an independent estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub label: String,
    pub analytic: f64,
    pub estimate: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub method: OracleMethod,
    pub detail: String,
}

impl OracleReport {
    /// `passed` is derived: `|analytic − estimate| ≤ tolerance`.
    pub fn new(
        label: impl Into<String>,
        analytic: f64,
        estimate: f64,
        tolerance: f64,
        method: OracleMethod,
        detail: impl Into<String>,
    ) -> Self {
        OracleReport {
            label: label.into(),
            analytic,
            estimate,
            tolerance,
            passed: (analytic - estimate).abs() <= tolerance,
            method,
            detail: detail.into(),
        }
    }

    pub fn deviation(&self) -> f64 {
        (self.analytic - self.estimate).abs()
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} ({}): analytic={} estimate={} |diff|={:.3e} tol={:.1e} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.label,
            self.method,
            self.analytic,
            self.estimate,
            self.deviation(),
            self.tolerance,
            self.detail
        )
    }
}

/// `P(X ≤ κ·E[X])` by adaptive quadrature of the density.
pub fn quadrature_prob(params: &DistParams, kappa: Kappa) -> Result<f64> {
    quadrature_prob_detailed(params, kappa).map(|r| r.value)
}

/// As [`quadrature_prob`], returning the integrator's diagnostics.
pub fn quadrature_prob_detailed(params: &DistParams, kappa: Kappa) -> Result<QuadResult> {
    let upper = kappa.value() * params.mean();
    integrate_pdf(params, f64::NEG_INFINITY, upper)
}

/// `∫ pdf` over `[lo, hi] ∩ support`. Infinite ends are truncated where the
/// density falls below `1e-16` of its peak.
pub fn integrate_pdf(params: &DistParams, lo: f64, hi: f64) -> Result<QuadResult> {
    let lo = lo.max(params.support_min());
    if hi <= lo {
        return Ok(QuadResult {
            value: 0.0,
            abs_err: 0.0,
            intervals: 0,
            evaluations: 0,
        });
    }
    let pdf = |t: f64| params.pdf(t).unwrap_or(0.0);
    let peak = pdf(params.mode());
    let sd = params.variance().sqrt();

    let lo = if lo.is_finite() {
        lo
    } else {
        tail_cutoff(&pdf, peak, params.mode().min(hi), -sd)?
    };
    let hi = if hi.is_finite() {
        hi
    } else {
        tail_cutoff(&pdf, peak, params.mode().max(lo), sd)?
    };
    if hi <= lo {
        return Ok(QuadResult {
            value: 0.0,
            abs_err: 0.0,
            intervals: 0,
            evaluations: 0,
        });
    }

    let mut points = vec![lo, hi];
    let mode = params.mode();
    let mean = params.mean();
    points.push(mode);
    for k in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
        points.push(mean - k * sd);
        points.push(mean + k * sd);
    }
    if params.support_min() == 0.0 {
        for j in -6..=8 {
            points.push(mode * 2f64.powi(j));
        }
    }
    points.retain(|p| p.is_finite() && *p >= lo && *p <= hi);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let r = integrate(pdf, &points, QUAD_TARGET_TOL, QUAD_MAX_INTERVALS)
        .map_err(|e| Error::numerical(format!("{params:?}: {e}")))?;
    if r.abs_err > QUAD_ACCEPT_TOL {
        return Err(Error::numerical(format!(
            "{params:?}: quadrature error bound {:e} exceeds {QUAD_ACCEPT_TOL:e}",
            r.abs_err
        )));
    }
    Ok(r)
}

/// Walks from `start` in steps of `step·2ⁱ` until the density is negligible.
fn tail_cutoff<F: Fn(f64) -> f64>(pdf: &F, peak: f64, start: f64, step: f64) -> Result<f64> {
    let mut delta = step;
    for _ in 0..200 {
        let t = start + delta;
        if !t.is_finite() {
            break;
        }
        if pdf(t) < TAIL_CUTOFF * peak {
            return Ok(t);
        }
        delta *= 2.0;
    }
    Err(Error::numerical(format!(
        "no tail cutoff found from {start} in direction {step}"
    )))
}

/// Monte Carlo estimate of `P(X ≤ κ·E[X])`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub p: f64,
    /// Binomial standard error `√(p̂(1−p̂)/n)`.
    pub std_error: f64,
    pub n: usize,
}

/// Fraction of `n` seeded draws at or below `κ·E[X]`. Requires `n ≥ 1000`.
pub fn mc_prob(params: &DistParams, kappa: Kappa, n: usize, seed: u64) -> Result<McEstimate> {
    if n < 1000 {
        return Err(Error::domain(format!(
            "Monte Carlo needs n >= 1000, got {n}"
        )));
    }
    let threshold = kappa.value() * params.mean();
    let hits = params
        .samples(seed)
        .take(n)
        .filter(|&x| x <= threshold)
        .count();
    let p = hits as f64 / n as f64;
    Ok(McEstimate {
        p,
        std_error: (p * (1.0 - p) / n as f64).sqrt(),
        n,
    })
}

/// A set of coordinates to scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridSpec {
    /// `points` values spaced evenly in `ln(coord)` over `[lo, hi]`.
    Geometric { lo: f64, hi: f64, points: usize },
    /// `points` evenly spaced values over `[lo, hi]`.
    Linear { lo: f64, hi: f64, points: usize },
}

impl GridSpec {
    pub fn geometric(lo: f64, hi: f64, points: usize) -> Result<Self> {
        let g = GridSpec::Geometric { lo, hi, points };
        g.validate()?;
        Ok(g)
    }

    pub fn linear(lo: f64, hi: f64, points: usize) -> Result<Self> {
        let g = GridSpec::Linear { lo, hi, points };
        g.validate()?;
        Ok(g)
    }

    /// Geometric `[1e-3, 1e2]` for positive coordinates, linear `[−50, 50]`
    /// otherwise.
    pub fn default_for(family: FamilyId, points: usize) -> Self {
        if family.has_positive_coordinate() {
            GridSpec::Geometric {
                lo: 1e-3,
                hi: 1e2,
                points,
            }
        } else {
            GridSpec::Linear {
                lo: -50.0,
                hi: 50.0,
                points,
            }
        }
    }

    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            GridSpec::Geometric { lo, hi, .. } | GridSpec::Linear { lo, hi, .. } => (lo, hi),
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            GridSpec::Geometric { points, .. } | GridSpec::Linear { points, .. } => points,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bounds();
        if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
            return Err(Error::domain(format!(
                "grid bounds [{lo}, {hi}] are not an interval"
            )));
        }
        if self.len() < 2 {
            return Err(Error::domain(format!(
                "grid needs at least 2 points, got {}",
                self.len()
            )));
        }
        if matches!(self, GridSpec::Geometric { .. }) && lo <= 0.0 {
            return Err(Error::domain(format!(
                "geometric grid needs lo > 0, got {lo}"
            )));
        }
        Ok(())
    }

    /// Checks the grid against a family's coordinate domain.
    pub fn validate_for(&self, family: FamilyId) -> Result<()> {
        self.validate()?;
        if family.has_positive_coordinate() && self.bounds().0 <= 0.0 {
            return Err(Error::domain(format!(
                "{family} grid must lie in (0, inf), got lo = {}",
                self.bounds().0
            )));
        }
        Ok(())
    }

    /// The `i`-th grid point; endpoints are hit exactly.
    pub fn point(&self, i: usize) -> f64 {
        let (lo, hi) = self.bounds();
        let last = self.len() - 1;
        if i == 0 {
            return lo;
        }
        if i >= last {
            return hi;
        }
        let t = i as f64 / last as f64;
        match self {
            GridSpec::Geometric { .. } => (lo.ln() + t * (hi / lo).ln()).exp(),
            GridSpec::Linear { .. } => lo + t * (hi - lo),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// `geom:LO:HI:N` or `lin:LO:HI:N`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [kind, lo, hi, n] = parts.as_slice() else {
            return Err(Error::domain(format!(
                "grid spec '{s}' is not KIND:LO:HI:N"
            )));
        };
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::domain(format!("grid bound '{v}' is not a number")))
        };
        let (lo, hi) = (num(lo)?, num(hi)?);
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| Error::domain(format!("grid size '{n}' is not a count")))?;
        match kind.trim() {
            "geom" | "geometric" => GridSpec::geometric(lo, hi, n),
            "lin" | "linear" => GridSpec::linear(lo, hi, n),
            other => Err(Error::domain(format!("unknown grid kind '{other}'"))),
        }
    }
}

/// Brute-force minimum of `g_κ` over the grid points; the first minimizer
/// wins ties. Requires at least 1000 points inside the coordinate domain.
pub fn grid_min(family: FamilyId, kappa: Kappa, grid: &GridSpec) -> Result<(f64, f64)> {
    grid.validate_for(family)?;
    if grid.len() < MIN_GRID_POINTS {
        return Err(Error::domain(format!(
            "grid_min needs at least {MIN_GRID_POINTS} points, got {}",
            grid.len()
        )));
    }
    let k = kappa.value();
    let mut best = (f64::NAN, f64::INFINITY);
    for c in grid.iter() {
        let v = g_raw(family, k, c);
        if v < best.1 {
            best = (c, v);
        }
    }
    Ok(best)
}
