//! Reduced one-parameter objectives `g_κ` and the inverse Gaussian auxiliary
//! functions `h_κ`, `φ_κ` and `g′_κ`.
//!
//! Inverse Gaussian expressions carrying `e^{2x²}` are rewritten so that only
//! non-positive exponents are exponentiated. With `w = (κ+1)x/√(2κ)`:
//!
//! ```text
//! e^{2x²}Φ(−(κ+1)x/√κ) = ½·e^{−(κ−1)²x²/(2κ)}·erfcx(w)
//! h_κ(x)              = e^{−w²}·B(x)
//! g′_κ(x)             = (2x/√(2π))·e^{−(κ−1)²x²/(2κ)}·B(x)
//! B(x)                = (1/x)·[(κ−1)/(√κ(κ+1)) + 2√κ/(κ+1)·(w√π·erfcx(w) − 1)]
//! ```
//!
//! `B` carries the sign of both `h_κ` and `g′_κ` and stays well scaled where
//! `h_κ` itself underflows, which is what the root finder relies on.

use std::cmp::Ordering;
use std::f64::consts::SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distributions::{DistParams, FamilyId, EULER_GAMMA};
use crate::error::{Error, Result};
use crate::special::{
    erfcx_nonneg, exp_neg_half_sq, normal_cdf, scaled_erfcx_minus_one, Probability, SQRT_2PI,
};

/// The multiplier κ in `P(X ≤ κ·E[X])`; finite and strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Kappa(f64);

impl Kappa {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Kappa(value))
        } else {
            Err(Error::domain(format!(
                "kappa must be finite and > 0, got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Position of κ relative to the critical value 1.
    pub fn regime(self) -> Ordering {
        self.0.total_cmp(&1.0)
    }
}

impl TryFrom<f64> for Kappa {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Kappa::new(value)
    }
}

impl From<Kappa> for f64 {
    fn from(k: Kappa) -> f64 {
        k.0
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// A value of a family's reduction coordinate: `x = √(λ/μ)` (inverse
/// Gaussian), `σ` (log-normal), `x = μ/β` (Gumbel) or `y = μ/β` (logistic).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedPoint {
    family: FamilyId,
    coord: f64,
}

impl ReducedPoint {
    pub fn new(family: FamilyId, coord: f64) -> Result<Self> {
        if !coord.is_finite() {
            return Err(Error::domain(format!(
                "{family}: coordinate {} must be finite, got {coord}",
                family.coordinate_name()
            )));
        }
        if family.has_positive_coordinate() && coord <= 0.0 {
            return Err(Error::domain(format!(
                "{family}: coordinate {} must be > 0, got {coord}",
                family.coordinate_name()
            )));
        }
        Ok(ReducedPoint { family, coord })
    }

    /// The coordinate a native parameter pair collapses to.
    pub fn from_params(params: &DistParams) -> Self {
        let (mu, s) = (params.p1(), params.p2());
        let coord = match params.family() {
            FamilyId::InverseGaussian => (s / mu).sqrt(),
            FamilyId::LogNormal => s,
            FamilyId::Gumbel | FamilyId::Logistic => mu / s,
        };
        ReducedPoint {
            family: params.family(),
            coord,
        }
    }

    pub fn family(&self) -> FamilyId {
        self.family
    }

    pub fn coord(&self) -> f64 {
        self.coord
    }
}

/// `g_κ` at `p`, i.e. `P(X ≤ κ·E[X])` for any member reducing to `p`.
pub fn g(family: FamilyId, kappa: Kappa, p: ReducedPoint) -> Result<Probability> {
    if p.family != family {
        return Err(Error::domain(format!(
            "reduced point belongs to {}, not {family}",
            p.family
        )));
    }
    Ok(Probability::saturating(g_raw(
        family,
        kappa.value(),
        p.coord,
    )))
}

/// Convenience wrapper validating a bare coordinate.
pub fn g_at(family: FamilyId, kappa: Kappa, coord: f64) -> Result<Probability> {
    g(family, kappa, ReducedPoint::new(family, coord)?)
}

/// Unchecked `g_κ`; callers guarantee the coordinate is in the domain.
pub(crate) fn g_raw(family: FamilyId, k: f64, c: f64) -> f64 {
    match family {
        FamilyId::InverseGaussian => {
            let b = (k - 1.0) * c / k.sqrt();
            let w = (k + 1.0) * c / (2.0 * k).sqrt();
            normal_cdf(b) + 0.5 * exp_neg_half_sq(b) * erfcx_nonneg(w)
        }
        FamilyId::LogNormal => normal_cdf(k.ln() / c + 0.5 * c),
        FamilyId::Gumbel => (-(-((k - 1.0) * c + k * EULER_GAMMA)).exp()).exp(),
        FamilyId::Logistic => {
            let z = (k - 1.0) * c;
            if z >= 0.0 {
                1.0 / (1.0 + (-z).exp())
            } else {
                let e = z.exp();
                e / (1.0 + e)
            }
        }
    }
}

fn check_positive(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("x must be finite and > 0, got {x}")))
    }
}

/// `1 − g_κ(x)` for the inverse Gaussian, without cancellation when κ > 1
/// and `g` is close to 1.
pub fn ig_upper_tail(kappa: Kappa, x: f64) -> Result<f64> {
    check_positive(x)?;
    let k = kappa.value();
    let b = (k - 1.0) * x / k.sqrt();
    if b <= 0.0 {
        return Ok(1.0 - g_raw(FamilyId::InverseGaussian, k, x));
    }
    let w = (k + 1.0) * x / (2.0 * k).sqrt();
    let gap = erfcx_nonneg(b / SQRT_2) - erfcx_nonneg(w);
    Ok(0.5 * exp_neg_half_sq(b) * gap)
}

/// `B(x)`, the common sign-carrying factor of `h_κ` and `g′_κ`.
pub(crate) fn sign_factor(k: f64, x: f64) -> f64 {
    let sk = k.sqrt();
    let w = (k + 1.0) * x / (SQRT_2 * sk);
    ((k - 1.0) / (sk * (k + 1.0)) + 2.0 * sk / (k + 1.0) * scaled_erfcx_minus_one(w)) / x
}

/// `h_κ(x) = 2∫_{(κ+1)x/√κ}^∞ e^{−t²/2} dt − e^{−(κ+1)²x²/(2κ)}/(√κ·x)`.
pub fn h_ig(kappa: Kappa, x: f64) -> Result<f64> {
    check_positive(x)?;
    let k = kappa.value();
    let w = (k + 1.0) * x / (2.0 * k).sqrt();
    Ok((-w * w).exp() * sign_factor(k, x))
}

/// Derivative of the inverse Gaussian objective,
/// `g′_κ(x) = (2x·e^{2x²}/√(2π))·h_κ(x)`, in exponent-safe form.
pub fn g_prime_ig(kappa: Kappa, x: f64) -> Result<f64> {
    check_positive(x)?;
    let k = kappa.value();
    let b = (k - 1.0) * x / k.sqrt();
    Ok(2.0 * x / SQRT_2PI * exp_neg_half_sq(b) * sign_factor(k, x))
}

/// `φ_κ(x) = 1/κ − κ + 1/x²`; `h′_κ(x)` is a positive multiple of it.
pub fn phi_ig(kappa: Kappa, x: f64) -> Result<f64> {
    check_positive(x)?;
    let k = kappa.value();
    Ok(1.0 / k - k + 1.0 / (x * x))
}

/// The positive root `√(κ/(κ²−1))` of `φ_κ`, present iff κ > 1.
pub fn phi_ig_root(kappa: Kappa) -> Option<f64> {
    let k = kappa.value();
    (k > 1.0).then(|| (k / ((k - 1.0) * (k + 1.0))).sqrt())
}

/// Literal (unstabilized) inverse Gaussian objective; overflows for x ≳ 19.
#[cfg(test)]
pub(crate) fn g_ig_literal(k: f64, x: f64) -> f64 {
    normal_cdf((k - 1.0) * x / k.sqrt())
        + (2.0 * x * x).exp() * normal_cdf(-(k + 1.0) * x / k.sqrt())
}
