//! Infimum of `g_κ` over the reduction coordinate, per family and κ-regime.
//!
//! Only the inverse Gaussian with κ > 1 needs numerics: its minimizer is the
//! unique zero `x₀(κ)` of `h_κ` on `(0, √(κ/(κ²−1)))`. Every other case is a
//! closed form or a boundary limit and is reported exactly.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::curves::{g_raw, h_ig, phi_ig_root, sign_factor, Kappa, ReducedPoint};
use crate::distributions::{FamilyId, EULER_GAMMA};
use crate::error::{Error, Result};
use crate::special::{normal_cdf, Probability};

const MAX_ITER: usize = 200;
const MAX_HALVINGS: usize = 1100;
/// Relative bracket width at which the root search stops.
pub const ROOT_REL_TOL: f64 = 1e-14;

/// An interval whose endpoint function values have opposite signs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl RootBracket {
    pub fn new(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<Self> {
        let opposite = (f_lo < 0.0 && f_hi > 0.0) || (f_lo > 0.0 && f_hi < 0.0);
        if !(lo < hi) || !opposite {
            return Err(Error::numerical(format!(
                "[{lo}, {hi}] with f = ({f_lo}, {f_hi}) is not a sign-change bracket"
            )));
        }
        Ok(RootBracket { lo, hi, f_lo, f_hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Result of a bracketed root search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootOutcome {
    pub root: f64,
    /// Final bracket; collapses to `[root, root]` on an exact hit.
    pub bracket: RootBracket,
    pub iterations: usize,
}

/// Bisection with a safeguarded secant step after every halving.
///
/// Each iteration halves the bracket, then tries the secant point of the
/// halved bracket and keeps it only if it falls strictly inside. Stops when
/// the bracket is narrower than `rel_tol·|lo|` or `f` hits zero.
pub fn bisect_secant<F>(
    f: F,
    mut b: RootBracket,
    rel_tol: f64,
    max_iter: usize,
) -> Result<RootOutcome>
where
    F: Fn(f64) -> f64,
{
    let exact = |x: f64, it: usize| RootOutcome {
        root: x,
        bracket: RootBracket {
            lo: x,
            hi: x,
            f_lo: 0.0,
            f_hi: 0.0,
        },
        iterations: it,
    };
    let update = |b: &mut RootBracket, x: f64, fx: f64| {
        if (fx < 0.0) == (b.f_lo < 0.0) {
            b.lo = x;
            b.f_lo = fx;
        } else {
            b.hi = x;
            b.f_hi = fx;
        }
    };

    for it in 1..=max_iter {
        if b.width() <= rel_tol * b.lo.abs().max(f64::MIN_POSITIVE) {
            let root = if b.f_lo.abs() <= b.f_hi.abs() {
                b.lo
            } else {
                b.hi
            };
            return Ok(RootOutcome {
                root,
                bracket: b,
                iterations: it - 1,
            });
        }
        let mid = 0.5 * (b.lo + b.hi);
        let fm = f(mid);
        if fm.is_nan() {
            return Err(Error::numerical(format!("objective is NaN at {mid}")));
        }
        if fm == 0.0 {
            return Ok(exact(mid, it));
        }
        update(&mut b, mid, fm);

        let s = b.hi - b.f_hi * (b.hi - b.lo) / (b.f_hi - b.f_lo);
        if s.is_finite() && s > b.lo && s < b.hi {
            let fs = f(s);
            if fs == 0.0 {
                return Ok(exact(s, it));
            }
            if !fs.is_nan() {
                update(&mut b, s, fs);
            }
        }
    }
    Err(Error::numerical(format!(
        "root search did not converge in {max_iter} iterations; last bracket [{}, {}]",
        b.lo, b.hi
    )))
}

/// Sign-change bracket for `x₀(κ)`: `hi = √(κ/(κ²−1))`, `lo` found by
/// halving until the sign factor turns negative.
pub fn ig_root_bracket(kappa: Kappa) -> Result<RootBracket> {
    let k = kappa.value();
    let Some(mut hi) = phi_ig_root(kappa) else {
        return Err(Error::Regime(format!(
            "kappa = {k} <= 1: no interior critical point exists, the infimum is a limit"
        )));
    };
    let f = |x: f64| sign_factor(k, x);
    let mut f_hi = f(hi);
    if !(f_hi > 0.0) {
        return Err(Error::numerical(format!(
            "h_kappa is not positive at the upper bracket end x = {hi} (kappa = {k}); \
             the difference is below working precision"
        )));
    }
    let mut lo = hi;
    for _ in 0..MAX_HALVINGS {
        lo *= 0.5;
        let f_lo = f(lo);
        if f_lo < 0.0 {
            return RootBracket::new(lo, hi, f_lo, f_hi);
        }
        hi = lo;
        f_hi = f_lo;
    }
    Err(Error::numerical(format!(
        "no sign change found below {hi} for kappa = {k}"
    )))
}

/// `x₀(κ)` with its final bracket and iteration count.
pub fn solve_ig_critical_point(kappa: Kappa) -> Result<RootOutcome> {
    let bracket = ig_root_bracket(kappa)?;
    let k = kappa.value();
    bisect_secant(|x| sign_factor(k, x), bracket, ROOT_REL_TOL, MAX_ITER)
}

/// The unique zero of `h_κ`, i.e. the minimizer of the inverse Gaussian
/// objective. Requires κ > 1.
pub fn ig_critical_point(kappa: Kappa) -> Result<f64> {
    solve_ig_critical_point(kappa).map(|o| o.root)
}

/// `|h_κ(x₀)|` relative to the local scale `max(1, |h_κ|)` sampled at the
/// ends of the bracket `[x₀/2, 2x₀]`.
pub fn ig_root_residual(kappa: Kappa, x0: f64) -> Result<f64> {
    let h0 = h_ig(kappa, x0)?.abs();
    let scale = h_ig(kappa, 0.5 * x0)?
        .abs()
        .max(h_ig(kappa, 2.0 * x0)?.abs())
        .max(1.0);
    Ok(h0 / scale)
}

/// Boundary of the coordinate domain the objective approaches its
/// infimum at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitDirection {
    /// coord → 0⁺
    ToZero,
    /// coord → +∞
    ToPosInfinity,
    /// coord → −∞
    ToNegInfinity,
}

impl LimitDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            LimitDirection::ToZero => "0+",
            LimitDirection::ToPosInfinity => "+inf",
            LimitDirection::ToNegInfinity => "-inf",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "0+" => Some(LimitDirection::ToZero),
            "+inf" => Some(LimitDirection::ToPosInfinity),
            "-inf" => Some(LimitDirection::ToNegInfinity),
            _ => None,
        }
    }
}

impl fmt::Display for LimitDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for LimitDirection {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Infimum of `g_κ` over a family's coordinate domain.
///
/// Exactly one of three shapes holds: attained at `argmin`; approached in
/// `limit_direction`; or `constant` (the objective does not depend on the
/// coordinate).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfimumResult {
    pub family: FamilyId,
    pub kappa: Kappa,
    pub value: Probability,
    pub attained: bool,
    #[serde(serialize_with = "serialize_argmin")]
    pub argmin: Option<ReducedPoint>,
    pub limit_direction: Option<LimitDirection>,
    pub constant: bool,
}

fn serialize_argmin<S: Serializer>(
    p: &Option<ReducedPoint>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match p {
        Some(p) => s.serialize_some(&p.coord()),
        None => s.serialize_none(),
    }
}

impl InfimumResult {
    fn limit(family: FamilyId, kappa: Kappa, value: f64, dir: LimitDirection) -> Self {
        InfimumResult {
            family,
            kappa,
            value: Probability::saturating(value),
            attained: false,
            argmin: None,
            limit_direction: Some(dir),
            constant: false,
        }
    }

    fn attained_at(family: FamilyId, kappa: Kappa, value: f64, at: ReducedPoint) -> Self {
        InfimumResult {
            family,
            kappa,
            value: Probability::saturating(value),
            attained: true,
            argmin: Some(at),
            limit_direction: None,
            constant: false,
        }
    }

    fn constant(family: FamilyId, kappa: Kappa, value: f64) -> Self {
        InfimumResult {
            family,
            kappa,
            value: Probability::saturating(value),
            attained: false,
            argmin: None,
            limit_direction: None,
            constant: true,
        }
    }
}

/// Infimum of `P(X ≤ κ·E[X])` over all members of `family`.
pub fn infimum(family: FamilyId, kappa: Kappa) -> Result<InfimumResult> {
    use LimitDirection::*;
    use Ordering::*;

    let k = kappa.value();
    let r = match (family, kappa.regime()) {
        (FamilyId::InverseGaussian, Less) => {
            InfimumResult::limit(family, kappa, 0.0, ToPosInfinity)
        }
        (FamilyId::InverseGaussian, Equal) => {
            InfimumResult::limit(family, kappa, 0.5, ToPosInfinity)
        }
        (FamilyId::InverseGaussian, Greater) => {
            let x0 = ig_critical_point(kappa)?;
            let at = ReducedPoint::new(family, x0)?;
            InfimumResult::attained_at(family, kappa, g_raw(family, k, x0), at)
        }
        (FamilyId::LogNormal, Less) => InfimumResult::limit(family, kappa, 0.0, ToZero),
        (FamilyId::LogNormal, Equal) => InfimumResult::limit(family, kappa, 0.5, ToZero),
        (FamilyId::LogNormal, Greater) => {
            let ln_k = if k < 2.0 { (k - 1.0).ln_1p() } else { k.ln() };
            let sigma = (2.0 * ln_k).sqrt();
            let at = ReducedPoint::new(family, sigma)?;
            InfimumResult::attained_at(family, kappa, normal_cdf(sigma), at)
        }
        (FamilyId::Gumbel | FamilyId::Logistic, Less) => {
            InfimumResult::limit(family, kappa, 0.0, ToPosInfinity)
        }
        (FamilyId::Gumbel | FamilyId::Logistic, Greater) => {
            InfimumResult::limit(family, kappa, 0.0, ToNegInfinity)
        }
        (FamilyId::Gumbel, Equal) => {
            InfimumResult::constant(family, kappa, (-(-EULER_GAMMA).exp()).exp())
        }
        (FamilyId::Logistic, Equal) => InfimumResult::constant(family, kappa, 0.5),
    };
    Ok(r)
}
