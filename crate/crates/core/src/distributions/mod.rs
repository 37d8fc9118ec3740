//! The four distribution families: parameters, means, densities, CDFs and
//! seeded samplers.

mod sample;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{erfcx_nonneg, exp_neg_half_sq, normal_cdf, Probability, SQRT_2PI};

pub use sample::{derive_seed, Samples};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// The distribution families covered by the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyId {
    InverseGaussian,
    LogNormal,
    Gumbel,
    Logistic,
}

impl FamilyId {
    pub const ALL: [FamilyId; 4] = [
        FamilyId::InverseGaussian,
        FamilyId::LogNormal,
        FamilyId::Gumbel,
        FamilyId::Logistic,
    ];

    /// Flag spelling, e.g. `inverse-gaussian`.
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyId::InverseGaussian => "inverse-gaussian",
            FamilyId::LogNormal => "log-normal",
            FamilyId::Gumbel => "gumbel",
            FamilyId::Logistic => "logistic",
        }
    }

    /// Name of the reduced coordinate.
    pub fn coordinate_name(self) -> &'static str {
        match self {
            FamilyId::InverseGaussian | FamilyId::Gumbel => "x",
            FamilyId::LogNormal => "sigma",
            FamilyId::Logistic => "y",
        }
    }

    /// Whether the reduced coordinate is restricted to `(0, ∞)`.
    pub fn has_positive_coordinate(self) -> bool {
        matches!(self, FamilyId::InverseGaussian | FamilyId::LogNormal)
    }

    /// Names of the two native parameters.
    pub fn parameter_names(self) -> (&'static str, &'static str) {
        match self {
            FamilyId::InverseGaussian => ("mu", "lambda"),
            FamilyId::LogNormal => ("mu", "sigma"),
            FamilyId::Gumbel | FamilyId::Logistic => ("mu", "beta"),
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let normalized = s.trim().to_ascii_lowercase().replace('_', "-");
        match normalized.as_str() {
            "inverse-gaussian" | "ig" => Ok(FamilyId::InverseGaussian),
            "log-normal" | "lognormal" => Ok(FamilyId::LogNormal),
            "gumbel" => Ok(FamilyId::Gumbel),
            "logistic" => Ok(FamilyId::Logistic),
            _ => Err(Error::domain(format!(
                "unknown family '{s}' (expected inverse-gaussian, log-normal, gumbel or logistic)"
            ))),
        }
    }
}

/// Native parameters of one family member.
///
/// `(p1, p2)` is `(μ, λ)` for the inverse Gaussian, `(μ, σ)` for the
/// log-normal and `(μ, β)` for Gumbel and logistic. Validated on
/// construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistParams {
    family: FamilyId,
    p1: f64,
    p2: f64,
}

impl DistParams {
    pub fn new(family: FamilyId, p1: f64, p2: f64) -> Result<Self> {
        let (n1, n2) = family.parameter_names();
        if !p1.is_finite() || !p2.is_finite() {
            return Err(Error::domain(format!(
                "{family}: parameters must be finite, got {n1}={p1}, {n2}={p2}"
            )));
        }
        if family == FamilyId::InverseGaussian && p1 <= 0.0 {
            return Err(Error::domain(format!(
                "{family}: {n1} must be > 0, got {p1}"
            )));
        }
        if p2 <= 0.0 {
            return Err(Error::domain(format!(
                "{family}: {n2} must be > 0, got {p2}"
            )));
        }
        Ok(DistParams { family, p1, p2 })
    }

    pub fn inverse_gaussian(mu: f64, lambda: f64) -> Result<Self> {
        Self::new(FamilyId::InverseGaussian, mu, lambda)
    }

    pub fn log_normal(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(FamilyId::LogNormal, mu, sigma)
    }

    pub fn gumbel(mu: f64, beta: f64) -> Result<Self> {
        Self::new(FamilyId::Gumbel, mu, beta)
    }

    pub fn logistic(mu: f64, beta: f64) -> Result<Self> {
        Self::new(FamilyId::Logistic, mu, beta)
    }

    pub fn family(&self) -> FamilyId {
        self.family
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn mean(&self) -> f64 {
        let (mu, s) = (self.p1, self.p2);
        match self.family {
            FamilyId::InverseGaussian | FamilyId::Logistic => mu,
            FamilyId::LogNormal => (mu + 0.5 * s * s).exp(),
            FamilyId::Gumbel => mu + s * EULER_GAMMA,
        }
    }

    pub fn variance(&self) -> f64 {
        let (mu, s) = (self.p1, self.p2);
        match self.family {
            FamilyId::InverseGaussian => mu * mu * mu / s,
            FamilyId::LogNormal => (s * s).exp_m1() * (2.0 * mu + s * s).exp(),
            FamilyId::Gumbel => PI * PI * s * s / 6.0,
            FamilyId::Logistic => PI * PI * s * s / 3.0,
        }
    }

    /// Lower end of the support (`0` or `−∞`).
    pub fn support_min(&self) -> f64 {
        if self.family.has_positive_coordinate() {
            0.0
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Location of the density's maximum.
    pub fn mode(&self) -> f64 {
        let (mu, s) = (self.p1, self.p2);
        match self.family {
            FamilyId::InverseGaussian => {
                let r = 1.5 * mu / s;
                // μ(√(1 + r²) − r), written without cancellation
                mu / ((1.0 + r * r).sqrt() + r)
            }
            FamilyId::LogNormal => (mu - s * s).exp(),
            FamilyId::Gumbel | FamilyId::Logistic => mu,
        }
    }

    /// Distribution function `P(X ≤ t)`.
    ///
    /// The inverse Gaussian second term `e^{2λ/μ}Φ(−a)` is assembled as
    /// `½·e^{−b²/2}·erfcx(a/√2)` with `b = √(λ/t)(t/μ − 1)`, since
    /// `2λ/μ − a²/2 = −b²/2`; the factor `e^{2λ/μ}` is never formed.
    pub fn cdf(&self, t: f64) -> Result<Probability> {
        if t.is_nan() {
            return Err(Error::domain("cdf argument is NaN"));
        }
        let (mu, s) = (self.p1, self.p2);
        let p = match self.family {
            FamilyId::InverseGaussian => {
                if t <= 0.0 {
                    0.0
                } else if t == f64::INFINITY {
                    1.0
                } else {
                    let root = (s / t).sqrt();
                    let b = root * (t / mu - 1.0);
                    let a = root * (t / mu + 1.0);
                    normal_cdf(b)
                        + 0.5
                            * exp_neg_half_sq(b)
                            * erfcx_nonneg(a * std::f64::consts::FRAC_1_SQRT_2)
                }
            }
            FamilyId::LogNormal => {
                if t <= 0.0 {
                    0.0
                } else {
                    normal_cdf((t.ln() - mu) / s)
                }
            }
            FamilyId::Gumbel => (-(-(t - mu) / s).exp()).exp(),
            FamilyId::Logistic => logistic_sigmoid((t - mu) / s),
        };
        Ok(Probability::saturating(p))
    }

    /// Density at `t`. The positive-support families reject `t ≤ 0`.
    pub fn pdf(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::domain(format!("pdf argument {t} is not finite")));
        }
        let (mu, s) = (self.p1, self.p2);
        match self.family {
            FamilyId::InverseGaussian | FamilyId::LogNormal if t <= 0.0 => Err(Error::domain(
                format!("{}: pdf requires t > 0, got {t}", self.family),
            )),
            FamilyId::InverseGaussian => {
                let d = t - mu;
                Ok((s / (2.0 * PI * t * t * t)).sqrt() * (-s * d * d / (2.0 * mu * mu * t)).exp())
            }
            FamilyId::LogNormal => {
                let z = (t.ln() - mu) / s;
                Ok((-0.5 * z * z).exp() / (t * s * SQRT_2PI))
            }
            FamilyId::Gumbel => {
                let z = (t - mu) / s;
                Ok((-z - (-z).exp()).exp() / s)
            }
            FamilyId::Logistic => {
                let e = (-((t - mu) / s).abs()).exp();
                Ok(e / (s * (1.0 + e) * (1.0 + e)))
            }
        }
    }

    /// `n` i.i.d. draws, reproducible for a fixed `(self, n, seed)`.
    ///
    /// See [`Samples`] for the generator and stream layout.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        self.samples(seed).take(n).collect()
    }

    /// Endless stream of draws for `seed`; `sample(n, seed)` is its prefix.
    pub fn samples(&self, seed: u64) -> Samples {
        Samples::new(*self, seed)
    }
}

fn logistic_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names_round_trip() {
        for f in FamilyId::ALL {
            assert_eq!(f.as_str().parse::<FamilyId>().unwrap(), f);
        }
        assert_eq!(
            "Log_Normal".parse::<FamilyId>().unwrap(),
            FamilyId::LogNormal
        );
        assert!("weibull".parse::<FamilyId>().is_err());
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(DistParams::inverse_gaussian(0.0, 1.0).is_err());
        assert!(DistParams::inverse_gaussian(1.0, -1.0).is_err());
        assert!(DistParams::log_normal(-3.0, 0.0).is_err());
        assert!(DistParams::gumbel(0.0, f64::NAN).is_err());
        assert!(DistParams::logistic(f64::INFINITY, 1.0).is_err());
        assert!(DistParams::log_normal(-3.0, 0.5).is_ok());
        assert!(DistParams::gumbel(-3.0, 0.5).is_ok());
    }

    #[test]
    fn means() {
        assert_eq!(DistParams::inverse_gaussian(3.0, 7.0).unwrap().mean(), 3.0);
        let ln = DistParams::log_normal(0.0, 1e-8).unwrap();
        assert!((ln.mean() - 1.0).abs() <= 1e-12);
        assert_eq!(
            DistParams::gumbel(0.0, 1.0).unwrap().mean(),
            0.577_215_664_901_532_9
        );
        assert_eq!(DistParams::logistic(-2.5, 4.0).unwrap().mean(), -2.5);
    }

    #[test]
    fn cdf_simple_points() {
        let lg = DistParams::logistic(2.0, 5.0).unwrap();
        assert_eq!(lg.cdf(2.0).unwrap().value(), 0.5);
        let gb = DistParams::gumbel(0.0, 1.0).unwrap();
        assert!((gb.cdf(0.0).unwrap().value() - (-1.0f64).exp()).abs() <= 1e-12);
        let ig = DistParams::inverse_gaussian(1.0, 1.0).unwrap();
        assert_eq!(ig.cdf(0.0).unwrap().value(), 0.0);
        assert_eq!(ig.cdf(-4.0).unwrap().value(), 0.0);
        assert_eq!(ig.cdf(f64::INFINITY).unwrap().value(), 1.0);
        let ln = DistParams::log_normal(0.0, 1.0).unwrap();
        assert_eq!(ln.cdf(-1.0).unwrap().value(), 0.0);
        assert_eq!(ln.cdf(1.0).unwrap().value(), 0.5);
        assert!(ln.cdf(f64::NAN).is_err());
    }

    #[test]
    fn ig_cdf_reference_value() {
        // P(X ≤ 1) for IG(1, 1), 50-digit arithmetic
        let ig = DistParams::inverse_gaussian(1.0, 1.0).unwrap();
        let want = 0.668_102_001_223_170_61;
        assert!((ig.cdf(1.0).unwrap().value() - want).abs() <= 1e-15);
    }

    #[test]
    fn ig_cdf_survives_huge_shape_ratio() {
        // e^{2λ/μ} alone would overflow here
        let ig = DistParams::inverse_gaussian(1.0, 1e6).unwrap();
        let p = ig.cdf(1.0).unwrap().value();
        assert!(p.is_finite() && p > 0.49 && p < 0.51, "{p}");
        assert!(ig.cdf(0.99).unwrap().value() < 1e-10);
    }

    #[test]
    fn pdf_simple_points() {
        let gb = DistParams::gumbel(0.0, 1.0).unwrap();
        assert!((gb.pdf(0.0).unwrap() - (-1.0f64).exp()).abs() <= 1e-15);
        let lg = DistParams::logistic(0.0, 1.0).unwrap();
        assert_eq!(lg.pdf(0.0).unwrap(), 0.25);
        let ig = DistParams::inverse_gaussian(1.0, 1.0).unwrap();
        assert!(ig.pdf(0.0).is_err());
        assert!(DistParams::log_normal(0.0, 1.0).unwrap().pdf(-1.0).is_err());
        assert_eq!(gb.pdf(-1e3).unwrap(), 0.0);
    }

    #[test]
    fn mode_is_density_peak() {
        for p in [
            DistParams::inverse_gaussian(2.0, 0.3).unwrap(),
            DistParams::inverse_gaussian(1.0, 50.0).unwrap(),
            DistParams::log_normal(0.4, 0.9).unwrap(),
            DistParams::gumbel(1.0, 2.0).unwrap(),
            DistParams::logistic(-1.0, 0.5).unwrap(),
        ] {
            let m = p.mode();
            let f = p.pdf(m).unwrap();
            let h = 1e-4 * m.abs().max(1e-2);
            assert!(
                f >= p.pdf(m - h).unwrap() && f >= p.pdf(m + h).unwrap(),
                "{p:?}"
            );
        }
    }

    #[test]
    fn cdf_derivative_matches_pdf() {
        let cases = [
            DistParams::inverse_gaussian(1.5, 2.0).unwrap(),
            DistParams::inverse_gaussian(0.2, 40.0).unwrap(),
            DistParams::log_normal(0.3, 0.7).unwrap(),
            DistParams::gumbel(-1.0, 2.5).unwrap(),
            DistParams::logistic(3.0, 0.4).unwrap(),
        ];
        for p in cases {
            let sd = p.variance().sqrt();
            for k in -6..=6 {
                let t = p.mean() + 0.4 * k as f64 * sd;
                if t <= p.support_min() + 0.05 * sd {
                    continue;
                }
                let f = p.pdf(t).unwrap();
                if f < 1e-6 * p.pdf(p.mode()).unwrap() {
                    continue;
                }
                let h = 1e-5 * sd;
                let fd =
                    (p.cdf(t + h).unwrap().value() - p.cdf(t - h).unwrap().value()) / (2.0 * h);
                assert!(((fd - f) / f).abs() <= 1e-6, "{p:?} t={t}: fd={fd} pdf={f}");
            }
        }
    }
}
