//! Standard-normal CDF and the scaled complementary error function.
//!
//! Everything here is built on [`erfcx`], `e^{z²}·erfc(z)` for `z ≥ 0`:
//!
//! * `z < 1`: `e^{z²} − (2z/√π)·Σ (2z²)ⁿ / (2n+1)!!`, a positive-term series
//!   for `e^{z²}·erf(z)`, so the only cancellation is the final subtraction
//!   (bounded by a factor of about 6 on this range).
//! * `1 ≤ z < 5·10⁷`: continued fraction for `Γ(½, z²)` evaluated with the
//!   modified Lentz method.
//! * beyond that, the two leading terms of the asymptotic series.
//!
//! `Φ` is then defined through `erfcx` and a split evaluation of `e^{−t²/2}`,
//! so no separate approximation of the normal CDF exists.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 1/√π
pub(crate) const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
/// √(2π)
pub(crate) const SQRT_2PI: f64 = 2.506_628_274_631_000_2;

const SERIES_LIMIT: f64 = 1.0;
const ASYMPTOTIC_LIMIT: f64 = 5.0e7;
const CF_MAX_ITER: usize = 500;

/// A probability, guaranteed to lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::domain(format!("{value} is not a probability")))
        }
    }

    /// Clamps rounding excursions such as `1 + 1e-17` back into `[0, 1]`.
    pub(crate) fn saturating(value: f64) -> Self {
        debug_assert!(!value.is_nan());
        Probability(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Probability::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Standard normal distribution function `Φ(z)`.
///
/// Saturates to exactly 0 or 1 once the result is not representable.
pub fn std_normal_cdf(z: f64) -> Result<Probability> {
    if !z.is_finite() {
        return Err(Error::domain(format!(
            "normal cdf argument {z} is not finite"
        )));
    }
    Ok(Probability::saturating(normal_cdf(z)))
}

/// Scaled complementary error function `e^{z²}·erfc(z)` for `z ≥ 0`.
pub fn erfcx(z: f64) -> Result<f64> {
    if !z.is_finite() || z < 0.0 {
        return Err(Error::domain(format!(
            "erfcx requires finite z >= 0, got {z}"
        )));
    }
    Ok(erfcx_nonneg(z))
}

/// Complementary error function on the whole real line.
pub fn erfc(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::domain(format!("erfc argument {z} is not finite")));
    }
    let a = z.abs();
    let tail = erfcx_nonneg(a) * exp_neg_sq(a);
    Ok(if z >= 0.0 { tail } else { 2.0 - tail })
}

/// `∫ₐ^∞ e^{−t²/2} dt = √(π/2)·erfc(a/√2)`.
pub fn upper_gaussian_integral(a: f64) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::domain(format!(
            "gaussian integral bound {a} is not finite"
        )));
    }
    Ok(SQRT_2PI * normal_cdf(-a))
}

/// Unchecked `Φ(z)`; NaN in, NaN out.
pub(crate) fn normal_cdf(z: f64) -> f64 {
    if z <= 0.0 {
        lower_tail(-z)
    } else {
        1.0 - lower_tail(z)
    }
}

/// `Φ(−t)` for `t ≥ 0`.
fn lower_tail(t: f64) -> f64 {
    0.5 * erfcx_nonneg(t * FRAC_1_SQRT_2) * exp_neg_half_sq(t)
}

/// `e^{−t²/2}` with `t² ` split as `th² + tl·(t + th)`, where `th` carries at
/// most 8 fractional bits so that `th²/2` is exact.
pub(crate) fn exp_neg_half_sq(t: f64) -> f64 {
    let t = t.abs();
    if t > 40.0 {
        return (-0.5 * t * t).exp();
    }
    let th = (t * 256.0).floor() / 256.0;
    let tl = t - th;
    (-0.5 * th * th).exp() * (-0.5 * tl * (t + th)).exp()
}

/// `e^{−z²}`, same splitting as [`exp_neg_half_sq`].
fn exp_neg_sq(z: f64) -> f64 {
    exp_neg_half_sq(z * std::f64::consts::SQRT_2)
}

pub(crate) fn erfcx_nonneg(z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    if z < SERIES_LIMIT {
        erfcx_series(z)
    } else if z < ASYMPTOTIC_LIMIT {
        erfcx_continued_fraction(z)
    } else {
        FRAC_1_SQRT_PI / z * (1.0 - 0.5 / (z * z))
    }
}

fn erfcx_series(z: f64) -> f64 {
    let x2 = 2.0 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= x2 / (2.0 * n + 1.0);
        sum += term;
        if term <= f64::EPSILON * 0.25 * sum {
            break;
        }
    }
    (z * z).exp() - 2.0 * z * FRAC_1_SQRT_PI * sum
}

fn erfcx_continued_fraction(z: f64) -> f64 {
    const TINY: f64 = 1.0e-300;
    let a = 0.5;
    let x = z * z;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=CF_MAX_ITER {
        let i = i as f64;
        let an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1.0e-16 {
            break;
        }
    }
    z * FRAC_1_SQRT_PI * h
}

/// `w·√π·erfcx(w) − 1` without the cancellation of the direct form for
/// large `w`; behaves like `−1/(2w²)`.
pub(crate) fn scaled_erfcx_minus_one(w: f64) -> f64 {
    debug_assert!(w >= 0.0);
    if w < 8.0 {
        return w * PI.sqrt() * erfcx_nonneg(w) - 1.0;
    }
    // Σ_{n≥1} (−1)ⁿ (2n−1)!! / (2w²)ⁿ, truncated at the smallest term.
    let inv = 1.0 / (2.0 * w * w);
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for n in 1..200 {
        term *= -((2 * n - 1) as f64) * inv;
        if term.abs() >= prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if prev < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // 50-digit reference values, truncated to 20 significant digits.
    const PHI_REF: &[(f64, f64)] = &[
        (-37.5, 4.605_353_009_581_954_8e-308),
        (-30.0, 4.906_713_927_148_187_1e-198),
        (-20.5, 1.076_467_325_879_096_0e-93),
        (-10.0, 7.619_853_024_160_526_1e-24),
        (-5.25, 7.604_960_516_488_714_3e-8),
        (-2.0, 0.022_750_131_948_179_207),
        (-1.0, 0.158_655_253_931_457_05),
        (-0.3, 0.382_088_577_811_047_36),
        (0.7, 0.758_036_347_776_926_99),
        (1.0, 0.841_344_746_068_542_95),
        (3.0, 0.998_650_101_968_369_91),
    ];

    const ERFCX_REF: &[(f64, f64)] = &[
        (0.01, 0.988_815_461_046_342_51),
        (0.25, 0.770_346_547_730_996_74),
        (0.5, 0.615_690_344_192_925_87),
        (0.99, 0.430_331_213_064_148_27),
        (1.0, 0.427_583_576_155_807_00),
        (1.01, 0.424_866_814_311_199_99),
        (2.0, 0.255_395_676_310_505_74),
        (5.0, 0.110_704_637_733_068_63),
        (12.5, 0.044_992_099_001_027_921),
        (26.0, 0.021_683_584_850_562_907),
        (100.0, 0.005_641_613_782_989_432_9),
        (1.0e5, 5.641_895_835_195_468_1e-6),
    ];

    #[test]
    fn phi_matches_reference_values() {
        for &(z, want) in PHI_REF {
            let got = std_normal_cdf(z).unwrap().value();
            assert!(rel(got, want) <= 1e-14, "Phi({z}) = {got:e}, want {want:e}");
        }
    }

    #[test]
    fn phi_trivial_points() {
        assert_eq!(std_normal_cdf(0.0).unwrap().value(), 0.5);
        assert!((std_normal_cdf(38.0).unwrap().value() - 1.0).abs() <= 1e-15);
        assert_eq!(std_normal_cdf(1e300).unwrap().value(), 1.0);
        assert_eq!(std_normal_cdf(-1e300).unwrap().value(), 0.0);
        assert_eq!(std_normal_cdf(-40.0).unwrap().value(), 0.0);
    }

    #[test]
    fn non_finite_arguments_are_rejected() {
        assert!(std_normal_cdf(f64::NAN).is_err());
        assert!(std_normal_cdf(f64::INFINITY).is_err());
        assert!(erfcx(-0.1).is_err());
        assert!(erfcx(f64::NAN).is_err());
        assert!(upper_gaussian_integral(f64::NEG_INFINITY).is_err());
        assert!(erfc(f64::NAN).is_err());
    }

    #[test]
    fn erfcx_matches_reference_values() {
        for &(z, want) in ERFCX_REF {
            let got = erfcx(z).unwrap();
            assert!(
                rel(got, want) <= 1e-13,
                "erfcx({z}) = {got:e}, want {want:e}"
            );
        }
        assert_eq!(erfcx(0.0).unwrap(), 1.0);
    }

    #[test]
    fn erfcx_asymptotic_regime() {
        let z = 50.0;
        let two_terms = (1.0 - 0.5 / (z * z)) / (z * PI.sqrt());
        assert!(rel(erfcx(z).unwrap(), two_terms) <= 1e-6);
        let z = 1e9;
        assert!(rel(erfcx(z).unwrap(), 1.0 / (z * PI.sqrt())) <= 1e-15);
    }

    #[test]
    fn erfcx_is_continuous_across_branches() {
        for &edge in &[SERIES_LIMIT, ASYMPTOTIC_LIMIT] {
            let below = erfcx_nonneg(edge * (1.0 - 1e-15));
            let at = erfcx_nonneg(edge);
            assert!(rel(below, at) <= 1e-13, "jump at {edge}: {below} vs {at}");
        }
    }

    #[test]
    fn erfc_relation_at_one() {
        // erfc(1) from 50-digit arithmetic.
        let erfc1 = 0.157_299_207_050_285_13;
        assert!(rel(erfcx(1.0).unwrap() * (-1.0f64).exp(), erfc1) <= 1e-13);
        assert!(rel(erfc(1.0).unwrap(), erfc1) <= 1e-14);
        assert!(rel(erfc(-1.0).unwrap(), 2.0 - erfc1) <= 1e-15);
    }

    #[test]
    fn upper_integral_identities() {
        let half = (PI / 2.0).sqrt();
        assert!((upper_gaussian_integral(0.0).unwrap() - 1.253_314_137_315_500_3).abs() <= 1e-12);
        assert!((upper_gaussian_integral(0.0).unwrap() - half).abs() <= 1e-15);
        let a = 0.7;
        let via_phi = SQRT_2PI * (1.0 - std_normal_cdf(a).unwrap().value());
        assert!((upper_gaussian_integral(a).unwrap() - via_phi).abs() <= 1e-13);
        // 30-digit quadrature of e^{-t²/2} over [3, ∞)
        let at3 = upper_gaussian_integral(3.0).unwrap();
        assert!((at3 - 0.003_383_692_573_952_727_6).abs() <= 1e-15);
    }

    #[test]
    fn scaled_erfcx_minus_one_branches_agree() {
        for &w in &[8.0, 9.5, 20.0, 1e3] {
            let direct = w * PI.sqrt() * erfcx_nonneg(w) - 1.0;
            let series = scaled_erfcx_minus_one(w);
            // the direct form cancels away about 2w² ulps of relative accuracy
            let tol = (8.0 * w * w * f64::EPSILON).max(1e-12);
            assert!(rel(direct, series) <= tol, "w={w}: {direct} vs {series}");
        }
        assert!(rel(scaled_erfcx_minus_one(1e6), -0.5e-12) <= 1e-11);
    }

    #[test]
    fn grid_invariants() {
        let mut prev_phi = 0.0;
        let mut prev_erfcx = f64::INFINITY;
        for i in 0..=10_000 {
            let z = -38.0 + 76.0 * i as f64 / 10_000.0;
            let p = std_normal_cdf(z).unwrap().value();
            let q = std_normal_cdf(-z).unwrap().value();
            assert!((p + q - 1.0).abs() <= 1e-14, "z={z}");
            assert!(p >= prev_phi, "Phi decreases at {z}");
            prev_phi = p;
            let via_phi = SQRT_2PI * (1.0 - p);
            assert!(
                (upper_gaussian_integral(z).unwrap() - via_phi).abs() <= 1e-13,
                "z={z}"
            );
            if z >= 0.0 {
                let e = erfcx(z).unwrap();
                assert!(e <= prev_erfcx, "erfcx increases at {z}");
                prev_erfcx = e;
            }
        }
    }

    #[test]
    fn probability_rejects_out_of_range() {
        assert!(Probability::new(1.5).is_err());
        assert!(Probability::new(-0.0).is_ok());
        assert!(Probability::new(f64::NAN).is_err());
    }
}
