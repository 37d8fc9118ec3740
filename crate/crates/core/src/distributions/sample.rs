//! Seeded samplers.
//!
//! Generator: ChaCha8 keyed with `ChaCha8Rng::seed_from_u64(seed)` on stream 0.
//! Independent sub-streams (per shard, per trial) are obtained from
//! [`derive_seed`], never by reusing one generator across logical streams.
//!
//! None of the samplers evaluate a closed-form CDF of their family. The
//! log-normal uses its own inverse normal CDF (AS 241), and the inverse
//! Gaussian uses the Michael–Schucany–Haas transformation with a ziggurat
//! normal.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{DistParams, FamilyId};

/// SplitMix64 finalizer over `seed + (index + 1)·φ64`.
///
/// Used wherever a run needs several independent, reproducible streams from
/// one user seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Infinite iterator of draws from one family member.
pub struct Samples {
    params: DistParams,
    rng: ChaCha8Rng,
}

impl Samples {
    pub(super) fn new(params: DistParams, seed: u64) -> Self {
        Samples {
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Iterator for Samples {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let (mu, s) = (self.params.p1, self.params.p2);
        let rng = &mut self.rng;
        let x = match self.params.family {
            FamilyId::InverseGaussian => inverse_gaussian(mu, s, rng),
            FamilyId::LogNormal => (mu + s * ndtri(open_unit(rng))).exp(),
            FamilyId::Gumbel => mu - s * (-open_unit(rng).ln()).ln(),
            FamilyId::Logistic => {
                let u = open_unit(rng);
                mu + s * (u / (1.0 - u)).ln()
            }
        };
        Some(x)
    }
}

/// Uniform on the open interval (0, 1) with 53 random bits.
fn open_unit<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Michael, Schucany & Haas (1976). `y = μ·χ²₁`; the smaller root of the
/// quadratic is `x₁ = 4λμy / (y + √(y² + 4λy))²` (cancellation-free form),
/// accepted with probability `μ/(μ + x₁)`, otherwise `μ²/x₁`.
fn inverse_gaussian<R: RngCore>(mu: f64, lambda: f64, rng: &mut R) -> f64 {
    let v: f64 = rng.sample(StandardNormal);
    let y = mu * v * v;
    let s = y + (y * y + 4.0 * lambda * y).sqrt();
    let x1 = if s > 0.0 {
        4.0 * lambda * mu * y / (s * s)
    } else {
        mu
    };
    let x1 = if x1 > 0.0 { x1 } else { f64::MIN_POSITIVE };
    let u: f64 = open_unit(rng);
    if u * (mu + x1) <= mu {
        x1
    } else {
        mu * mu / x1
    }
}

/// Inverse standard normal CDF, Wichura's AS 241 (PPND16), about 1e-16
/// relative accuracy on (0, 1).
pub(crate) fn ndtri(p: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_608,
        1.331_416_678_917_843_774_5e2,
        1.971_590_950_306_551_442_7e3,
        1.373_169_376_550_946_112_5e4,
        4.592_195_393_154_987_145_7e4,
        6.726_577_092_700_870_085_3e4,
        3.343_057_558_358_812_810_5e4,
        2.509_080_928_730_122_672_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091_125_2e1,
        6.871_870_074_920_579_083e2,
        5.394_196_021_424_751_107_7e3,
        2.121_379_430_158_659_586_7e4,
        3.930_789_580_009_271_061e4,
        2.872_908_573_572_194_267_4e4,
        5.226_495_278_852_854_561e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_34,
        4.630_337_846_156_545_295_9,
        5.769_497_221_460_691_405_5,
        3.647_848_324_763_204_605_04,
        1.270_458_252_452_368_382_58,
        2.417_807_251_774_506_117_7e-1,
        2.272_384_498_926_918_458_33e-2,
        7.745_450_142_783_414_076_4e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_87,
        1.676_384_830_183_803_849_4,
        6.897_673_349_851_000_045_5e-1,
        1.481_039_764_274_800_745_9e-1,
        1.519_866_656_361_645_719_66e-2,
        5.475_938_084_995_344_946e-4,
        1.050_750_071_644_416_843_24e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_2,
        5.463_784_911_164_114_369_9,
        1.784_826_539_917_291_335_8,
        2.965_605_718_285_048_912_3e-1,
        2.653_218_952_657_612_309_3e-2,
        1.242_660_947_388_078_438_6e-3,
        2.711_555_568_743_487_578_15e-5,
        2.010_334_399_292_288_132_65e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_879_376_9e-1,
        1.369_298_809_227_358_053_1e-1,
        1.487_536_129_085_061_485_25e-2,
        7.868_691_311_456_132_591e-4,
        1.846_318_317_510_054_681_8e-5,
        1.421_511_758_316_445_888_7e-7,
        2.044_263_103_389_939_785_64e-15,
    ];

    fn poly(c: &[f64; 8], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
    }

    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let v = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -v
    } else {
        v
    }
}
