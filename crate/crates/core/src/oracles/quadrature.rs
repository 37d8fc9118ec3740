//! Globally adaptive 15-point Gauss–Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd-indexed Kronrod nodes, centre last.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Integral estimate with its error bound and work counters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
    pub intervals: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// One Kronrod/Gauss pair on `[a, b]`, with the QUADPACK error rescaling.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
        *slot = (f1, f2);
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for (j, &(f1, f2)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, err }
}

/// Integrates `f` over `[points[0], points[last]]`, starting from the
/// sub-intervals delimited by `points` (which must be strictly increasing
/// and finite), bisecting the worst segment until the summed error estimate
/// is below `abs_tol`.
pub fn integrate<F>(f: F, points: &[f64], abs_tol: f64, max_intervals: usize) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    if points.len() < 2 || points.iter().any(|p| !p.is_finite()) {
        return Err(Error::domain(
            "quadrature needs at least two finite break points",
        ));
    }
    if points.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain(
            "quadrature break points must be strictly increasing",
        ));
    }

    let mut heap: BinaryHeap<Segment> = points.windows(2).map(|w| gk15(&f, w[0], w[1])).collect();
    let mut evaluations = 15 * heap.len();
    // Segments too narrow to split further; their error is final.
    let mut settled: Vec<Segment> = Vec::new();
    let mut running_err: f64 = heap.iter().map(|s| s.err).sum();

    loop {
        if running_err <= abs_tol || heap.len() >= max_intervals || heap.is_empty() {
            // re-sum to shed drift from the incremental updates
            let (value, err) = heap
                .iter()
                .chain(settled.iter())
                .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.err));
            let intervals = heap.len() + settled.len();
            if err <= abs_tol || heap.is_empty() {
                return Ok(QuadResult {
                    value,
                    abs_err: err,
                    intervals,
                    evaluations,
                });
            }
            if heap.len() >= max_intervals {
                return Err(Error::numerical(format!(
                    "quadrature over [{}, {}] did not reach {abs_tol:e} within {max_intervals} \
                     sub-intervals: estimate {value}, error bound {err:e}, {evaluations} evaluations",
                    points[0],
                    points[points.len() - 1]
                )));
            }
            running_err = err;
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            settled.push(worst);
            continue;
        }
        let (left, right) = (gk15(&f, worst.a, mid), gk15(&f, mid, worst.b));
        running_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        evaluations += 30;
    }
}
