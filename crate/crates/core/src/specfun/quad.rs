//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! Intervals are kept in a max-heap keyed by their error estimate and the
//! worst one is bisected until the summed error meets the tolerance. An
//! infinite upper limit is mapped onto `[0, 1)` with `x = lo + t / (1 - t)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rel_tol: 1e-9, abs_tol: 1e-12, max_subdivisions: 2000 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol >= 0.0) || self.max_subdivisions < 1 {
            return Err(Error::Config(format!("invalid quadrature spec {self:?}")));
        }
        Ok(())
    }

    pub fn tighter(&self, factor: f64) -> Self {
        QuadratureSpec { rel_tol: self.rel_tol * factor, abs_tol: self.abs_tol * factor, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

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

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(Error::domain(format!("integrand is not finite at {center}")));
    }
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fc.abs() * WGK[7];
    let mut fv = [(0.0, 0.0); 7];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        if !(f1.is_finite() && f2.is_finite()) {
            return Err(Error::domain(format!("integrand is not finite near {}", center - dx)));
        }
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
        *slot = (f1, f2);
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for (j, (f1, f2)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, error })
}

fn adapt<F: Fn(f64) -> f64>(f: &F, cuts: &[f64], spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    let mut heap = BinaryHeap::new();
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod(f, w[0], w[1])?);
        }
    }
    let mut subdivisions = heap.len();
    loop {
        let value: f64 = heap.iter().map(|s| s.value).sum();
        let error: f64 = heap.iter().map(|s| s.error).sum();
        if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
            return Ok(Estimate { value, error });
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => return Ok(Estimate { value: 0.0, error: 0.0 }),
        };
        let mid = 0.5 * (worst.a + worst.b);
        let too_narrow = mid <= worst.a || mid >= worst.b;
        if subdivisions >= spec.max_subdivisions || too_narrow {
            return Err(Error::Convergence { estimate: value, error_bound: error });
        }
        heap.push(kronrod(f, worst.a, mid)?);
        heap.push(kronrod(f, mid, worst.b)?);
        subdivisions += 1;
    }
}

/// Integrates `f` over `[lo, hi]`; `hi` may be `+inf`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate_with_breaks(f, lo, hi, &[], spec).map(|e| e.value)
}

/// Like [`integrate`], with interior points where `f` has kinks or jumps.
/// Breaks outside `(lo, hi)` are ignored.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    if lo.is_nan() || hi.is_nan() || !lo.is_finite() || hi < lo {
        return Err(Error::domain(format!("bad integration range [{lo}, {hi}]")));
    }
    let mut pts: Vec<f64> = std::iter::once(lo).chain(breaks.iter().copied().filter(|&p| p > lo && p < hi)).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if hi.is_finite() {
        pts.push(hi);
        return adapt(&f, &pts, spec);
    }

    // Finite part up to the last break, then the mapped tail from there.
    let tail_lo = *pts.last().unwrap();
    let finite = if pts.len() > 1 { adapt(&f, &pts, spec)? } else { Estimate { value: 0.0, error: 0.0 } };
    let mapped = |t: f64| {
        let s = 1.0 - t;
        f(tail_lo + t / s) / (s * s)
    };
    check_tail_decay(&mapped)?;
    let tail = adapt(&mapped, &[0.0, 1.0], spec)?;
    Ok(Estimate { value: finite.value + tail.value, error: finite.error + tail.error })
}

/// Rejects integrands whose mapped form grows like `1/(1-t)` near `t = 1`,
/// i.e. that decay no faster than `1/x`.
fn check_tail_decay<G: Fn(f64) -> f64>(g: &G) -> Result<()> {
    let near = g(1.0 - 2f64.powi(-20)).abs();
    let nearer = g(1.0 - 2f64.powi(-30)).abs();
    if !nearer.is_finite() || (nearer > 1e-300 && nearer >= 512.0 * near) {
        return Err(Error::domain("integrand does not decay integrably at infinity"));
    }
    Ok(())
}
