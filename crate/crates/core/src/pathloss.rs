//! Distance-dependent attenuation laws.
//!
//! The main law is bounded and dual-slope: constant inside a small radius
//! `r_b`, decaying with the near-field exponent `alpha_c` up to the critical
//! distance `r_c`, and with the far-field exponent `alpha` beyond it. The far
//! branch is scaled by `tau = r_c^(alpha - alpha_c)` so the law is continuous
//! at `r_c`. Three simplified laws are kept alongside for comparison.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    BoundedDualSlope,
    BoundedSingleSlope,
    UnboundedSingleSlope,
    UnboundedDualSlope,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::BoundedDualSlope,
        Variant::BoundedSingleSlope,
        Variant::UnboundedSingleSlope,
        Variant::UnboundedDualSlope,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::BoundedDualSlope => "bounded-dual-slope",
            Variant::BoundedSingleSlope => "bounded-single-slope",
            Variant::UnboundedSingleSlope => "unbounded-single-slope",
            Variant::UnboundedDualSlope => "unbounded-dual-slope",
        }
    }

    pub fn is_bounded(self) -> bool {
        matches!(self, Variant::BoundedDualSlope | Variant::BoundedSingleSlope)
    }

    pub fn is_dual_slope(self) -> bool {
        matches!(self, Variant::BoundedDualSlope | Variant::UnboundedDualSlope)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown path loss model `{s}`")))
    }
}

/// Power-law description of the outermost branch: `coef * d^(-exponent)` for `d > start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarField {
    pub coef: f64,
    pub exponent: f64,
    pub start: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct PathLossModel {
    variant: Variant,
    r_b: f64,
    r_c: f64,
    alpha_c: f64,
    alpha: f64,
}

impl Default for PathLossModel {
    /// `r_b = 1 m`, `r_c = 70 m`, `alpha_c = 2.5`, `alpha = 4`.
    fn default() -> Self {
        PathLossModel { variant: Variant::BoundedDualSlope, r_b: 1.0, r_c: 70.0, alpha_c: 2.5, alpha: 4.0 }
    }
}

impl PathLossModel {
    pub fn new(variant: Variant, r_b: f64, r_c: f64, alpha_c: f64, alpha: f64) -> Result<Self> {
        if !(alpha_c.is_finite() && alpha.is_finite()) || alpha_c <= 2.0 || alpha_c > alpha {
            return Err(Error::domain(format!(
                "path loss exponents must satisfy 2 < alpha_c <= alpha, got alpha_c={alpha_c}, alpha={alpha}"
            )));
        }
        if variant.is_bounded() && !(r_b.is_finite() && r_b > 0.0) {
            return Err(Error::domain(format!("r_b must be positive, got {r_b}")));
        }
        if variant.is_dual_slope() && !(r_c.is_finite() && r_c > 0.0) {
            return Err(Error::domain(format!("r_c must be positive, got {r_c}")));
        }
        if variant == Variant::BoundedDualSlope && r_b > r_c {
            return Err(Error::domain(format!("need r_b <= r_c, got r_b={r_b}, r_c={r_c}")));
        }
        if variant.is_bounded() && r_b != 1.0 {
            log::warn!("r_b = {r_b} m: the bounded law is discontinuous at r_b (1 inside, r_b^-alpha_c just outside)");
        }
        Ok(PathLossModel { variant, r_b, r_c, alpha_c, alpha })
    }

    pub fn bounded_dual_slope(r_b: f64, r_c: f64, alpha_c: f64, alpha: f64) -> Result<Self> {
        Self::new(Variant::BoundedDualSlope, r_b, r_c, alpha_c, alpha)
    }

    /// Same parameters under a different law.
    pub fn with_variant(&self, variant: Variant) -> Self {
        PathLossModel { variant, ..*self }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Radius of the constant-loss region; zero for unbounded laws.
    pub fn r_b(&self) -> f64 {
        if self.variant.is_bounded() {
            self.r_b
        } else {
            0.0
        }
    }

    pub fn r_c(&self) -> f64 {
        self.r_c
    }

    pub fn alpha_c(&self) -> f64 {
        self.alpha_c
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tau(&self) -> f64 {
        self.r_c.powf(self.alpha - self.alpha_c)
    }

    pub fn attenuation(&self, d: f64) -> Result<f64> {
        if !d.is_finite() || d < 0.0 {
            return Err(Error::domain(format!("distance must be finite and non-negative, got {d}")));
        }
        if d == 0.0 && !self.variant.is_bounded() {
            return Err(Error::domain("unbounded path loss is singular at d = 0"));
        }
        Ok(self.gain(d))
    }

    /// Unchecked evaluation for hot loops; `d` must satisfy the `attenuation` preconditions.
    #[inline]
    pub fn gain(&self, d: f64) -> f64 {
        match self.variant {
            Variant::BoundedDualSlope => {
                if d <= self.r_b {
                    1.0
                } else if d <= self.r_c {
                    d.powf(-self.alpha_c)
                } else {
                    self.tau() * d.powf(-self.alpha)
                }
            }
            Variant::BoundedSingleSlope => {
                if d <= self.r_b {
                    1.0
                } else {
                    d.powf(-self.alpha)
                }
            }
            Variant::UnboundedSingleSlope => d.powf(-self.alpha),
            Variant::UnboundedDualSlope => {
                if d <= self.r_c {
                    d.powf(-self.alpha_c)
                } else {
                    self.tau() * d.powf(-self.alpha)
                }
            }
        }
    }

    /// Distances where the law changes branch, ascending.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.variant {
            Variant::BoundedDualSlope => vec![self.r_b, self.r_c],
            Variant::BoundedSingleSlope => vec![self.r_b],
            Variant::UnboundedSingleSlope => vec![],
            Variant::UnboundedDualSlope => vec![self.r_c],
        }
    }

    pub fn far_field(&self) -> FarField {
        match self.variant {
            Variant::BoundedDualSlope | Variant::UnboundedDualSlope => {
                FarField { coef: self.tau(), exponent: self.alpha, start: self.r_c }
            }
            Variant::BoundedSingleSlope => FarField { coef: 1.0, exponent: self.alpha, start: self.r_b },
            Variant::UnboundedSingleSlope => FarField { coef: 1.0, exponent: self.alpha, start: 0.0 },
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawModel {
    #[serde(default = "default_variant")]
    variant: Variant,
    #[serde(default = "default_r_b")]
    r_b: f64,
    #[serde(default = "default_r_c")]
    r_c: f64,
    #[serde(default = "default_alpha_c")]
    alpha_c: f64,
    #[serde(default = "default_alpha")]
    alpha: f64,
}

fn default_variant() -> Variant {
    Variant::BoundedDualSlope
}

fn default_alpha_c() -> f64 {
    2.5
}

fn default_alpha() -> f64 {
    4.0
}

fn default_r_b() -> f64 {
    1.0
}

fn default_r_c() -> f64 {
    70.0
}

impl TryFrom<RawModel> for PathLossModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        PathLossModel::new(raw.variant, raw.r_b, raw.r_c, raw.alpha_c, raw.alpha)
    }
}

impl From<PathLossModel> for RawModel {
    fn from(m: PathLossModel) -> Self {
        RawModel { variant: m.variant, r_b: m.r_b, r_c: m.r_c, alpha_c: m.alpha_c, alpha: m.alpha }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_law_values() {
        let m = PathLossModel::default();
        assert_eq!(m.attenuation(0.5).unwrap(), 1.0);
        assert_eq!(m.attenuation(0.0).unwrap(), 1.0);

        let near = 70f64.powf(-2.5);
        assert_eq!(m.attenuation(70.0).unwrap(), near);
        let far_branch = m.tau() * 70f64.powf(-4.0);
        assert!((far_branch - near).abs() <= 1e-15 * near);

        // 70^1.5 * 140^-4
        let v = m.attenuation(140.0).unwrap();
        assert!((v - 1.524_5e-6).abs() < 1e-10, "{v}");
    }

    #[test]
    fn rejects_bad_distances() {
        let m = PathLossModel::default();
        assert!(m.attenuation(-1.0).is_err());
        assert!(m.attenuation(f64::NAN).is_err());
        assert!(m.attenuation(f64::INFINITY).is_err());
        let u = m.with_variant(Variant::UnboundedSingleSlope);
        assert!(u.attenuation(0.0).is_err());
        assert!(u.attenuation(0.5).unwrap() > 1.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PathLossModel::bounded_dual_slope(1.0, 70.0, 2.0, 4.0).is_err());
        assert!(PathLossModel::bounded_dual_slope(1.0, 70.0, 4.5, 4.0).is_err());
        assert!(PathLossModel::bounded_dual_slope(80.0, 70.0, 2.5, 4.0).is_err());
        assert!(PathLossModel::bounded_dual_slope(0.0, 70.0, 2.5, 4.0).is_err());
        assert!(PathLossModel::bounded_dual_slope(1.0, 70.0, 4.0, 4.0).is_ok());
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("two-ray".parse::<Variant>().is_err());
    }

    #[test]
    fn deserializes_and_validates() {
        #[derive(Deserialize)]
        struct Wrap {
            m: PathLossModel,
        }
        let ok: Wrap = toml::from_str("m = { variant = \"bounded-dual-slope\", alpha_c = 2.5, alpha = 4.0 }").unwrap();
        assert_eq!(ok.m, PathLossModel::default());
        let bad = toml::from_str::<Wrap>("m = { variant = \"bounded-dual-slope\", alpha_c = 5.0, alpha = 4.0 }");
        assert!(bad.is_err());
    }

    proptest! {
        #[test]
        fn monotone_non_increasing(d1 in 0.01f64..500.0, d2 in 0.01f64..500.0, v in 0usize..4) {
            let m = PathLossModel::default().with_variant(Variant::ALL[v]);
            let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
            prop_assert!(m.gain(lo) >= m.gain(hi));
        }

        #[test]
        fn equal_exponents_collapse_to_single_slope(d in 0.0f64..1000.0, a in 2.1f64..6.0) {
            let dual = PathLossModel::bounded_dual_slope(1.0, 70.0, a, a).unwrap();
            let single = dual.with_variant(Variant::BoundedSingleSlope);
            let (x, y) = (dual.gain(d), single.gain(d));
            prop_assert!((x - y).abs() <= 1e-12 * y.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn continuous_at_critical_distance(r_c in 2.0f64..500.0, ac in 2.1f64..4.0, extra in 0.0f64..3.0) {
            let m = PathLossModel::bounded_dual_slope(1.0, r_c, ac, ac + extra).unwrap();
            let inside = r_c.powf(-ac);
            let outside = m.tau() * r_c.powf(-(ac + extra));
            prop_assert!((inside - outside).abs() <= 1e-12 * inside);
        }
    }
}
