//! Auxiliary terms of the bounded dual-slope coverage integral.
//!
//! With `K(x) = ∫_x^∞ 2v / (1 + l(x) / (T l(v))) dv` the interference
//! exponent at serving distance `x` is `λ_b π p_a K(x)`, and the three
//! pieces of the coverage integral use `r G(r) = K(√r)` on
//! `[0, r_b²]`, `[r_b², r_c²]` and `[r_c², ∞)`:
//!
//! * `G1(r) = c_T(r_b) / r - T / (1 + T)`
//! * `G2(r) = [c_T(√r) + r_b² (F(2/α_c, 1/T) - T/(1+T))] / r - F(2/α_c, 1/T)`
//! * `G3    = T (α/2 - 1)⁻¹ F(1 - 2/α, T)`
//!
//! `c_T(x) = r_c² F(2/α_c, (r_c/x)^α_c / T) - r_b² [F(2/α_c, 1/T) - T/(1+T)]
//!         + 2 T x^α_c r_c^(2-α_c) / (α - 2) F(1 - 2/α, T (x/r_c)^α_c)`
//!
//! The near-field branch (`α_c`) feeds the finite hypergeometric term and the
//! far-field branch (`α`) feeds the tail term; this is what makes the three
//! pieces meet continuously at `r_b²` and `r_c²`.

use crate::error::{Error, Result};
use crate::pathloss::{PathLossModel, Variant};
use crate::specfun::hyp_f_unchecked as hyp;

/// Precomputed, threshold-dependent constants for one bounded dual-slope model.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DualSlopeTerms {
    r_b: f64,
    r_c: f64,
    alpha_c: f64,
    alpha: f64,
    t: f64,
    /// `T / (1 + T)`
    t_frac: f64,
    /// `F(2/α_c, 1/T)`
    f_near_unit: f64,
    /// value of `c_T` on the bounded region, `K(0)`
    c_bounded: f64,
    g3: f64,
}

impl DualSlopeTerms {
    pub(crate) fn new(model: &PathLossModel, t: f64) -> Result<Self> {
        if model.variant() != Variant::BoundedDualSlope {
            return Err(Error::domain(format!(
                "closed-form terms need the bounded dual-slope law, got {}",
                model.variant()
            )));
        }
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::domain(format!("SIR threshold must be positive, got {t}")));
        }
        let (r_b, r_c, alpha_c, alpha) = (model.r_b(), model.r_c(), model.alpha_c(), model.alpha());
        let t_frac = t / (1.0 + t);
        let f_near_unit = hyp(2.0 / alpha_c, 1.0 / t);
        let g3 = t / (alpha / 2.0 - 1.0) * hyp(1.0 - 2.0 / alpha, t);

        // K(0) with l(x) = 1: flat part up to r_b, near-field branch, far-field tail.
        let near = r_c * r_c * hyp(2.0 / alpha_c, r_c.powf(alpha_c) / t)
            - r_b * r_b * hyp(2.0 / alpha_c, r_b.powf(alpha_c) / t);
        let tail = 2.0 * t * r_c.powf(2.0 - alpha_c) / (alpha - 2.0) * hyp(1.0 - 2.0 / alpha, t * r_c.powf(-alpha_c));
        let c_bounded = t_frac * r_b * r_b + near + tail;

        Ok(DualSlopeTerms { r_b, r_c, alpha_c, alpha, t, t_frac, f_near_unit, c_bounded, g3 })
    }

    pub(crate) fn t_frac(&self) -> f64 {
        self.t_frac
    }

    pub(crate) fn c_bounded(&self) -> f64 {
        self.c_bounded
    }

    pub(crate) fn c_t(&self, x: f64) -> f64 {
        let (r_b, r_c, ac, a, t) = (self.r_b, self.r_c, self.alpha_c, self.alpha, self.t);
        let ratio = x / r_c;
        r_c * r_c * hyp(2.0 / ac, ratio.powf(-ac) / t) - r_b * r_b * (self.f_near_unit - self.t_frac)
            + 2.0 * t * x.powf(ac) * r_c.powf(2.0 - ac) / (a - 2.0) * hyp(1.0 - 2.0 / a, t * ratio.powf(ac))
    }

    pub(crate) fn g1(&self, r: f64) -> f64 {
        self.c_bounded / r - self.t_frac
    }

    pub(crate) fn g2(&self, r: f64) -> f64 {
        (self.c_t(r.sqrt()) + self.r_b * self.r_b * (self.f_near_unit - self.t_frac)) / r - self.f_near_unit
    }

    pub(crate) fn g3(&self) -> f64 {
        self.g3
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::domain(format!("SIR threshold must be positive, got {t}")));
    }
    Ok(())
}

/// `c_T(α, α_c, r_c, x)` for `r_b <= x <= r_c`.
pub fn c_t(model: &PathLossModel, t: f64, x: f64) -> Result<f64> {
    check_threshold(t)?;
    let terms = DualSlopeTerms::new(model, t)?;
    if !(x >= model.r_b() && x <= model.r_c()) {
        return Err(Error::domain(format!("c_T needs r_b <= x <= r_c, got x = {x}")));
    }
    Ok(terms.c_t(x))
}

/// The constant governing the dense-network limit: `c_T` evaluated for a
/// serving BS inside the bounded region. Equal to `c_T(r_b)` when `r_b = 1`;
/// for other `r_b` the law jumps at `r_b` and this is the value consistent
/// with a serving distance below `r_b`.
pub fn bounded_region_constant(model: &PathLossModel, t: f64) -> Result<f64> {
    Ok(DualSlopeTerms::new(model, t)?.c_bounded())
}

/// `G1(r, T)` for `0 < r <= r_b²`.
pub fn g1(model: &PathLossModel, t: f64, r: f64) -> Result<f64> {
    let terms = DualSlopeTerms::new(model, t)?;
    let rb2 = model.r_b() * model.r_b();
    if !(r > 0.0 && r <= rb2) {
        return Err(Error::domain(format!("G1 needs 0 < r <= r_b², got {r}")));
    }
    Ok(terms.g1(r))
}

/// `G2(r, T)` for `r_b² <= r <= r_c²`.
pub fn g2(model: &PathLossModel, t: f64, r: f64) -> Result<f64> {
    let terms = DualSlopeTerms::new(model, t)?;
    let (rb2, rc2) = (model.r_b() * model.r_b(), model.r_c() * model.r_c());
    if !(r >= rb2 && r <= rc2) {
        return Err(Error::domain(format!("G2 needs r_b² <= r <= r_c², got {r}")));
    }
    Ok(terms.g2(r))
}

pub fn g3(model: &PathLossModel, t: f64) -> Result<f64> {
    Ok(DualSlopeTerms::new(model, t)?.g3())
}
