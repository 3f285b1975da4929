use std::f64::consts::PI;

use crate::analysis::scenario::{active_probability, CoverageResult, Method, NetworkScenario};
use crate::analysis::terms::DualSlopeTerms;
use crate::error::{Error, Result};
use crate::pathloss::PathLossModel;
use crate::specfun::{integrate_with_breaks, QuadratureSpec};

/// Constants of the closed-form bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTerms {
    /// `1 - p_a T / (1 + T)`
    pub h1: f64,
    /// `1 + p_a G2(r_b²)`
    pub h2l: f64,
    /// `1 + p_a G2(r_c²)`
    pub h2u: f64,
    /// `1 + p_a G3(T)`
    pub h3: f64,
    /// `c_T` on the bounded region, m²
    pub c_t: f64,
}

/// `λ_b π ∫_a^b e^(-λ_b π r h) dr = (e^(-λ_b π a h) - e^(-λ_b π b h)) / h`
fn exp_segment(lambda_pi: f64, h: f64, a: f64, b: f64) -> f64 {
    (-lambda_pi * h * a).exp() * -(-lambda_pi * h * (b - a)).exp_m1() / h
}

/// First piece, `r ∈ [0, r_b²]`, where `r (1 + p_a G1) = p_a c_T + H1 r`.
fn bounded_piece(lambda_pi: f64, p_a: f64, h1: f64, c: f64, rb2: f64) -> f64 {
    (-lambda_pi * p_a * c).exp() * -(-lambda_pi * rb2 * h1).exp_m1() / h1
}

/// Geometric grid `from + scale 2^k` up to `to`, so that panels resolve an
/// integrand decaying on the length `scale` even when `to - from` is far larger.
pub(crate) fn decay_breaks(from: f64, scale: f64, to: f64) -> Vec<f64> {
    (-6..64).map(|k| from + scale * 2f64.powi(k)).take_while(|&x| x < to).collect()
}

/// Coverage probability under the bounded dual-slope law: closed forms on the
/// bounded region and beyond `r_c`, adaptive quadrature in between.
pub fn coverage_exact(
    model: &PathLossModel,
    scenario: &NetworkScenario,
    spec: &QuadratureSpec,
) -> Result<CoverageResult> {
    let t = scenario.threshold();
    let terms = DualSlopeTerms::new(model, t)?;
    let p_a = active_probability(scenario);
    let lambda_pi = scenario.lambda_b() * PI;
    let (rb2, rc2) = (model.r_b().powi(2), model.r_c().powi(2));

    let h1 = 1.0 - p_a * terms.t_frac();
    let h3 = 1.0 + p_a * terms.g3();
    let first = bounded_piece(lambda_pi, p_a, h1, terms.c_bounded(), rb2);
    let third = (-lambda_pi * rc2 * h3).exp() / h3;

    let middle = if rc2 > rb2 {
        let f = |r: f64| (-lambda_pi * r * (1.0 + p_a * terms.g2(r))).exp();
        match integrate_with_breaks(f, rb2, rc2, &decay_breaks(rb2, 1.0 / lambda_pi, rc2), spec) {
            Ok(e) => lambda_pi * e.value,
            Err(Error::Convergence { estimate, error_bound }) => {
                return Err(Error::Convergence {
                    estimate: first + lambda_pi * estimate + third,
                    error_bound: lambda_pi * error_bound,
                })
            }
            Err(e) => return Err(e),
        }
    } else {
        0.0
    };
    Ok(CoverageResult::analytic(first + middle + third, Method::Exact))
}

pub fn bound_terms(model: &PathLossModel, scenario: &NetworkScenario) -> Result<BoundTerms> {
    let terms = DualSlopeTerms::new(model, scenario.threshold())?;
    let p_a = active_probability(scenario);
    let (rb2, rc2) = (model.r_b().powi(2), model.r_c().powi(2));
    Ok(BoundTerms {
        h1: 1.0 - p_a * terms.t_frac(),
        h2l: 1.0 + p_a * terms.g2(rb2),
        h2u: 1.0 + p_a * terms.g2(rc2),
        h3: 1.0 + p_a * terms.g3(),
        c_t: terms.c_bounded(),
    })
}

/// Closed-form lower and upper bounds on [`coverage_exact`], obtained by
/// freezing `G2` at its extreme values on `[r_b², r_c²]`.
pub fn coverage_bounds(
    model: &PathLossModel,
    scenario: &NetworkScenario,
) -> Result<(CoverageResult, CoverageResult, BoundTerms)> {
    let b = bound_terms(model, scenario)?;
    let p_a = active_probability(scenario);
    let lambda_pi = scenario.lambda_b() * PI;
    let (rb2, rc2) = (model.r_b().powi(2), model.r_c().powi(2));

    let outer = bounded_piece(lambda_pi, p_a, b.h1, b.c_t, rb2) + (-lambda_pi * rc2 * b.h3).exp() / b.h3;
    let lower = outer + exp_segment(lambda_pi, b.h2l, rb2, rc2);
    let upper = outer + exp_segment(lambda_pi, b.h2u, rb2, rc2);
    Ok((CoverageResult::analytic(lower, Method::LowerBound), CoverageResult::analytic(upper, Method::UpperBound), b))
}

/// Limit of the coverage probability as `λ_b -> ∞`: `exp(-λ_u π c_T)`.
pub fn coverage_asymptotic(model: &PathLossModel, lambda_u: f64, t: f64) -> Result<CoverageResult> {
    if lambda_u.is_nan() || lambda_u < 0.0 {
        return Err(Error::domain(format!("lambda_u must be >= 0, got {lambda_u}")));
    }
    let c = DualSlopeTerms::new(model, t)?.c_bounded();
    let value = if lambda_u.is_infinite() { 0.0 } else { (-lambda_u * PI * c).exp() };
    Ok(CoverageResult::analytic(value, Method::Asymptotic))
}
