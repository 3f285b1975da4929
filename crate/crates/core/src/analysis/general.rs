//! Coverage probability for an arbitrary path loss law by nested quadrature:
//!
//! `P_c = ∫₀^∞ exp(-u [1 + p_a G(u / (λ_b π))]) du`, with
//! `z G(z) = ∫_{√z}^∞ 2v / (1 + l(√z) / (T l(v))) dv`.
//!
//! Nothing here uses the hypergeometric closed forms, so it serves as an
//! independent check on [`coverage_exact`](super::coverage_exact). The far
//! tail of the inner integral is summed from its power series instead of
//! being truncated.

use std::f64::consts::PI;

use crate::analysis::coverage::decay_breaks;
use crate::analysis::scenario::{active_probability, CoverageResult, Method, NetworkScenario};
use crate::error::{Error, Result};
use crate::pathloss::PathLossModel;
use crate::specfun::{integrate_with_breaks, QuadratureSpec};

/// Largest ratio `T l(v) / l(x)` at which the inner integral switches to the series tail.
const TAIL_RATIO: f64 = 1e-2;

/// `∫_x^∞ 2v / (1 + l(x) / (T l(v))) dv`: the interference exponent divided by `λ_b π p_a`.
pub fn interference_integral(model: &PathLossModel, t: f64, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    let lx = model.gain(x);
    let far = model.far_field();
    // q(v) = T coef v^-α / l(x) once v is past the last breakpoint
    let scale = t * far.coef / lx;
    let split = far.start.max(x).max((scale / TAIL_RATIO).powf(1.0 / far.exponent));

    let f = |v: f64| 2.0 * v / (1.0 + lx / (t * model.gain(v)));
    let body = if split > x { integrate_with_breaks(f, x, split, &model.breakpoints(), spec)?.value } else { 0.0 };

    // 2v q/(1+q) = 2v Σ_{k≥1} (-1)^(k+1) q^k, integrated term by term from `split`.
    let q = scale * split.powf(-far.exponent);
    let mut tail = 0.0;
    let mut qk = 1.0;
    for k in 1..200 {
        qk *= -q;
        let term = -qk * 2.0 * split * split / (far.exponent * k as f64 - 2.0);
        tail += term;
        if term.abs() <= 1e-17 * tail.abs() {
            break;
        }
    }
    Ok(body + tail)
}

pub fn coverage_general(
    model: &PathLossModel,
    scenario: &NetworkScenario,
    spec: &QuadratureSpec,
) -> Result<CoverageResult> {
    if model.alpha() <= 2.0 {
        return Err(Error::domain("far-field exponent must exceed 2 for finite interference"));
    }
    let t = scenario.threshold();
    let p_a = active_probability(scenario);
    let lambda_pi = scenario.lambda_b() * PI;
    let inner_spec = spec.tighter(1e-2);

    let integrand = |u: f64| {
        let z = u / lambda_pi;
        let k = if p_a > 0.0 {
            match interference_integral(model, t, z.sqrt(), &inner_spec) {
                Ok(k) => k,
                Err(_) => return f64::NAN,
            }
        } else {
            0.0
        };
        (-(u + lambda_pi * p_a * k)).exp()
    };
    let mut breaks: Vec<f64> = model.breakpoints().iter().map(|d| lambda_pi * d * d).collect();
    breaks.extend(decay_breaks(0.0, 1.0, 64.0));
    let value = integrate_with_breaks(integrand, 0.0, f64::INFINITY, &breaks, spec)?.value;
    Ok(CoverageResult::analytic(value, Method::General))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::coverage::coverage_exact;
    use crate::analysis::scenario::per_km2_to_per_m2 as km2;
    use crate::pathloss::Variant;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn single_slope_full_load_closed_form() {
        let m = PathLossModel::default().with_variant(Variant::UnboundedSingleSlope);
        // 1 / (1 + √T (π/2 - atan(1/√T))) at α = 4, T = 1
        let want = 1.0 / (1.0 + PI / 4.0);
        for lb in [1e1, 1e2, 1e3] {
            let s = NetworkScenario::full_load(km2(lb), 1.0).unwrap();
            let v = coverage_general(&m, &s, &q()).unwrap().value;
            assert!((v - want).abs() < 1e-7, "{lb}: {v} vs {want}");
        }
        let s = NetworkScenario::full_load(1e-3, 10.0).unwrap();
        let rho = 10f64.sqrt() * (PI / 2.0 - (1.0 / 10f64.sqrt()).atan());
        let v = coverage_general(&m, &s, &q()).unwrap().value;
        assert!((v - 1.0 / (1.0 + rho)).abs() < 1e-7);
    }

    #[test]
    fn agrees_with_exact() {
        let m = PathLossModel::default();
        for (lb, lu) in [(1e2, f64::INFINITY), (1e3, 200.0), (1e5, 2000.0), (10.0, 20.0)] {
            let s = NetworkScenario::new(km2(lb), km2(lu), 10.0).unwrap();
            let a = coverage_exact(&m, &s, &q()).unwrap().value;
            let b = coverage_general(&m, &s, &q()).unwrap().value;
            assert!((a - b).abs() < 1e-6, "{lb} {lu}: {a} vs {b}");
        }
    }

    #[test]
    fn agrees_with_exact_for_other_bounded_radii() {
        for r_b in [0.5, 2.0] {
            let m = PathLossModel::bounded_dual_slope(r_b, 70.0, 2.5, 4.0).unwrap();
            for lb in [1e3, 1e5] {
                let s = NetworkScenario::new(km2(lb), km2(200.0), 10.0).unwrap();
                let a = coverage_exact(&m, &s, &q()).unwrap().value;
                let b = coverage_general(&m, &s, &q()).unwrap().value;
                assert!((a - b).abs() < 1e-6, "r_b={r_b} {lb}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn equal_exponents_match_single_slope() {
        let dual = PathLossModel::bounded_dual_slope(1.0, 70.0, 3.0, 3.0).unwrap();
        let single = dual.with_variant(Variant::BoundedSingleSlope);
        for lb in [1e2, 1e4] {
            let s = NetworkScenario::new(km2(lb), km2(200.0), 10.0).unwrap();
            let a = coverage_general(&dual, &s, &q()).unwrap().value;
            let b = coverage_general(&single, &s, &q()).unwrap().value;
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn no_users_means_no_interference() {
        let m = PathLossModel::default();
        let s = NetworkScenario::new(1e-3, 0.0, 10.0).unwrap();
        assert!((coverage_general(&m, &s, &q()).unwrap().value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_single_slope_overestimates_when_dense() {
        let bds = PathLossModel::default();
        let uss = bds.with_variant(Variant::UnboundedSingleSlope);
        for lb in [1e4, 1e5, 1e6] {
            let s = NetworkScenario::full_load(km2(lb), 10.0).unwrap();
            let a = coverage_general(&uss, &s, &q()).unwrap().value;
            let b = coverage_general(&bds, &s, &q()).unwrap().value;
            assert!(a >= b, "{lb}: {a} < {b}");
        }
    }
}
