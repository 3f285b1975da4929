use crate::analysis::coverage::{coverage_asymptotic, coverage_bounds, coverage_exact};
use crate::analysis::general::coverage_general;
use crate::analysis::scenario::{active_probability, Method, NetworkScenario};
use crate::analysis::terms::DualSlopeTerms;
use crate::error::{Error, Result};
use crate::pathloss::PathLossModel;
use crate::specfun::QuadratureSpec;

/// `log₂(1 + T)`, bit/s/Hz per successful link.
pub fn spectral_efficiency(t: f64) -> f64 {
    t.ln_1p() / std::f64::consts::LN_2
}

/// Area spectral efficiency `p_a λ_b P_c log₂(1 + T)` in bit/s/Hz/m².
pub fn ase_from_coverage(scenario: &NetworkScenario, coverage: f64) -> f64 {
    let p_a = active_probability(scenario);
    if p_a == 0.0 {
        return 0.0;
    }
    p_a * scenario.lambda_b() * coverage * spectral_efficiency(scenario.threshold())
}

pub fn ase(model: &PathLossModel, scenario: &NetworkScenario, method: Method, spec: &QuadratureSpec) -> Result<f64> {
    let pc = match method {
        Method::Exact => coverage_exact(model, scenario, spec)?.value,
        Method::General => coverage_general(model, scenario, spec)?.value,
        Method::LowerBound => coverage_bounds(model, scenario)?.0.value,
        Method::UpperBound => coverage_bounds(model, scenario)?.1.value,
        Method::Asymptotic => coverage_asymptotic(model, scenario.lambda_u(), scenario.threshold())?.value,
        Method::MonteCarlo => {
            return Err(Error::Config("Monte Carlo ASE comes from the simulator's own estimate".into()))
        }
    };
    Ok(ase_from_coverage(scenario, pc))
}

pub fn ase_bounds(model: &PathLossModel, scenario: &NetworkScenario) -> Result<(f64, f64)> {
    let (lo, hi, _) = coverage_bounds(model, scenario)?;
    Ok((ase_from_coverage(scenario, lo.value), ase_from_coverage(scenario, hi.value)))
}

/// Dense-network limit `λ_u exp(-λ_u π c_T) log₂(1 + T)`.
pub fn ase_asymptotic(model: &PathLossModel, lambda_u: f64, t: f64) -> Result<f64> {
    let c = DualSlopeTerms::new(model, t)?.c_bounded();
    if lambda_u.is_infinite() {
        return Ok(0.0);
    }
    Ok(lambda_u * (-lambda_u * std::f64::consts::PI * c).exp() * spectral_efficiency(t))
}
