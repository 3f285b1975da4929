use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Densities per km² at the user-facing boundary are divided by this to get per m².
pub const M2_PER_KM2: f64 = 1e6;

pub fn per_km2_to_per_m2(x: f64) -> f64 {
    x / M2_PER_KM2
}

pub fn per_m2_to_per_km2(x: f64) -> f64 {
    x * M2_PER_KM2
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// BS and UE densities (per m²) and the SIR threshold (linear).
///
/// `lambda_u = +inf` stands for a fully loaded network where every BS transmits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkScenario {
    lambda_b: f64,
    lambda_u: f64,
    threshold: f64,
}

impl NetworkScenario {
    pub fn new(lambda_b: f64, lambda_u: f64, threshold: f64) -> Result<Self> {
        if !(lambda_b.is_finite() && lambda_b > 0.0) {
            return Err(Error::domain(format!("lambda_b must be positive and finite, got {lambda_b}")));
        }
        if lambda_u.is_nan() || lambda_u < 0.0 {
            return Err(Error::domain(format!("lambda_u must be >= 0, got {lambda_u}")));
        }
        if !(threshold.is_finite() && threshold > 0.0) {
            return Err(Error::domain(format!("SIR threshold must be positive, got {threshold}")));
        }
        Ok(NetworkScenario { lambda_b, lambda_u, threshold })
    }

    pub fn full_load(lambda_b: f64, threshold: f64) -> Result<Self> {
        Self::new(lambda_b, f64::INFINITY, threshold)
    }

    pub fn lambda_b(&self) -> f64 {
        self.lambda_b
    }

    pub fn lambda_u(&self) -> f64 {
        self.lambda_u
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn is_full_load(&self) -> bool {
        self.lambda_u == f64::INFINITY
    }

    pub fn with_lambda_b(&self, lambda_b: f64) -> Result<Self> {
        Self::new(lambda_b, self.lambda_u, self.threshold)
    }

    pub fn with_threshold(&self, threshold: f64) -> Result<Self> {
        Self::new(self.lambda_b, self.lambda_u, threshold)
    }
}

/// Probability that a BS has at least one UE in its Voronoi cell, from the
/// Gamma(3.5) fit of the cell-area distribution.
pub fn active_probability(scenario: &NetworkScenario) -> f64 {
    if scenario.is_full_load() {
        return 1.0;
    }
    let ratio = scenario.lambda_u / (3.5 * scenario.lambda_b);
    -(-3.5 * ratio.ln_1p()).exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    LowerBound,
    UpperBound,
    Asymptotic,
    General,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::LowerBound => "lower-bound",
            Method::UpperBound => "upper-bound",
            Method::Asymptotic => "asymptotic",
            Method::General => "general",
            Method::MonteCarlo => "montecarlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageResult {
    pub value: f64,
    pub method: Method,
    /// 95% confidence half-width, Monte Carlo only.
    pub half_width: Option<f64>,
}

impl CoverageResult {
    pub(crate) fn analytic(value: f64, method: Method) -> Self {
        // Summed closed forms can overshoot [0, 1] by rounding.
        CoverageResult { value: value.clamp(0.0, 1.0), method, half_width: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn active_probability_values() {
        let s = NetworkScenario::new(1e-3, 0.0, 10.0).unwrap();
        assert_eq!(active_probability(&s), 0.0);

        let s = NetworkScenario::new(1e-3, 3.5e-3, 10.0).unwrap();
        let want = 1.0 - 2f64.powf(-3.5);
        assert!((active_probability(&s) - want).abs() < 1e-15);
        assert!((active_probability(&s) - 0.91161).abs() < 1e-5);

        let s = NetworkScenario::new(per_km2_to_per_m2(1e4), per_km2_to_per_m2(2e8), 10.0).unwrap();
        assert!(active_probability(&s) >= 0.999_999);

        let s = NetworkScenario::full_load(1e-3, 10.0).unwrap();
        assert_eq!(active_probability(&s), 1.0);
    }

    #[test]
    fn validation() {
        assert!(NetworkScenario::new(0.0, 1.0, 1.0).is_err());
        assert!(NetworkScenario::new(1.0, -1.0, 1.0).is_err());
        assert!(NetworkScenario::new(1.0, f64::NAN, 1.0).is_err());
        assert!(NetworkScenario::new(1.0, 1.0, 0.0).is_err());
        assert!(NetworkScenario::new(f64::INFINITY, 1.0, 1.0).is_err());
    }

    #[test]
    fn decibels() {
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        assert!((linear_to_db(db_to_linear(-3.0)) + 3.0).abs() < 1e-12);
    }
}
