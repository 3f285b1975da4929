//! Analytical coverage probability and area spectral efficiency.

mod ase;
mod coverage;
mod general;
mod scenario;
mod terms;

pub use ase::{ase, ase_asymptotic, ase_bounds, ase_from_coverage, spectral_efficiency};
pub use coverage::{bound_terms, coverage_asymptotic, coverage_bounds, coverage_exact, BoundTerms};
pub use general::{coverage_general, interference_integral};
pub use scenario::{
    active_probability, db_to_linear, linear_to_db, per_km2_to_per_m2, per_m2_to_per_km2, CoverageResult, Method,
    NetworkScenario, M2_PER_KM2,
};
pub use terms::{bounded_region_constant, c_t, g1, g2, g3};
