//! Stochastic-geometry simulator: PPP deployments around a typical UE at the
//! origin, nearest-BS association, load-dependent BS activity, Rayleigh fading.

mod index;
mod ppp;
mod sim;

pub use index::GridIndex;
pub use ppp::{sample_ppp, Point, DEFAULT_MAX_POINTS};
pub use sim::{
    build_realization, estimate_coverage, sample_sir, LoadMode, Realization, SimConfig, SimEstimate, Window, GENERATOR,
    MIN_LAMBDA_B,
};
