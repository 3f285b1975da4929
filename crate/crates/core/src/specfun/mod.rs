//! Numerical kernels: the `2F1(1, b; 1 + b; -z)` family and adaptive quadrature.

mod hyp;
mod quad;

pub(crate) use hyp::eval as hyp_f_unchecked;
pub use hyp::hyp_f;
pub use quad::{integrate, integrate_with_breaks, Estimate, QuadratureSpec};
