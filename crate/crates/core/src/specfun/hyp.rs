use std::f64::consts::PI;

use crate::error::{Error, Result};

const EPS: f64 = 1e-17;
const MAX_TERMS: usize = 20_000_000;

/// `F(b, z) = 2F1(1, b; 1 + b; -z)` for `b > 0`, `z >= 0`.
///
/// Equivalently `b * ∫₀¹ t^(b-1) / (1 + z t) dt`, so `0 < F <= 1` and
/// `F(b, 0) = 1`.
pub fn hyp_f(b: f64, z: f64) -> Result<f64> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::domain(format!("hyp_f needs b > 0, got {b}")));
    }
    if z.is_nan() || z < 0.0 {
        return Err(Error::domain(format!("hyp_f needs z >= 0, got {z}")));
    }
    if z == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(eval(b, z))
}

/// Unchecked variant for inner loops.
pub(crate) fn eval(b: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 1.0;
    }
    if z <= 0.5 {
        return direct_series(b, z);
    }
    if z <= 2.0 {
        return pfaff_series(b, z);
    }
    if b == 1.0 {
        return z.ln_1p() / z;
    }
    let n = b.floor();
    let frac = b - n;
    if frac == 0.0 {
        // integer b: start from F(1, z) = ln(1 + z) / z
        return recur_up(1.0, z.ln_1p() / z, n as usize - 1, z);
    }
    if (0.02..=0.98).contains(&frac) {
        return recur_up(frac, large_z(frac, z), n as usize, z);
    }
    pfaff_series(b, z)
}

/// `sum_k (-z)^k b / (b + k)`, for `z <= 1/2`.
fn direct_series(b: f64, z: f64) -> f64 {
    let mut sum = 1.0;
    let mut power = 1.0;
    for k in 1..MAX_TERMS {
        power *= -z;
        let term = power * b / (b + k as f64);
        sum += term;
        if term.abs() <= EPS * sum.abs() {
            break;
        }
    }
    sum
}

/// `(1 + z) F(b, z) = 2F1(1, 1; 1 + b; w)` with `w = z / (1 + z) < 1`.
/// All terms are positive, so accuracy holds for any `z`; only the term
/// count grows as `w -> 1`.
fn pfaff_series(b: f64, z: f64) -> f64 {
    let w = z / (1.0 + z);
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..MAX_TERMS {
        let k = k as f64;
        term *= w * (k + 1.0) / (k + 1.0 + b);
        sum += term;
        if term <= EPS * sum {
            break;
        }
    }
    sum / (1.0 + z)
}

/// Expansion in `1/z` for `0 < b < 1`, `z > 1`:
/// `F = (π b / sin π b) z^(-b) - (b / z) sum_k (-1/z)^k / (k + 1 - b)`.
fn large_z(b: f64, z: f64) -> f64 {
    let lead = PI * b / (PI * b).sin() * z.powf(-b);
    let inv = -1.0 / z;
    let mut power = 1.0;
    let mut sum = 0.0;
    for k in 0..MAX_TERMS {
        let term = power / (k as f64 + 1.0 - b);
        sum += term;
        if term.abs() <= EPS * sum.abs() {
            break;
        }
        power *= inv;
    }
    lead - b / z * sum
}

/// `F(b + 1, z) = (b + 1)(1 - F(b, z)) / (b z)`, stable upward for `z > 2`.
fn recur_up(mut b: f64, mut f: f64, steps: usize, z: f64) -> f64 {
    for _ in 0..steps {
        f = (b + 1.0) * (1.0 - f) / (b * z);
        b += 1.0;
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Euler integral `b ∫₀¹ t^(b-1)/(1+zt) dt`; with `t = e^(-y/b)` it becomes
    /// `∫₀^∞ e^(-y) / (1 + z e^(-y/b)) dy`, smooth, so composite Simpson works.
    fn euler_oracle(b: f64, z: f64) -> f64 {
        let upper = 45.0;
        let n = 400_000;
        let h = upper / n as f64;
        let g = |y: f64| (-y).exp() / (1.0 + z * (-y / b).exp());
        let mut s = g(0.0) + g(upper);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * g(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn trivial_values() {
        assert_eq!(hyp_f(0.5, 0.0).unwrap(), 1.0);
        assert!((hyp_f(1.0, 1.0).unwrap() - 2f64.ln()).abs() < 1e-12);
        // 2F1(1,1;2;-z) = ln(1+z)/z
        for z in [0.1f64, 0.49, 0.51, 1.9, 2.1, 7.0, 1e3, 1e8] {
            let want = z.ln_1p() / z;
            assert!((hyp_f(1.0, z).unwrap() - want).abs() <= 1e-14 * want, "z={z}");
        }
    }

    #[test]
    fn matches_euler_integral() {
        for b in [0.2, 0.5, 0.8, 1.3, 2.0, 2.5] {
            for z in [0.1, 0.5, 1.0, 2.5, 10.0, 1e3, 4.1e3] {
                let got = hyp_f(b, z).unwrap();
                let want = euler_oracle(b, z);
                assert!((got - want).abs() <= 1e-10 * want, "b={b} z={z}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn regime_boundaries_agree() {
        // every evaluation path must agree where they meet
        for b in [0.2, 0.5, 0.8] {
            for z in [0.5, 2.0, 2.000001] {
                let p = pfaff_series(b, z);
                assert!((direct_series(b, z.min(0.5)) - pfaff_series(b, z.min(0.5))).abs() < 1e-15);
                if z > 1.0 {
                    assert!((large_z(b, z) - p).abs() < 1e-14, "b={b} z={z}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(hyp_f(0.0, 1.0).is_err());
        assert!(hyp_f(-0.5, 1.0).is_err());
        assert!(hyp_f(0.5, -1e-9).is_err());
        assert!(hyp_f(0.5, f64::NAN).is_err());
        assert_eq!(hyp_f(0.5, f64::INFINITY).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn decreasing_in_z(b in 0.05f64..3.0, z in 0.0f64..1e4, dz in 1e-3f64..10.0) {
            let a = hyp_f(b, z).unwrap();
            let c = hyp_f(b, z + dz).unwrap();
            prop_assert!(a > c, "b={} z={} {} {}", b, z, a, c);
            prop_assert!(a <= 1.0 && c > 0.0);
        }

        #[test]
        fn pfaff_identity(b in 0.05f64..0.95, z in 0.0f64..1e3) {
            // (1+z) F(b,z) = 2F1(1,1;1+b;z/(1+z)), second route via the raw Pfaff series
            let lhs = hyp_f(b, z).unwrap() * (1.0 + z);
            let rhs = pfaff_series(b, z) * (1.0 + z);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }
    }
}
