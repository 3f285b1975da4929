use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Default ceiling on the expected number of points in a single draw.
pub const DEFAULT_MAX_POINTS: f64 = 1e7;

/// Homogeneous Poisson point process on the disk of `radius` centred at the origin.
pub fn sample_ppp<R: Rng + ?Sized>(density: f64, radius: f64, rng: &mut R, max_points: f64) -> Result<Vec<Point>> {
    if !(density >= 0.0 && density.is_finite()) {
        return Err(Error::domain(format!("PPP density must be finite and >= 0, got {density}")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::domain(format!("PPP radius must be positive, got {radius}")));
    }
    let mean = density * PI * radius * radius;
    if mean > max_points {
        return Err(Error::Resource(format!("expected {mean:.3e} points exceeds the cap of {max_points:.0e}")));
    }
    if mean == 0.0 {
        return Ok(Vec::new());
    }
    let n: f64 = Poisson::new(mean).map_err(|e| Error::domain(e.to_string()))?.sample(rng);
    let n = n as usize;
    let mut pts = Vec::with_capacity(n);
    for _ in 0..n {
        pts.push(uniform_in_disk(radius, rng));
    }
    Ok(pts)
}

#[inline]
pub(crate) fn uniform_in_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Point {
    // rejection from the bounding square: cheaper than sqrt + sin_cos
    loop {
        let x = 2.0 * rng.random::<f64>() - 1.0;
        let y = 2.0 * rng.random::<f64>() - 1.0;
        if x * x + y * y <= 1.0 {
            return [radius * x, radius * y];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_for_zero_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_ppp(0.0, 10.0, &mut rng, DEFAULT_MAX_POINTS).unwrap().is_empty());
    }

    #[test]
    fn mean_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let radius = 10.0;
        let density = 1000.0 / (PI * radius * radius);
        let draws = 10_000;
        let total: usize = (0..draws).map(|_| sample_ppp(density, radius, &mut rng, 1e7).unwrap().len()).sum();
        let mean = total as f64 / draws as f64;
        // 3σ of the sample mean of Poisson(1000)
        assert!((mean - 1000.0).abs() <= 3.0 * 1000f64.sqrt() / 100.0, "{mean}");
    }

    #[test]
    fn uniform_over_the_disk() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let radius = 5.0;
        let pts = sample_ppp(2000.0, radius, &mut rng, 1e7).unwrap();
        let n = pts.len() as f64;
        let inner = pts.iter().filter(|p| p[0].hypot(p[1]) < radius / 2.0).count() as f64;
        let sigma = (0.25 * 0.75 / n).sqrt();
        assert!((inner / n - 0.25).abs() <= 3.0 * sigma, "{}", inner / n);
        assert!(pts.iter().all(|p| p[0].hypot(p[1]) <= radius));
    }

    #[test]
    fn errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(matches!(sample_ppp(1.0, 1e4, &mut rng, 1e7), Err(Error::Resource(_))));
        assert!(sample_ppp(-1.0, 1.0, &mut rng, 1e7).is_err());
        assert!(sample_ppp(1.0, 0.0, &mut rng, 1e7).is_err());
    }
}
