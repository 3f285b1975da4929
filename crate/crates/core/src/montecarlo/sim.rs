use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::index::GridIndex;
use super::ppp::{sample_ppp, Point, DEFAULT_MAX_POINTS};
use crate::analysis::{active_probability, spectral_efficiency, CoverageResult, Method, NetworkScenario};
use crate::error::{Error, Result};
use crate::pathloss::PathLossModel;

/// Smallest BS density (per m²) the simulator accepts.
pub const MIN_LAMBDA_B: f64 = 1e-10;

/// Identifies the generator in run metadata.
pub const GENERATOR: &str = "ChaCha8Rng (rand_chacha 0.9), seed_from_u64(master ^ purpose), stream = trial index";

const GEOMETRY_STREAM: u64 = 0;
const FADING_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

/// Resampling attempts before giving up on drawing at least one BS.
const MAX_RESAMPLES: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoadMode {
    /// A BS is active iff some UE (the typical one included) is closest to it.
    ExactVoronoi,
    /// Each BS is active independently with the fitted probability; the serving BS always is.
    IndependentThinning,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Window {
    Auto,
    Radius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub trials: u64,
    pub master_seed: u64,
    pub window: Window,
    pub load_mode: LoadMode,
    pub min_expected_bs: f64,
    pub max_points: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            trials: 20_000,
            master_seed: 1,
            window: Window::Auto,
            load_mode: LoadMode::ExactVoronoi,
            min_expected_bs: 500.0,
            max_points: DEFAULT_MAX_POINTS,
        }
    }
}

impl SimConfig {
    /// Simulation disk radius for this model and BS density.
    pub fn window_radius(&self, model: &PathLossModel, lambda_b: f64) -> Result<f64> {
        let floor = 3.0 * model.r_c();
        match self.window {
            Window::Radius(r) if r.is_finite() && r >= floor => Ok(r),
            Window::Radius(r) => Err(Error::Config(format!("window radius {r} m is below 3 r_c = {floor} m"))),
            Window::Auto => {
                let for_count = (self.min_expected_bs / (PI * lambda_b)).sqrt();
                Ok(floor.max(for_count).max(10.0 / lambda_b.sqrt()))
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("at least one trial is required".into()));
        }
        if !(self.min_expected_bs >= 1.0) || !(self.max_points >= 1.0) {
            return Err(Error::Config("min_expected_bs and max_points must be >= 1".into()));
        }
        Ok(())
    }
}

fn trial_rng(master_seed: u64, purpose: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed ^ purpose);
    rng.set_stream(trial_index);
    rng
}

/// One snapshot of the network around the typical UE at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub bs_points: Vec<Point>,
    /// Other UEs; the typical UE sits at the origin and is not listed.
    pub ue_points: Vec<Point>,
    pub active_mask: Vec<bool>,
    pub serving_index: usize,
    pub window_radius: f64,
    /// Draws discarded because no BS fell in the window.
    pub resampled: u32,
}

impl Realization {
    pub fn serving_distance(&self) -> f64 {
        let p = self.bs_points[self.serving_index];
        p[0].hypot(p[1])
    }
}

fn check_inputs(scenario: &NetworkScenario, config: &SimConfig) -> Result<()> {
    config.validate()?;
    if scenario.lambda_b() < MIN_LAMBDA_B {
        return Err(Error::domain(format!(
            "lambda_b = {:e} per m² is below the simulator floor {MIN_LAMBDA_B:e}",
            scenario.lambda_b()
        )));
    }
    Ok(())
}

/// Draws the BS and UE processes, associates UEs, and marks active BSs.
/// Deterministic in `(config.master_seed, trial_index)`.
pub fn build_realization(
    model: &PathLossModel,
    scenario: &NetworkScenario,
    config: &SimConfig,
    trial_index: u64,
) -> Result<Realization> {
    check_inputs(scenario, config)?;
    let radius = config.window_radius(model, scenario.lambda_b())?;
    let mut rng = trial_rng(config.master_seed, GEOMETRY_STREAM, trial_index);
    build_with(model, scenario, config, radius, &mut rng)
}

fn build_with<R: Rng>(
    _model: &PathLossModel,
    scenario: &NetworkScenario,
    config: &SimConfig,
    radius: f64,
    rng: &mut R,
) -> Result<Realization> {
    let mut resampled = 0;
    let bs_points = loop {
        let pts = sample_ppp(scenario.lambda_b(), radius, rng, config.max_points)?;
        if !pts.is_empty() {
            break pts;
        }
        resampled += 1;
        if resampled >= MAX_RESAMPLES {
            return Err(Error::Resource(format!("no BS drawn in {MAX_RESAMPLES} attempts")));
        }
    };
    let index = GridIndex::new(&bs_points, 2.0);
    let (serving_index, _) = index.nearest([0.0, 0.0]).expect("non-empty");

    let (ue_points, mut active_mask) = if scenario.is_full_load() {
        (Vec::new(), vec![true; bs_points.len()])
    } else {
        match config.load_mode {
            LoadMode::ExactVoronoi => {
                let ues = sample_ppp(scenario.lambda_u(), radius, rng, config.max_points)?;
                let mut mask = vec![false; bs_points.len()];
                for &u in &ues {
                    let (i, _) = index.nearest(u).expect("non-empty");
                    mask[i] = true;
                }
                (ues, mask)
            }
            LoadMode::IndependentThinning => {
                let p_a = active_probability(scenario);
                let mask = (0..bs_points.len()).map(|_| rng.random::<f64>() < p_a).collect();
                (Vec::new(), mask)
            }
        }
    };
    active_mask[serving_index] = true;

    Ok(Realization { bs_points, ue_points, active_mask, serving_index, window_radius: radius, resampled })
}

/// Draws Rayleigh fading and returns the typical UE's SIR; `+inf` without interferers.
pub fn sample_sir<R: Rng + ?Sized>(realization: &Realization, model: &PathLossModel, rng: &mut R) -> f64 {
    let gain = |p: &Point| model.gain(p[0].hypot(p[1]));
    let s = realization.serving_index;
    let signal: f64 = Exp1.sample(rng);
    let signal = signal * gain(&realization.bs_points[s]);
    let mut interference = 0.0;
    for (i, p) in realization.bs_points.iter().enumerate() {
        if i != s && realization.active_mask[i] {
            let h: f64 = Exp1.sample(rng);
            interference += h * gain(p);
        }
    }
    if interference == 0.0 {
        f64::INFINITY
    } else {
        signal / interference
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    covered: u64,
    /// non-serving BSs inside half the window radius
    inner_bs: u64,
    inner_active: u64,
    flagged: u64,
    resampled: u64,
}

impl std::ops::Add for Tally {
    type Output = Tally;

    fn add(self, o: Tally) -> Tally {
        Tally {
            covered: self.covered + o.covered,
            inner_bs: self.inner_bs + o.inner_bs,
            inner_active: self.inner_active + o.inner_active,
            flagged: self.flagged + o.flagged,
            resampled: self.resampled + o.resampled,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub coverage: CoverageResult,
    /// Active fraction among non-serving BSs within half the window radius.
    pub empirical_p_a: f64,
    /// `p̂_a λ_b P̂_c log₂(1 + T)`, bit/s/Hz/m².
    pub ase: f64,
    pub trials: u64,
    pub window_radius: f64,
    pub flagged_trials: u64,
    pub resampled_draws: u64,
}

/// Monte Carlo estimate of `P(SIR > T)`. Trials run in parallel; every count
/// is an integer sum, so the result does not depend on the thread count.
pub fn estimate_coverage(model: &PathLossModel, scenario: &NetworkScenario, config: &SimConfig) -> Result<SimEstimate> {
    check_inputs(scenario, config)?;
    let radius = config.window_radius(model, scenario.lambda_b())?;
    let t = scenario.threshold();

    let tally = (0..config.trials)
        .into_par_iter()
        .map(|trial| -> Result<Tally> {
            let mut geo = trial_rng(config.master_seed, GEOMETRY_STREAM, trial);
            let real = build_with(model, scenario, config, radius, &mut geo)?;
            let mut fading = trial_rng(config.master_seed, FADING_STREAM, trial);
            let sir = sample_sir(&real, model, &mut fading);

            let inner2 = (radius / 2.0).powi(2);
            let mut tally = Tally {
                covered: u64::from(sir > t),
                flagged: u64::from(real.serving_distance() > radius / 3.0),
                resampled: u64::from(real.resampled),
                ..Tally::default()
            };
            for (i, p) in real.bs_points.iter().enumerate() {
                if i != real.serving_index && p[0] * p[0] + p[1] * p[1] <= inner2 {
                    tally.inner_bs += 1;
                    tally.inner_active += u64::from(real.active_mask[i]);
                }
            }
            Ok(tally)
        })
        .try_reduce(Tally::default, |a, b| Ok(a + b))?;

    let trials = config.trials;
    if tally.flagged * 100 > trials {
        return Err(Error::BoundaryBias { flagged: tally.flagged, trials });
    }
    let p_hat = tally.covered as f64 / trials as f64;
    let half_width = 1.96 * (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
    let empirical_p_a = if scenario.is_full_load() {
        1.0
    } else if tally.inner_bs > 0 {
        tally.inner_active as f64 / tally.inner_bs as f64
    } else {
        active_probability(scenario)
    };
    let ase = empirical_p_a * scenario.lambda_b() * p_hat * spectral_efficiency(t);
    Ok(SimEstimate {
        coverage: CoverageResult { value: p_hat, method: Method::MonteCarlo, half_width: Some(half_width) },
        empirical_p_a,
        ase,
        trials,
        window_radius: radius,
        flagged_trials: tally.flagged,
        resampled_draws: tally.resampled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::per_km2_to_per_m2 as km2;

    fn m() -> PathLossModel {
        PathLossModel::default()
    }

    fn toy(bs: Vec<Point>, active: Vec<bool>) -> Realization {
        Realization {
            bs_points: bs,
            ue_points: vec![],
            active_mask: active,
            serving_index: 0,
            window_radius: 300.0,
            resampled: 0,
        }
    }

    #[test]
    fn lone_server_has_infinite_sir() {
        let r = toy(vec![[3.0, 4.0], [50.0, 0.0]], vec![true, false]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(sample_sir(&r, &m(), &mut rng), f64::INFINITY);
    }

    #[test]
    fn two_node_sir_distribution() {
        // with unit fading SIR = l(10)/l(100); with Rayleigh fading
        // P(h0 g0 / (h1 g1) > x) = 1 / (1 + x g1 / g0)
        let model = m();
        let r = toy(vec![[10.0, 0.0], [0.0, 100.0]], vec![true, true]);
        let (g0, g1) = (model.gain(10.0), model.gain(100.0));
        let ratio = g0 / g1;
        let n = 200_000;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for x in [0.5 * ratio, ratio, 2.0 * ratio] {
            let hits = (0..n).filter(|_| sample_sir(&r, &model, &mut rng) > x).count() as f64 / n as f64;
            let want = 1.0 / (1.0 + x / ratio);
            let sigma = (want * (1.0 - want) / n as f64).sqrt();
            assert!((hits - want).abs() < 4.0 * sigma, "x={x}: {hits} vs {want}");
        }
    }

    #[test]
    fn no_users_only_server_active() {
        let s = NetworkScenario::new(km2(1e3), 0.0, 10.0).unwrap();
        let r = build_realization(&m(), &s, &SimConfig::default(), 7).unwrap();
        assert_eq!(r.active_mask.iter().filter(|&&a| a).count(), 1);
        assert!(r.active_mask[r.serving_index]);
    }

    #[test]
    fn serving_bs_is_nearest_and_active() {
        let s = NetworkScenario::new(km2(1e3), km2(2e3), 10.0).unwrap();
        for mode in [LoadMode::ExactVoronoi, LoadMode::IndependentThinning] {
            let cfg = SimConfig { load_mode: mode, ..SimConfig::default() };
            let r = build_realization(&m(), &s, &cfg, 3).unwrap();
            let d = r.serving_distance();
            assert!(r.bs_points.iter().all(|p| p[0].hypot(p[1]) >= d));
            assert!(r.active_mask[r.serving_index]);
        }
    }

    #[test]
    fn deterministic_per_trial() {
        let s = NetworkScenario::new(km2(1e3), km2(200.0), 10.0).unwrap();
        let cfg = SimConfig::default();
        let a = build_realization(&m(), &s, &cfg, 42).unwrap();
        let b = build_realization(&m(), &s, &cfg, 42).unwrap();
        assert_eq!(a, b);
        let c = build_realization(&m(), &s, &cfg, 43).unwrap();
        assert_ne!(a.bs_points, c.bs_points);
    }

    #[test]
    fn voronoi_activity_matches_fit() {
        let s = NetworkScenario::new(1e-3, 3.5e-3, 10.0).unwrap();
        let cfg = SimConfig { trials: 1000, ..SimConfig::default() };
        let est = estimate_coverage(&m(), &s, &cfg).unwrap();
        assert!((est.empirical_p_a - 0.911_61).abs() < 0.01, "{}", est.empirical_p_a);
    }

    #[test]
    fn tiny_threshold_always_covered() {
        let s = NetworkScenario::new(km2(1e3), km2(200.0), 1e-300).unwrap();
        let cfg = SimConfig { trials: 200, ..SimConfig::default() };
        assert_eq!(estimate_coverage(&m(), &s, &cfg).unwrap().coverage.value, 1.0);
    }

    #[test]
    fn config_errors() {
        let s = NetworkScenario::new(1e-12, 1e-3, 10.0).unwrap();
        assert!(estimate_coverage(&m(), &s, &SimConfig::default()).is_err());
        let s = NetworkScenario::new(1e-3, 1e-3, 10.0).unwrap();
        let cfg = SimConfig { window: Window::Radius(100.0), ..SimConfig::default() };
        assert!(matches!(estimate_coverage(&m(), &s, &cfg), Err(Error::Config(_))));
        let cfg = SimConfig { trials: 0, ..SimConfig::default() };
        assert!(estimate_coverage(&m(), &s, &cfg).is_err());
        // 200 UEs per m² over the auto window blows the point cap
        let s = NetworkScenario::new(1e-4, 200.0, 10.0).unwrap();
        assert!(matches!(build_realization(&m(), &s, &SimConfig::default(), 0), Err(Error::Resource(_))));
    }

    #[test]
    fn auto_window() {
        let cfg = SimConfig::default();
        assert_eq!(cfg.window_radius(&m(), 1.0).unwrap(), 210.0);
        let r = cfg.window_radius(&m(), 1e-6).unwrap();
        assert!((r - (500.0 / (PI * 1e-6)).sqrt()).abs() < 1e-6);
    }
}
