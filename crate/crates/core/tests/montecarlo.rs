//! Simulator properties that need many trials.

use udn_core::analysis::{coverage_exact, per_km2_to_per_m2 as km2, NetworkScenario};
use udn_core::montecarlo::{estimate_coverage, LoadMode, SimConfig, Window};
use udn_core::specfun::QuadratureSpec;
use udn_core::PathLossModel;

fn scenario(lb: f64, lu: f64) -> NetworkScenario {
    NetworkScenario::new(km2(lb), km2(lu), 10.0).unwrap()
}

#[test]
fn independent_of_thread_count() {
    let m = PathLossModel::default();
    let s = scenario(1e3, 200.0);
    let cfg = SimConfig { trials: 3000, master_seed: 99, ..SimConfig::default() };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_coverage(&m, &s, &cfg).unwrap())
    };
    let (a, b) = (run(1), run(3));
    assert_eq!(a, b);
    assert_eq!(a.coverage.value.to_bits(), b.coverage.value.to_bits());
}

#[test]
fn load_modes_agree() {
    let m = PathLossModel::default();
    for (lb, lu) in [(1e1, 20.0), (1e2, 200.0), (1e3, 200.0), (1e4, 200.0), (1e4, 2000.0)] {
        let s = scenario(lb, lu);
        let est = |mode| {
            let cfg = SimConfig { trials: 20_000, master_seed: 5, load_mode: mode, ..SimConfig::default() };
            estimate_coverage(&m, &s, &cfg).unwrap().coverage.value
        };
        let (v, t) = (est(LoadMode::ExactVoronoi), est(LoadMode::IndependentThinning));
        assert!((v - t).abs() <= 0.02, "{lb} {lu}: voronoi {v} vs thinning {t}");
    }
}

#[test]
fn doubling_the_window_changes_little() {
    let m = PathLossModel::default();
    let s = scenario(1e4, 200.0);
    let base = SimConfig { trials: 20_000, master_seed: 11, ..SimConfig::default() };
    let auto = estimate_coverage(&m, &s, &base).unwrap();
    let wide = SimConfig { window: Window::Radius(2.0 * auto.window_radius), ..base };
    let doubled = estimate_coverage(&m, &s, &wide).unwrap();
    let hw = auto.coverage.half_width.unwrap();
    assert!(
        (auto.coverage.value - doubled.coverage.value).abs() < hw,
        "{} vs {} (half-width {hw})",
        auto.coverage.value,
        doubled.coverage.value
    );
}

#[test]
fn thinning_matches_analysis_at_full_load() {
    // full load has no activity approximation at all, so this is a pure geometry check
    let m = PathLossModel::default();
    let s = NetworkScenario::full_load(km2(1e2), 10.0).unwrap();
    let cfg = SimConfig { trials: 20_000, master_seed: 3, ..SimConfig::default() };
    let est = estimate_coverage(&m, &s, &cfg).unwrap();
    let exact = coverage_exact(&m, &s, &QuadratureSpec::default()).unwrap().value;
    let hw = est.coverage.half_width.unwrap();
    assert!((est.coverage.value - exact).abs() < 1.5 * hw, "{} vs {exact} ± {hw}", est.coverage.value);
    assert_eq!(est.empirical_p_a, 1.0);
}
