//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every export returns a flat `Float64Array`; the page slices it into series.
//! The plain functions below the bindings carry the logic and are what the
//! host-side tests exercise.

use udn_core::analysis::{
    ase_bounds, ase_from_coverage, coverage_asymptotic, coverage_bounds, coverage_exact, db_to_linear,
    per_km2_to_per_m2, per_m2_to_per_km2, NetworkScenario,
};
use udn_core::specfun::QuadratureSpec;
use udn_core::{PathLossModel, Variant};
use wasm_bindgen::prelude::*;

/// Largest number of points a curve may request.
pub const MAX_POINTS: usize = 2000;

/// Coverage versus BS density for one UE density (per km², `<= 0` or non-finite for full load).
/// Returns `[λ_b..., exact..., lower..., upper..., plateau]`, densities per km².
#[wasm_bindgen(js_name = coverageCurve)]
pub fn coverage_curve_js(lambda_u: f64, t_db: f64, log_min: f64, log_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    coverage_curve(lambda_u, t_db, log_min, log_max, n).map_err(|e| JsError::new(&e))
}

/// ASE versus BS density, bit/s/Hz/km². Returns `[λ_b..., exact..., lower..., upper...]`.
#[wasm_bindgen(js_name = aseCurve)]
pub fn ase_curve_js(lambda_u: f64, t_db: f64, log_min: f64, log_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    ase_curve(lambda_u, t_db, log_min, log_max, n).map_err(|e| JsError::new(&e))
}

/// Attenuation in dB for every variant over log-spaced distances (m).
/// Returns `[d..., then one block of n values per variant in declaration order]`.
#[wasm_bindgen(js_name = pathLossCurves)]
pub fn path_loss_curves_js(r_c: f64, alpha_c: f64, alpha: f64, d_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    path_loss_curves(r_c, alpha_c, alpha, d_max, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = variantNames)]
pub fn variant_names() -> Vec<String> {
    Variant::ALL.iter().map(|v| v.name().to_string()).collect()
}

fn log_grid(log_min: f64, log_max: f64, n: usize) -> Result<Vec<f64>, String> {
    if !(2..=MAX_POINTS).contains(&n) || !(log_min < log_max) || !log_min.is_finite() || !log_max.is_finite() {
        return Err(format!("need 2..={MAX_POINTS} points over a non-empty log range"));
    }
    Ok((0..n).map(|k| 10f64.powf(log_min + (log_max - log_min) * k as f64 / (n - 1) as f64)).collect())
}

fn user_density(lambda_u: f64) -> f64 {
    if lambda_u.is_finite() && lambda_u > 0.0 {
        per_km2_to_per_m2(lambda_u)
    } else {
        f64::INFINITY
    }
}

struct Curves {
    grid: Vec<f64>,
    exact: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

fn curves(lambda_u: f64, t_db: f64, log_min: f64, log_max: f64, n: usize, ase: bool) -> Result<Curves, String> {
    let model = PathLossModel::default();
    let quad = QuadratureSpec { rel_tol: 1e-7, ..QuadratureSpec::default() };
    let grid = log_grid(log_min, log_max, n)?;
    let (mut exact, mut lower, mut upper) = (Vec::new(), Vec::new(), Vec::new());
    for &lb in &grid {
        let s = NetworkScenario::new(per_km2_to_per_m2(lb), user_density(lambda_u), db_to_linear(t_db))
            .map_err(|e| e.to_string())?;
        let pc = coverage_exact(&model, &s, &quad).map_err(|e| e.to_string())?.value;
        if ase {
            let (lo, hi) = ase_bounds(&model, &s).map_err(|e| e.to_string())?;
            exact.push(per_m2_to_per_km2(ase_from_coverage(&s, pc)));
            lower.push(per_m2_to_per_km2(lo));
            upper.push(per_m2_to_per_km2(hi));
        } else {
            let (lo, hi, _) = coverage_bounds(&model, &s).map_err(|e| e.to_string())?;
            exact.push(pc);
            lower.push(lo.value);
            upper.push(hi.value);
        }
    }
    Ok(Curves { grid, exact, lower, upper })
}

pub fn coverage_curve(lambda_u: f64, t_db: f64, log_min: f64, log_max: f64, n: usize) -> Result<Vec<f64>, String> {
    let c = curves(lambda_u, t_db, log_min, log_max, n, false)?;
    let plateau = coverage_asymptotic(&PathLossModel::default(), user_density(lambda_u), db_to_linear(t_db))
        .map_err(|e| e.to_string())?
        .value;
    Ok([c.grid, c.exact, c.lower, c.upper, vec![plateau]].concat())
}

pub fn ase_curve(lambda_u: f64, t_db: f64, log_min: f64, log_max: f64, n: usize) -> Result<Vec<f64>, String> {
    let c = curves(lambda_u, t_db, log_min, log_max, n, true)?;
    Ok([c.grid, c.exact, c.lower, c.upper].concat())
}

pub fn path_loss_curves(r_c: f64, alpha_c: f64, alpha: f64, d_max: f64, n: usize) -> Result<Vec<f64>, String> {
    let base = PathLossModel::bounded_dual_slope(1.0, r_c, alpha_c, alpha).map_err(|e| e.to_string())?;
    let d = log_grid(-1.0, d_max.log10(), n)?;
    let mut out = d.clone();
    for v in Variant::ALL {
        let m = base.with_variant(v);
        for &x in &d {
            out.push(-10.0 * m.gain(x).log10());
        }
    }
    Ok(out)
}
