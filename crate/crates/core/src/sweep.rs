//! Parameter sweeps producing the CSV column contract used for plotting.
//!
//! Columns, in order: `lambda_b_per_km2, lambda_u_per_km2, model, method,
//! p_active, coverage, coverage_ci_halfwidth, ase_bps_hz_km2, runtime_ms`.
//! `lambda_u_per_km2` is `full-load` for a fully loaded network; the CI column
//! is empty for analytic methods and `runtime_ms` is empty unless timing is on.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    active_probability, ase_from_coverage, coverage_asymptotic, coverage_bounds, coverage_exact, coverage_general,
    db_to_linear, per_km2_to_per_m2, per_m2_to_per_km2, Method, NetworkScenario,
};
use crate::error::{Error, Result};
use crate::montecarlo::{estimate_coverage, SimConfig, GENERATOR};
use crate::pathloss::{PathLossModel, Variant};
use crate::specfun::QuadratureSpec;

pub const CSV_HEADER: [&str; 9] = [
    "lambda_b_per_km2",
    "lambda_u_per_km2",
    "model",
    "method",
    "p_active",
    "coverage",
    "coverage_ci_halfwidth",
    "ase_bps_hz_km2",
    "runtime_ms",
];

pub const FULL_LOAD_TOKEN: &str = "full-load";

/// UE density per km², or the full-load token.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawUserDensity", into = "RawUserDensity")]
pub enum UserDensity {
    PerKm2(f64),
    FullLoad,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawUserDensity {
    Number(f64),
    Token(String),
}

impl TryFrom<RawUserDensity> for UserDensity {
    type Error = Error;

    fn try_from(raw: RawUserDensity) -> Result<Self> {
        match raw {
            RawUserDensity::Number(x) => Ok(UserDensity::PerKm2(x)),
            RawUserDensity::Token(s) => s.parse(),
        }
    }
}

impl From<UserDensity> for RawUserDensity {
    fn from(u: UserDensity) -> Self {
        match u {
            UserDensity::PerKm2(x) => RawUserDensity::Number(x),
            UserDensity::FullLoad => RawUserDensity::Token(FULL_LOAD_TOKEN.into()),
        }
    }
}

impl FromStr for UserDensity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == FULL_LOAD_TOKEN {
            return Ok(UserDensity::FullLoad);
        }
        s.parse::<f64>()
            .map(UserDensity::PerKm2)
            .map_err(|_| Error::Config(format!("expected a UE density or `{FULL_LOAD_TOKEN}`, got `{s}`")))
    }
}

impl fmt::Display for UserDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UserDensity::PerKm2(x) => write!(f, "{x}"),
            UserDensity::FullLoad => f.write_str(FULL_LOAD_TOKEN),
        }
    }
}

impl UserDensity {
    /// Per m², `+inf` for full load.
    pub fn per_m2(self) -> f64 {
        match self {
            UserDensity::PerKm2(x) => per_km2_to_per_m2(x),
            UserDensity::FullLoad => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMethod {
    Exact,
    /// Emits a lower-bound and an upper-bound row.
    Bounds,
    Asymptotic,
    General,
    #[serde(rename = "montecarlo")]
    MonteCarlo,
}

impl FromStr for SweepMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "exact" => SweepMethod::Exact,
            "bounds" => SweepMethod::Bounds,
            "asymptotic" => SweepMethod::Asymptotic,
            "general" => SweepMethod::General,
            "montecarlo" => SweepMethod::MonteCarlo,
            _ => return Err(Error::Config(format!("unknown method `{s}`"))),
        })
    }
}

impl SweepMethod {
    /// Closed forms exist only for the bounded dual-slope law.
    pub fn supports(self, variant: Variant) -> bool {
        matches!(self, SweepMethod::General | SweepMethod::MonteCarlo) || variant == Variant::BoundedDualSlope
    }
}

fn default_t_db() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// BS densities per km².
    pub lambda_b_grid: Vec<f64>,
    pub lambda_u_list: Vec<UserDensity>,
    #[serde(default = "default_models")]
    pub model_set: Vec<Variant>,
    /// Distances and exponents shared by every variant in `model_set`.
    #[serde(default)]
    pub model: PathLossModel,
    #[serde(default = "default_t_db")]
    pub t_db: f64,
    pub methods: Vec<SweepMethod>,
    #[serde(default)]
    pub sim: Option<SimConfig>,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    pub output_path: PathBuf,
    /// Fill `runtime_ms`. Off by default so that reruns are byte-identical.
    #[serde(default)]
    pub timing: bool,
}

fn default_models() -> Vec<Variant> {
    vec![Variant::BoundedDualSlope]
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_b_grid.is_empty() || self.lambda_u_list.is_empty() {
            return Err(Error::Config("lambda_b_grid and lambda_u_list must be non-empty".into()));
        }
        if self.model_set.is_empty() || self.methods.is_empty() {
            return Err(Error::Config("model_set and methods must be non-empty".into()));
        }
        if let Some(&x) = self.lambda_b_grid.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::Config(format!("BS densities must be positive, got {x}")));
        }
        for u in &self.lambda_u_list {
            if let UserDensity::PerKm2(x) = u {
                if !(x.is_finite() && *x >= 0.0) {
                    return Err(Error::Config(format!("UE densities must be >= 0, got {x}")));
                }
            }
        }
        if !self.t_db.is_finite() {
            return Err(Error::Config(format!("threshold must be finite, got {} dB", self.t_db)));
        }
        match &self.sim {
            Some(sim) => sim.validate()?,
            None if self.methods.contains(&SweepMethod::MonteCarlo) => {
                return Err(Error::Config("montecarlo requested without a [sim] section".into()))
            }
            None => {}
        }
        self.quadrature.validate()
    }

    pub fn threshold(&self) -> f64 {
        db_to_linear(self.t_db)
    }

    /// `name.csv` -> `name.meta.txt`, in the same directory.
    pub fn metadata_path(&self) -> PathBuf {
        metadata_path(&self.output_path)
    }
}

pub fn metadata_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.txt")
}

/// One CSV line. Densities and ASE are stored per m².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub lambda_b: f64,
    pub lambda_u: f64,
    pub model: Variant,
    pub method: Method,
    pub p_active: f64,
    pub coverage: f64,
    pub ci_half_width: Option<f64>,
    pub ase: f64,
    pub runtime_ms: Option<f64>,
}

impl Row {
    fn key_cmp(&self, o: &Row) -> std::cmp::Ordering {
        self.lambda_b
            .total_cmp(&o.lambda_b)
            .then(self.lambda_u.total_cmp(&o.lambda_u))
            .then(self.model.cmp(&o.model))
            .then(self.method.cmp(&o.method))
    }

    fn record(&self) -> [String; 9] {
        let lambda_u = if self.lambda_u.is_infinite() {
            FULL_LOAD_TOKEN.to_string()
        } else {
            per_m2_to_per_km2(self.lambda_u).to_string()
        };
        [
            per_m2_to_per_km2(self.lambda_b).to_string(),
            lambda_u,
            self.model.name().to_string(),
            self.method.name().to_string(),
            self.p_active.to_string(),
            self.coverage.to_string(),
            self.ci_half_width.map(|x| x.to_string()).unwrap_or_default(),
            per_m2_to_per_km2(self.ase).to_string(),
            self.runtime_ms.map(|x| format!("{x:.3}")).unwrap_or_default(),
        ]
    }
}

fn point_label(model: &PathLossModel, scenario: &NetworkScenario, method: SweepMethod) -> String {
    let lambda_u = if scenario.is_full_load() {
        FULL_LOAD_TOKEN.to_string()
    } else {
        format!("{}", per_m2_to_per_km2(scenario.lambda_u()))
    };
    format!(
        "lambda_b={}/km², lambda_u={lambda_u}, model={}, method={method:?}",
        per_m2_to_per_km2(scenario.lambda_b()),
        model.variant()
    )
}

/// Rows for one grid point and method (two for `Bounds`).
pub fn evaluate_point(
    model: &PathLossModel,
    scenario: &NetworkScenario,
    method: SweepMethod,
    quadrature: &QuadratureSpec,
    sim: Option<&SimConfig>,
    timing: bool,
) -> Result<Vec<Row>> {
    let start = Instant::now();
    let p_a = active_probability(scenario);
    let row = |method, coverage: f64, ci, p_active, ase| Row {
        lambda_b: scenario.lambda_b(),
        lambda_u: scenario.lambda_u(),
        model: model.variant(),
        method,
        p_active,
        coverage,
        ci_half_width: ci,
        ase,
        runtime_ms: None,
    };
    let analytic = |method, c: f64| row(method, c, None, p_a, ase_from_coverage(scenario, c));

    let result = (|| -> Result<Vec<Row>> {
        Ok(match method {
            SweepMethod::Exact => vec![analytic(Method::Exact, coverage_exact(model, scenario, quadrature)?.value)],
            SweepMethod::General => {
                vec![analytic(Method::General, coverage_general(model, scenario, quadrature)?.value)]
            }
            SweepMethod::Asymptotic => {
                let c = coverage_asymptotic(model, scenario.lambda_u(), scenario.threshold())?.value;
                vec![analytic(Method::Asymptotic, c)]
            }
            SweepMethod::Bounds => {
                let (lo, hi, _) = coverage_bounds(model, scenario)?;
                vec![analytic(Method::LowerBound, lo.value), analytic(Method::UpperBound, hi.value)]
            }
            SweepMethod::MonteCarlo => {
                let sim =
                    sim.ok_or_else(|| Error::Config("montecarlo requested without a simulation config".into()))?;
                let est = estimate_coverage(model, scenario, sim)?;
                vec![row(Method::MonteCarlo, est.coverage.value, est.coverage.half_width, est.empirical_p_a, est.ase)]
            }
        })
    })();

    let mut rows =
        result.map_err(|e| Error::AtPoint { point: point_label(model, scenario, method), source: Box::new(e) })?;
    if timing {
        let ms = start.elapsed().as_secs_f64() * 1e3;
        rows.iter_mut().for_each(|r| r.runtime_ms = Some(ms));
    }
    Ok(rows)
}

/// Evaluates every `(λ_b, λ_u, model, method)` combination. Methods without a
/// closed form for a given variant are skipped. Rows come back sorted by key.
pub fn run_sweep_rows(spec: &SweepSpec) -> Result<Vec<Row>> {
    spec.validate()?;
    let t = spec.threshold();
    let mut jobs = Vec::new();
    for &lb in &spec.lambda_b_grid {
        for &lu in &spec.lambda_u_list {
            let scenario = NetworkScenario::new(per_km2_to_per_m2(lb), lu.per_m2(), t)?;
            for &variant in &spec.model_set {
                for &method in &spec.methods {
                    if method.supports(variant) {
                        jobs.push((scenario, spec.model.with_variant(variant), method));
                    } else {
                        log::warn!("skipping {method:?} for {variant}: no closed form");
                    }
                }
            }
        }
    }
    let nested: Vec<Vec<Row>> = jobs
        .par_iter()
        .map(|(s, m, method)| evaluate_point(m, s, *method, &spec.quadrature, spec.sim.as_ref(), spec.timing))
        .collect::<Result<_>>()?;
    let mut rows: Vec<Row> = nested.into_iter().flatten().collect();
    rows.sort_by(Row::key_cmp);
    rows.dedup_by(|a, b| a.key_cmp(b).is_eq());
    Ok(rows)
}

/// Serialises rows (sorted by key) with the fixed header.
pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut sorted = rows.to_vec();
    sorted.sort_by(Row::key_cmp);
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in &sorted {
        w.write_record(r.record()).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn csv_string(rows: &[Row]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

/// Run metadata: everything needed to reproduce the CSV, one `key = value` per line.
pub fn metadata(spec: &SweepSpec) -> String {
    let mut lines = vec![
        format!("crate_version = {}", env!("CARGO_PKG_VERSION")),
        format!("columns = {}", CSV_HEADER.join(",")),
        format!("t_db = {}", spec.t_db),
        format!("t_linear = {}", spec.threshold()),
        format!(
            "model = r_b {} m, r_c {} m, alpha_c {}, alpha {}",
            spec.model.r_b(),
            spec.model.r_c(),
            spec.model.alpha_c(),
            spec.model.alpha()
        ),
        format!("model_set = {}", spec.model_set.iter().map(|v| v.name()).collect::<Vec<_>>().join(",")),
        format!("quadrature_rel_tol = {:e}", spec.quadrature.rel_tol),
        format!("quadrature_abs_tol = {:e}", spec.quadrature.abs_tol),
        format!("quadrature_max_subdivisions = {}", spec.quadrature.max_subdivisions),
        format!("timing = {}", spec.timing),
    ];
    match &spec.sim {
        Some(sim) => {
            lines.push(format!("generator = {GENERATOR}"));
            lines.push(format!("master_seed = {}", sim.master_seed));
            lines.push(format!("trials = {}", sim.trials));
            lines.push(format!("load_mode = {:?}", sim.load_mode));
            let window = match sim.window {
                crate::montecarlo::Window::Auto => {
                    format!("auto: max(3 r_c, radius holding {} expected BSs, 10/sqrt(lambda_b))", sim.min_expected_bs)
                }
                crate::montecarlo::Window::Radius(r) => format!("{r} m"),
            };
            lines.push(format!("window = {window}"));
            lines.push(format!("max_points = {:e}", sim.max_points));
            lines.push("ci = 95% normal approximation, 1.96 sqrt(p(1-p)/n)".into());
        }
        None => lines.push("simulation = none".into()),
    }
    lines.join("\n") + "\n"
}

/// Runs the sweep and writes the CSV plus its metadata sidecar.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<Row>> {
    let rows = run_sweep_rows(spec)?;
    let io = |p: &Path, e: std::io::Error| Error::Io(format!("{}: {e}", p.display()));
    let file = std::fs::File::create(&spec.output_path).map_err(|e| io(&spec.output_path, e))?;
    write_csv(&rows, std::io::BufWriter::new(file))?;
    let meta = spec.metadata_path();
    std::fs::write(&meta, metadata(spec)).map_err(|e| io(&meta, e))?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> SweepSpec {
        SweepSpec {
            lambda_b_grid: vec![1e2, 1e3],
            lambda_u_list: vec![UserDensity::PerKm2(200.0), UserDensity::FullLoad],
            model_set: vec![Variant::BoundedDualSlope, Variant::UnboundedSingleSlope],
            model: PathLossModel::default(),
            t_db: 10.0,
            methods: vec![SweepMethod::Exact, SweepMethod::Bounds],
            sim: None,
            quadrature: QuadratureSpec::default(),
            output_path: PathBuf::from("unused.csv"),
            timing: false,
        }
    }

    #[test]
    fn empty_grid_rejected() {
        let mut s = spec();
        s.lambda_b_grid.clear();
        assert!(matches!(run_sweep_rows(&s), Err(Error::Config(_))));
        let mut s = spec();
        s.methods.push(SweepMethod::MonteCarlo);
        assert!(matches!(s.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn rows_sorted_and_complete() {
        let rows = run_sweep_rows(&spec()).unwrap();
        // unsupported closed forms for the single-slope law are skipped
        assert_eq!(rows.len(), 2 * 2 * 3);
        assert!(rows.windows(2).all(|w| w[0].key_cmp(&w[1]).is_lt()));
        let csv = csv_string(&rows).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&first[..4], ["100", "200", "bounded-dual-slope", "exact"]);
        assert_eq!(first[6], "");
        assert!(csv.contains(",full-load,"));
    }

    #[test]
    fn csv_densities_are_internal_values_scaled() {
        let rows = run_sweep_rows(&spec()).unwrap();
        let csv = csv_string(&rows).unwrap();
        for (line, row) in csv.lines().skip(1).zip(&rows) {
            let lb: f64 = line.split(',').next().unwrap().parse().unwrap();
            assert_eq!(lb, row.lambda_b * 1e6);
        }
    }

    #[test]
    fn user_density_parsing() {
        assert_eq!("full-load".parse::<UserDensity>().unwrap(), UserDensity::FullLoad);
        assert_eq!("20".parse::<UserDensity>().unwrap(), UserDensity::PerKm2(20.0));
        assert!("lots".parse::<UserDensity>().is_err());
        assert_eq!(UserDensity::FullLoad.per_m2(), f64::INFINITY);
    }

    #[test]
    fn error_names_the_point() {
        let mut s = spec();
        s.quadrature.max_subdivisions = 1;
        s.quadrature.rel_tol = 1e-15;
        s.quadrature.abs_tol = 0.0;
        let err = run_sweep_rows(&s).unwrap_err();
        assert!(matches!(err.root(), Error::Convergence { .. }), "{err}");
        assert!(err.to_string().contains("lambda_b="), "{err}");
    }

    #[test]
    fn simulated_sweep_is_byte_identical() {
        let mut s = spec();
        s.model_set = vec![Variant::BoundedDualSlope];
        s.methods = vec![SweepMethod::MonteCarlo, SweepMethod::Exact];
        s.sim = Some(SimConfig { trials: 300, master_seed: 4, ..SimConfig::default() });
        let a = csv_string(&run_sweep_rows(&s).unwrap()).unwrap();
        let b = csv_string(&run_sweep_rows(&s).unwrap()).unwrap();
        assert_eq!(a, b);
        let meta = metadata(&s);
        assert!(meta.contains("master_seed = 4") && meta.contains("trials = 300"));
        assert!(meta.contains(GENERATOR));
    }

    #[test]
    fn writes_files() {
        let dir = std::env::temp_dir().join(format!("udn-sweep-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let mut s = spec();
        s.output_path = dir.join("out.csv");
        let rows = run_sweep(&s).unwrap();
        let text = std::fs::read_to_string(&s.output_path).unwrap();
        assert_eq!(text, csv_string(&rows).unwrap());
        assert!(dir.join("out.meta.txt").exists());
        s.output_path = dir.join("missing").join("out.csv");
        assert!(matches!(run_sweep(&s), Err(Error::Io(_))));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn spec_from_toml() {
        let s: SweepSpec = toml::from_str(
            "lambda_b_grid = [1, 1e3]\nlambda_u_list = [20, \"full-load\"]\nmethods = [\"bounds\", \"montecarlo\"]\noutput_path = \"x.csv\"\n[sim]\ntrials = 10\nwindow = { radius = 500.0 }\nload_mode = \"independent-thinning\"\n",
        )
        .unwrap();
        assert_eq!(s.lambda_u_list, vec![UserDensity::PerKm2(20.0), UserDensity::FullLoad]);
        assert_eq!(s.model_set, vec![Variant::BoundedDualSlope]);
        let sim = s.sim.unwrap();
        assert_eq!(sim.trials, 10);
        assert_eq!(sim.window, crate::montecarlo::Window::Radius(500.0));
        assert_eq!(sim.load_mode, crate::montecarlo::LoadMode::IndependentThinning);
        s.validate().unwrap();
        assert!(toml::from_str::<SweepSpec>("lambda_b_grid = [1]\nbogus = 1").is_err());
    }
}
