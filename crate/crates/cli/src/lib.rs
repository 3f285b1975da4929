//! `udn`: coverage/ASE experiment runner.
//!
//! A sweep is described by a TOML file whose keys mirror [`SweepSpec`]; every
//! key can also be given as a flag, and flags win over the file.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use toml::{Table, Value};
use udn_core::analysis::{db_to_linear, per_km2_to_per_m2, NetworkScenario};
use udn_core::sweep::{self, evaluate_point, SweepMethod, SweepSpec, UserDensity};
use udn_core::validation::{ValidationOptions, Validator, CRITERIA};
use udn_core::{Error, PathLossModel, Variant};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_NUMERIC: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "udn", version, about = "Coverage and area spectral efficiency of ultra-dense networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one (λ_b, λ_u) point and print CSV rows to stdout.
    Coverage(CoverageArgs),
    /// Run a grid sweep from a config file and/or flags; writes CSV plus a metadata sidecar.
    Sweep(SweepArgs),
    /// Monte Carlo only sweep; same options as `sweep`.
    Simulate(SweepArgs),
    /// Run the acceptance suite and print one report line per criterion.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args, Default)]
pub struct ModelArgs {
    /// bounded-dual-slope, bounded-single-slope, unbounded-single-slope, unbounded-dual-slope
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub r_b: Option<f64>,
    #[arg(long)]
    pub r_c: Option<f64>,
    #[arg(long)]
    pub alpha_c: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct SimArgs {
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// exact-voronoi or independent-thinning
    #[arg(long)]
    pub load_mode: Option<String>,
    /// Simulation disk radius in metres (default: automatic)
    #[arg(long)]
    pub window_radius: Option<f64>,
    #[arg(long)]
    pub min_expected_bs: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct CoverageArgs {
    /// BS density per km²
    #[arg(long)]
    pub lambda_b: f64,
    /// UE density per km², or `full-load`
    #[arg(long)]
    pub lambda_u: String,
    /// SIR threshold in dB
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub t_db: f64,
    /// exact, bounds, asymptotic, general or montecarlo
    #[arg(long, default_value = "exact")]
    pub method: String,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Debug, Clone, Args, Default)]
pub struct SweepArgs {
    /// TOML file mapping onto the sweep specification
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// BS densities per km², comma separated
    #[arg(long, value_delimiter = ',')]
    pub lambda_b: Option<Vec<f64>>,
    /// log10 range `start:stop:count` of BS densities per km² (e.g. `0:6:25`)
    #[arg(long, conflicts_with = "lambda_b")]
    pub lambda_b_logspace: Option<String>,
    /// UE densities per km² or `full-load`, comma separated
    #[arg(long, value_delimiter = ',')]
    pub lambda_u: Option<Vec<String>>,
    /// Path loss variants, comma separated
    #[arg(long, value_delimiter = ',')]
    pub models: Option<Vec<String>>,
    /// exact, bounds, asymptotic, general, montecarlo; comma separated
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_db: Option<f64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Fill the runtime_ms column (output is then no longer reproducible byte for byte)
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Criteria to run, comma separated (default: all)
    #[arg(long, value_delimiter = ',')]
    pub criteria: Option<Vec<u8>>,
    #[arg(long, default_value_t = ValidationOptions::default().mc_trials)]
    pub trials: u64,
    #[arg(long, default_value_t = ValidationOptions::default().master_seed)]
    pub seed: u64,
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> u8 {
    match err.root() {
        Error::Convergence { .. } | Error::BoundaryBias { .. } => EXIT_NUMERIC,
        _ => EXIT_USAGE,
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn user_density_value(s: &str) -> Result<Value, Error> {
    Ok(match s.parse::<UserDensity>()? {
        UserDensity::PerKm2(x) => Value::Float(x),
        UserDensity::FullLoad => Value::String(sweep::FULL_LOAD_TOKEN.into()),
    })
}

fn logspace(arg: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = arg.split(':').collect();
    let bad = || usage(format!("expected start:stop:count, got `{arg}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].parse().map_err(|_| bad())?;
    let b: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    Ok(match n {
        0 => vec![],
        1 => vec![10f64.powf(a)],
        _ => (0..n).map(|k| 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64)).collect(),
    })
}

fn sub_table<'a>(table: &'a mut Table, key: &str) -> Result<&'a mut Table, Error> {
    table
        .entry(key)
        .or_insert_with(|| Value::Table(Table::new()))
        .as_table_mut()
        .ok_or_else(|| usage(format!("`{key}` must be a table")))
}

fn apply_model(table: &mut Table, m: &ModelArgs) -> Result<(), Error> {
    let pairs = [("r_b", m.r_b), ("r_c", m.r_c), ("alpha_c", m.alpha_c), ("alpha", m.alpha)];
    if pairs.iter().all(|(_, v)| v.is_none()) {
        return Ok(());
    }
    let t = sub_table(table, "model")?;
    for (k, v) in pairs {
        if let Some(v) = v {
            t.insert(k.into(), Value::Float(v));
        }
    }
    Ok(())
}

fn apply_sim(table: &mut Table, s: &SimArgs, force: bool) -> Result<(), Error> {
    let any = s.trials.is_some()
        || s.seed.is_some()
        || s.load_mode.is_some()
        || s.window_radius.is_some()
        || s.min_expected_bs.is_some();
    if !any && !force {
        return Ok(());
    }
    let t = sub_table(table, "sim")?;
    let int = |x: u64| i64::try_from(x).map(Value::Integer).map_err(|_| usage(format!("{x} is too large")));
    if let Some(x) = s.trials {
        t.insert("trials".into(), int(x)?);
    }
    if let Some(x) = s.seed {
        t.insert("master_seed".into(), int(x)?);
    }
    if let Some(x) = &s.load_mode {
        t.insert("load_mode".into(), Value::String(x.clone()));
    }
    if let Some(r) = s.window_radius {
        let mut w = Table::new();
        w.insert("radius".into(), Value::Float(r));
        t.insert("window".into(), Value::Table(w));
    }
    if let Some(x) = s.min_expected_bs {
        t.insert("min_expected_bs".into(), Value::Float(x));
    }
    Ok(())
}

fn strings(xs: &[String]) -> Value {
    Value::Array(xs.iter().map(|x| Value::String(x.clone())).collect())
}

/// Builds the sweep specification: config file first, then flag overrides.
/// `simulate` forces the method list to Monte Carlo and supplies a default `[sim]`.
pub fn build_spec(args: &SweepArgs, simulate_only: bool) -> Result<SweepSpec, Error> {
    let mut table = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            text.parse::<Table>().map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => Table::new(),
    };
    if let Some(grid) = &args.lambda_b {
        table.insert("lambda_b_grid".into(), Value::Array(grid.iter().map(|&x| Value::Float(x)).collect()));
    }
    if let Some(spec) = &args.lambda_b_logspace {
        table.insert("lambda_b_grid".into(), Value::Array(logspace(spec)?.into_iter().map(Value::Float).collect()));
    }
    if let Some(list) = &args.lambda_u {
        let values = list.iter().map(|s| user_density_value(s)).collect::<Result<_, _>>()?;
        table.insert("lambda_u_list".into(), Value::Array(values));
    }
    if let Some(models) = &args.models {
        table.insert("model_set".into(), strings(models));
    }
    if let Some(v) = &args.model.model {
        // a single --model is shorthand for a one-element model set
        table.insert("model_set".into(), strings(std::slice::from_ref(v)));
    }
    if simulate_only {
        table.insert("methods".into(), strings(&["montecarlo".to_string()]));
    } else if let Some(methods) = &args.methods {
        table.insert("methods".into(), strings(methods));
    }
    if let Some(t) = args.t_db {
        table.insert("t_db".into(), Value::Float(t));
    }
    if let Some(out) = &args.output {
        table.insert("output_path".into(), Value::String(out.display().to_string()));
    }
    if args.timing {
        table.insert("timing".into(), Value::Boolean(true));
    }
    if let Some(tol) = args.rel_tol {
        sub_table(&mut table, "quadrature")?.insert("rel_tol".into(), Value::Float(tol));
    }
    apply_model(&mut table, &args.model)?;
    apply_sim(&mut table, &args.sim, simulate_only)?;

    let spec: SweepSpec = table.try_into().map_err(|e: toml::de::Error| usage(e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

fn model_from(args: &ModelArgs) -> Result<PathLossModel, Error> {
    let d = PathLossModel::default();
    let variant = match &args.model {
        Some(v) => v.parse::<Variant>()?,
        None => Variant::BoundedDualSlope,
    };
    PathLossModel::new(
        variant,
        args.r_b.unwrap_or(d.r_b()),
        args.r_c.unwrap_or(d.r_c()),
        args.alpha_c.unwrap_or(d.alpha_c()),
        args.alpha.unwrap_or(d.alpha()),
    )
}

fn run_coverage(args: &CoverageArgs, out: &mut dyn Write) -> Result<(), Error> {
    let model = model_from(&args.model)?;
    let method: SweepMethod = args.method.parse()?;
    if !method.supports(model.variant()) {
        return Err(usage(format!("method {} has no closed form for {}", args.method, model.variant())));
    }
    let lambda_u: UserDensity = args.lambda_u.parse()?;
    let scenario = NetworkScenario::new(per_km2_to_per_m2(args.lambda_b), lambda_u.per_m2(), db_to_linear(args.t_db))?;
    let mut table = Table::new();
    apply_sim(&mut table, &args.sim, true)?;
    let sim: udn_core::montecarlo::SimConfig =
        table.remove("sim").expect("forced").try_into().map_err(|e: toml::de::Error| usage(e.to_string()))?;
    let rows = evaluate_point(&model, &scenario, method, &Default::default(), Some(&sim), false)?;
    sweep::write_csv(&rows, out)
}

fn run_sweep(args: &SweepArgs, simulate_only: bool, out: &mut dyn Write) -> Result<(), Error> {
    let spec = build_spec(args, simulate_only)?;
    let rows = sweep::run_sweep(&spec)?;
    writeln!(
        out,
        "wrote {} rows to {} (metadata: {})",
        rows.len(),
        spec.output_path.display(),
        spec.metadata_path().display()
    )
    .map_err(|e| Error::Io(e.to_string()))
}

fn run_validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<bool, Error> {
    let ids = args.criteria.clone().unwrap_or_else(|| CRITERIA.collect());
    if let Some(bad) = ids.iter().find(|id| !CRITERIA.contains(id)) {
        return Err(usage(format!("no criterion {bad}; valid ids are 1-11")));
    }
    let opts = ValidationOptions { mc_trials: args.trials, master_seed: args.seed, ..ValidationOptions::default() };
    let validator = Validator::new(opts);
    let mut all = true;
    for id in ids {
        let report = validator.run(id);
        all &= report.passed;
        writeln!(out, "{report}").map_err(|e| Error::Io(e.to_string()))?;
        out.flush().ok();
    }
    Ok(all)
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let result = match &cli.command {
        Command::Coverage(a) => run_coverage(a, out).map(|_| EXIT_OK),
        Command::Sweep(a) => run_sweep(a, false, out).map(|_| EXIT_OK),
        Command::Simulate(a) => run_sweep(a, true, out).map(|_| EXIT_OK),
        Command::Validate(a) => run_validate(a, out).map(|ok| if ok { EXIT_OK } else { EXIT_VALIDATION }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logspace_parsing() {
        assert_eq!(logspace("0:2:3").unwrap(), vec![1.0, 10.0, 100.0]);
        assert!(logspace("0:2").is_err());
        assert!(logspace("a:2:3").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("spec.toml");
        std::fs::write(
            &path,
            "lambda_b_grid = [1, 10]\nlambda_u_list = [20, \"full-load\"]\nmethods = [\"exact\"]\nt_db = 5\noutput_path = \"a.csv\"\n[model]\nr_c = 50\n",
        )
        .unwrap();
        let args = SweepArgs {
            config: Some(path),
            t_db: Some(10.0),
            lambda_u: Some(vec!["200".into()]),
            ..SweepArgs::default()
        };
        let spec = build_spec(&args, false).unwrap();
        assert_eq!(spec.lambda_b_grid, vec![1.0, 10.0]);
        assert_eq!(spec.lambda_u_list, vec![UserDensity::PerKm2(200.0)]);
        assert_eq!(spec.t_db, 10.0);
        assert_eq!(spec.model.r_c(), 50.0);
        assert!(spec.sim.is_none());

        let spec = build_spec(&args, true).unwrap();
        assert_eq!(spec.methods, vec![SweepMethod::MonteCarlo]);
        assert!(spec.sim.is_some());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_USAGE);
        let conv = Error::Convergence { estimate: 0.5, error_bound: 1.0 };
        assert_eq!(exit_code(&conv), EXIT_NUMERIC);
        let wrapped = Error::AtPoint { point: "p".into(), source: Box::new(conv) };
        assert_eq!(exit_code(&wrapped), EXIT_NUMERIC);
    }
}
