//! The `noonbell` command line.
//!
//! Exit codes: 0 success, 1 verification or runtime failure, 2 usage error
//! (unknown name, arity mismatch, bad flag value), 3 optimization with no
//! converged start.

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use noonbell_core::correlators::{self, click_probabilities};
use noonbell_core::inequalities::catalog;
use noonbell_core::marginals::{MarginalKind, Marginals, DEFAULT_ORDER, DEFAULT_RANGE};
use noonbell_core::optimizer::{certify_with_grid_with, optimize_with, sweep_n_with, CertifyOptions};
use noonbell_core::{Amplitude, BellFunctional, NoonParams, OptimizerConfig};
use serde_json::json;

use crate::exec::Rayon;
use crate::manifest::RunManifest;
use crate::output::{self, float};
use crate::params::{Format, Level, Parameters, PhotonRange};
use crate::svg;
use crate::verify::{self, Library};

#[derive(Debug, Parser)]
#[command(
    name = "noonbell",
    version,
    about = "Bell-inequality tests of N00N states with displaced on-off and parity detection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format (defaults depend on the command).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the payload here instead of stdout, plus `<out>.manifest.json`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 or unset uses all cores.
    #[arg(long, global = true, env = "NOONBELL_THREADS")]
    pub threads: Option<usize>,
    /// JSON file of parameters (or a run manifest) applied under the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a correlator (q-joint, q-single, click, parity, wigner) or a
    /// catalog functional at explicit settings.
    Eval {
        target: String,
        #[arg(long)]
        n: Option<PhotonRange>,
        /// Comma-separated amplitudes such as `1+0i,-0.5-2i`.
        #[arg(long, allow_hyphen_values = true)]
        settings: Option<String>,
    },
    /// Optimize a functional toward its violation direction.
    Optimize {
        functional: String,
        #[command(flatten)]
        search: SearchFlags,
        /// Also certify the result on a grid with this many points per axis.
        #[arg(long)]
        certify: Option<usize>,
    },
    /// Optimize a functional for every N in a range (`--n 1-6`).
    Sweep {
        functional: String,
        #[command(flatten)]
        search: SearchFlags,
        /// Write a margin-versus-N line plot.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Sample a normalized phase-space marginal (q or w) on a square grid.
    Marginal {
        kind: String,
        #[arg(long)]
        n: Option<PhotonRange>,
        #[arg(long)]
        range: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        /// Gauss-Hermite order.
        #[arg(long)]
        order: Option<usize>,
        /// Write a heatmap.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Cross-check closed forms against the Fock oracle and exact identities.
    Verify {
        #[arg(value_enum)]
        level: Option<Level>,
    },
    /// Print the catalog of Bell functionals.
    Catalog,
}

#[derive(Debug, Clone, Args)]
pub struct SearchFlags {
    #[arg(long)]
    pub n: Option<PhotonRange>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Coarse grid points per axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Simplex tolerance on the function value.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Search over the joint phase as well.
    #[arg(long)]
    pub no_fix_phase: bool,
}

impl SearchFlags {
    fn params(&self) -> Parameters {
        Parameters {
            n: self.n,
            seed: self.seed,
            starts: self.starts,
            radius: self.radius,
            grid: self.grid,
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            fix_phase: self.no_fix_phase.then_some(false),
            ..Default::default()
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

fn usage(msg: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(msg.into())
}

fn runtime(msg: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(msg.into())
}

fn core_failure(err: noonbell_core::Error) -> Failure {
    use noonbell_core::Error as E;
    match err {
        E::Arity { .. }
        | E::PhotonNumber(_)
        | E::UnknownJ(_)
        | E::Config(_)
        | E::Grid(_)
        | E::Parse(_)
        | E::NonFinite(_) => usage(err),
        other => runtime(other),
    }
}

/// Result of a command before it is written out.
struct Outcome {
    payload: String,
    files: Vec<(PathBuf, String)>,
    code: u8,
    message: Option<String>,
}

impl Outcome {
    fn ok(payload: String) -> Self {
        Outcome { payload, files: Vec::new(), code: 0, message: None }
    }
}

fn defaults(command: &Command) -> Parameters {
    let opt = OptimizerConfig::default();
    let search = Parameters {
        seed: Some(opt.rng_seed),
        starts: Some(opt.num_starts),
        radius: Some(opt.search_radius),
        grid: Some(opt.coarse_grid_points_per_axis),
        tolerance: Some(opt.simplex_tolerance),
        max_iterations: Some(opt.max_iterations),
        fix_phase: Some(opt.fix_phase),
        ..Default::default()
    };
    match command {
        Command::Eval { .. } => {
            Parameters { n: Some(PhotonRange::single(1)), format: Some(Format::Text), ..Default::default() }
        }
        Command::Optimize { .. } => {
            Parameters { n: Some(PhotonRange::single(1)), format: Some(Format::Json), ..search }
        }
        Command::Sweep { .. } => {
            Parameters { n: Some(PhotonRange { min: 1, max: 4 }), format: Some(Format::Csv), ..search }
        }
        Command::Marginal { .. } => Parameters {
            n: Some(PhotonRange::single(1)),
            range: Some(DEFAULT_RANGE),
            count: Some(64),
            order: Some(DEFAULT_ORDER),
            format: Some(Format::Csv),
            ..Default::default()
        },
        Command::Verify { .. } => {
            Parameters { level: Some(Level::Quick), format: Some(Format::Text), ..Default::default() }
        }
        Command::Catalog => Parameters { format: Some(Format::Json), ..Default::default() },
    }
}

fn flag_params(cli: &Cli) -> (String, Parameters) {
    let common = Parameters { format: cli.format, threads: cli.threads, ..Default::default() };
    let (name, target, specific) = match &cli.command {
        Command::Eval { target, n, settings } => {
            ("eval", Some(target), Parameters { n: *n, settings: settings.clone(), ..Default::default() })
        }
        Command::Optimize { functional, search, .. } => ("optimize", Some(functional), search.params()),
        Command::Sweep { functional, search, .. } => ("sweep", Some(functional), search.params()),
        Command::Marginal { kind, n, range, count, order, .. } => (
            "marginal",
            Some(kind),
            Parameters { n: *n, range: *range, count: *count, order: *order, ..Default::default() },
        ),
        Command::Verify { level } => ("verify", None, Parameters { level: *level, ..Default::default() }),
        Command::Catalog => ("catalog", None, Parameters::default()),
    };
    let flags = common.overlay(specific);
    (name.to_string(), Parameters { command: Some(name.to_string()), target: target.cloned(), ..flags })
}

fn resolve(cli: &Cli) -> Result<(String, Parameters), Failure> {
    let (name, flags) = flag_params(cli);
    let config = match &cli.config {
        Some(path) => Parameters::from_file(path).map_err(usage)?,
        None => Parameters::default(),
    };
    let config = Parameters { command: None, target: None, ..config };
    Ok((name, defaults(&cli.command).overlay(config).overlay(flags)))
}

fn single_n(params: &Parameters) -> Result<NoonParams, Failure> {
    let range = params.n.ok_or_else(|| usage(anyhow!("--n is required")))?;
    if !range.is_single() {
        return Err(usage(anyhow!("expected a single photon number, got {range}")));
    }
    NoonParams::new(range.min).map_err(core_failure)
}

fn parse_settings(params: &Parameters) -> Result<Vec<Amplitude>, Failure> {
    let text = params.settings.as_deref().ok_or_else(|| usage(anyhow!("--settings is required")))?;
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|t| t.parse::<Amplitude>().map_err(core_failure)).collect()
}

fn optimizer_config(params: &Parameters) -> OptimizerConfig {
    let d = OptimizerConfig::default();
    OptimizerConfig {
        num_starts: params.starts.unwrap_or(d.num_starts),
        search_radius: params.radius.unwrap_or(d.search_radius),
        coarse_grid_points_per_axis: params.grid.unwrap_or(d.coarse_grid_points_per_axis),
        simplex_tolerance: params.tolerance.unwrap_or(d.simplex_tolerance),
        max_iterations: params.max_iterations.unwrap_or(d.max_iterations),
        rng_seed: params.seed.unwrap_or(d.rng_seed),
        fix_phase: params.fix_phase.unwrap_or(d.fix_phase),
    }
}

fn functional(name: &str) -> Result<BellFunctional, Failure> {
    BellFunctional::by_name(name).ok_or_else(|| {
        let known: Vec<String> = catalog().into_iter().map(|f| f.name).collect();
        usage(anyhow!("unknown functional {name:?}; known: {}", known.join(", ")))
    })
}

fn format_of(params: &Parameters, allowed: &[Format], command: &str) -> Result<Format, Failure> {
    let format = params.format.unwrap_or(allowed[0]);
    if allowed.contains(&format) {
        Ok(format)
    } else {
        Err(usage(anyhow!("{command} does not support --format {format:?}")))
    }
}

fn expect_arity(target: &str, settings: &[Amplitude], expected: usize) -> Result<(), Failure> {
    if settings.len() == expected {
        Ok(())
    } else {
        Err(core_failure(noonbell_core::Error::Arity { name: target.into(), expected, got: settings.len() }))
    }
}

fn eval(target: &str, params: &Parameters) -> Result<Outcome, Failure> {
    const CORRELATORS: [&str; 5] = ["q-joint", "q-single", "click", "parity", "wigner"];
    let known = CORRELATORS.contains(&target) || BellFunctional::by_name(target).is_some();
    if !known {
        let names: Vec<String> =
            CORRELATORS.iter().map(|s| s.to_string()).chain(catalog().into_iter().map(|f| f.name)).collect();
        return Err(usage(anyhow!("unknown eval target {target:?}; known: {}", names.join(", "))));
    }
    let format = format_of(params, &[Format::Text, Format::Json, Format::Csv], "eval")?;
    let p = single_n(params)?;
    let s = parse_settings(params)?;
    let mut values: Vec<(&str, f64)> = Vec::new();
    let mut extra = serde_json::Map::new();
    match target {
        "q-single" => {
            expect_arity(target, &s, 1)?;
            values.push(("value", correlators::q_single(p, s[0])));
        }
        "q-joint" | "parity" | "wigner" => {
            expect_arity(target, &s, 2)?;
            let v = match target {
                "q-joint" => correlators::q_joint(p, s[0], s[1]),
                "parity" => correlators::parity_corr(p, s[0], s[1]),
                _ => correlators::wigner(p, s[0], s[1]),
            };
            values.push(("value", v));
        }
        "click" => {
            expect_arity(target, &s, 2)?;
            let c = click_probabilities(p, s[0], s[1]);
            values.extend([("p_a", c.p_a), ("p_b", c.p_b), ("p_ab", c.p_ab)]);
        }
        name => {
            let f = functional(name)?;
            let v = f.evaluate(p, &s).map_err(core_failure)?;
            values.push(("value", v));
            let class = f.classify(v);
            extra.insert("lower_bound".into(), json!(f.lower_bound));
            extra.insert("upper_bound".into(), json!(f.upper_bound));
            extra.insert("violates".into(), json!(class.below_lower || class.above_upper));
        }
    }
    let settings: Vec<String> = s.iter().map(|a| a.to_string()).collect();
    let payload = match format {
        Format::Text if values.len() == 1 => format!("{}\n", float(values[0].1)),
        Format::Text => values.iter().map(|(k, v)| format!("{k} {}\n", float(*v))).collect(),
        Format::Csv => {
            let mut s = String::from("target,N,quantity,value\n");
            for (k, v) in &values {
                s.push_str(&format!("{target},{},{k},{}\n", p.n(), float(*v)));
            }
            s
        }
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("target".into(), json!(target));
            obj.insert("n".into(), json!(p.n()));
            obj.insert("settings".into(), json!(settings));
            for (k, v) in &values {
                obj.insert((*k).into(), json!(v));
            }
            obj.extend(extra);
            output::json(&obj).map_err(runtime)?
        }
    };
    Ok(Outcome::ok(payload))
}

fn optimize(name: &str, params: &Parameters, certify: Option<usize>, exec: &Rayon) -> Result<Outcome, Failure> {
    let f = functional(name)?;
    let format = format_of(params, &[Format::Json, Format::Text, Format::Csv], "optimize")?;
    let p = single_n(params)?;
    let cfg = optimizer_config(params);
    let result = optimize_with(exec, &f, p, &cfg).map_err(core_failure)?;
    let report = match certify {
        Some(points) => {
            let opts = CertifyOptions {
                grid_points: points,
                radius: cfg.search_radius,
                fix_phase: cfg.fix_phase,
                ..Default::default()
            };
            Some(certify_with_grid_with(exec, &f, p, &result, &opts).map_err(core_failure)?)
        }
        None => None,
    };
    let payload = match (format, &report) {
        (Format::Json, None) => output::json(&result),
        (Format::Json, Some(c)) => output::json(&json!({ "result": result, "certification": c })),
        (Format::Text, _) => {
            Ok(output::result_text(&result) + &report.as_ref().map(output::certification_text).unwrap_or_default())
        }
        (Format::Csv, _) => output::sweep_csv(std::slice::from_ref(&result)),
    }
    .map_err(runtime)?;
    let mut outcome = Outcome::ok(payload);
    if result.starts_converged == 0 {
        outcome.code = 3;
        outcome.message = Some(format!("no start converged for {} at N={}", result.functional_name, result.n));
    }
    Ok(outcome)
}

fn sweep(name: &str, params: &Parameters, svg_path: Option<&PathBuf>, exec: &Rayon) -> Result<Outcome, Failure> {
    let f = functional(name)?;
    let format = format_of(params, &[Format::Csv, Format::Json, Format::Text], "sweep")?;
    let range = params.n.ok_or_else(|| usage(anyhow!("--n is required")))?;
    let results = sweep_n_with(exec, &f, range.min, range.max, &optimizer_config(params)).map_err(core_failure)?;
    let payload = match format {
        Format::Csv => output::sweep_csv(&results),
        Format::Json => output::json(&results),
        Format::Text => Ok(results.iter().map(output::result_text).collect::<Vec<_>>().join("\n")),
    }
    .map_err(runtime)?;
    let mut outcome = Outcome::ok(payload);
    if let Some(path) = svg_path {
        outcome.files.push((path.clone(), svg::margin_plot(&results)));
    }
    if results.iter().any(|r| r.starts_converged == 0) {
        outcome.code = 3;
        outcome.message = Some("no start converged for at least one N".into());
    }
    Ok(outcome)
}

fn marginal(kind: &str, params: &Parameters, svg_path: Option<&PathBuf>, exec: &Rayon) -> Result<Outcome, Failure> {
    let kind: MarginalKind = kind.parse().map_err(core_failure)?;
    let format = format_of(params, &[Format::Csv, Format::Json], "marginal")?;
    let p = single_n(params)?;
    let range = params.range.unwrap_or(DEFAULT_RANGE);
    let count = params.count.unwrap_or(64);
    let m = Marginals::new(params.order.unwrap_or(DEFAULT_ORDER)).map_err(core_failure)?;
    let grid = m.density_grid_with(exec, kind, p, range, count).map_err(core_failure)?;
    let payload = match format {
        Format::Json => output::json(&grid),
        _ => output::grid_csv(&grid, range),
    }
    .map_err(runtime)?;
    let mut outcome = Outcome::ok(payload);
    if let Some(path) = svg_path {
        outcome.files.push((path.clone(), svg::heatmap(&grid)));
    }
    Ok(outcome)
}

fn verify_cmd(params: &Parameters, exec: &Rayon) -> Result<Outcome, Failure> {
    let format = format_of(params, &[Format::Text, Format::Json], "verify")?;
    let report = verify::run(params.level.unwrap_or(Level::Quick), &Library, exec);
    let payload = match format {
        Format::Json => output::json(&report).map_err(runtime)?,
        _ => report.text(),
    };
    let mut outcome = Outcome::ok(payload);
    if !report.passed {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        outcome.code = 1;
        outcome.message = Some(format!("verification failed: {}", names.join(", ")));
    }
    Ok(outcome)
}

fn catalog_cmd(params: &Parameters) -> Result<Outcome, Failure> {
    let format = format_of(params, &[Format::Json, Format::Text], "catalog")?;
    let all = catalog();
    let payload = match format {
        Format::Text => all
            .iter()
            .map(|f| {
                let bound = |b: Option<f64>| b.map_or_else(|| "-".into(), float);
                format!(
                    "{} settings={} lower={} upper={}\n",
                    f.name,
                    f.num_settings(),
                    bound(f.lower_bound),
                    bound(f.upper_bound)
                )
            })
            .collect(),
        _ => output::json(&all).map_err(runtime)?,
    };
    Ok(Outcome::ok(payload))
}

fn execute(cli: &Cli) -> Result<u8, Failure> {
    let started = Instant::now();
    let (name, params) = resolve(cli)?;
    let exec = Rayon::new(params.threads.unwrap_or(0)).map_err(runtime)?;
    let outcome = match &cli.command {
        Command::Eval { target, .. } => eval(target, &params)?,
        Command::Optimize { functional, certify, .. } => optimize(functional, &params, *certify, &exec)?,
        Command::Sweep { functional, svg, .. } => sweep(functional, &params, svg.as_ref(), &exec)?,
        Command::Marginal { kind, svg, .. } => marginal(kind, &params, svg.as_ref(), &exec)?,
        Command::Verify { .. } => verify_cmd(&params, &exec)?,
        Command::Catalog => catalog_cmd(&params)?,
    };
    let mut outputs = Vec::new();
    match &cli.out {
        Some(path) => {
            std::fs::write(path, &outcome.payload)
                .with_context(|| format!("writing {}", path.display()))
                .map_err(runtime)?;
            outputs.push(path.clone());
        }
        None => print!("{}", outcome.payload),
    }
    for (path, contents) in &outcome.files {
        std::fs::write(path, contents).with_context(|| format!("writing {}", path.display())).map_err(runtime)?;
        outputs.push(path.clone());
    }
    if let Some(out) = &cli.out {
        let manifest = RunManifest::new(&name, params, started.elapsed(), outputs);
        manifest.write(&RunManifest::path_for(out)).map_err(runtime)?;
    }
    if let Some(msg) = &outcome.message {
        eprintln!("noonbell: {msg}");
    }
    Ok(outcome.code)
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(failure) => {
            let (Failure::Usage(e) | Failure::Runtime(e)) = &failure;
            eprintln!("noonbell: {e:#}");
            failure.code()
        }
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
