//! The `seqsub` command line.
//!
//! Every subcommand reads its parameters from flags and from an optional
//! flat TOML file (`--config`); flags win over the file, the file wins over
//! built-in defaults. Each command writes its resolved parameters to
//! `config.json` next to its outputs.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::convergence::{
    build_chain, closed_form_estimate, expected_absorption_time, expected_found_curve,
    format_expected_time, reference_configs, reproduce_tables, simulate_process, ChainScenario,
    ScenarioSpec, SimulationOptions, TableConfig, CHAINING_CONFIGS, CLIQUE_CONFIGS,
    MARGINAL_CONFIGS,
};
use crate::dataset::{generate, Dataset, GeneratorSpec, Scenario};
use crate::distribution::{JointDistribution, Oracle, DEFAULT_MAX_VARIABLES, DEFAULT_TOLERANCE};
use crate::evaluation::{f1_against_truth, f1_curve, SelectionScore};
use crate::records::{write_json, Cell, Format, Table};
use crate::srs::{run_srs, ProbeKind, ProbeRule, SrsConfig, SrsResult};
use crate::tree::TrainingSet;
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "seqsub", version, about = "Sequential random subspace feature selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset and its relevant-feature sidecar.
    Generate(GenerateArgs),
    /// Run the selection procedure on a dataset or a distribution table.
    Run(RunArgs),
    /// Expected discovery times and curves for the idealized scenarios.
    Converge(ConvergeArgs),
    /// Exact relevance report for a small distribution or dataset.
    Oracle(OracleArgs),
}

/// Flag-or-file parameters: every field is optional so a config file can
/// fill in what the flags leave out.
trait Layered: Sized + DeserializeOwned {
    fn config_path(&self) -> Option<&Path>;
    fn merge(self, file: Self) -> Self;

    fn resolve_layers(self) -> Result<Self> {
        match self.config_path() {
            None => Ok(self),
            Some(path) => {
                let text = fs::read_to_string(path)?;
                let file: Self = toml::from_str(&text)
                    .map_err(|e| Error::invalid(format!("{}: {}", path.display(), e.message())))?;
                Ok(self.merge(file))
            }
        }
    }
}

macro_rules! layered {
    ($ty:ty { $($field:ident),* $(,)? }) => {
        impl Layered for $ty {
            fn config_path(&self) -> Option<&Path> {
                self.config.as_deref()
            }

            fn merge(self, file: Self) -> Self {
                Self {
                    config: self.config,
                    $($field: self.$field.or(file.$field),)*
                }
            }
        }
    };
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateArgs {
    /// Flat TOML file with any of the options below.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// chaining, clique, marginal or madelon_like.
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Label flip probability.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub arity: Option<u32>,
    #[arg(long)]
    pub clusters_per_class: Option<usize>,
    #[arg(long)]
    pub feature_noise: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

layered!(GenerateArgs { scenario, p, r, n, noise, seed, arity, clusters_per_class, feature_noise, out });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Dataset CSV; a `.truth` sidecar enables F1 outputs.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Distribution table; trees are grown on it exactly and no probes are used.
    #[arg(long, conflicts_with = "data")]
    pub distribution: Option<PathBuf>,
    /// Features per subspace.
    #[arg(long)]
    pub q: Option<usize>,
    /// Number of trees.
    #[arg(long, short = 't')]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Candidate features per node (defaults to q).
    #[arg(long)]
    pub k: Option<usize>,
    /// Probes per tree; 0 accepts any feature with positive importance.
    #[arg(long)]
    pub probes: Option<usize>,
    /// strict_max or quantile:<γ>.
    #[arg(long)]
    pub probe_rule: Option<String>,
    /// permuted or uniform:<arity>.
    #[arg(long)]
    pub probe_kind: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Independent runs with seeds seed, seed+1, ...
    #[arg(long)]
    pub runs: Option<usize>,
    /// Worker threads for independent runs.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub format: Option<Format>,
    /// Record wall-clock time in the summary.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub timing: Option<bool>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

layered!(RunArgs {
    data, distribution, q, iterations, alpha, k, probes, probe_rule, probe_kind, seed, runs, jobs,
    format, timing, out,
});

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergeArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// reference, chaining, clique or marginal: a fixed list of configurations.
    #[arg(long)]
    pub preset: Option<String>,
    /// Comma-separated scenarios, combined with p, q and every r.
    #[arg(long, value_delimiter = ',')]
    pub scenarios: Option<Vec<String>>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub r: Option<Vec<u64>>,
    /// Comma-separated α values; analytic times need 0 or 1.
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    /// Chaining moves at most one variable per iteration.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub single_step: Option<bool>,
    /// Last iteration of the expected-found curves.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Monte Carlo replicates per configuration (0 disables).
    #[arg(long)]
    pub simulate: Option<usize>,
    #[arg(long)]
    pub max_sim_iterations: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

layered!(ConvergeArgs {
    preset, scenarios, p, q, r, alphas, single_step, horizon, simulate, max_sim_iterations, seed,
    jobs, format, out,
});

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub distribution: Option<PathBuf>,
    /// Dataset CSV, converted to its empirical distribution.
    #[arg(long, conflicts_with = "distribution")]
    pub data: Option<PathBuf>,
    /// Subspace size for the asymptotic importances (defaults to p).
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub max_variables: Option<usize>,
    #[arg(long)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

layered!(OracleArgs { distribution, data, q, tolerance, max_variables, format, out });

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Capacity { .. } => 3,
        Error::Io(_) | Error::Csv(_) | Error::Parse { .. } | Error::EmptyDataset => 4,
        _ => 2,
    }
}

/// Parses `args` and runs the command, returning the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Generate(a) => cmd_generate(a.resolve_layers()?),
        Command::Run(a) => cmd_run(a.resolve_layers()?),
        Command::Converge(a) => cmd_converge(a.resolve_layers()?),
        Command::Oracle(a) => cmd_oracle(a.resolve_layers()?),
    }
}

fn required<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::invalid(format!("missing required option `{name}`")))
}

fn output_dir(out: Option<PathBuf>) -> Result<PathBuf> {
    let dir = out.unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Error::invalid("jobs must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::invalid(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

pub fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let scenario: Scenario = required(args.scenario, "scenario")?.parse()?;
    let mut spec = GeneratorSpec::new(scenario, required(args.p, "p")?, required(args.r, "r")?, required(args.n, "n")?);
    spec.noise = args.noise.unwrap_or(spec.noise);
    spec.seed = args.seed.unwrap_or(spec.seed);
    spec.arity = args.arity.unwrap_or(spec.arity);
    spec.clusters_per_class = args.clusters_per_class.unwrap_or(spec.clusters_per_class);
    spec.feature_noise = args.feature_noise.unwrap_or(spec.feature_noise);
    spec.validate()?;
    let dir = output_dir(args.out)?;
    let ds = generate(&spec)?;
    ds.save_csv(dir.join("dataset.csv"))?;
    write_json(&dir.join("config.json"), &json!({ "command": "generate", "generator": spec }))
}

#[derive(Debug, Clone, Serialize)]
struct RunConfig {
    data: Option<PathBuf>,
    distribution: Option<PathBuf>,
    srs: SrsConfig,
    runs: usize,
    format: Format,
}

pub fn cmd_run(args: RunArgs) -> Result<()> {
    let (dataset, dist) = match (&args.data, &args.distribution) {
        (Some(path), None) => (Some(Dataset::load_csv(path)?), None),
        (None, Some(path)) => (None, Some(JointDistribution::load(path)?)),
        _ => return Err(Error::invalid("exactly one of `data` and `distribution` is required")),
    };
    let q = required(args.q, "q")?;
    let mut srs = SrsConfig::new(q, args.iterations.unwrap_or(100), args.alpha.unwrap_or(0.5), args.k.unwrap_or(q));
    srs.probe_count = args.probes.unwrap_or(srs.probe_count);
    if let Some(rule) = &args.probe_rule {
        srs.probe_rule = rule.parse::<ProbeRule>()?;
    }
    if let Some(kind) = &args.probe_kind {
        srs.probe_kind = kind.parse::<ProbeKind>()?;
    }
    srs.seed = args.seed.unwrap_or(0);
    if dist.is_some() {
        srs.probe_count = 0;
    }
    let config = RunConfig {
        data: args.data.clone(),
        distribution: args.distribution.clone(),
        srs,
        runs: args.runs.unwrap_or(1),
        format: args.format.unwrap_or_default(),
    };
    if config.runs == 0 {
        return Err(Error::invalid("runs must be at least 1"));
    }
    let timing = args.timing.unwrap_or(false);
    let dir = output_dir(args.out)?;

    let data = match (&dataset, &dist) {
        (Some(ds), _) => TrainingSet::from_dataset(ds),
        (None, Some(d)) => TrainingSet::from_distribution(d),
        _ => unreachable!(),
    };
    config.srs.validate(data.n_features())?;
    let truth = dataset.as_ref().and_then(|d| d.relevant_truth().cloned()).filter(|t| !t.is_empty());
    let seeds: Vec<u64> = (0..config.runs as u64).map(|i| config.srs.seed + i).collect();

    let outcomes = with_pool(args.jobs, || {
        seeds
            .par_iter()
            .map(|&seed| {
                let cfg = SrsConfig { seed, ..config.srs.clone() };
                let start = Instant::now();
                let result = run_srs(&data, &cfg)?;
                Ok((seed, result, start.elapsed().as_secs_f64()))
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let mut per_run = Vec::new();
    for (seed, result, seconds) in &outcomes {
        let run_dir = if config.runs == 1 { dir.clone() } else { dir.join(format!("seed_{seed}")) };
        fs::create_dir_all(&run_dir)?;
        let score = write_run(&run_dir, result, truth.as_ref(), config.format)?;
        let mut summary = json!({
            "seed": seed,
            "found": result.found(),
            "found_count": result.found().len(),
            "score": score,
            "config": SrsConfig { seed: *seed, ..config.srs.clone() },
        });
        if timing {
            summary["runtime_seconds"] = json!(seconds);
        }
        write_json(&run_dir.join("summary.json"), &summary)?;
        per_run.push(json!({ "seed": seed, "found_count": result.found().len(), "f1": score.map(|s| s.f1) }));
    }
    if config.runs > 1 {
        let mut f1s: Vec<f64> = outcomes
            .iter()
            .filter_map(|(_, r, _)| truth.as_ref().map(|t| f1_against_truth(r.found_set(), t).map(|s| s.f1)))
            .collect::<Result<_>>()?;
        f1s.sort_by(f64::total_cmp);
        let median = (!f1s.is_empty()).then(|| median_sorted(&f1s));
        write_json(&dir.join("summary.json"), &json!({ "runs": per_run, "median_f1": median }))?;
    }
    write_json(&dir.join("config.json"), &json!({ "command": "run", "run": config }))
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn write_run(
    dir: &Path,
    result: &SrsResult,
    truth: Option<&BTreeSet<usize>>,
    format: Format,
) -> Result<Option<SelectionScore>> {
    let curve = truth.map(|t| f1_curve(&result.state.history, t)).transpose()?;

    let mut history = Table::new(["iteration", "subspace_size", "retained", "accepted", "added", "found", "f1"]);
    for (k, rec) in result.state.history.iter().enumerate() {
        let f1 = curve.as_ref().map(|c| c[k].1.f1);
        history.push(vec![
            rec.iteration.into(),
            rec.subspace.len().into(),
            rec.subspace.retained.len().into(),
            rec.accepted.len().into(),
            rec.added.len().into(),
            rec.found_after.into(),
            f1.into(),
        ]);
    }
    history.save(dir, "history", format)?;

    let mut importances = Table::new(["feature", "importance"]);
    for (j, &v) in result.importances.as_slice().iter().enumerate() {
        importances.push(vec![j.into(), v.into()]);
    }
    importances.save(dir, "importances", format)?;

    if let Some(curve) = &curve {
        let mut table = Table::new(["iteration", "precision", "recall", "f1"]);
        for (t, s) in curve {
            table.push(vec![(*t).into(), s.precision.into(), s.recall.into(), s.f1.into()]);
        }
        table.save(dir, "f1_curve", format)?;
    }
    truth.map(|t| f1_against_truth(result.found_set(), t)).transpose()
}

#[derive(Debug, Clone, Serialize)]
struct ConvergeConfig {
    configs: Vec<TableConfig>,
    alphas: Vec<f64>,
    single_step: bool,
    horizon: usize,
    simulate: usize,
    max_sim_iterations: u64,
    seed: u64,
    format: Format,
}

pub fn cmd_converge(args: ConvergeArgs) -> Result<()> {
    let configs: Vec<TableConfig> = match args.preset.as_deref() {
        Some("reference") => reference_configs(),
        Some("chaining") => CHAINING_CONFIGS.to_vec(),
        Some("clique") => CLIQUE_CONFIGS.to_vec(),
        Some("marginal") => MARGINAL_CONFIGS.to_vec(),
        Some(other) => return Err(Error::invalid(format!("unknown preset `{other}`"))),
        None => {
            let scenarios = args.scenarios.clone().unwrap_or_default();
            let (p, q) = (required(args.p, "p")?, required(args.q, "q")?);
            let rs = required(args.r.clone(), "r")?;
            let mut out = Vec::new();
            for s in &scenarios {
                let scenario: ChainScenario = s.parse()?;
                out.extend(rs.iter().map(|&r| TableConfig::new(scenario, p, q, r)));
            }
            out
        }
    };
    if configs.is_empty() {
        return Err(Error::invalid("no scenario configurations given"));
    }
    let config = ConvergeConfig {
        configs,
        alphas: args.alphas.clone().unwrap_or_else(|| vec![0.0, 1.0]),
        single_step: args.single_step.unwrap_or(false),
        horizon: args.horizon.unwrap_or(100),
        simulate: args.simulate.unwrap_or(0),
        max_sim_iterations: args.max_sim_iterations.unwrap_or(10_000_000),
        seed: args.seed.unwrap_or(0),
        format: args.format.unwrap_or_default(),
    };
    if config.alphas.is_empty() {
        return Err(Error::invalid("no alpha values given"));
    }
    for c in &config.configs {
        for &a in &config.alphas {
            spec_for(c, a, config.single_step).validate()?;
            if a != 0.0 && a != 1.0 && config.simulate == 0 {
                return Err(Error::invalid(format!("alpha = {a} needs --simulate")));
            }
        }
    }
    let dir = output_dir(args.out)?;
    with_pool(args.jobs, || converge_outputs(&config, &dir))??;
    write_json(&dir.join("config.json"), &json!({ "command": "converge", "converge": config }))
}

fn spec_for(c: &TableConfig, alpha: f64, single_step: bool) -> ScenarioSpec {
    ScenarioSpec {
        single_step,
        ..c.spec(alpha)
    }
}

fn converge_outputs(config: &ConvergeConfig, dir: &Path) -> Result<()> {
    let simulate = config.simulate > 0;
    let mut times_header = vec!["scenario", "p", "q", "r", "alpha", "expected_time", "display", "closed_form"];
    let mut curve_header = vec!["scenario", "p", "q", "r", "alpha", "t", "expected_found"];
    if simulate {
        times_header.extend(["sim_mean", "sim_std_error", "sim_censored"]);
        curve_header.push("empirical_found");
    }
    let mut times = Table::new(times_header);
    let mut curves = Table::new(curve_header);

    for c in &config.configs {
        for &alpha in &config.alphas {
            let spec = spec_for(c, alpha, config.single_step);
            let analytic = alpha == 0.0 || alpha == 1.0;
            let (expected, curve) = if analytic {
                let chain = build_chain(&spec)?;
                (Some(expected_absorption_time(&chain)?), Some(expected_found_curve(&chain, config.horizon)))
            } else {
                (None, None)
            };
            let closed = if analytic { closed_form_estimate(&spec)? } else { None };
            let sim = if simulate {
                let options = SimulationOptions {
                    replicates: config.simulate,
                    horizon: config.horizon,
                    max_iterations: config.max_sim_iterations,
                    seed: config.seed,
                };
                Some(simulate_process(&spec, &options)?)
            } else {
                None
            };

            let key = |row: &mut Vec<Cell>| {
                row.extend([c.scenario.as_str().into(), c.p.into(), c.q.into(), c.r.into(), alpha.into()]);
            };
            let mut row = Vec::new();
            key(&mut row);
            row.extend([expected.into(), expected.map(format_expected_time).into(), closed.into()]);
            if let Some(s) = &sim {
                row.extend([s.mean_time.into(), s.std_error.into(), s.censored.into()]);
            }
            times.push(row);

            for t in 0..=config.horizon {
                let mut row = Vec::new();
                key(&mut row);
                row.extend([t.into(), curve.as_ref().map(|v| v[t]).into()]);
                if let Some(s) = &sim {
                    row.push(s.empirical_curve[t].into());
                }
                curves.push(row);
            }
        }
    }
    times.save(dir, "expected_times", config.format)?;
    curves.save(dir, "curves", config.format)?;

    let mut table = Table::new(["scenario", "p", "q", "r", "rs", "srs", "rs_display", "srs_display"]);
    for row in reproduce_tables(&config.configs, config.single_step)? {
        table.push(vec![
            row.scenario.as_str().into(),
            row.p.into(),
            row.q.into(),
            row.r.into(),
            row.rs.into(),
            row.srs.into(),
            format_expected_time(row.rs).into(),
            format_expected_time(row.srs).into(),
        ]);
    }
    table.save(dir, "table", config.format)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct OracleConfig {
    distribution: Option<PathBuf>,
    data: Option<PathBuf>,
    q: usize,
    tolerance: f64,
    max_variables: usize,
    format: Format,
}

pub fn cmd_oracle(args: OracleArgs) -> Result<()> {
    let max_variables = args.max_variables.unwrap_or(DEFAULT_MAX_VARIABLES);
    let dist = match (&args.distribution, &args.data) {
        (Some(path), None) => JointDistribution::load(path)?,
        (None, Some(path)) => {
            let ds = Dataset::load_csv(path)?;
            let all: Vec<usize> = (0..ds.n_features()).collect();
            ds.to_distribution_limited(&all, max_variables)?
        }
        _ => return Err(Error::invalid("exactly one of `distribution` and `data` is required")),
    };
    let oracle = Oracle {
        tolerance: args.tolerance.unwrap_or(DEFAULT_TOLERANCE),
        max_variables,
    };
    if !(oracle.tolerance >= 0.0) {
        return Err(Error::invalid("tolerance must be nonnegative"));
    }
    let config = OracleConfig {
        distribution: args.distribution.clone(),
        data: args.data.clone(),
        q: args.q.unwrap_or(dist.n_inputs()),
        tolerance: oracle.tolerance,
        max_variables,
        format: args.format.unwrap_or_default(),
    };
    let reports = oracle.relevance_all(&dist)?;
    let boundary = oracle.markov_boundary(&dist)?;
    let dir = output_dir(args.out)?;

    let mut table = Table::new(["index", "variable", "class", "degree", "witness", "importance"]);
    let mut total = 0.0;
    for report in &reports {
        let importance = oracle.asymptotic_importance(&dist, report.variable, config.q)?;
        total += importance;
        let witness = report.witness.as_ref().map(|w| {
            w.iter()
                .map(|&j| dist.names()[j].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        });
        table.push(vec![
            report.variable.into(),
            dist.names()[report.variable].clone().into(),
            report.class.as_str().into(),
            report.degree.into(),
            witness.into(),
            importance.into(),
        ]);
    }
    table.save(&dir, "relevance", config.format)?;
    let names = |v: &[usize]| v.iter().map(|&j| dist.names()[j].clone()).collect::<Vec<_>>();
    write_json(
        &dir.join("summary.json"),
        &json!({
            "markov_boundary": names(&boundary.members),
            "boundary_unique": boundary.unique,
            "strictly_positive": dist.is_strictly_positive(),
            "output_entropy": dist.output_entropy(),
            "importance_total": total,
            "degree_histogram": oracle.degree_histogram(&dist)?,
        }),
    )?;
    write_json(&dir.join("config.json"), &json!({ "command": "oracle", "oracle": config }))
}
