//! The `loadcast` command line.
//!
//! Every option can also come from an environment variable
//! `LOADCAST_<OPTION>` or from a JSON config file given with `--config`.
//! Config keys are option names (`-` or `_` both accepted); a key nested
//! under a subcommand name, such as `{"train": {"patience": 30}}`, applies
//! to that subcommand only and wins over a top-level key.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use crate::dataset::{load_dataset, save_dataset, write_csv};
use crate::error::{Error, Result};
use crate::eval::{
    benchmark_prediction, error_grid, evaluate_suite, solve_time_percentiles, suite_csv, suite_text, EvalSet,
    Predictor, SuiteModel, TimingReport,
};
use crate::fleet::{Fleet, NUM_FEATURES};
use crate::manifest::{Artifact, RunManifest};
use crate::neural::{
    combine_max_counts, load_checkpoint, random_search, save_checkpoint, train, Checkpoint, ModelKind, Monitor,
    NetworkConfig, SearchSpace,
};
use crate::pipeline::{generate_dataset, with_workers, GenerateSpec};
use crate::sampling::{generate_1s, DataClass, InstanceSketch, Protocol};
use crate::solver::{solve_lpp, SolverConfig};
use crate::summarize::{summarize, Aggregation, Dataset, Split, Summary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_DATA: i32 = 4;
pub const EXIT_RUNTIME: i32 = 5;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        Error::InvalidInput(_) | Error::Format(_) | Error::UnsupportedInput { .. } | Error::Io(_) | Error::Json(_) => {
            EXIT_DATA
        }
        Error::TooLarge(_) | Error::TrainingDiverged { .. } => EXIT_RUNTIME,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "loadcast",
    version,
    args_override_self = true,
    about = "Generate, solve and learn double-stack load plans"
)]
struct Cli {
    /// JSON file with option defaults.
    #[arg(long, global = true, env = "LOADCAST_CONFIG")]
    config: Option<PathBuf>,
    /// Fleet description (JSON); the built-in fleet when absent.
    #[arg(long, global = true, env = "LOADCAST_FLEET")]
    fleet: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print or check a fleet description.
    #[command(subcommand)]
    Fleet(FleetCommand),
    /// Sample, solve and aggregate a labeled dataset.
    Generate(GenerateArgs),
    /// Train a predictor, optionally with random hyperparameter search.
    Train(TrainArgs),
    /// Predict summaries for sketches.
    Predict(PredictArgs),
    /// Score predictors on datasets.
    Eval(EvalArgs),
    /// Time predictors and the exact solver.
    Bench(BenchArgs),
    /// Solve one sampled instance exactly.
    Solve(SolveArgs),
}

#[derive(Debug, Subcommand)]
enum FleetCommand {
    /// Print the fleet as JSON with its hash.
    Show,
    /// Check a fleet file; defaults to `--fleet`.
    Validate { path: Option<PathBuf> },
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Data class: A, B, C, D, or a desk-size variant such as A'.
    #[arg(long, env = "LOADCAST_CLASS")]
    class: Option<String>,
    /// 1s (independent instances) or 2s (cohorts sharing a sketch).
    #[arg(long, env = "LOADCAST_PROTOCOL")]
    protocol: Option<String>,
    /// Instances (1s) or cohorts (2s).
    #[arg(long, env = "LOADCAST_N")]
    n: Option<usize>,
    /// Members per cohort.
    #[arg(long, env = "LOADCAST_K")]
    k: Option<usize>,
    /// othrml or obefml.
    #[arg(long, env = "LOADCAST_AGG")]
    agg: Option<String>,
    #[arg(long, env = "LOADCAST_SEED")]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core. Output does not depend on it.
    #[arg(long, env = "LOADCAST_WORKERS")]
    workers: Option<usize>,
    /// Relative optimality gap; exact when absent.
    #[arg(long, env = "LOADCAST_GAP")]
    gap: Option<f64>,
    #[arg(long, env = "LOADCAST_NODE_LIMIT")]
    node_limit: Option<u64>,
    #[arg(long, env = "LOADCAST_OUT")]
    out: Option<PathBuf>,
    /// Also write the examples as CSV.
    #[arg(long, env = "LOADCAST_CSV")]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// classmlp, regmlp, logreg or linreg.
    #[arg(long, env = "LOADCAST_MODEL")]
    model: Option<String>,
    #[arg(long, env = "LOADCAST_DATA")]
    data: Option<PathBuf>,
    #[arg(long, env = "LOADCAST_HIDDEN_LAYERS")]
    hidden_layers: Option<usize>,
    #[arg(long, env = "LOADCAST_HIDDEN_WIDTH")]
    hidden_width: Option<usize>,
    #[arg(long, env = "LOADCAST_L1")]
    l1: Option<f64>,
    #[arg(long, env = "LOADCAST_L2")]
    l2: Option<f64>,
    #[arg(long, env = "LOADCAST_LR")]
    lr: Option<f64>,
    #[arg(long, env = "LOADCAST_BATCH_SIZE")]
    batch_size: Option<usize>,
    #[arg(long, env = "LOADCAST_PATIENCE")]
    patience: Option<usize>,
    #[arg(long, env = "LOADCAST_MAX_EPOCHS")]
    max_epochs: Option<usize>,
    /// Early-stopping quantity: mae or loss.
    #[arg(long, env = "LOADCAST_MONITOR")]
    monitor: Option<String>,
    /// Random-search trials; a single fit when absent or 0.
    #[arg(long, env = "LOADCAST_TRIALS")]
    trials: Option<usize>,
    /// Search ranges: desk or full.
    #[arg(long, env = "LOADCAST_SPACE")]
    space: Option<String>,
    #[arg(long, env = "LOADCAST_SEED")]
    seed: Option<u64>,
    #[arg(long, env = "LOADCAST_OUT")]
    out: Option<PathBuf>,
    /// Classes that size a classification head (comma separated); taken
    /// from the dataset when absent.
    #[arg(long, env = "LOADCAST_CLASS")]
    class: Option<String>,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long, env = "LOADCAST_CHECKPOINT", conflicts_with = "heuristic")]
    checkpoint: Option<PathBuf>,
    /// heurv or heurs.
    #[arg(long, env = "LOADCAST_HEURISTIC")]
    heuristic: Option<String>,
    /// Twelve counts separated by spaces or commas.
    #[arg(long, conflicts_with = "input", allow_hyphen_values = true)]
    sketch: Option<String>,
    /// File with one sketch per line.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Dataset files; repeat or separate with commas.
    #[arg(long, env = "LOADCAST_DATA", value_delimiter = ',')]
    data: Vec<PathBuf>,
    /// Checkpoints; repeat or separate with commas.
    #[arg(long, env = "LOADCAST_MODEL", value_delimiter = ',')]
    model: Vec<PathBuf>,
    /// Leave out the two heuristics.
    #[arg(long)]
    no_heuristics: bool,
    /// test or all.
    #[arg(long, env = "LOADCAST_SPLIT")]
    split: Option<String>,
    /// Also write error grids with these bin widths (slots,containers).
    #[arg(long, env = "LOADCAST_GRID")]
    grid: Option<String>,
    /// Report directory: suite.csv, suite.txt and grid_*.csv.
    #[arg(long, env = "LOADCAST_OUT")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, env = "LOADCAST_CLASS")]
    class: Option<String>,
    #[arg(long, env = "LOADCAST_N")]
    n: Option<usize>,
    #[arg(long, env = "LOADCAST_REPS")]
    reps: Option<usize>,
    #[arg(long, env = "LOADCAST_SEED")]
    seed: Option<u64>,
    #[arg(long, env = "LOADCAST_MODEL", value_delimiter = ',')]
    model: Vec<PathBuf>,
    /// Leave out the two heuristics.
    #[arg(long)]
    no_heuristics: bool,
    /// Skip timing the exact solver.
    #[arg(long)]
    no_solver: bool,
    /// Report directory: bench.csv and bench.txt.
    #[arg(long, env = "LOADCAST_OUT")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, env = "LOADCAST_CLASS")]
    class: Option<String>,
    #[arg(long, env = "LOADCAST_SEED")]
    seed: Option<u64>,
    /// Position of the instance in the seeded one-stage stream.
    #[arg(long, env = "LOADCAST_INDEX")]
    index: Option<usize>,
    #[arg(long, env = "LOADCAST_GAP")]
    gap: Option<f64>,
    #[arg(long, env = "LOADCAST_NODE_LIMIT")]
    node_limit: Option<u64>,
    /// Print the full solution as JSON.
    #[arg(long)]
    json: bool,
}

// ---------------------------------------------------------------------------
// Config-file fallback

struct FileDefaults {
    section: Map<String, Value>,
    top: Map<String, Value>,
}

fn normalize(map: &Map<String, Value>) -> Map<String, Value> {
    map.iter().map(|(k, v)| (k.replace('-', "_"), v.clone())).collect()
}

impl FileDefaults {
    fn empty() -> Self {
        FileDefaults {
            section: Map::new(),
            top: Map::new(),
        }
    }

    fn load(path: Option<&Path>, command: &str) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::empty()) };
        let text =
            fs::read_to_string(path).map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))?;
        let value: Value =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))?;
        let Value::Object(top) = value else {
            return Err(Error::Config(format!(
                "config file {} must hold a JSON object",
                path.display()
            )));
        };
        let section = match top.get(command) {
            Some(Value::Object(s)) => normalize(s),
            _ => Map::new(),
        };
        Ok(FileDefaults {
            section,
            top: normalize(&top),
        })
    }

    fn value(&self, key: &str) -> Option<&Value> {
        self.section.get(key).or_else(|| self.top.get(key))
    }

    fn get<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        self.value(key)
            .map(|v| serde_json::from_value(v.clone()).map_err(|e| Error::Config(format!("config key {key:?}: {e}"))))
            .transpose()
    }

    /// Flag, then config file, then `default`.
    fn or<T: DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(match flag {
            Some(v) => v,
            None => self.get(key)?.unwrap_or(default),
        })
    }

    fn opt<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    fn required<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<T> {
        self.opt(flag, key)?
            .ok_or_else(|| Error::Config(format!("missing required option --{}", key.replace('_', "-"))))
    }

    fn parsed<T: FromStr<Err = Error>>(&self, flag: Option<String>, key: &str, default: &str) -> Result<T> {
        self.or(flag, key, default.to_string())?.parse()
    }

    fn list(&self, flag: Vec<PathBuf>, key: &str) -> Result<Vec<PathBuf>> {
        if !flag.is_empty() {
            return Ok(flag);
        }
        Ok(match self.value(key) {
            None => Vec::new(),
            Some(Value::String(s)) => s.split(',').map(PathBuf::from).collect(),
            Some(_) => self.get(key)?.unwrap_or_default(),
        })
    }
}

// ---------------------------------------------------------------------------
// Entry points

/// Run with the process arguments and return the exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Fleet(_) => "fleet",
        Command::Generate(_) => "generate",
        Command::Train(_) => "train",
        Command::Predict(_) => "predict",
        Command::Eval(_) => "eval",
        Command::Bench(_) => "bench",
        Command::Solve(_) => "solve",
    }
}

fn execute(cli: Cli) -> Result<()> {
    let file = FileDefaults::load(cli.config.as_deref(), command_name(&cli.command))?;
    let fleet_path: Option<PathBuf> = file.opt(cli.fleet, "fleet")?;
    if let Command::Fleet(FleetCommand::Validate { path }) = &cli.command {
        let path = path
            .clone()
            .or(fleet_path)
            .ok_or_else(|| Error::Config("fleet validate needs a path or --fleet".into()))?;
        let fleet = Fleet::load(&path).map_err(as_config)?;
        println!("ok {} {}", path.display(), fleet.hash());
        return Ok(());
    }
    let fleet = match &fleet_path {
        Some(p) => Fleet::load(p).map_err(as_config)?,
        None => Fleet::default_fleet(),
    };
    match cli.command {
        Command::Fleet(FleetCommand::Show) => {
            println!("{}", serde_json::to_string_pretty(&fleet.to_config())?);
            println!("hash {}", fleet.hash());
            Ok(())
        }
        Command::Fleet(FleetCommand::Validate { .. }) => unreachable!(),
        Command::Generate(a) => cmd_generate(a, &file, &fleet),
        Command::Train(a) => cmd_train(a, &file, &fleet),
        Command::Predict(a) => cmd_predict(a, &file, &fleet),
        Command::Eval(a) => cmd_eval(a, &file, &fleet),
        Command::Bench(a) => cmd_bench(a, &file, &fleet),
        Command::Solve(a) => cmd_solve(a, &file, &fleet),
    }
}

/// A fleet file that cannot be read or parsed is a configuration problem.
fn as_config(e: Error) -> Error {
    match e {
        Error::Io(e) => Error::Config(format!("fleet file: {e}")),
        Error::Json(e) => Error::Config(format!("fleet file: {e}")),
        other => other,
    }
}

fn solver_config(gap: Option<f64>, node_limit: Option<u64>) -> Result<SolverConfig> {
    let mut c = match gap {
        Some(g) => SolverConfig::gap(g),
        None => SolverConfig::exact(),
    };
    if let Some(l) = node_limit {
        c = c.with_node_limit(l);
    }
    c.validate()?;
    Ok(c)
}

fn check_fleet_hash(what: &str, hash: &str, fleet: &Fleet) {
    if hash != fleet.hash() {
        eprintln!(
            "warning: {what} was produced with fleet {hash}, current fleet is {}",
            fleet.hash()
        );
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// generate

fn cmd_generate(a: GenerateArgs, file: &FileDefaults, fleet: &Fleet) -> Result<()> {
    let class: DataClass = file.parsed(a.class, "class", "A'")?;
    let protocol: Protocol = file.parsed(a.protocol, "protocol", "1s")?;
    let aggregation: Aggregation = file.parsed(a.agg, "agg", "othrml")?;
    let spec = GenerateSpec {
        class,
        protocol,
        n: file.or(a.n, "n", 1000)?,
        k: file.or(a.k, "k", 25)?,
        aggregation,
        seed: file.or(a.seed, "seed", 0)?,
        solver: solver_config(file.opt(a.gap, "gap")?, file.opt(a.node_limit, "node_limit")?)?,
    };
    let workers: usize = file.or(a.workers, "workers", 0)?;
    let out: PathBuf = file.required(a.out, "out")?;
    let csv: Option<PathBuf> = file.opt(a.csv, "csv")?;

    let mut manifest = RunManifest::start(
        fleet.hash(),
        json!({ "generate": spec, "workers": workers, "out": out, "csv": csv }),
    );
    manifest.seeds.insert("seed".into(), spec.seed);
    let (dataset, stats) = with_workers(workers, || generate_dataset(fleet, &spec))??;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    save_dataset(&out, &dataset, &fleet.hash())?;
    manifest.outputs.push(Artifact::of(&out)?);
    if let Some(csv) = &csv {
        write_csv(fs::File::create(csv)?, &dataset)?;
        manifest.outputs.push(Artifact::of(csv)?);
    }
    manifest.finish(&out)?;
    let counts = [Split::Train, Split::Validation, Split::Test].map(|s| dataset.part(s).len());
    println!(
        "wrote {} examples to {} (train {}, validation {}, test {}; {} solves, {} node-limit hits)",
        dataset.len(),
        out.display(),
        counts[0],
        counts[1],
        counts[2],
        stats.solves,
        stats.node_limit_hits
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// train

fn head_max_counts(classes: Option<&str>, dataset: &Dataset, fleet: &Fleet) -> Result<[u32; NUM_FEATURES]> {
    let mut counts: Vec<[u32; NUM_FEATURES]> = match classes {
        Some(list) => list
            .split(',')
            .map(|c| Ok(c.parse::<DataClass>()?.max_counts(fleet)))
            .collect::<Result<_>>()?,
        None => dataset
            .provenance
            .iter()
            .map(|p| p.plan.class.max_counts(fleet))
            .collect(),
    };
    if counts.is_empty() {
        counts = dataset.examples.iter().map(|e| e.input.to_vector()).collect();
    }
    Ok(combine_max_counts(&counts))
}

fn cmd_train(a: TrainArgs, file: &FileDefaults, fleet: &Fleet) -> Result<()> {
    let kind: ModelKind = file.parsed(a.model, "model", "regmlp")?;
    let data: PathBuf = file.required(a.data, "data")?;
    let out: PathBuf = file.required(a.out, "out")?;
    let seed: u64 = file.or(a.seed, "seed", 0)?;
    let trials: usize = file.or(a.trials, "trials", 0)?;
    let classes: Option<String> = file.opt(a.class, "class")?;

    let (header, dataset) = load_dataset(&data)?;
    check_fleet_hash("dataset", &header.fleet_hash, fleet);
    let max_counts = head_max_counts(classes.as_deref(), &dataset, fleet)?;

    let mut cfg = NetworkConfig::new(kind, max_counts);
    let layers: Option<usize> = file.opt(a.hidden_layers, "hidden_layers")?;
    let width: Option<usize> = file.opt(a.hidden_width, "hidden_width")?;
    if !kind.has_hidden_layers() && layers.is_some_and(|l| l > 0) {
        return Err(Error::Config(format!("{} has no hidden layers", kind.name())));
    }
    if let Some(l) = layers {
        cfg.hidden_layers = l;
    }
    if let Some(w) = width {
        cfg.hidden_width = w;
    }
    if cfg.hidden_layers == 0 {
        cfg.hidden_width = 0;
    }
    cfg.l1 = file.or(a.l1, "l1", cfg.l1)?;
    cfg.l2 = file.or(a.l2, "l2", cfg.l2)?;
    cfg.learning_rate = file.or(a.lr, "lr", cfg.learning_rate)?;
    cfg.batch_size = file.or(a.batch_size, "batch_size", cfg.batch_size)?;
    cfg.patience = file.or(a.patience, "patience", cfg.patience)?;
    cfg.max_epochs = file.or(a.max_epochs, "max_epochs", cfg.max_epochs)?;
    cfg.monitor = match file
        .or(a.monitor, "monitor", "mae".to_string())?
        .to_ascii_lowercase()
        .as_str()
    {
        "mae" => Monitor::Mae,
        "loss" => Monitor::Loss,
        m => return Err(Error::Config(format!("unknown monitor {m:?}; expected mae or loss"))),
    };
    cfg.init_seed = seed;
    cfg.validate()?;
    let space = match file
        .or(a.space, "space", "desk".to_string())?
        .to_ascii_lowercase()
        .as_str()
    {
        "desk" => SearchSpace::desk(),
        "full" => SearchSpace::full(),
        s => {
            return Err(Error::Config(format!(
                "unknown search space {s:?}; expected desk or full"
            )))
        }
    };

    let mut manifest = RunManifest::start(
        fleet.hash(),
        json!({ "base": cfg, "trials": trials, "search_space": if trials > 0 { Some(space) } else { None }, "data": data, "out": out }),
    );
    manifest.seeds.insert("seed".into(), seed);
    manifest.inputs.push(Artifact::of(&data)?);

    let (network, report, summary) = if trials > 0 {
        let result = random_search(&cfg, &space, trials, &dataset, fleet, seed)?;
        let best = result.best_trial().clone();
        let rows: Vec<Value> = result
            .trials
            .iter()
            .map(|t| {
                json!({
                    "hidden_layers": t.config.hidden_layers,
                    "hidden_width": t.config.hidden_width,
                    "l1": t.config.l1,
                    "l2": t.config.l2,
                    "init_seed": t.config.init_seed,
                    "epochs_run": t.report.epochs_run,
                    "validation_mae": t.validation_mae,
                    "test_mae": t.test_mae,
                })
            })
            .collect();
        let summary = json!({
            "model": kind.name(),
            "validation_mae": best.validation_mae,
            "test_mae": best.test_mae,
            "best_trial": result.best,
            "validation_mae_range": result.validation_range(),
            "test_mae_range": result.test_range(),
            "trials": rows,
        });
        (best.network, best.report, summary)
    } else {
        let (network, report) = train(cfg, &dataset, fleet)?;
        let summary = json!({
            "model": kind.name(),
            "validation_mae": report.validation_mae,
            "best_epoch": report.best_epoch,
            "epochs_run": report.epochs_run,
        });
        (network, report, summary)
    };
    let validation_mae = report.validation_mae;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    save_checkpoint(
        &out,
        &Checkpoint {
            network,
            fleet_hash: fleet.hash(),
            report: Some(report),
        },
    )?;
    let mut report_path = out.as_os_str().to_owned();
    report_path.push(".report.json");
    let report_path = PathBuf::from(report_path);
    write_file(&report_path, &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    manifest.seeds.insert("init_seed".into(), cfg.init_seed);
    manifest.outputs.push(Artifact::of(&out)?);
    manifest.outputs.push(Artifact::of(&report_path)?);
    manifest.finish(&out)?;
    println!(
        "{} validation MAE {validation_mae:.4}; checkpoint {}",
        kind.name(),
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// predict

pub fn parse_sketch(text: &str) -> Result<InstanceSketch> {
    let fields: Vec<&str> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    if fields.len() != NUM_FEATURES {
        return Err(Error::InvalidInput(format!(
            "a sketch has {NUM_FEATURES} counts, got {}",
            fields.len()
        )));
    }
    let mut v = [0u32; NUM_FEATURES];
    for (slot, f) in v.iter_mut().zip(&fields) {
        *slot = f
            .parse()
            .map_err(|_| Error::InvalidInput(format!("not a nonnegative count: {f:?}")))?;
    }
    Ok(InstanceSketch::from_vector(v))
}

/// One sketch per line; blank lines, `#` comments and a header line are
/// skipped.
pub fn parse_sketch_file(text: &str) -> Result<Vec<InstanceSketch>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if i == 0 && line.chars().any(|c| c.is_ascii_alphabetic()) {
            continue;
        }
        out.push(parse_sketch(line).map_err(|e| Error::Format(format!("line {}: {e}", i + 1)))?);
    }
    Ok(out)
}

fn format_summary(s: &Summary) -> String {
    s.to_vector().iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn load_predictor(checkpoint: Option<&Path>, heuristic: Option<&str>, fleet: &Fleet) -> Result<Predictor> {
    match (checkpoint, heuristic) {
        (Some(p), None) => {
            let ckpt = load_checkpoint(p)?;
            check_fleet_hash(&format!("checkpoint {}", p.display()), &ckpt.fleet_hash, fleet);
            Ok(Predictor::Network(ckpt.network))
        }
        (None, Some(h)) => match h.to_ascii_lowercase().as_str() {
            "heurv" => Ok(Predictor::HeurV),
            "heurs" => Ok(Predictor::HeurS),
            _ => Err(Error::Config(format!(
                "unknown heuristic {h:?}; expected heurv or heurs"
            ))),
        },
        _ => Err(Error::Config("give exactly one of --checkpoint and --heuristic".into())),
    }
}

fn cmd_predict(a: PredictArgs, file: &FileDefaults, fleet: &Fleet) -> Result<()> {
    let checkpoint: Option<PathBuf> = file.opt(a.checkpoint, "checkpoint")?;
    let heuristic: Option<String> = if checkpoint.is_some() {
        a.heuristic
    } else {
        file.opt(a.heuristic, "heuristic")?
    };
    let predictor = load_predictor(checkpoint.as_deref(), heuristic.as_deref(), fleet)?;
    let sketches = match (a.sketch, a.input) {
        (Some(s), None) => vec![parse_sketch(&s)?],
        (None, Some(p)) => parse_sketch_file(&fs::read_to_string(&p)?)?,
        _ => return Err(Error::Config("give exactly one of --sketch and --input".into())),
    };
    let preds = predictor.predict_all(&sketches, fleet)?;
    let mut out = String::new();
    for p in &preds {
        let _ = writeln!(out, "{}", format_summary(p));
    }
    print!("{out}");
    Ok(())
}

// ---------------------------------------------------------------------------
// eval

fn parse_bins(text: &str) -> Result<(u32, u32)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || Error::Config(format!("--grid expects two positive widths like 10,5, got {text:?}"));
    match parts.as_slice() {
        [x, y] => {
            let x: u32 = x.parse().map_err(|_| bad())?;
            let y: u32 = y.parse().map_err(|_| bad())?;
            if x == 0 || y == 0 {
                return Err(bad());
            }
            Ok((x, y))
        }
        _ => Err(bad()),
    }
}

fn stem(p: &Path) -> String {
    p.file_stem()
        .map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn cmd_eval(a: EvalArgs, file: &FileDefaults, fleet: &Fleet) -> Result<()> {
    let data = file.list(a.data, "data")?;
    let models = file.list(a.model, "model")?;
    let no_heuristics = a.no_heuristics || file.get::<bool>("no_heuristics")?.unwrap_or(false);
    let split = file.or(a.split, "split", "test".to_string())?;
    let split = match split.to_ascii_lowercase().as_str() {
        "test" => Some(Split::Test),
        "all" => None,
        s => return Err(Error::Config(format!("unknown split {s:?}; expected test or all"))),
    };
    let grid = file.opt(a.grid, "grid")?.map(|g: String| parse_bins(&g)).transpose()?;
    let out: PathBuf = file.required(a.out, "out")?;
    if data.is_empty() {
        return Err(Error::Config("eval needs at least one --data file".into()));
    }

    let mut manifest = RunManifest::start(
        fleet.hash(),
        json!({ "data": data, "model": models, "heuristics": !no_heuristics, "split": split, "grid": grid }),
    );
    let mut sets = Vec::new();
    for path in &data {
        let (header, dataset) = load_dataset(path)?;
        check_fleet_hash(&format!("dataset {}", path.display()), &header.fleet_hash, fleet);
        manifest.inputs.push(Artifact::of(path)?);
        let rows: Vec<_> = match split {
            Some(s) => dataset.part(s),
            None => dataset.examples.iter().collect(),
        };
        sets.push(EvalSet {
            name: stem(path),
            aggregation: dataset
                .provenance
                .first()
                .map_or(Aggregation::OThrML, |p| p.aggregation),
            sketches: rows.iter().map(|e| e.input).collect(),
            targets: rows.iter().map(|e| e.target).collect(),
        });
    }
    let mut suite = Vec::new();
    let mut labels = Vec::new();
    for path in &models {
        let predictor = load_predictor(Some(path), None, fleet)?;
        manifest.inputs.push(Artifact::of(path)?);
        labels.push(format!("{} [{}]", predictor.name(), stem(path)));
        suite.push(SuiteModel {
            predictor,
            aggregation: None,
            trials: vec![],
        });
    }
    if !no_heuristics {
        for p in [Predictor::HeurV, Predictor::HeurS] {
            labels.push(p.name());
            suite.push(SuiteModel {
                predictor: p,
                aggregation: None,
                trials: vec![],
            });
        }
    }
    if suite.is_empty() {
        return Err(Error::Config(
            "nothing to evaluate: give --model or keep the heuristics".into(),
        ));
    }
    let mut cells = evaluate_suite(&suite, &sets, fleet)?;
    for (i, c) in cells.iter_mut().enumerate() {
        c.model = labels[i % labels.len()].clone();
    }
    fs::create_dir_all(&out)?;
    let csv_path = out.join("suite.csv");
    let txt_path = out.join("suite.txt");
    write_file(&csv_path, &suite_csv(&cells))?;
    let text = suite_text(&cells);
    write_file(&txt_path, &text)?;
    manifest.outputs.push(Artifact::of(&csv_path)?);
    manifest.outputs.push(Artifact::of(&txt_path)?);
    if let Some(bins) = grid {
        for set in &sets {
            for (m, label) in suite.iter().zip(&labels) {
                let preds = match m.predictor.predict_all(&set.sketches, fleet) {
                    Ok(p) => p,
                    Err(Error::UnsupportedInput { .. }) => continue,
                    Err(e) => return Err(e),
                };
                let g = error_grid(&preds, &set.targets, &set.sketches, fleet, bins)?;
                let name = format!("grid_{}_{}.csv", sanitize(label), sanitize(&set.name));
                let path = out.join(name);
                write_file(&path, &g.to_csv())?;
                manifest.outputs.push(Artifact::of(&path)?);
            }
        }
    }
    manifest.finish(&csv_path)?;
    print!("{text}");
    Ok(())
}

fn sanitize(s: &str) -> String {
    s.chars()
        .filter_map(|c| match c {
            c if c.is_ascii_alphanumeric() || c == '-' || c == '_' => Some(c),
            ' ' | '.' => Some('_'),
            _ => None,
        })
        .collect()
}

// ---------------------------------------------------------------------------
// bench

fn cmd_bench(a: BenchArgs, file: &FileDefaults, fleet: &Fleet) -> Result<()> {
    let class: DataClass = file.parsed(a.class, "class", "A'")?;
    let n: usize = file.or(a.n, "n", 1000)?;
    let reps: usize = file.or(a.reps, "reps", 1)?;
    let seed: u64 = file.or(a.seed, "seed", 0)?;
    let models = file.list(a.model, "model")?;
    let no_heuristics = a.no_heuristics || file.get::<bool>("no_heuristics")?.unwrap_or(false);
    let no_solver = a.no_solver || file.get::<bool>("no_solver")?.unwrap_or(false);
    let out: Option<PathBuf> = file.opt(a.out, "out")?;
    if n == 0 || reps == 0 {
        return Err(Error::Config("bench needs --n and --reps of at least 1".into()));
    }

    let mut manifest = RunManifest::start(
        fleet.hash(),
        json!({ "class": class, "n": n, "reps": reps, "model": models, "heuristics": !no_heuristics, "solver": !no_solver }),
    );
    manifest.seeds.insert("seed".into(), seed);
    let instances = generate_1s(n, class, fleet, seed)?;
    let sketches: Vec<InstanceSketch> = instances.iter().map(|i| i.sketch).collect();
    let mut rows: Vec<(String, TimingReport)> = Vec::new();
    if !no_solver {
        rows.push((
            "solve_lpp".into(),
            solve_time_percentiles(&instances, fleet, &SolverConfig::exact())?,
        ));
    }
    let mut predictors = Vec::new();
    for path in &models {
        let p = load_predictor(Some(path), None, fleet)?;
        manifest.inputs.push(Artifact::of(path)?);
        predictors.push((format!("{} [{}]", p.name(), stem(path)), p));
    }
    if !no_heuristics {
        predictors.push(("HeurV".into(), Predictor::HeurV));
        predictors.push(("HeurS".into(), Predictor::HeurS));
    }
    for (label, p) in &predictors {
        match benchmark_prediction(p, &sketches, reps, fleet) {
            Ok(t) => rows.push((label.clone(), t)),
            Err(Error::UnsupportedInput { .. }) => {
                eprintln!("warning: {label} cannot score every {class} sketch; skipped")
            }
            Err(e) => return Err(e),
        }
    }
    let solve_p50 = rows.iter().find(|r| r.0 == "solve_lpp").map(|r| r.1.p50);
    let mut csv = String::from("predictor,n,p5_ms,p50_ms,p95_ms,mean_ms,speedup_p50\n");
    let mut text = format!(
        "{:<28} {:>8} {:>12} {:>12} {:>12} {:>10}\n",
        "predictor", "n", "P5 ms", "P50 ms", "P95 ms", "speedup"
    );
    for (label, t) in &rows {
        let speedup = solve_p50.map(|s| s / t.p50);
        let sp = speedup.map_or("NA".to_string(), |s| format!("{s:.1}"));
        let _ = writeln!(csv, "{},{},{},{},{},{},{}", label, t.n, t.p5, t.p50, t.p95, t.mean, sp);
        let _ = writeln!(
            text,
            "{:<28} {:>8} {:>12.6} {:>12.6} {:>12.6} {:>10}",
            label, t.n, t.p5, t.p50, t.p95, sp
        );
    }
    if let Some(dir) = &out {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join("bench.csv");
        let txt_path = dir.join("bench.txt");
        write_file(&csv_path, &csv)?;
        write_file(&txt_path, &text)?;
        manifest.outputs.push(Artifact::of(&csv_path)?);
        manifest.outputs.push(Artifact::of(&txt_path)?);
        manifest.finish(&csv_path)?;
    }
    print!("{text}");
    Ok(())
}

// ---------------------------------------------------------------------------
// solve

fn cmd_solve(a: SolveArgs, file: &FileDefaults, fleet: &Fleet) -> Result<()> {
    let class: DataClass = file.parsed(a.class, "class", "A'")?;
    let seed: u64 = file.or(a.seed, "seed", 0)?;
    let index: usize = file.or(a.index, "index", 0)?;
    let config = solver_config(file.opt(a.gap, "gap")?, file.opt(a.node_limit, "node_limit")?)?;
    let instance = generate_1s(index + 1, class, fleet, seed)?
        .pop()
        .expect("at least one instance");
    let solution = solve_lpp(&instance, fleet, &config)?;
    if a.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({ "instance": instance, "solution": solution }))?
        );
        return Ok(());
    }
    let o = solution.objective;
    println!("sketch    {}", format_sketch(&instance.sketch));
    println!("summary   {}", format_summary(&summarize(&solution)));
    println!(
        "objective loaded {} containers, {} ft of railcars, {} ft of containers{}",
        o.loaded_containers,
        o.used_railcar_length,
        o.loaded_container_length,
        if solution.node_limit_hit {
            " (node limit hit)"
        } else {
            ""
        }
    );
    for r in &solution.railcars {
        let pats: Vec<String> = r
            .patterns
            .iter()
            .map(|p| match (p.bottom, p.top) {
                (None, _) => "-".to_string(),
                (Some(b), None) => format!("{}", b.feet()),
                (Some(b), Some(t)) => format!("{}/{}", b.feet(), t.feet()),
            })
            .collect();
        println!("  type {:>2} car {:>3}: {}", r.type_id, r.railcar_index, pats.join(" "));
    }
    Ok(())
}

fn format_sketch(s: &InstanceSketch) -> String {
    s.to_vector().iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}
