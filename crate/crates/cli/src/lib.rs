//! Command-line front end: `plan`, `bench` and `stats`.
//!
//! Exit codes are 0 on success, 1 when a single `plan` run fails to reach
//! the goal, and 2 for usage or validation errors.

pub mod render;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ncrrt::bench::{read_csv, summary_json, write_csv, DEFAULT_BINS};
use ncrrt::{plan, run_campaign, summarize, PlannerKind, PlannerParams, RngStream, Scenario};

use crate::render::{render_svg, RenderSpec};

#[derive(Debug, Parser)]
#[command(
    name = "ncrrt",
    version,
    about = "RRT planners for 2D narrow-channel maps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one planner once.
    Plan(PlanArgs),
    /// Run seeded trials and write one CSV row per trial.
    Bench(BenchArgs),
    /// Summarize a results CSV.
    Stats(StatsArgs),
}

/// Overrides for the default planner parameters.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// Maximum step length
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Iteration cap
    #[arg(long)]
    pub k: Option<usize>,
    /// Probability of a plain uniform sample in the goal heuristics
    #[arg(long)]
    pub p: Option<f64>,
    /// NCRRT draws a narrow sample every `alpha` iterations
    #[arg(long)]
    pub alpha: Option<usize>,
    /// Cluster radius
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Narrowness threshold, percent of cluster points colliding
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Points per cluster
    #[arg(long)]
    pub cluster_size: Option<usize>,
    /// Candidate budget per narrow draw
    #[arg(long)]
    pub max_attempts: Option<usize>,
    /// Edge-check resolution
    #[arg(long)]
    pub delta: Option<f64>,
}

impl ParamArgs {
    pub fn params(&self) -> PlannerParams<f64> {
        let mut p = PlannerParams::default();
        if let Some(v) = self.epsilon {
            p.epsilon = v;
        }
        if let Some(v) = self.k {
            p.max_iterations = v;
        }
        if let Some(v) = self.p {
            p.sampler.p = v;
        }
        if let Some(v) = self.alpha {
            p.alpha = v;
        }
        if let Some(v) = self.lambda {
            p.sampler.lambda = v;
        }
        if let Some(v) = self.sigma {
            p.sampler.sigma = v;
        }
        if let Some(v) = self.cluster_size {
            p.sampler.cluster_size = v;
        }
        if let Some(v) = self.max_attempts {
            p.sampler.max_attempts = v;
        }
        if let Some(v) = self.delta {
            p.delta = v;
        }
        p
    }
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// basic, goalbias, goalzoom or ncrrt
    #[arg(long)]
    pub planner: String,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Write an SVG picture of the tree and path
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Write the outcome as JSON
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Include the full tree in the JSON output
    #[arg(long)]
    pub with_tree: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Comma-separated planner names
    #[arg(long)]
    pub planners: String,
    #[arg(long)]
    pub trials: usize,
    #[arg(long)]
    pub seed_base: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Results CSV written by `bench`
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Short/long path-length cut; defaults to the scenario file's value
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Scenario file supplying the default threshold
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Summary JSON destination; standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Why a command stopped early, with the exit code to report.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<ncrrt::Error> for Failure {
    fn from(e: ncrrt::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

type Outcome = std::result::Result<u8, Failure>;

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Plan(a) => cmd_plan(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Stats(a) => cmd_stats(&a),
    }
}

fn create(path: &Path) -> std::result::Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn write_all(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    let mut f = create(path)?;
    f.write_all(text.as_bytes())
        .and_then(|_| f.flush())
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

pub fn cmd_plan(a: &PlanArgs) -> Outcome {
    let s = Scenario::<f64>::load(&a.scenario)?;
    let kind: PlannerKind = a.planner.parse()?;
    let params = a.params.params();
    let outcome = plan(kind, &s, &params, &mut RngStream::new(a.seed))?;

    if let Some(path) = &a.json {
        let doc = outcome.to_json(a.with_tree);
        write_all(path, &format!("{doc:#}\n"))?;
    }
    if let Some(path) = &a.svg {
        write_all(path, &render_svg(&outcome, &s, &RenderSpec::default()))?;
    }
    match outcome.path_length {
        Some(len) => println!(
            "{kind}: reached goal after {} iterations, path length {len:.3}",
            outcome.iterations_used
        ),
        None => println!(
            "{kind}: no path within {} iterations",
            outcome.iterations_used
        ),
    }
    Ok(if outcome.success { 0 } else { 1 })
}

fn parse_planners(list: &str) -> std::result::Result<Vec<PlannerKind>, Failure> {
    let kinds = list
        .split(',')
        .filter(|k| !k.trim().is_empty())
        .map(str::parse)
        .collect::<ncrrt::Result<Vec<PlannerKind>>>()?;
    if kinds.is_empty() {
        return Err(Failure::usage("--planners needs at least one planner"));
    }
    if let Some(k) = kinds
        .iter()
        .enumerate()
        .find_map(|(i, k)| kinds[..i].contains(k).then_some(k))
    {
        return Err(Failure::usage(format!("planner {k} listed twice")));
    }
    Ok(kinds)
}

pub fn cmd_bench(a: &BenchArgs) -> Outcome {
    let s = Scenario::<f64>::load(&a.scenario)?;
    let kinds = parse_planners(&a.planners)?;
    let params = a.params.params();
    params.validate()?;
    // open first so a bad path fails before any trial runs
    let mut out = create(&a.out)?;
    let records = run_campaign(&s, &kinds, &params, a.trials, a.seed_base)?;
    write_csv(&records, &mut out)?;
    out.flush()
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", a.out.display())))?;
    eprintln!("wrote {} trials to {}", records.len(), a.out.display());
    Ok(0)
}

pub fn cmd_stats(a: &StatsArgs) -> Outcome {
    let file = File::open(&a.input)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", a.input.display())))?;
    let records = read_csv(file)?;

    let mut names: Vec<&str> = records.iter().map(|r| r.scenario_name.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    if names.len() > 1 {
        return Err(Failure::usage(format!(
            "{} holds several scenarios ({}); summarize one at a time",
            a.input.display(),
            names.join(", ")
        )));
    }

    let scenario = a.scenario.as_ref().map(Scenario::<f64>::load).transpose()?;
    if let (Some(s), Some(&name)) = (&scenario, names.first()) {
        if s.name() != name {
            return Err(Failure::usage(format!(
                "results are for scenario {name:?} but {} is {:?}",
                a.scenario.as_ref().expect("loaded above").display(),
                s.name()
            )));
        }
    }
    let threshold = a
        .threshold
        .or_else(|| scenario.as_ref().and_then(|s| s.short_path_threshold()))
        .ok_or_else(|| {
            Failure::usage(
                "no short-path threshold: pass --threshold or a --scenario file that sets one",
            )
        })?;

    let summary = summarize(&records, threshold, Some(a.bins))?;
    let text = format!("{:#}\n", summary_json(&summary));
    match &a.out {
        Some(path) => write_all(path, &text)?,
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(format!("cannot write summary: {e}")))?,
    }
    Ok(0)
}
