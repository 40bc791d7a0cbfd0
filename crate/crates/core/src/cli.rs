//! `swarmnav` command line: `run`, `batch`, and `metrics`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::record::{read_summary, RunSummary};
use crate::runner::{aggregate, run_batch, run_name, run_to_dir, status_label, Aggregates};
use crate::scenario::{parse_scenario, Scenario};
use crate::sim::RunStatus;

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_TIMEOUT: i32 = 2;
pub const EXIT_COLLISION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "swarmnav",
    version,
    about = "Decentralized swarm navigation simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one scenario to a terminal status.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate one scenario over an inclusive seed range.
    Batch {
        #[arg(long)]
        scenario: PathBuf,
        /// Inclusive range `a..b`.
        #[arg(long)]
        seeds: SeedRange,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate every `*.summary.json` in a directory.
    Metrics {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

/// Inclusive seed range written `a..b` (`a..=b` is accepted too).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedRange(pub RangeInclusive<u64>);

impl FromStr for SeedRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s
            .split_once("..=")
            .or_else(|| s.split_once(".."))
            .ok_or_else(|| format!("expected `a..b`, got `{s}`"))?;
        let a: u64 = a
            .trim()
            .parse()
            .map_err(|e| format!("bad range start `{a}`: {e}"))?;
        let b: u64 = b
            .trim()
            .parse()
            .map_err(|e| format!("bad range end `{b}`: {e}"))?;
        if a > b {
            return Err(format!("empty seed range {a}..{b}"));
        }
        Ok(SeedRange(a..=b))
    }
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path)?;
    Ok(parse_scenario(&text)?)
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into())
}

pub fn exit_code_for(status: &RunStatus) -> i32 {
    match status {
        RunStatus::Success => EXIT_SUCCESS,
        RunStatus::Timeout => EXIT_TIMEOUT,
        RunStatus::Collision(_) => EXIT_COLLISION,
        RunStatus::Running => EXIT_ERROR,
    }
}

pub fn cmd_run(scenario_path: &Path, seed: Option<u64>, out_dir: &Path) -> Result<RunStatus> {
    let mut scenario = load_scenario(scenario_path)?;
    if let Some(seed) = seed {
        scenario = scenario.with_seed(seed);
    }
    let name = run_name(&stem_of(scenario_path), scenario.seed);
    let (summary, _) = run_to_dir(&scenario, out_dir, &name)?;
    Ok(summary.status)
}

pub fn cmd_batch(
    scenario_path: &Path,
    seeds: RangeInclusive<u64>,
    jobs: usize,
    out_dir: &Path,
) -> Result<Aggregates> {
    let scenario = load_scenario(scenario_path)?;
    let report = run_batch(&scenario, seeds, jobs, out_dir, &stem_of(scenario_path))?;
    Ok(report.aggregates)
}

/// Reads every `*.summary.json` in `dir`, ordered by seed then file name.
pub fn collect_summaries(dir: &Path) -> Result<Vec<RunSummary>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.ends_with(".summary.json"))
        })
        .collect();
    paths.sort();
    let mut summaries = paths
        .iter()
        .map(|p| read_summary(&fs::read_to_string(p)?))
        .collect::<Result<Vec<_>>>()?;
    summaries.sort_by_key(|s| s.seed);
    Ok(summaries)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.3}"))
}

/// Per-run rows followed by the aggregate block.
pub fn metrics_table(summaries: &[RunSummary]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>8}  {:<10}  {:>7}  {:>9}  {:>10}  {:>10}  {:>9}",
        "seed", "status", "steps", "time_s", "min_sep_m", "min_clr_m", "cohesion"
    );
    for s in summaries {
        let _ = writeln!(
            out,
            "{:>8}  {:<10}  {:>7}  {:>9.1}  {:>10}  {:>10}  {:>9.3}",
            s.seed,
            status_label(&s.status),
            s.steps,
            s.elapsed_s,
            opt(s.min_inter_agent_distance),
            opt(s.min_obstacle_clearance),
            s.final_cohesion_radius
        );
    }
    let a = aggregate(summaries);
    let _ = writeln!(out);
    let _ = writeln!(out, "runs                      {}", a.runs);
    let _ = writeln!(
        out,
        "success rate              {:.3} ({}/{})",
        a.success_rate, a.successes, a.runs
    );
    let _ = writeln!(
        out,
        "time to goal mean (s)     {}",
        opt(a.mean_time_to_goal)
    );
    let _ = writeln!(out, "time to goal std (s)      {}", opt(a.std_time_to_goal));
    let _ = writeln!(
        out,
        "min obstacle clearance    {}",
        opt(a.min_obstacle_clearance)
    );
    let _ = writeln!(
        out,
        "min inter-agent distance  {}",
        opt(a.min_inter_agent_distance)
    );
    out
}

pub fn cmd_metrics(dir: &Path) -> Result<String> {
    let summaries = collect_summaries(dir)?;
    if summaries.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no *.summary.json files in {}",
            dir.display()
        )));
    }
    Ok(metrics_table(&summaries))
}

/// Parses `args` and executes the command, returning the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_SUCCESS
            };
        }
    };
    match cli.command {
        Command::Run {
            scenario,
            seed,
            out,
        } => match cmd_run(&scenario, seed, &out) {
            Ok(status) => {
                eprintln!("{}: {}", scenario.display(), status_label(&status));
                exit_code_for(&status)
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
        Command::Batch {
            scenario,
            seeds,
            jobs,
            out,
        } => match cmd_batch(&scenario, seeds.0, jobs, &out) {
            Ok(a) => {
                eprintln!(
                    "{} runs, success rate {:.3}, report at {}",
                    a.runs,
                    a.success_rate,
                    out.join("batch_report.json").display()
                );
                EXIT_SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
        Command::Metrics { input } => match cmd_metrics(&input) {
            Ok(table) => {
                print!("{table}");
                EXIT_SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
    }
}
