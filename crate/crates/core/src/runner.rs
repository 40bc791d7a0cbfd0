//! Running scenarios to completion, singly or as a seed batch.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Params;
use crate::record::{write_step_record, write_summary, RunSummary, StepRecord, SummaryTracker};
use crate::render::render_trajectories;
use crate::scenario::{Scenario, SimRng};
use crate::sim::{RunStatus, World};

/// Steps `world` until a terminal status, passing every record (including the
/// initial one at step 0) to `sink`.
pub fn simulate<R, F>(
    mut world: World,
    params: &Params,
    rng: &mut R,
    seed: u64,
    mut sink: F,
) -> Result<RunSummary>
where
    R: Rng + ?Sized,
    F: FnMut(&StepRecord) -> Result<()>,
{
    let mut tracker = SummaryTracker::new(&world, params);
    let initial = world.initial_record(params);
    sink(&initial)?;
    let mut status = initial.status;
    while !status.is_terminal() {
        let (next, rec) = world.step(params, rng)?;
        tracker.observe(&next);
        sink(&rec)?;
        status = rec.status;
        world = next;
    }
    Ok(tracker.finish(seed, status))
}

/// Runs a realized scenario in memory, returning the summary and every record.
pub fn run_in_memory(scenario: &Scenario) -> Result<(RunSummary, Vec<StepRecord>)> {
    let (world, mut rng) = scenario.realize()?;
    let mut records = Vec::new();
    let summary = simulate(world, &scenario.params, &mut rng, scenario.seed, |r| {
        records.push(r.clone());
        Ok(())
    })?;
    Ok((summary, records))
}

/// Paths of the three per-run output files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunFiles {
    pub steps: PathBuf,
    pub summary: PathBuf,
    pub svg: PathBuf,
}

impl RunFiles {
    pub fn new(out_dir: &Path, run_name: &str) -> Self {
        Self {
            steps: out_dir.join(format!("{run_name}.steps.jsonl")),
            summary: out_dir.join(format!("{run_name}.summary.json")),
            svg: out_dir.join(format!("{run_name}.svg")),
        }
    }
}

pub fn run_name(stem: &str, seed: u64) -> String {
    format!("{stem}_seed{seed}")
}

fn run_realized(
    scenario: &Scenario,
    world: World,
    mut rng: SimRng,
    files: &RunFiles,
) -> Result<RunSummary> {
    let initial = world.clone();
    let mut steps = BufWriter::new(File::create(&files.steps)?);
    let mut records = Vec::new();
    let summary = simulate(world, &scenario.params, &mut rng, scenario.seed, |r| {
        write_step_record(r, &mut steps)?;
        records.push(r.clone());
        Ok(())
    })?;
    steps.flush()?;

    let mut out = BufWriter::new(File::create(&files.summary)?);
    write_summary(&summary, &mut out)?;
    out.flush()?;

    let svg = render_trajectories(&records, &initial, scenario.params.goal_tolerance)?;
    fs::write(&files.svg, svg)?;
    Ok(summary)
}

/// Runs one scenario and writes steps, summary, and plot into `out_dir`.
/// Configuration problems surface before any file is created.
pub fn run_to_dir(
    scenario: &Scenario,
    out_dir: &Path,
    run_name: &str,
) -> Result<(RunSummary, RunFiles)> {
    let (world, rng) = scenario.realize()?;
    fs::create_dir_all(out_dir)?;
    let files = RunFiles::new(out_dir, run_name);
    let summary = run_realized(scenario, world, rng, &files)?;
    Ok((summary, files))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Over successful runs only, s.
    pub mean_time_to_goal: Option<f64>,
    /// Sample standard deviation over successful runs; 0 for a single success.
    pub std_time_to_goal: Option<f64>,
    pub min_obstacle_clearance: Option<f64>,
    pub min_inter_agent_distance: Option<f64>,
}

pub fn aggregate(summaries: &[RunSummary]) -> Aggregates {
    let times: Vec<f64> = summaries
        .iter()
        .filter(|s| s.is_success())
        .map(|s| s.elapsed_s)
        .collect();
    let successes = times.len();
    let mean = (successes > 0).then(|| times.iter().sum::<f64>() / successes as f64);
    let std = mean.map(|m| {
        if successes < 2 {
            0.0
        } else {
            (times.iter().map(|t| (t - m).powi(2)).sum::<f64>() / (successes - 1) as f64).sqrt()
        }
    });
    let min_of =
        |f: fn(&RunSummary) -> Option<f64>| summaries.iter().filter_map(f).reduce(f64::min);
    Aggregates {
        runs: summaries.len(),
        successes,
        success_rate: if summaries.is_empty() {
            0.0
        } else {
            successes as f64 / summaries.len() as f64
        },
        mean_time_to_goal: mean,
        std_time_to_goal: std,
        min_obstacle_clearance: min_of(|s| s.min_obstacle_clearance),
        min_inter_agent_distance: min_of(|s| s.min_inter_agent_distance),
    }
}

/// Contents of `batch_report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub runs: Vec<RunSummary>,
    pub aggregates: Aggregates,
}

/// Runs every seed in `seeds` as an isolated run on up to `jobs` threads.
///
/// All worlds are realized up front, so a configuration error aborts the
/// batch before any run starts or any file is written.
pub fn run_batch(
    scenario: &Scenario,
    seeds: RangeInclusive<u64>,
    jobs: usize,
    out_dir: &Path,
    stem: &str,
) -> Result<BatchReport> {
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("seed range is empty".into()));
    }
    let prepared = seeds
        .map(|seed| {
            let s = scenario.clone().with_seed(seed);
            let (world, rng) = s.realize()?;
            Ok((s, world, rng))
        })
        .collect::<Result<Vec<_>>>()?;

    fs::create_dir_all(out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {jobs} workers: {e}")))?;
    let runs = pool.install(|| {
        prepared
            .into_par_iter()
            .map(|(s, world, rng)| {
                let files = RunFiles::new(out_dir, &run_name(stem, s.seed));
                run_realized(&s, world, rng, &files)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let report = BatchReport {
        aggregates: aggregate(&runs),
        runs,
    };
    let mut out = BufWriter::new(File::create(out_dir.join("batch_report.json"))?);
    serde_json::to_writer_pretty(&mut out, &report)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(report)
}

pub fn status_label(status: &RunStatus) -> &'static str {
    match status {
        RunStatus::Running => "running",
        RunStatus::Success => "success",
        RunStatus::Collision(_) => "collision",
        RunStatus::Timeout => "timeout",
    }
}
