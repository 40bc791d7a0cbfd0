//! Per-step trajectory records and end-of-run summaries.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::model::{AgentId, Params, TargetRef};
use crate::sim::{RunStatus, World};

/// Which target an agent steered toward, as logged. `None` is logged as null.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoggedTarget {
    Goal,
    Neighbor(AgentId),
}

impl LoggedTarget {
    pub fn from_target(t: &TargetRef) -> Option<Self> {
        match *t {
            TargetRef::Goal(_) => Some(LoggedTarget::Goal),
            TargetRef::Neighbor { id, .. } => Some(LoggedTarget::Neighbor(id)),
            TargetRef::None => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentRecord {
    pub id: AgentId,
    pub position: Vec2,
    pub command: Vec2,
    pub informed: bool,
    pub target: Option<LoggedTarget>,
}

/// One line of `<run>.steps.jsonl`. Agents are ascending by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub status: RunStatus,
    pub agents: Vec<AgentRecord>,
}

/// Appends `rec` as one JSON line.
pub fn write_step_record<W: Write>(rec: &StepRecord, sink: &mut W) -> Result<()> {
    serde_json::to_writer(&mut *sink, rec)?;
    sink.write_all(b"\n")?;
    Ok(())
}

pub fn read_step_records<R: BufRead>(source: R) -> Result<Vec<StepRecord>> {
    source
        .lines()
        .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()))
        .map(|line| Ok(serde_json::from_str(&line?)?))
        .collect()
}

/// Contents of `<run>.summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub status: RunStatus,
    pub steps: u64,
    pub elapsed_s: f64,
    /// Distance travelled per agent, ascending by id, m.
    pub path_lengths: Vec<f64>,
    /// Absent for single-agent runs.
    pub min_inter_agent_distance: Option<f64>,
    /// Absent when the world has no obstacles. Clamped at zero.
    pub min_obstacle_clearance: Option<f64>,
    /// First time each agent came within goal tolerance, s.
    pub time_to_goal: Vec<Option<f64>>,
    /// Largest distance from the swarm centroid at the end of the run, m.
    pub final_cohesion_radius: f64,
}

impl RunSummary {
    pub fn is_success(&self) -> bool {
        self.status == RunStatus::Success
    }
}

/// Accumulates a [`RunSummary`] from successive world states.
#[derive(Debug, Clone)]
pub struct SummaryTracker {
    dt: f64,
    goal_tolerance: f64,
    last_positions: Vec<Vec2>,
    path_lengths: Vec<f64>,
    min_inter_agent: Option<f64>,
    min_clearance: Option<f64>,
    time_to_goal: Vec<Option<f64>>,
    steps: u64,
}

fn sorted_positions(world: &World) -> Vec<Vec2> {
    let mut agents: Vec<_> = world.agents.iter().collect();
    agents.sort_by_key(|a| a.id);
    agents.into_iter().map(|a| a.position).collect()
}

fn min_opt(acc: Option<f64>, v: f64) -> Option<f64> {
    Some(acc.map_or(v, |a| a.min(v)))
}

impl SummaryTracker {
    pub fn new(initial: &World, params: &Params) -> Self {
        let n = initial.agents.len();
        let mut t = Self {
            dt: params.dt,
            goal_tolerance: params.goal_tolerance,
            last_positions: sorted_positions(initial),
            path_lengths: vec![0.0; n],
            min_inter_agent: None,
            min_clearance: None,
            time_to_goal: vec![None; n],
            steps: initial.step,
        };
        t.sample(initial);
        t
    }

    fn sample(&mut self, world: &World) {
        let positions = sorted_positions(world);
        let time = world.step as f64 * self.dt;
        for (i, &p) in positions.iter().enumerate() {
            for &q in &positions[i + 1..] {
                self.min_inter_agent = min_opt(self.min_inter_agent, p.distance(q));
            }
            for o in &world.obstacles {
                self.min_clearance = min_opt(self.min_clearance, o.clearance(p).max(0.0));
            }
            if self.time_to_goal[i].is_none() && p.distance(world.goal) <= self.goal_tolerance {
                self.time_to_goal[i] = Some(time);
            }
        }
        self.steps = world.step;
    }

    pub fn observe(&mut self, world: &World) {
        let positions = sorted_positions(world);
        for ((len, prev), &p) in self
            .path_lengths
            .iter_mut()
            .zip(&self.last_positions)
            .zip(&positions)
        {
            *len += prev.distance(p);
        }
        self.last_positions = positions;
        self.sample(world);
    }

    pub fn finish(self, seed: u64, status: RunStatus) -> RunSummary {
        let n = self.last_positions.len().max(1) as f64;
        let centroid = self
            .last_positions
            .iter()
            .fold(Vec2::ZERO, |acc, &p| acc + p)
            / n;
        let final_cohesion_radius = self
            .last_positions
            .iter()
            .map(|p| p.distance(centroid))
            .fold(0.0, f64::max);
        RunSummary {
            seed,
            status,
            steps: self.steps,
            elapsed_s: self.steps as f64 * self.dt,
            path_lengths: self.path_lengths,
            min_inter_agent_distance: self.min_inter_agent,
            min_obstacle_clearance: self.min_clearance,
            time_to_goal: self.time_to_goal,
            final_cohesion_radius,
        }
    }
}

pub fn write_summary<W: Write>(summary: &RunSummary, sink: &mut W) -> Result<()> {
    serde_json::to_writer_pretty(&mut *sink, summary)?;
    sink.write_all(b"\n")?;
    Ok(())
}

pub fn read_summary(text: &str) -> Result<RunSummary> {
    serde_json::from_str(text).map_err(Error::from)
}
