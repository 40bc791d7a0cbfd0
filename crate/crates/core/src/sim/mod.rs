//! Ground-truth world and the synchronous simulation loop.

pub mod forest;

pub use forest::generate_forest;

use std::collections::{BTreeMap, HashSet};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::control::{avoidance_sum, compose_command, navigation_vector, ObstaclePoint};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::model::{AgentId, AgentMemory, Params, TargetRef, UavState};
use crate::record::{AgentRecord, LoggedTarget, StepRecord};
use crate::selection::select_target;

/// Axis-aligned rectangle, serialized as `[xmin, ymin, xmax, ymax]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct Bounds {
    pub min: Vec2,
    pub max: Vec2,
}

impl Bounds {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Result<Self> {
        let b = Self {
            min: Vec2::new(xmin, ymin),
            max: Vec2::new(xmax, ymax),
        };
        if !(b.min.is_finite() && b.max.is_finite()) || xmin >= xmax || ymin >= ymax {
            return Err(Error::InvalidInput(format!(
                "bounds [{xmin}, {ymin}, {xmax}, {ymax}] must be finite with min < max"
            )));
        }
        Ok(b)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Vec2 {
        (self.min + self.max) / 2.0
    }

    pub fn contains(&self, p: Vec2) -> bool {
        (self.min.x..=self.max.x).contains(&p.x) && (self.min.y..=self.max.y).contains(&p.y)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec2 {
        Vec2::new(
            rng.random_range(self.min.x..=self.max.x),
            rng.random_range(self.min.y..=self.max.y),
        )
    }
}

impl TryFrom<[f64; 4]> for Bounds {
    type Error = Error;
    fn try_from([a, b, c, d]: [f64; 4]) -> Result<Self> {
        Bounds::new(a, b, c, d)
    }
}

impl From<Bounds> for [f64; 4] {
    fn from(b: Bounds) -> Self {
        [b.min.x, b.min.y, b.max.x, b.max.y]
    }
}

/// A disc obstacle (tree trunk).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub center: Vec2,
    pub radius: f64,
}

impl Obstacle {
    /// Signed distance from `p` to the boundary; negative inside.
    pub fn clearance(&self, p: Vec2) -> f64 {
        p.distance(self.center) - self.radius
    }

    pub fn nearest_boundary_point(&self, p: Vec2) -> Vec2 {
        let dir = (p - self.center)
            .normalized()
            .unwrap_or(Vec2::new(1.0, 0.0));
        self.center + self.radius * dir
    }
}

/// What one agent perceives at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub neighbor_estimates: BTreeMap<AgentId, Vec2>,
    pub obstacle_points: Vec<ObstaclePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Collision {
    Agents {
        a: AgentId,
        b: AgentId,
        distance: f64,
    },
    Obstacle {
        agent: AgentId,
        obstacle: usize,
        clearance: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Running,
    Success,
    Collision(Collision),
    Timeout,
}

impl RunStatus {
    pub fn is_terminal(&self) -> bool {
        !matches!(self, RunStatus::Running)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub agents: Vec<UavState>,
    /// Parallel to `agents`.
    pub memories: Vec<AgentMemory>,
    pub obstacles: Vec<Obstacle>,
    pub goal: Vec2,
    pub step: u64,
    pub bounds: Bounds,
}

impl World {
    pub fn new(
        agents: Vec<UavState>,
        obstacles: Vec<Obstacle>,
        goal: Vec2,
        bounds: Bounds,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for a in &agents {
            if !seen.insert(a.id) {
                return Err(Error::InvalidInput(format!("duplicate agent id {}", a.id)));
            }
            if !a.position.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "agent {} has non-finite position",
                    a.id
                )));
            }
        }
        let memories = agents
            .iter()
            .map(|a| AgentMemory {
                prev_command: a.prev_command,
                ..AgentMemory::default()
            })
            .collect();
        Ok(Self {
            agents,
            memories,
            obstacles,
            goal,
            step: 0,
            bounds,
        })
    }

    fn index_of(&self, id: AgentId) -> Option<usize> {
        self.agents.iter().position(|a| a.id == id)
    }

    /// Neighbors within sensing range (with optional Gaussian noise) and the
    /// nearest boundary point of every obstacle within range.
    pub fn sense<R: Rng + ?Sized>(
        &self,
        id: AgentId,
        params: &Params,
        rng: &mut R,
    ) -> Result<Observation> {
        let idx = self
            .index_of(id)
            .ok_or_else(|| Error::InvalidArgument(format!("no agent with id {id}")))?;
        let me = self.agents[idx].position;

        let mut in_range: Vec<&UavState> = self
            .agents
            .iter()
            .filter(|a| a.id != id && a.position.distance(me) <= params.sensing_range)
            .collect();
        in_range.sort_by_key(|a| a.id);

        let noise = if params.sensing_noise > 0.0 {
            Some(
                Normal::new(0.0, params.sensing_noise)
                    .map_err(|e| Error::InvalidInput(e.to_string()))?,
            )
        } else {
            None
        };
        let neighbor_estimates = in_range
            .into_iter()
            .map(|a| {
                let est = match &noise {
                    Some(n) => a.position + Vec2::new(n.sample(rng), n.sample(rng)),
                    None => a.position,
                };
                (a.id, est)
            })
            .collect();

        let obstacle_points = self
            .obstacles
            .iter()
            .filter(|o| o.clearance(me) <= params.sensing_range)
            .map(|o| ObstaclePoint::from(o.nearest_boundary_point(me)))
            .collect();

        Ok(Observation {
            neighbor_estimates,
            obstacle_points,
        })
    }

    pub fn check_termination(&self, params: &Params) -> RunStatus {
        let mut order: Vec<&UavState> = self.agents.iter().collect();
        order.sort_by_key(|a| a.id);

        for (i, a) in order.iter().enumerate() {
            for b in &order[i + 1..] {
                let d = a.position.distance(b.position);
                if d < params.collision_distance {
                    return RunStatus::Collision(Collision::Agents {
                        a: a.id,
                        b: b.id,
                        distance: d,
                    });
                }
            }
        }
        for a in &order {
            for (k, o) in self.obstacles.iter().enumerate() {
                let clearance = o.clearance(a.position);
                if clearance < 0.0 {
                    return RunStatus::Collision(Collision::Obstacle {
                        agent: a.id,
                        obstacle: k,
                        clearance,
                    });
                }
            }
        }
        if order
            .iter()
            .all(|a| a.position.distance(self.goal) <= params.goal_tolerance)
        {
            return RunStatus::Success;
        }
        if self.step >= params.max_steps {
            return RunStatus::Timeout;
        }
        RunStatus::Running
    }

    /// Snapshot of the current state as a log row.
    pub fn record(
        &self,
        commands: &[Vec2],
        targets: &[TargetRef],
        status: RunStatus,
    ) -> StepRecord {
        let mut agents: Vec<AgentRecord> = self
            .agents
            .iter()
            .zip(commands.iter().zip(targets))
            .map(|(a, (&command, target))| AgentRecord {
                id: a.id,
                position: a.position,
                command,
                informed: a.informed,
                target: LoggedTarget::from_target(target),
            })
            .collect();
        agents.sort_by_key(|r| r.id);
        StepRecord {
            step: self.step,
            status,
            agents,
        }
    }

    /// Record for the initial state, before any command was issued.
    pub fn initial_record(&self, params: &Params) -> StepRecord {
        let n = self.agents.len();
        let commands: Vec<Vec2> = self.agents.iter().map(|a| a.prev_command).collect();
        self.record(
            &commands,
            &vec![TargetRef::None; n],
            self.check_termination(params),
        )
    }

    /// Advances every agent by one synchronous step.
    ///
    /// All agents sense and decide from this world; positions are then
    /// integrated together, so the outcome does not depend on agent order.
    pub fn step<R: Rng + ?Sized>(
        &self,
        params: &Params,
        rng: &mut R,
    ) -> Result<(World, StepRecord)> {
        let status = self.check_termination(params);
        if status.is_terminal() {
            return Err(Error::ContractViolation(format!(
                "step called on terminal world ({status:?})"
            )));
        }

        let n = self.agents.len();
        let mut memories = Vec::with_capacity(n);
        let mut commands = Vec::with_capacity(n);
        let mut targets = Vec::with_capacity(n);

        for (agent, memory) in self.agents.iter().zip(&self.memories) {
            let obs = self.sense(agent.id, params, rng)?;
            let mut mem = memory.clone();
            mem.track(agent.id, &obs.neighbor_estimates, params)?;

            let target = select_target(&mem, agent, self.goal, params);
            let neighbor_points: Vec<Vec2> = obs.neighbor_estimates.values().copied().collect();
            let nav = navigation_vector(agent, &target, &neighbor_points, self.goal, params)?;

            let neighbor_obstacles: Vec<ObstaclePoint> = neighbor_points
                .iter()
                .copied()
                .map(ObstaclePoint::from)
                .collect();
            let u_prev = agent.prev_command;
            let avoid = params.avoid_gain
                * (avoidance_sum(
                    agent.position,
                    &obs.obstacle_points,
                    u_prev,
                    params.avoid_radius,
                )? + avoidance_sum(
                    agent.position,
                    &neighbor_obstacles,
                    u_prev,
                    params.neighbor_avoid_radius(),
                )?);
            let u = compose_command(nav, avoid, params.max_speed)?.velocity();

            mem.prev_target = target;
            mem.prev_command = u;
            memories.push(mem);
            commands.push(u);
            targets.push(target);
        }

        let agents = self
            .agents
            .iter()
            .zip(&commands)
            .map(|(a, &u)| UavState {
                position: a.position + u * params.dt,
                prev_command: u,
                ..a.clone()
            })
            .collect();

        let next = World {
            agents,
            memories,
            obstacles: self.obstacles.clone(),
            goal: self.goal,
            step: self.step + 1,
            bounds: self.bounds,
        };
        let status = next.check_termination(params);
        let rec = next.record(&commands, &targets, status);
        Ok((next, rec))
    }
}
