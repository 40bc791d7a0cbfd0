//! Domain types shared by the selection, control, and simulation layers.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// Dense agent identifier, unique within a world.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Bounded, displacement-gated record of where one neighbor has been seen.
///
/// Points are stored newest first. Consecutive stored points are always at
/// least the gate distance apart, so no stored displacement is ever zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PathHistory {
    points: VecDeque<Vec2>,
    capacity: usize,
}

impl PathHistory {
    pub fn new(capacity: usize) -> Self {
        Self {
            points: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    /// Builds a history from newest-first points without gating. Intended
    /// for fixtures; callers are responsible for the spacing invariant.
    pub fn from_points(capacity: usize, newest_first: impl IntoIterator<Item = Vec2>) -> Self {
        let mut points: VecDeque<Vec2> = newest_first.into_iter().collect();
        points.truncate(capacity);
        Self { points, capacity }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// 1-based access, index 1 being the newest point.
    pub fn get(&self, index: usize) -> Option<Vec2> {
        index
            .checked_sub(1)
            .and_then(|i| self.points.get(i).copied())
    }

    pub fn newest(&self) -> Option<Vec2> {
        self.points.front().copied()
    }

    pub fn oldest(&self) -> Option<Vec2> {
        self.points.back().copied()
    }

    /// Newest-first iterator.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Vec2> + ExactSizeIterator + '_ {
        self.points.iter().copied()
    }

    /// Records an observation if it moved at least `min_gap` from the newest
    /// stored point. Returns whether the observation was stored.
    pub fn update(&mut self, obs: Vec2, min_gap: f64) -> Result<bool> {
        if !obs.is_finite() {
            return Err(Error::InvalidInput(format!(
                "non-finite observation ({}, {})",
                obs.x, obs.y
            )));
        }
        if let Some(head) = self.newest() {
            if head.distance(obs) < min_gap {
                return Ok(false);
            }
        }
        self.points.push_front(obs);
        self.points.truncate(self.capacity);
        Ok(true)
    }

    /// Newest minus oldest.
    pub fn net_displacement(&self) -> Result<Vec2> {
        match (self.newest(), self.oldest()) {
            (Some(newest), Some(oldest)) if self.len() >= 2 => Ok(newest - oldest),
            _ => Err(Error::InsufficientHistory {
                needed: 2,
                got: self.len(),
            }),
        }
    }

    /// Displacement vectors between consecutive points, newest first.
    pub fn displacements(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.points
            .iter()
            .zip(self.points.iter().skip(1))
            .map(|(&newer, &older)| newer - older)
    }

    pub fn translated(&self, offset: Vec2) -> Self {
        self.map_points(|p| p + offset)
    }

    pub fn map_points(&self, f: impl Fn(Vec2) -> Vec2) -> Self {
        Self {
            points: self.points.iter().map(|&p| f(p)).collect(),
            capacity: self.capacity,
        }
    }
}

/// Value-returning form of [`PathHistory::update`].
pub fn update_history(h: &PathHistory, obs: Vec2, min_gap: f64) -> Result<PathHistory> {
    let mut next = h.clone();
    next.update(obs, min_gap)?;
    Ok(next)
}

/// Ground-truth state of one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct UavState {
    pub id: AgentId,
    pub position: Vec2,
    pub prev_command: Vec2,
    pub informed: bool,
}

impl UavState {
    pub fn new(id: AgentId, position: Vec2, informed: bool) -> Self {
        Self {
            id,
            position,
            prev_command: Vec2::ZERO,
            informed,
        }
    }
}

/// The point an agent is steering toward at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetRef {
    /// The global goal; only informed agents select this.
    Goal(Vec2),
    /// Newest history point of the followed neighbor at selection time.
    Neighbor {
        id: AgentId,
        point: Vec2,
    },
    None,
}

impl TargetRef {
    pub fn point(&self) -> Option<Vec2> {
        match *self {
            TargetRef::Goal(p) | TargetRef::Neighbor { point: p, .. } => Some(p),
            TargetRef::None => None,
        }
    }
}

/// One agent's private world model.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentMemory {
    pub histories: BTreeMap<AgentId, PathHistory>,
    pub prev_target: TargetRef,
    pub prev_command: Vec2,
}

impl Default for AgentMemory {
    fn default() -> Self {
        Self {
            histories: BTreeMap::new(),
            prev_target: TargetRef::None,
            prev_command: Vec2::ZERO,
        }
    }
}

impl AgentMemory {
    /// Folds one round of neighbor estimates into the histories. Tracks for
    /// neighbors absent from `estimates` are dropped.
    pub fn track(
        &mut self,
        own_id: AgentId,
        estimates: &BTreeMap<AgentId, Vec2>,
        params: &Params,
    ) -> Result<()> {
        self.histories.retain(|id, _| estimates.contains_key(id));
        for (&id, &obs) in estimates {
            if id == own_id {
                return Err(Error::ContractViolation(format!(
                    "agent {own_id} received an estimate of itself"
                )));
            }
            self.histories
                .entry(id)
                .or_insert_with(|| PathHistory::new(params.history_capacity))
                .update(obs, params.history_gate)?;
        }
        Ok(())
    }
}

/// Control, selection, and simulation constants.
///
/// Field names double as the keys accepted under `[params]` in scenario
/// files; every field is optional there and falls back to [`Params::default`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Params {
    /// Minimum normalized speed of an informed agent, in (0, 1).
    pub min_speed_ratio: f64,
    /// Navigation gain, 1/s.
    pub nav_gain: f64,
    /// Avoidance gain, m²/s.
    pub avoid_gain: f64,
    /// Cohesion radius attenuating the informed agent's pull, m.
    pub cohesion_radius: f64,
    /// Radius inside which obstacles repel, m.
    pub avoid_radius: f64,
    /// Radius inside which neighbors repel; defaults to `avoid_radius`.
    pub neighbor_avoid_radius: Option<f64>,
    pub sensing_range: f64,
    /// Neighbors closer than this are never follow candidates, m.
    pub proximity_radius: f64,
    pub history_capacity: usize,
    /// Minimum spacing between stored history points, m.
    pub history_gate: f64,
    /// Half-angle of the cone used to reject candidates heading to the
    /// previous target, rad.
    pub exclusion_angle: f64,
    pub max_speed: f64,
    pub dt: f64,
    pub max_steps: u64,
    pub goal_tolerance: f64,
    pub collision_distance: f64,
    /// Standard deviation of neighbor position noise, m.
    pub sensing_noise: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            min_speed_ratio: 0.2,
            nav_gain: 0.5,
            avoid_gain: 2.0,
            cohesion_radius: 10.0,
            avoid_radius: 4.0,
            neighbor_avoid_radius: None,
            sensing_range: 15.0,
            proximity_radius: 3.0,
            history_capacity: 20,
            history_gate: 0.5,
            exclusion_angle: PI / 6.0,
            max_speed: 1.5,
            dt: 0.1,
            max_steps: 3000,
            goal_tolerance: 3.0,
            collision_distance: 0.5,
            sensing_noise: 0.0,
        }
    }
}

impl Params {
    pub fn neighbor_avoid_radius(&self) -> f64 {
        self.neighbor_avoid_radius.unwrap_or(self.avoid_radius)
    }

    /// Checks every field constraint, returning the offending field name and
    /// the reason on failure.
    pub fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        fn finite(name: &'static str, v: f64) -> std::result::Result<(), (&'static str, String)> {
            if v.is_finite() {
                Ok(())
            } else {
                Err((name, format!("must be finite, got {v}")))
            }
        }
        fn positive(name: &'static str, v: f64) -> std::result::Result<(), (&'static str, String)> {
            finite(name, v)?;
            if v > 0.0 {
                Ok(())
            } else {
                Err((name, format!("must be > 0, got {v}")))
            }
        }

        let r = self.min_speed_ratio;
        finite("min_speed_ratio", r)?;
        if !(r > 0.0 && r < 1.0) {
            return Err(("min_speed_ratio", format!("must be in (0, 1), got {r}")));
        }
        positive("nav_gain", self.nav_gain)?;
        finite("avoid_gain", self.avoid_gain)?;
        if self.avoid_gain < 0.0 {
            return Err((
                "avoid_gain",
                format!("must be >= 0, got {}", self.avoid_gain),
            ));
        }
        positive("cohesion_radius", self.cohesion_radius)?;
        positive("avoid_radius", self.avoid_radius)?;
        positive("sensing_range", self.sensing_range)?;
        positive("proximity_radius", self.proximity_radius)?;
        positive("goal_tolerance", self.goal_tolerance)?;
        positive("collision_distance", self.collision_distance)?;
        if self.sensing_range <= self.avoid_radius {
            return Err((
                "sensing_range",
                format!(
                    "must exceed avoid_radius ({}), got {}",
                    self.avoid_radius, self.sensing_range
                ),
            ));
        }
        if let Some(nr) = self.neighbor_avoid_radius {
            positive("neighbor_avoid_radius", nr)?;
            if self.sensing_range <= nr {
                return Err((
                    "neighbor_avoid_radius",
                    format!(
                        "must be below sensing_range ({}), got {nr}",
                        self.sensing_range
                    ),
                ));
            }
        }
        if self.history_capacity < 3 {
            return Err((
                "history_capacity",
                format!("must be >= 3, got {}", self.history_capacity),
            ));
        }
        positive("history_gate", self.history_gate)?;
        finite("exclusion_angle", self.exclusion_angle)?;
        if !(0.0..=PI).contains(&self.exclusion_angle) {
            return Err((
                "exclusion_angle",
                format!("must be in [0, pi], got {}", self.exclusion_angle),
            ));
        }
        positive("max_speed", self.max_speed)?;
        positive("dt", self.dt)?;
        if self.max_steps == 0 {
            return Err(("max_steps", "must be >= 1".into()));
        }
        finite("sensing_noise", self.sensing_noise)?;
        if self.sensing_noise < 0.0 {
            return Err((
                "sensing_noise",
                format!("must be >= 0, got {}", self.sensing_noise),
            ));
        }
        Ok(())
    }
}
