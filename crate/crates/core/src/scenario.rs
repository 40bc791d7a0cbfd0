//! Scenario files: parsing, validation, and turning a scenario into a world.
//!
//! ```toml
//! goal = [55.0, 5.0]
//! seed = 7
//!
//! [world]
//! bounds = [-10.0, -10.0, 70.0, 20.0]
//! forest = { density = 0.05, radius_min = 0.3, radius_max = 0.5 }
//!
//! [swarm]
//! count = 5
//! informed = [0]
//! spawn_box = [0.0, 0.0, 10.0, 10.0]
//!
//! [params]
//! max_speed = 1.5
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::error::Result;
use crate::geometry::Vec2;
use crate::model::{AgentId, Params, UavState};
use crate::sim::{generate_forest, Bounds, Obstacle, World};

/// Random stream owned by one run.
pub type SimRng = ChaCha8Rng;

const SPAWN_ATTEMPTS_PER_AGENT: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown key `{key}`")]
    UnknownKey { key: String },
    #[error("invalid `{field}`: {reason}")]
    Constraint { field: String, reason: String },
}

fn constraint(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Constraint {
        field: field.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct ForestSpec {
    pub density: f64,
    pub radius_min: f64,
    pub radius_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObstacleSpec {
    None,
    Explicit(Vec<Obstacle>),
    Forest(ForestSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Spawn {
    Points(Vec<Vec2>),
    Box(Bounds),
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub bounds: Bounds,
    pub obstacles: ObstacleSpec,
    pub count: usize,
    pub informed: Vec<AgentId>,
    pub spawn: Spawn,
    pub goal: Vec2,
    pub params: Params,
    pub seed: u64,
}

#[derive(Deserialize)]
struct RawScenario {
    world: RawWorld,
    swarm: RawSwarm,
    goal: [f64; 2],
    #[serde(default)]
    params: Params,
    #[serde(default)]
    seed: u64,
}

#[derive(Deserialize)]
struct RawWorld {
    bounds: [f64; 4],
    obstacles: Option<Vec<[f64; 3]>>,
    forest: Option<ForestSpec>,
}

#[derive(Deserialize)]
struct RawSwarm {
    count: usize,
    informed: Vec<u32>,
    spawn_points: Option<Vec<[f64; 2]>>,
    spawn_box: Option<[f64; 4]>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |nl| offset - nl - 1) + 1;
    (line, column)
}

fn parse_error(text: &str, err: toml::de::Error) -> ConfigError {
    let (line, column) = err.span().map_or((1, 1), |s| line_col(text, s.start));
    ConfigError::Parse {
        line,
        column,
        message: err.message().trim().to_string(),
    }
}

fn bounds_field(field: &str, [a, b, c, d]: [f64; 4]) -> std::result::Result<Bounds, ConfigError> {
    Bounds::new(a, b, c, d).map_err(|e| constraint(field, e.to_string()))
}

fn finite_point(field: &str, [x, y]: [f64; 2]) -> std::result::Result<Vec2, ConfigError> {
    let p = Vec2::new(x, y);
    if p.is_finite() {
        Ok(p)
    } else {
        Err(constraint(
            field,
            format!("point [{x}, {y}] must be finite"),
        ))
    }
}

/// Parses and validates a scenario document. Missing `[params]` fields take
/// their defaults; unknown keys are rejected.
pub fn parse_scenario(text: &str) -> std::result::Result<Scenario, ConfigError> {
    let de = toml::Deserializer::parse(text).map_err(|e| parse_error(text, e))?;
    let mut unknown = Vec::new();
    let raw: RawScenario = serde_ignored::deserialize(de, |path| unknown.push(path.to_string()))
        .map_err(|e| parse_error(text, e))?;
    if let Some(key) = unknown.into_iter().next() {
        return Err(ConfigError::UnknownKey { key });
    }
    validate(raw)
}

fn validate(raw: RawScenario) -> std::result::Result<Scenario, ConfigError> {
    let params = raw.params;
    params
        .validate()
        .map_err(|(field, reason)| constraint(format!("params.{field}"), reason))?;

    let bounds = bounds_field("world.bounds", raw.world.bounds)?;
    let goal = finite_point("goal", raw.goal)?;

    let obstacles = match (raw.world.obstacles, raw.world.forest) {
        (Some(_), Some(_)) => {
            return Err(constraint(
                "world",
                "`obstacles` and `forest` are mutually exclusive",
            ))
        }
        (Some(list), None) => {
            let obstacles = list
                .into_iter()
                .map(|[cx, cy, r]| {
                    let center = Vec2::new(cx, cy);
                    if center.is_finite() && r.is_finite() && r > 0.0 {
                        Ok(Obstacle { center, radius: r })
                    } else {
                        Err(constraint(
                            "world.obstacles",
                            format!("[{cx}, {cy}, {r}] needs a finite center and radius > 0"),
                        ))
                    }
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            ObstacleSpec::Explicit(obstacles)
        }
        (None, Some(f)) => {
            if !(f.density.is_finite() && f.density >= 0.0) {
                return Err(constraint(
                    "world.forest.density",
                    format!("must be >= 0, got {}", f.density),
                ));
            }
            if !(f.radius_min.is_finite() && f.radius_min > 0.0) {
                return Err(constraint(
                    "world.forest.radius_min",
                    format!("must be > 0, got {}", f.radius_min),
                ));
            }
            if !(f.radius_max.is_finite() && f.radius_max >= f.radius_min) {
                return Err(constraint(
                    "world.forest.radius_max",
                    format!("must be >= radius_min, got {}", f.radius_max),
                ));
            }
            ObstacleSpec::Forest(f)
        }
        (None, None) => ObstacleSpec::None,
    };

    let count = raw.swarm.count;
    if count == 0 {
        return Err(constraint("swarm.count", "must be >= 1"));
    }
    if raw.swarm.informed.is_empty() {
        return Err(constraint(
            "swarm.informed",
            "at least one agent must be informed",
        ));
    }
    let mut informed: Vec<AgentId> = Vec::with_capacity(raw.swarm.informed.len());
    for &id in &raw.swarm.informed {
        if id as usize >= count {
            return Err(constraint(
                "swarm.informed",
                format!("id {id} is out of range for count {count}"),
            ));
        }
        if informed.contains(&AgentId(id)) {
            return Err(constraint(
                "swarm.informed",
                format!("id {id} listed twice"),
            ));
        }
        informed.push(AgentId(id));
    }
    informed.sort();

    let spawn = match (raw.swarm.spawn_points, raw.swarm.spawn_box) {
        (Some(_), Some(_)) => {
            return Err(constraint(
                "swarm",
                "`spawn_points` and `spawn_box` are mutually exclusive",
            ))
        }
        (Some(points), None) => {
            if points.len() != count {
                return Err(constraint(
                    "swarm.spawn_points",
                    format!("expected {count} points, got {}", points.len()),
                ));
            }
            let points = points
                .into_iter()
                .map(|p| finite_point("swarm.spawn_points", p))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            for (i, p) in points.iter().enumerate() {
                for (j, q) in points.iter().enumerate().skip(i + 1) {
                    if p.distance(*q) < params.collision_distance {
                        return Err(constraint(
                            "swarm.spawn_points",
                            format!(
                                "points {i} and {j} are closer than collision_distance ({})",
                                params.collision_distance
                            ),
                        ));
                    }
                }
                if let ObstacleSpec::Explicit(obstacles) = &obstacles {
                    if let Some(k) = obstacles.iter().position(|o| o.clearance(*p) < 0.0) {
                        return Err(constraint(
                            "swarm.spawn_points",
                            format!("point {i} lies inside obstacle {k}"),
                        ));
                    }
                }
            }
            Spawn::Points(points)
        }
        (None, Some(b)) => Spawn::Box(bounds_field("swarm.spawn_box", b)?),
        (None, None) => Spawn::Box(bounds),
    };

    Ok(Scenario {
        bounds,
        obstacles,
        count,
        informed,
        spawn,
        goal,
        params,
        seed: raw.seed,
    })
}

impl Scenario {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn keepout(&self) -> Vec<(Vec2, f64)> {
        let mut zones = vec![(self.goal, self.params.goal_tolerance)];
        match &self.spawn {
            Spawn::Points(points) => {
                zones.extend(points.iter().map(|&p| (p, self.params.collision_distance)))
            }
            Spawn::Box(b) => zones.push((b.center(), (b.max - b.min).norm() / 2.0)),
        }
        zones
    }

    /// Builds the initial world and the run's random stream from `self.seed`.
    /// Obstacle generation and spawn sampling draw from the same stream that
    /// the run then uses for sensing noise.
    pub fn realize(&self) -> Result<(World, SimRng)> {
        let mut rng = SimRng::seed_from_u64(self.seed);
        let obstacles = match &self.obstacles {
            ObstacleSpec::None => Vec::new(),
            ObstacleSpec::Explicit(list) => list.clone(),
            ObstacleSpec::Forest(f) => generate_forest(
                f.density,
                (f.radius_min, f.radius_max),
                &self.keepout(),
                self.bounds,
                &mut rng,
            )
            .map_err(|e| constraint("world.forest", e.to_string()))?,
        };

        let positions = match &self.spawn {
            Spawn::Points(points) => points.clone(),
            Spawn::Box(b) => {
                let min_gap = self.params.collision_distance;
                let budget = SPAWN_ATTEMPTS_PER_AGENT * self.count;
                let mut placed: Vec<Vec2> = Vec::with_capacity(self.count);
                let mut attempts = 0;
                while placed.len() < self.count {
                    if attempts >= budget {
                        return Err(constraint(
                            "swarm.spawn_box",
                            format!("could only place {} of {} agents", placed.len(), self.count),
                        )
                        .into());
                    }
                    attempts += 1;
                    let p = b.sample(&mut rng);
                    let free = placed.iter().all(|q| q.distance(p) >= min_gap)
                        && obstacles.iter().all(|o| o.clearance(p) >= min_gap);
                    if free {
                        placed.push(p);
                    }
                }
                placed
            }
        };

        let agents = positions
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                let id = AgentId(i as u32);
                UavState::new(id, p, self.informed.contains(&id))
            })
            .collect();
        let world = World::new(agents, obstacles, self.goal, self.bounds)?;
        Ok((world, rng))
    }
}
