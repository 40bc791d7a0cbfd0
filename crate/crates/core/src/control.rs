//! Velocity command = navigation vector + collision-avoidance vector.

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::model::{Params, TargetRef, UavState};

/// Below this magnitude the previous command carries no usable direction.
pub const MIN_COMMAND_NORM: f64 = 1e-9;

/// A point to steer around: nearest sensed point of an obstacle, or a
/// neighbor's estimated position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstaclePoint {
    pub point: Vec2,
}

impl From<Vec2> for ObstaclePoint {
    fn from(point: Vec2) -> Self {
        Self { point }
    }
}

/// Saturated velocity command, m/s.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Command {
    velocity: Vec2,
}

impl Command {
    pub fn velocity(self) -> Vec2 {
        self.velocity
    }
}

/// Attenuation of the informed pull by mean distance to the neighbors.
/// Always in `[min_speed_ratio, 1]`; exactly 1 with no neighbors.
pub fn cohesion_factor(self_pos: Vec2, neighbor_points: &[Vec2], params: &Params) -> f64 {
    if neighbor_points.is_empty() {
        return 1.0;
    }
    let total: f64 = neighbor_points.iter().map(|p| p.distance(self_pos)).sum();
    let mean = total / neighbor_points.len() as f64;
    params
        .min_speed_ratio
        .max(1.0 - mean / (2.0 * params.cohesion_radius))
        .min(1.0)
}

pub fn nav_informed(
    self_pos: Vec2,
    neighbor_points: &[Vec2],
    attraction: Vec2,
    params: &Params,
) -> Vec2 {
    cohesion_factor(self_pos, neighbor_points, params) * params.nav_gain * (attraction - self_pos)
}

pub fn nav_uninformed(self_pos: Vec2, target: &TargetRef, params: &Params) -> Result<Vec2> {
    match *target {
        TargetRef::Neighbor { point, .. } => Ok(params.nav_gain * (point - self_pos)),
        TargetRef::None => Ok(Vec2::ZERO),
        TargetRef::Goal(_) => Err(Error::ContractViolation(
            "uninformed agent was given the goal as target".into(),
        )),
    }
}

pub fn navigation_vector(
    agent: &UavState,
    target: &TargetRef,
    neighbor_points: &[Vec2],
    goal: Vec2,
    params: &Params,
) -> Result<Vec2> {
    if agent.informed {
        match target {
            TargetRef::Goal(_) => Ok(nav_informed(agent.position, neighbor_points, goal, params)),
            other => Err(Error::ContractViolation(format!(
                "informed agent {} has non-goal target {other:?}",
                agent.id
            ))),
        }
    } else {
        nav_uninformed(agent.position, target, params)
    }
}

/// Tangential repulsion from one point.
///
/// The magnitude is `max(0, 1/d - 1/radius)`. The direction is whichever of
/// the two perpendiculars to the line of sight is closest to `u_prev`; with no
/// usable previous command the agent escapes radially instead.
pub fn avoid_one(self_pos: Vec2, o: ObstaclePoint, u_prev: Vec2, radius: f64) -> Result<Vec2> {
    let to_obstacle = o.point - self_pos;
    let dist = to_obstacle.norm();
    if dist == 0.0 {
        return Err(Error::DegenerateGeometry(format!(
            "agent at ({}, {}) coincides with obstacle point",
            self_pos.x, self_pos.y
        )));
    }
    let magnitude = (1.0 / dist - 1.0 / radius).max(0.0);
    if magnitude == 0.0 {
        return Ok(Vec2::ZERO);
    }
    let u_norm = u_prev.norm();
    let direction = if u_norm < MIN_COMMAND_NORM {
        -to_obstacle / dist
    } else {
        let plus = to_obstacle.perp() / dist;
        let minus = -plus;
        let u_hat = u_prev / u_norm;
        if plus.dot(u_hat) >= minus.dot(u_hat) {
            plus
        } else {
            minus
        }
    };
    Ok(magnitude * direction)
}

/// Unscaled sum of [`avoid_one`] over `points` with a shared radius.
pub fn avoidance_sum(
    self_pos: Vec2,
    points: &[ObstaclePoint],
    u_prev: Vec2,
    radius: f64,
) -> Result<Vec2> {
    points.iter().try_fold(Vec2::ZERO, |acc, &o| {
        Ok(acc + avoid_one(self_pos, o, u_prev, radius)?)
    })
}

pub fn avoidance_vector(
    self_pos: Vec2,
    obstacles: &[ObstaclePoint],
    u_prev: Vec2,
    params: &Params,
) -> Result<Vec2> {
    Ok(params.avoid_gain * avoidance_sum(self_pos, obstacles, u_prev, params.avoid_radius)?)
}

/// Sums the two components and saturates the result at `max_speed`.
pub fn compose_command(nav: Vec2, avoid: Vec2, max_speed: f64) -> Result<Command> {
    if !nav.is_finite() || !avoid.is_finite() {
        return Err(Error::InvalidInput(format!(
            "non-finite command component: nav {nav:?}, avoid {avoid:?}"
        )));
    }
    let sum = nav + avoid;
    let norm = sum.norm();
    if norm <= max_speed {
        return Ok(Command { velocity: sum });
    }
    let mut velocity = sum * (max_speed / norm);
    while velocity.norm() > max_speed {
        velocity = velocity * (1.0 - f64::EPSILON);
    }
    Ok(Command { velocity })
}
