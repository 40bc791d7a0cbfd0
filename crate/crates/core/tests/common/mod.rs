#![allow(dead_code)]

//! Independent reference computations and fixtures shared by the test targets.
//!
//! The oracles work in angles (atan2 / cos / sin) instead of the dot products
//! and perpendiculars used by the library, so agreement is not circular.

pub mod checks;

use std::f64::consts::FRAC_PI_2;

use swarmnav::geometry::Vec2;
use swarmnav::model::{AgentId, PathHistory};
use swarmnav::record::RunSummary;
use swarmnav::sim::{Collision, RunStatus};

pub const TOL: f64 = 1e-9;

pub fn hist(capacity: usize, newest_first: &[(f64, f64)]) -> PathHistory {
    PathHistory::from_points(capacity, newest_first.iter().map(|&(x, y)| Vec2::new(x, y)))
}

pub fn heading(v: (f64, f64)) -> f64 {
    v.1.atan2(v.0)
}

fn disp(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (b.0 - a.0, b.1 - a.1)
}

/// Mean clipped cosine of heading changes, oldest to newest.
pub fn persistence_oracle(newest_first: &[(f64, f64)]) -> f64 {
    let chrono: Vec<_> = newest_first.iter().rev().copied().collect();
    let headings: Vec<f64> = chrono
        .windows(2)
        .map(|w| heading(disp(w[0], w[1])))
        .collect();
    let turns: Vec<f64> = headings
        .windows(2)
        .map(|w| (w[1] - w[0]).cos().max(0.0))
        .collect();
    turns.iter().sum::<f64>() / turns.len() as f64
}

pub fn similarity_oracle(a_newest_first: &[(f64, f64)], b_newest_first: &[(f64, f64)]) -> f64 {
    let net = |h: &[(f64, f64)]| disp(h[h.len() - 1], h[0]);
    let phi = heading(net(a_newest_first)) - heading(net(b_newest_first));
    (1.0 + phi.cos()) / 2.0
}

/// Enumerates both unit vectors at +-90 degrees from the obstacle bearing
/// and keeps the one whose heading is closest to `u_prev`.
pub fn avoid_one_oracle(
    p: (f64, f64),
    o: (f64, f64),
    u_prev: (f64, f64),
    radius: f64,
) -> (f64, f64) {
    let d = disp(p, o);
    let dist = d.0.hypot(d.1);
    let m = (1.0 / dist - 1.0 / radius).max(0.0);
    if m == 0.0 {
        return (0.0, 0.0);
    }
    let bearing = heading(d);
    let u_heading = heading(u_prev);
    let candidates = [bearing + FRAC_PI_2, bearing - FRAC_PI_2];
    let best = candidates
        .iter()
        .copied()
        .max_by(|a, b| {
            (a - u_heading)
                .cos()
                .partial_cmp(&(b - u_heading).cos())
                .unwrap()
        })
        .unwrap();
    (m * best.cos(), m * best.sin())
}

pub fn nav_informed_oracle(
    v_min: f64,
    k_nav: f64,
    cohesion_radius: f64,
    p: (f64, f64),
    neighbors: &[(f64, f64)],
    a: (f64, f64),
) -> (f64, f64) {
    let f = if neighbors.is_empty() {
        1.0
    } else {
        let mean = neighbors
            .iter()
            .map(|&q| (q.0 - p.0).hypot(q.1 - p.1))
            .sum::<f64>()
            / neighbors.len() as f64;
        v_min.max(1.0 - mean / (2.0 * cohesion_radius))
    };
    (f * k_nav * (a.0 - p.0), f * k_nav * (a.1 - p.1))
}

pub fn close(a: Vec2, b: (f64, f64), tol: f64) -> bool {
    (a.x - b.0).abs() <= tol && (a.y - b.1).abs() <= tol
}

// Frozen fixtures. Each value was produced by the oracles above and is
// checked against both the oracle and the library.

/// Straight eastward path, newest first.
pub const SCORE_J: [(f64, f64); 3] = [(12.0, 0.0), (11.0, 0.0), (10.0, 0.0)];
/// Right-angle turn whose net displacement points north, newest first.
pub const SCORE_L: [(f64, f64); 3] = [(20.0, 2.0), (21.0, 1.0), (20.0, 0.0)];
pub const SCORE_J_VALUE: f64 = 1.5;
pub const SCORE_L_VALUE: f64 = 0.5;

pub const NAV_INFORMED: (f64, f64) = (2.5, 0.0);
pub const AVOID_ONE: (f64, f64) = (0.75, 0.0);
/// Sum of the unscaled avoidance terms for obstacles at (1, 1) and (1, -1)
/// seen from the origin with u_prev = (1, 0), radius 4.
pub const MIRROR_SUM: (f64, f64) = (0.646_446_609_406_726_2, 0.0);
/// Commands of two uninformed agents at (-1, 0) and (1, 0) with previous
/// commands (1, 0.1) and (-1, -0.1), default parameters.
pub const HEAD_ON: [(f64, f64); 2] = [(0.0, 0.5), (0.0, -0.5)];
pub const FOREST_TREES: usize = 80;

pub fn synthetic_summaries() -> Vec<RunSummary> {
    let base =
        |seed: u64, status: RunStatus, elapsed: f64, clr: Option<f64>, sep: f64| RunSummary {
            seed,
            status,
            steps: (elapsed * 10.0).round() as u64,
            elapsed_s: elapsed,
            path_lengths: vec![10.0, 11.0],
            min_inter_agent_distance: Some(sep),
            min_obstacle_clearance: clr,
            time_to_goal: vec![None, None],
            final_cohesion_radius: 2.0,
        };
    vec![
        base(0, RunStatus::Success, 10.0, Some(0.4), 1.2),
        base(
            1,
            RunStatus::Collision(Collision::Obstacle {
                agent: AgentId(1),
                obstacle: 3,
                clearance: -0.01,
            }),
            6.0,
            Some(0.0),
            0.9,
        ),
        base(2, RunStatus::Success, 14.0, None, 2.0),
    ]
}

/// Aggregates of [`synthetic_summaries`], worked by hand: two successes at
/// 10 s and 14 s give mean 12 and sample deviation sqrt(8).
pub const SYNTHETIC_SUCCESS_RATE: f64 = 2.0 / 3.0;
pub const SYNTHETIC_MEAN_TIME: f64 = 12.0;
pub const SYNTHETIC_STD_TIME: f64 = 2.828_427_124_746_190_3;
pub const SYNTHETIC_MIN_CLEARANCE: f64 = 0.0;
pub const SYNTHETIC_MIN_SEPARATION: f64 = 0.9;
