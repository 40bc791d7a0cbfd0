//! Choosing which neighbor to follow.
//!
//! Candidates are neighbors that are far enough away, are not themselves
//! heading toward the point this agent was chasing last step, and have a
//! history long enough to judge. Among them the agent follows the one with
//! the highest persistence plus summed similarity to every other candidate.

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::metrics::{path_persistence, path_similarity, MIN_NET_DISPLACEMENT};
use crate::model::{AgentId, AgentMemory, Params, PathHistory, TargetRef, UavState};

/// Neighbors eligible as follow targets, ascending by id.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet<'a> {
    members: Vec<(AgentId, &'a PathHistory)>,
}

impl<'a> CandidateSet<'a> {
    pub fn ids(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.members.iter().map(|(id, _)| *id)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn history(&self, id: AgentId) -> Option<&'a PathHistory> {
        self.members.iter().find(|(j, _)| *j == id).map(|(_, h)| *h)
    }
}

/// True when the neighbor's net heading lies inside the exclusion cone
/// around the direction from its newest point to `prev_point`.
fn heading_toward(h: &PathHistory, net: Vec2, prev_point: Vec2, half_angle: f64) -> bool {
    let Some(newest) = h.newest() else {
        return false;
    };
    let to_prev = prev_point - newest;
    if to_prev.norm() < MIN_NET_DISPLACEMENT {
        // Already at the point, not heading to it.
        return false;
    }
    net.cos_angle(to_prev).acos() < half_angle
}

pub fn build_candidates<'a>(
    mem: &'a AgentMemory,
    self_pos: Vec2,
    params: &Params,
) -> CandidateSet<'a> {
    let prev_point = match mem.prev_target {
        TargetRef::Neighbor { point, .. } => Some(point),
        TargetRef::Goal(_) | TargetRef::None => None,
    };
    let members = mem
        .histories
        .iter()
        .filter_map(|(&id, h)| {
            if h.len() < 3 {
                return None;
            }
            let newest = h.newest()?;
            if newest.distance(self_pos) <= params.proximity_radius {
                return None;
            }
            let net = h.net_displacement().ok()?;
            if net.norm() < MIN_NET_DISPLACEMENT {
                return None;
            }
            if let Some(q) = prev_point {
                if heading_toward(h, net, q, params.exclusion_angle) {
                    return None;
                }
            }
            Some((id, h))
        })
        .collect();
    CandidateSet { members }
}

fn score_member(cs: &CandidateSet<'_>, idx: usize) -> f64 {
    let (_, h_j) = cs.members[idx];
    let persistence = path_persistence(h_j)
        .expect("candidate histories have at least three points")
        .value();
    let similarity: f64 = cs
        .members
        .iter()
        .enumerate()
        .filter(|&(l, _)| l != idx)
        .map(|(_, (_, h_l))| {
            path_similarity(h_j, h_l)
                .expect("candidate histories have nonzero net displacement")
                .value()
        })
        .sum();
    persistence + similarity
}

/// Persistence of `j` plus its similarity to every other candidate.
pub fn score_candidate(j: AgentId, cs: &CandidateSet<'_>) -> Result<f64> {
    let idx = cs
        .members
        .iter()
        .position(|(id, _)| *id == j)
        .ok_or_else(|| Error::InvalidArgument(format!("agent {j} is not a candidate")))?;
    Ok(score_member(cs, idx))
}

pub fn select_target(
    mem: &AgentMemory,
    agent: &UavState,
    goal: Vec2,
    params: &Params,
) -> TargetRef {
    if agent.informed {
        return TargetRef::Goal(goal);
    }
    let cs = build_candidates(mem, agent.position, params);
    let mut best: Option<(usize, f64)> = None;
    for idx in 0..cs.len() {
        let score = score_member(&cs, idx);
        // strict comparison keeps the lowest id on ties
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((idx, score));
        }
    }
    match best {
        Some((idx, _)) => {
            let (id, h) = cs.members[idx];
            TargetRef::Neighbor {
                id,
                point: h.newest().expect("candidate history is non-empty"),
            }
        }
        None => TargetRef::None,
    }
}
