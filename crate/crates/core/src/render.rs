//! Static SVG plot of a run: bounds, obstacles, goal, and one polyline per
//! agent. Output is a pure function of its inputs.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::model::AgentId;
use crate::record::StepRecord;
use crate::sim::World;

const PX_PER_M: f64 = 10.0;
const MARGIN_M: f64 = 2.0;
const INFORMED_COLOR: &str = "#d62728";
const FOLLOWER_COLOR: &str = "#1f77b4";

struct Frame {
    min: Vec2,
    max: Vec2,
}

impl Frame {
    fn px(&self, p: Vec2) -> (f64, f64) {
        ((p.x - self.min.x) * PX_PER_M, (self.max.y - p.y) * PX_PER_M)
    }
}

/// Renders `records` over the obstacles, goal, and bounds of `world`
/// (normally the run's initial world).
pub fn render_trajectories(
    records: &[StepRecord],
    world: &World,
    goal_tolerance: f64,
) -> Result<String> {
    if records.is_empty() {
        return Err(Error::InvalidInput("no step records to render".into()));
    }

    let mut tracks: BTreeMap<AgentId, (bool, Vec<Vec2>)> = BTreeMap::new();
    for rec in records {
        for a in &rec.agents {
            tracks
                .entry(a.id)
                .or_insert_with(|| (a.informed, Vec::new()))
                .1
                .push(a.position);
        }
    }

    let mut min = world.bounds.min;
    let mut max = world.bounds.max;
    for p in tracks.values().flat_map(|(_, pts)| pts.iter()) {
        min = Vec2::new(min.x.min(p.x), min.y.min(p.y));
        max = Vec2::new(max.x.max(p.x), max.y.max(p.y));
    }
    let frame = Frame {
        min: min - Vec2::new(MARGIN_M, MARGIN_M),
        max: max + Vec2::new(MARGIN_M, MARGIN_M),
    };
    let width = (frame.max.x - frame.min.x) * PX_PER_M;
    let height = (frame.max.y - frame.min.y) * PX_PER_M;

    let mut svg = String::new();
    // fmt::Write into a String cannot fail
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.3} {height:.3}">"#
    );
    let _ = writeln!(
        svg,
        r##"<rect x="0" y="0" width="{width:.3}" height="{height:.3}" fill="#ffffff"/>"##
    );

    let (bx, by) = frame.px(Vec2::new(world.bounds.min.x, world.bounds.max.y));
    let _ = writeln!(
        svg,
        r##"<rect class="bounds" x="{bx:.3}" y="{by:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="#333333" stroke-width="1"/>"##,
        world.bounds.width() * PX_PER_M,
        world.bounds.height() * PX_PER_M
    );

    for o in &world.obstacles {
        let (cx, cy) = frame.px(o.center);
        let _ = writeln!(
            svg,
            r##"<circle class="obstacle" cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="#6b8e23"/>"##,
            o.radius * PX_PER_M
        );
    }

    let (gx, gy) = frame.px(world.goal);
    let _ = writeln!(
        svg,
        r##"<circle class="goal" cx="{gx:.3}" cy="{gy:.3}" r="{:.3}" fill="none" stroke="#ff7f0e" stroke-width="2" stroke-dasharray="4 3"/>"##,
        goal_tolerance * PX_PER_M
    );

    for (id, (informed, pts)) in &tracks {
        let color = if *informed {
            INFORMED_COLOR
        } else {
            FOLLOWER_COLOR
        };
        let stroke_width = if *informed { 2.0 } else { 1.2 };
        let points = pts
            .iter()
            .map(|&p| {
                let (x, y) = frame.px(p);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            svg,
            r#"<polyline class="agent{}" data-id="{id}" points="{points}" fill="none" stroke="{color}" stroke-width="{stroke_width}"/>"#,
            if *informed { " informed" } else { "" }
        );
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}
