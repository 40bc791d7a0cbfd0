//! Seeded randomized suites and oracle comparisons. Each returns the first
//! violation found as an error message.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swarmnav::control::{
    avoid_one, avoidance_sum, cohesion_factor, compose_command, nav_informed, ObstaclePoint,
};
use swarmnav::geometry::Vec2;
use swarmnav::metrics::{path_persistence, path_similarity};
use swarmnav::model::{AgentId, AgentMemory, Params, TargetRef, UavState};
use swarmnav::runner::aggregate;
use swarmnav::selection::{build_candidates, score_candidate, select_target};
use swarmnav::sim::forest::generate_forest;
use swarmnav::sim::{Bounds, World};

use super::*;

pub type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ensure_close(what: &str, got: f64, want: f64, tol: f64) -> Check {
    ensure((got - want).abs() <= tol, || {
        format!("{what}: got {got}, want {want} (tol {tol})")
    })
}

fn ensure_vec(what: &str, got: Vec2, want: (f64, f64), tol: f64) -> Check {
    ensure(close(got, want, tol), || {
        format!("{what}: got ({}, {}), want {want:?}", got.x, got.y)
    })
}

/// Random walk, newest first, with steps between 0.5 and 5 m.
pub fn random_path(rng: &mut impl Rng, min_len: usize, max_len: usize) -> Vec<(f64, f64)> {
    let n = rng.random_range(min_len..=max_len);
    let wobble = rng.random_range(0.0..PI);
    let mut p = (rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
    let mut heading = rng.random_range(-PI..PI);
    let mut pts = vec![p];
    for _ in 1..n {
        heading += rng.random_range(-wobble..=wobble);
        let step = rng.random_range(0.5..5.0);
        p = (p.0 + step * heading.cos(), p.1 + step * heading.sin());
        pts.push(p);
    }
    pts.reverse();
    pts
}

fn rigid(pts: &[(f64, f64)], theta: f64, t: (f64, f64), s: f64) -> Vec<(f64, f64)> {
    let (sn, cs) = theta.sin_cos();
    pts.iter()
        .map(|&(x, y)| (s * (cs * x - sn * y) + t.0, s * (sn * x + cs * y) + t.1))
        .collect()
}

fn rigid_point(p: Vec2, theta: f64, t: (f64, f64)) -> Vec2 {
    let q = rigid(&[(p.x, p.y)], theta, t, 1.0)[0];
    Vec2::new(q.0, q.1)
}

fn gamma(pts: &[(f64, f64)]) -> f64 {
    path_persistence(&hist(pts.len(), pts)).unwrap().value()
}

fn sigma(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    path_similarity(&hist(a.len(), a), &hist(b.len(), b))
        .unwrap()
        .value()
}

pub fn metric_properties(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let a = random_path(&mut rng, 3, 20);
        let b = random_path(&mut rng, 3, 20);
        let (ga, sab, sba) = (gamma(&a), sigma(&a, &b), sigma(&b, &a));
        ensure((0.0..=1.0).contains(&ga), || {
            format!("case {case}: gamma {ga}")
        })?;
        ensure((0.0..=1.0).contains(&sab), || {
            format!("case {case}: sigma {sab}")
        })?;
        ensure(sab == sba, || {
            format!("case {case}: sigma not symmetric ({sab} vs {sba})")
        })?;

        let theta = rng.random_range(-PI..PI);
        let t = (
            rng.random_range(-100.0..100.0),
            rng.random_range(-100.0..100.0),
        );
        let (ra, rb) = (rigid(&a, theta, t, 1.0), rigid(&b, theta, t, 1.0));
        ensure_close(&format!("case {case}: rigid gamma"), gamma(&ra), ga, 1e-9)?;
        ensure_close(
            &format!("case {case}: rigid sigma"),
            sigma(&ra, &rb),
            sab,
            1e-9,
        )?;

        let s = 10f64.powf(rng.random_range(-3.0..3.0));
        let (sa, sb) = (rigid(&a, 0.0, (0.0, 0.0), s), rigid(&b, 0.0, (0.0, 0.0), s));
        ensure_close(&format!("case {case}: scaled gamma"), gamma(&sa), ga, 1e-9)?;
        ensure_close(
            &format!("case {case}: scaled sigma"),
            sigma(&sa, &sb),
            sab,
            1e-9,
        )?;

        // collinear, forward-only path
        let dir = rng.random_range(-PI..PI);
        let mut p = (rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
        let mut line = vec![p];
        for _ in 0..rng.random_range(2..20) {
            let step = rng.random_range(0.5..5.0);
            p = (p.0 + step * dir.cos(), p.1 + step * dir.sin());
            line.push(p);
        }
        line.reverse();
        ensure_close(
            &format!("case {case}: collinear gamma"),
            gamma(&line),
            1.0,
            1e-9,
        )?;
    }
    Ok(())
}

fn memory_of(paths: &[(u32, Vec<(f64, f64)>)], capacity: usize) -> AgentMemory {
    AgentMemory {
        histories: paths
            .iter()
            .map(|(id, pts)| (AgentId(*id), hist(capacity, pts)))
            .collect::<BTreeMap<_, _>>(),
        ..AgentMemory::default()
    }
}

/// Random path whose newest point lies well outside the proximity radius
/// of the origin.
fn far_path(rng: &mut impl Rng, params: &Params) -> Vec<(f64, f64)> {
    loop {
        let p = random_path(rng, 3, params.history_capacity);
        let (x, y) = p[0];
        if x.hypot(y) > params.proximity_radius + 1.0 {
            return p;
        }
    }
}

pub fn selection_properties(cases: usize, seed: u64) -> Check {
    let params = Params::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let goal = Vec2::new(100.0, 0.0);
    let me = UavState::new(AgentId(0), Vec2::ZERO, false);
    for case in 0..cases {
        let (ida, idb) = (rng.random_range(1..50u32), rng.random_range(50..100u32));
        let (a, b) = (far_path(&mut rng, &params), far_path(&mut rng, &params));
        let mem = memory_of(
            &[(ida, a.clone()), (idb, b.clone())],
            params.history_capacity,
        );

        let chosen = select_target(&mem, &me, goal, &params);
        let (ga, gb) = (gamma(&a), gamma(&b));
        let TargetRef::Neighbor { id, point } = chosen else {
            return Err(format!("case {case}: no target among two candidates"));
        };
        if (ga - gb).abs() > 1e-12 {
            let want = if ga > gb { ida } else { idb };
            ensure(id == AgentId(want), || {
                format!("case {case}: chose {id}, persistence argmax is {want}")
            })?;
        }
        let newest = mem.histories[&id].newest().unwrap();
        ensure(point == newest, || {
            format!("case {case}: point is not h[1]")
        })?;
        ensure(select_target(&mem, &me, goal, &params) == chosen, || {
            format!("case {case}: nondeterministic selection")
        })?;

        // Rigid-motion equivariance; skip near-ties that rounding may flip.
        let cs = build_candidates(&mem, me.position, &params);
        let margin = (score_candidate(AgentId(ida), &cs).unwrap()
            - score_candidate(AgentId(idb), &cs).unwrap())
        .abs();
        if margin > 1e-9 {
            let theta = rng.random_range(-PI..PI);
            let t = (
                rng.random_range(-100.0..100.0),
                rng.random_range(-100.0..100.0),
            );
            let moved = memory_of(
                &[
                    (ida, rigid(&a, theta, t, 1.0)),
                    (idb, rigid(&b, theta, t, 1.0)),
                ],
                params.history_capacity,
            );
            let moved_me = UavState::new(AgentId(0), Vec2::new(t.0, t.1), false);
            let moved_goal = rigid_point(goal, theta, t);
            match select_target(&moved, &moved_me, moved_goal, &params) {
                TargetRef::Neighbor { id: mid, point: mp } => {
                    ensure(mid == id, || {
                        format!("case {case}: rigid motion changed choice {id} -> {mid}")
                    })?;
                    ensure_vec(
                        &format!("case {case}: mapped target"),
                        mp,
                        {
                            let q = rigid_point(point, theta, t);
                            (q.x, q.y)
                        },
                        1e-9,
                    )?;
                }
                other => return Err(format!("case {case}: moved selection gave {other:?}")),
            }
        }

        // Exact tie: identical shapes, lowest id wins in either storage order.
        let offset = (0.0, 1.0);
        let twin: Vec<_> = a
            .iter()
            .map(|&(x, y)| (x + offset.0, y + offset.1))
            .collect();
        if twin[0].0.hypot(twin[0].1) > params.proximity_radius {
            for order in [[(ida, &a), (idb, &twin)], [(idb, &a), (ida, &twin)]] {
                let mem = memory_of(&order.map(|(i, p)| (i, p.clone())), params.history_capacity);
                let cs = build_candidates(&mem, me.position, &params);
                let (sa, sb) = (
                    score_candidate(AgentId(ida), &cs).unwrap(),
                    score_candidate(AgentId(idb), &cs).unwrap(),
                );
                if sa == sb {
                    let t = select_target(&mem, &me, goal, &params);
                    ensure(
                        matches!(t, TargetRef::Neighbor { id, .. } if id == AgentId(ida)),
                        || format!("case {case}: tie resolved to {t:?}, want lowest id {ida}"),
                    )?;
                }
            }
        }
    }
    Ok(())
}

pub fn control_properties(cases: usize, seed: u64) -> Check {
    let params = Params::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r_o = params.avoid_radius;
    for case in 0..cases {
        let me = Vec2::new(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0));
        let k = rng.random_range(0..12);
        let spread = 10f64.powf(rng.random_range(-2.0..2.5));
        let neighbors: Vec<Vec2> = (0..k)
            .map(|_| {
                me + Vec2::new(
                    rng.random_range(-spread..spread),
                    rng.random_range(-spread..spread),
                )
            })
            .collect();
        let f = cohesion_factor(me, &neighbors, &params);
        ensure((params.min_speed_ratio..=1.0).contains(&f), || {
            format!("case {case}: attenuation {f} outside [V^m, 1]")
        })?;

        let bearing = rng.random_range(-PI..PI);
        let d = rng.random_range(0.05..r_o);
        let o = ObstaclePoint::from(me + Vec2::new(d * bearing.cos(), d * bearing.sin()));
        let u_prev = Vec2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        if u_prev.norm() > 1e-6 {
            let c = avoid_one(me, o, u_prev, r_o).unwrap();
            let to_o = o.point - me;
            ensure(c.dot(to_o).abs() < 1e-9 * c.norm() * to_o.norm(), || {
                format!("case {case}: avoidance not perpendicular")
            })?;
            let s = 10f64.powf(rng.random_range(-6.0..6.0));
            let cs = avoid_one(me, o, u_prev * s, r_o).unwrap();
            ensure(cs == c, || {
                format!("case {case}: direction changed under rescaling by {s}")
            })?;
        }

        // magnitude and the distance actually realized after rounding
        let mag = |dist: f64| {
            let o = ObstaclePoint::from(me + Vec2::new(dist * bearing.cos(), dist * bearing.sin()));
            (
                avoid_one(me, o, u_prev, r_o).unwrap().norm(),
                o.point.distance(me),
            )
        };
        let exact = avoid_one(Vec2::ZERO, Vec2::new(0.0, r_o).into(), u_prev, r_o).unwrap();
        ensure(exact == Vec2::ZERO, || {
            format!("case {case}: nonzero at R^o")
        })?;
        let beyond = r_o + rng.random_range(0.0..100.0);
        let (m, realized) = mag(beyond);
        if realized >= r_o {
            ensure(m == 0.0, || {
                format!("case {case}: nonzero at distance {realized}")
            })?;
        }
        let (d1, d2) = {
            let x = rng.random_range(0.01..r_o);
            let y = rng.random_range(0.01..r_o);
            (x.min(y), x.max(y))
        };
        if d2 - d1 > 1e-6 {
            ensure(mag(d1).0 > mag(d2).0, || {
                format!("case {case}: magnitude not decreasing between {d1} and {d2}")
            })?;
        }

        let n = Vec2::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
        let c = Vec2::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
        let v_max = rng.random_range(0.1..5.0);
        let u = compose_command(n, c, v_max).unwrap().velocity();
        ensure(u.norm() <= v_max, || {
            format!("case {case}: |u| = {} > {v_max}", u.norm())
        })?;
    }
    Ok(())
}

pub fn oracle_score_and_select() -> Check {
    let params = Params::default();
    let mem = memory_of(&[(1, SCORE_J.to_vec()), (2, SCORE_L.to_vec())], 20);
    let cs = build_candidates(&mem, Vec2::ZERO, &params);
    let oracle_j = persistence_oracle(&SCORE_J) + similarity_oracle(&SCORE_J, &SCORE_L);
    let oracle_l = persistence_oracle(&SCORE_L) + similarity_oracle(&SCORE_L, &SCORE_J);
    ensure_close("oracle score j", oracle_j, SCORE_J_VALUE, TOL)?;
    ensure_close("oracle score l", oracle_l, SCORE_L_VALUE, TOL)?;
    ensure_close(
        "score j",
        score_candidate(AgentId(1), &cs).unwrap(),
        SCORE_J_VALUE,
        TOL,
    )?;
    ensure_close(
        "score l",
        score_candidate(AgentId(2), &cs).unwrap(),
        SCORE_L_VALUE,
        TOL,
    )?;

    let me = UavState::new(AgentId(0), Vec2::ZERO, false);
    let t = select_target(&mem, &me, Vec2::new(100.0, 0.0), &params);
    let want = TargetRef::Neighbor {
        id: AgentId(1),
        point: Vec2::new(SCORE_J[0].0, SCORE_J[0].1),
    };
    ensure(t == want, || {
        format!("select_target gave {t:?}, want {want:?}")
    })
}

pub fn oracle_nav_informed() -> Check {
    let params = Params::default();
    let oracle = nav_informed_oracle(
        params.min_speed_ratio,
        params.nav_gain,
        params.cohesion_radius,
        (0.0, 0.0),
        &[(0.0, params.cohesion_radius)],
        (10.0, 0.0),
    );
    ensure_vec(
        "oracle nav_informed",
        Vec2::new(oracle.0, oracle.1),
        NAV_INFORMED,
        TOL,
    )?;
    let got = nav_informed(
        Vec2::ZERO,
        &[Vec2::new(0.0, params.cohesion_radius)],
        Vec2::new(10.0, 0.0),
        &params,
    );
    ensure_vec("nav_informed", got, NAV_INFORMED, TOL)
}

pub fn oracle_avoidance() -> Check {
    let oracle = avoid_one_oracle((0.0, 0.0), (0.0, 1.0), (1.0, 0.0), 4.0);
    ensure_vec(
        "oracle avoid_one",
        Vec2::new(oracle.0, oracle.1),
        AVOID_ONE,
        TOL,
    )?;
    let got = avoid_one(
        Vec2::ZERO,
        Vec2::new(0.0, 1.0).into(),
        Vec2::new(1.0, 0.0),
        4.0,
    )
    .unwrap();
    ensure_vec("avoid_one", got, AVOID_ONE, TOL)?;

    let a = avoid_one_oracle((0.0, 0.0), (1.0, 1.0), (1.0, 0.0), 4.0);
    let b = avoid_one_oracle((0.0, 0.0), (1.0, -1.0), (1.0, 0.0), 4.0);
    let oracle_sum = Vec2::new(a.0 + b.0, a.1 + b.1);
    ensure_vec("oracle mirror sum", oracle_sum, MIRROR_SUM, TOL)?;
    let obstacles = [
        ObstaclePoint::from(Vec2::new(1.0, 1.0)),
        ObstaclePoint::from(Vec2::new(1.0, -1.0)),
    ];
    let got = avoidance_sum(Vec2::ZERO, &obstacles, Vec2::new(1.0, 0.0), 4.0).unwrap();
    ensure_vec("mirror sum", got, MIRROR_SUM, TOL)
}

pub fn oracle_head_on_step() -> Check {
    let params = Params::default();
    let starts = [((-1.0, 0.0), (1.0, 0.1)), ((1.0, 0.0), (-1.0, -0.1))];
    for (i, &(p, u)) in starts.iter().enumerate() {
        let other = starts[1 - i].0;
        let c = avoid_one_oracle(p, other, u, params.avoid_radius);
        let c = Vec2::new(c.0, c.1) * params.avoid_gain;
        ensure_vec(&format!("oracle head-on agent {i}"), c, HEAD_ON[i], TOL)?;
    }
    let agents = starts
        .iter()
        .enumerate()
        .map(|(i, &((x, y), (ux, uy)))| UavState {
            prev_command: Vec2::new(ux, uy),
            ..UavState::new(AgentId(i as u32), Vec2::new(x, y), false)
        })
        .collect();
    let world = World::new(
        agents,
        vec![],
        Vec2::new(0.0, 100.0),
        Bounds::new(-10.0, -10.0, 10.0, 110.0).unwrap(),
    )
    .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (_, rec) = world.step(&params, &mut rng).map_err(|e| e.to_string())?;
    for (i, a) in rec.agents.iter().enumerate() {
        ensure_vec(&format!("head-on agent {i}"), a.command, HEAD_ON[i], TOL)?;
    }
    ensure_close(
        "mirror symmetry",
        rec.agents[0].command.y,
        -rec.agents[1].command.y,
        TOL,
    )
}

pub fn oracle_forest() -> Check {
    let bounds = Bounds::new(0.0, 0.0, 40.0, 40.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let trees =
        generate_forest(0.05, (0.3, 0.5), &[], bounds, &mut rng).map_err(|e| e.to_string())?;
    ensure(trees.len() == FOREST_TREES, || {
        format!("{} trees, want {FOREST_TREES}", trees.len())
    })?;
    for i in 0..trees.len() {
        for j in 0..i {
            let (a, b) = (&trees[i], &trees[j]);
            let gap = (a.center.x - b.center.x).hypot(a.center.y - b.center.y);
            ensure(gap >= a.radius + b.radius, || {
                format!("trees {j} and {i} overlap")
            })?;
        }
    }
    Ok(())
}

pub fn oracle_aggregates() -> Check {
    let a = aggregate(&synthetic_summaries());
    ensure(a.runs == 3 && a.successes == 2, || format!("counts {a:?}"))?;
    ensure_close("success rate", a.success_rate, SYNTHETIC_SUCCESS_RATE, TOL)?;
    ensure_close(
        "mean time",
        a.mean_time_to_goal.unwrap_or(f64::NAN),
        SYNTHETIC_MEAN_TIME,
        TOL,
    )?;
    ensure_close(
        "std time",
        a.std_time_to_goal.unwrap_or(f64::NAN),
        SYNTHETIC_STD_TIME,
        TOL,
    )?;
    ensure_close(
        "min clearance",
        a.min_obstacle_clearance.unwrap_or(f64::NAN),
        SYNTHETIC_MIN_CLEARANCE,
        TOL,
    )?;
    ensure_close(
        "min separation",
        a.min_inter_agent_distance.unwrap_or(f64::NAN),
        SYNTHETIC_MIN_SEPARATION,
        TOL,
    )
}

pub fn all_oracles() -> Vec<(&'static str, Check)> {
    vec![
        ("score and select", oracle_score_and_select()),
        ("informed navigation", oracle_nav_informed()),
        ("avoidance", oracle_avoidance()),
        ("head-on step", oracle_head_on_step()),
        ("forest", oracle_forest()),
        ("aggregates", oracle_aggregates()),
    ]
}

/// Oracle sanity on random inputs, so the fixtures' source is itself checked.
pub fn oracle_agreement(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let a = random_path(&mut rng, 3, 20);
        let b = random_path(&mut rng, 3, 20);
        ensure_close(
            &format!("case {case}: gamma"),
            gamma(&a),
            persistence_oracle(&a),
            1e-9,
        )?;
        ensure_close(
            &format!("case {case}: sigma"),
            sigma(&a, &b),
            similarity_oracle(&a, &b),
            1e-9,
        )?;

        let p = (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let ang = rng.random_range(0.0..TAU);
        let d = rng.random_range(0.1..6.0);
        let o = (p.0 + d * ang.cos(), p.1 + d * ang.sin());
        let u: (f64, f64) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        if u.0.hypot(u.1) < 1e-3 {
            continue;
        }
        // skip near-ties between the two perpendiculars
        let to_o = (o.0 - p.0, o.1 - p.1);
        if (to_o.0 * u.1 - to_o.1 * u.0).abs() < 1e-6 {
            continue;
        }
        let want = avoid_one_oracle(p, o, u, 4.0);
        let got = avoid_one(
            Vec2::new(p.0, p.1),
            Vec2::new(o.0, o.1).into(),
            Vec2::new(u.0, u.1),
            4.0,
        )
        .unwrap();
        ensure_vec(&format!("case {case}: avoid_one"), got, want, 1e-9)?;
    }
    Ok(())
}
