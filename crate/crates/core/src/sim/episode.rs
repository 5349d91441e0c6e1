//! Scored episodes: the scan -> waypoint -> policy -> step loop.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::nav::{
    detect_gaps, extract_plan_goal, manipulate_gaps, place_waypoints, plan_global, select_waypoint,
    simplify_gaps,
};
use crate::pedsim::{spawn_pedestrians, PedParams};
use crate::perf::{episode_perf, perf_step, PerfInputs};
use crate::policy::{EgoPolicy, ObservedAgent, PolicyInput};
use crate::sim::kalman::{kalman_estimate, VelocityEstimate};
use crate::sim::raycast::raycast_scan;
use crate::sim::{step_world, SimConfig, WorldState};
use crate::world::{min_clearance, AgentState, OccupancyGrid, Pose2D, Vec2};

/// Seeds that produced an episode, for exact replay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SeedBundle {
    pub master: u64,
    pub map: u64,
    pub peds: u64,
    pub episode: u64,
}

/// Signed clearances and contact flag for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub g_min_static: f64,
    pub d_min_dynamic: f64,
    pub wall_contact: bool,
}

/// One replayable trace sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub perf: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waypoint: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub success: bool,
    pub duration: f64,
    pub collisions: usize,
    pub perf_trace: Vec<f64>,
    pub mean_perf: f64,
    pub seeds: SeedBundle,
    pub trace: Option<Vec<TraceStep>>,
}

/// Collision events: maximal contiguous runs of sub-threshold clearance.
/// Wall and pedestrian events are counted independently; each run counts
/// once regardless of length.
pub fn count_collision_events(records: &[StepRecord], cfg: &SimConfig) -> usize {
    let mut events = 0usize;
    let mut in_wall = false;
    let mut in_ped = false;
    for r in records {
        let wall = r.wall_contact || r.g_min_static < cfg.wall_collision_threshold;
        if wall && !in_wall {
            events += 1;
        }
        in_wall = wall;
        let ped = r.d_min_dynamic < cfg.ped_collision_threshold;
        if ped && !in_ped {
            events += 1;
        }
        in_ped = ped;
    }
    events
}

/// Run one scored episode: spawn the crowd, plan once, then loop
/// scan -> waypoint -> policy -> step until the goal, the time limit, or
/// (when configured terminal) a wall contact.
pub fn run_episode(
    grid: &OccupancyGrid,
    ped_params: &PedParams,
    policy: &dyn EgoPolicy,
    start: Pose2D,
    goal: Pose2D,
    cfg: &SimConfig,
    seeds: SeedBundle,
) -> Result<EpisodeResult> {
    cfg.validate()?;
    let pedestrians = if ped_params.count > 0 {
        spawn_pedestrians(grid, ped_params)?
    } else {
        Vec::new()
    };

    let mut ego = AgentState::new(start.position(), cfg.r_robot, cfg.v_pref, start.heading);
    ego.local_goal = goal.position();
    let mut world = WorldState { grid, ego, pedestrians, ticks: 0, dt: cfg.dt };

    // global plan is static; compute once, fall back to the goal on failure
    let plan = if cfg.use_waypoint_planner {
        plan_global(grid, start, goal, cfg.r_robot + cfg.inflation_margin).ok()
    } else {
        None
    };

    let mut trackers: Vec<VelocityEstimate> =
        vec![VelocityEstimate::diffuse(cfg.kalman_q, cfg.kalman_r); world.pedestrians.len()];

    let mut perf_trace = Vec::new();
    let mut records = Vec::new();
    let mut trace = cfg.record_trace.then(Vec::new);
    let mut success = false;

    let at_goal =
        |p: Vec2| -> bool { p.dist(goal.position()) <= cfg.goal_radius };

    if at_goal(world.ego.pos) {
        perf_trace.push(1.0);
        if let Some(tr) = trace.as_mut() {
            tr.push(TraceStep {
                t: 0.0,
                x: world.ego.pos.x,
                y: world.ego.pos.y,
                heading: world.ego.heading,
                perf: 1.0,
                waypoint: None,
            });
        }
        return Ok(EpisodeResult {
            success: true,
            duration: 0.0,
            collisions: 0,
            mean_perf: 1.0,
            perf_trace,
            seeds,
            trace,
        });
    }

    let max_ticks = cfg.max_ticks();
    while world.ticks < max_ticks {
        let ego_pose = Pose2D::new(world.ego.pos.x, world.ego.pos.y, world.ego.heading);
        let ped_states = world.ped_states();
        let scan = raycast_scan(grid, ego_pose, &ped_states, cfg.bearings, cfg.r_max);

        // local goal from the gap pipeline, the plan goal, or the global goal
        let mut waypoint = None;
        let local_goal = match &plan {
            Some(plan) => {
                let plan_goal = extract_plan_goal(plan, ego_pose, cfg.r_max)?;
                let raw = detect_gaps(&scan, cfg.r_robot);
                let simp = simplify_gaps(&scan, &raw, cfg.r_robot);
                let manip = manipulate_gaps(&scan, &simp, cfg.r_robot);
                let candidates =
                    place_waypoints(&manip, plan_goal, ego_pose, &scan, &cfg.weights);
                match select_waypoint(&candidates, plan_goal, &scan, &cfg.weights) {
                    Ok(w) => {
                        waypoint = Some(w.position);
                        w.position
                    }
                    Err(_) => plan_goal.position(),
                }
            }
            None => goal.position(),
        };
        world.ego.local_goal = local_goal;

        // observable others within sensor range, with filtered velocities
        let mut others = Vec::new();
        for (i, state) in ped_states.iter().enumerate() {
            trackers[i] = kalman_estimate(&trackers[i], state.pos, cfg.dt);
            if state.pos.dist(world.ego.pos) <= cfg.r_max {
                others.push(ObservedAgent {
                    pos: state.pos,
                    vel: trackers[i].velocity(),
                    radius: state.radius,
                });
            }
        }
        let input = PolicyInput::new(world.ego, others);
        let cmd = policy.act(&input);
        let outcome = step_world(&mut world, cmd, cfg);

        let g_min = min_clearance(grid, &[], &world.ego, false);
        let ped_states = world.ped_states();
        let d_min = min_clearance(grid, &ped_states, &world.ego, true);
        let reached = at_goal(world.ego.pos);
        // flush wall contact never penetrates; mark it as onset so the wall
        // case of the score fires
        let g_eff = if outcome.wall_contact { g_min.min(-1e-9) } else { g_min };
        let perf = perf_step(&PerfInputs::new(reached, g_eff, d_min));
        perf_trace.push(perf);
        records.push(StepRecord {
            g_min_static: g_eff,
            d_min_dynamic: d_min,
            wall_contact: outcome.wall_contact,
        });
        if let Some(tr) = trace.as_mut() {
            tr.push(TraceStep {
                t: world.time(),
                x: world.ego.pos.x,
                y: world.ego.pos.y,
                heading: world.ego.heading,
                perf,
                waypoint: waypoint.map(|w| [w.x, w.y]),
            });
        }

        if reached {
            success = true;
            break;
        }
        if cfg.wall_terminal && outcome.wall_contact {
            break;
        }
    }

    let duration = (world.ticks as f64 * cfg.dt).min(cfg.time_limit);
    let mean_perf = episode_perf(&perf_trace)?;
    Ok(EpisodeResult {
        success,
        duration,
        collisions: count_collision_events(&records, cfg),
        perf_trace,
        mean_perf,
        seeds,
        trace,
    })
}
