//! World stepping, perception, and scored episodes.

mod episode;
mod kalman;
mod raycast;

pub use episode::{
    count_collision_events, run_episode, EpisodeResult, SeedBundle, StepRecord, TraceStep,
};
pub use kalman::{
    kalman_estimate, VelocityEstimate, DEFAULT_MEASUREMENT_NOISE, DEFAULT_PROCESS_NOISE,
};
pub use raycast::raycast_scan;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nav::CostWeights;
use crate::pedsim::{advance_pedestrian, PedPolicy};
use crate::world::{
    min_clearance, nearest_wall_distance, AgentState, Command, OccupancyGrid, Pose2D, Vec2,
};

/// Everything an episode needs beyond the map and the policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub bearings: usize,
    pub r_max: f64,
    pub r_robot: f64,
    pub v_pref: f64,
    pub time_limit: f64,
    pub goal_radius: f64,
    /// max ego heading change, rad/s
    pub turn_rate: f64,
    /// wall contact ends the episode when set; otherwise the ego slides
    pub wall_terminal: bool,
    pub use_waypoint_planner: bool,
    /// planner inflation beyond the robot radius
    pub inflation_margin: f64,
    pub kalman_q: f64,
    pub kalman_r: f64,
    /// clearance below which a wall contact interval counts as a collision
    pub wall_collision_threshold: f64,
    /// clearance below which a pedestrian interval counts as a collision
    pub ped_collision_threshold: f64,
    pub weights: CostWeights,
    /// record a per-step trace for replay/plotting
    pub record_trace: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 0.1,
            bearings: 360,
            r_max: 5.0,
            r_robot: 0.2,
            v_pref: 1.0,
            time_limit: 30.0,
            goal_radius: 0.3,
            turn_rate: std::f64::consts::TAU,
            wall_terminal: false,
            use_waypoint_planner: true,
            inflation_margin: 0.05,
            kalman_q: kalman::DEFAULT_PROCESS_NOISE,
            kalman_r: kalman::DEFAULT_MEASUREMENT_NOISE,
            wall_collision_threshold: 0.0,
            ped_collision_threshold: 0.05,
            weights: CostWeights::default(),
            record_trace: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.dt > 0.0
            && self.bearings > 0
            && self.r_max > 0.0
            && self.r_robot > 0.0
            && self.v_pref > 0.0
            && self.time_limit >= 0.0
            && self.goal_radius > 0.0
            && self.turn_rate > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config("non-positive simulation constant".into()))
        }
    }

    pub fn max_ticks(&self) -> u64 {
        (self.time_limit / self.dt + 1e-9).floor() as u64
    }
}

/// The full mutable simulation state. Time is tick-counted so it stays an
/// exact multiple of dt.
#[derive(Debug, Clone)]
pub struct WorldState<'a> {
    pub grid: &'a OccupancyGrid,
    pub ego: AgentState,
    pub pedestrians: Vec<(AgentState, PedPolicy)>,
    pub ticks: u64,
    pub dt: f64,
}

impl<'a> WorldState<'a> {
    pub fn time(&self) -> f64 {
        self.ticks as f64 * self.dt
    }

    pub fn ped_states(&self) -> Vec<AgentState> {
        self.pedestrians.iter().map(|(s, _)| *s).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub wall_contact: bool,
}

/// Advance the ego toward `dir` by `dist`, stopping flush at walls.
/// Sub-steps only engage when the wall clearance cannot certify the whole
/// move (clearance is 1-Lipschitz, so `clearance >= dist` is safe).
fn advance_with_walls(
    grid: &OccupancyGrid,
    start: Vec2,
    radius: f64,
    dir: Vec2,
    dist: f64,
) -> (Vec2, bool) {
    let probe = AgentState::new(start, radius, 1.0, 0.0);
    let clear = min_clearance(grid, &[], &probe, false);
    if clear >= dist {
        return (start + dir * dist, false);
    }
    const SUB_STEP: f64 = 0.01;
    let mut p = start;
    let mut travelled = 0.0;
    while travelled < dist - 1e-12 {
        let step = (dist - travelled).min(SUB_STEP);
        let cand = p + dir * step;
        let probe = AgentState::new(cand, radius, 1.0, 0.0);
        if min_clearance(grid, &[], &probe, false) < 0.0 {
            return (p, true);
        }
        p = cand;
        travelled += step;
    }
    (p, false)
}

/// Snap a pose to the nearest cell center where a disc of `radius` fits.
/// Path endpoints come from cell geometry (room corners, centers) and can
/// sit closer to a wall than the robot radius; episodes need standable
/// endpoints. Deterministic outward ring search; identity when already
/// feasible.
pub fn nudge_to_feasible(grid: &OccupancyGrid, pose: Pose2D, radius: f64) -> Pose2D {
    if nearest_wall_distance(grid, pose.position()) >= radius {
        return pose;
    }
    let (pcx, pcy) = grid.world_to_cell(pose.position());
    let max_ring = grid.width_cells().max(grid.height_cells()) as i64;
    for ring in 0..max_ring {
        let mut best: Option<(f64, Vec2)> = None;
        let mut visit = |cx: i64, cy: i64| {
            if !grid.cell_is_free(cx, cy) {
                return;
            }
            let c = grid.cell_center(cx as usize, cy as usize);
            if nearest_wall_distance(grid, c) >= radius {
                let d = c.dist(pose.position());
                if best.map_or(true, |(bd, _)| d < bd) {
                    best = Some((d, c));
                }
            }
        };
        if ring == 0 {
            visit(pcx, pcy);
        } else {
            for dx in -ring..=ring {
                visit(pcx + dx, pcy - ring);
                visit(pcx + dx, pcy + ring);
            }
            for dy in (-ring + 1)..=(ring - 1) {
                visit(pcx - ring, pcy + dy);
                visit(pcx + ring, pcy + dy);
            }
        }
        if let Some((_, c)) = best {
            return Pose2D::new(c.x, c.y, pose.heading);
        }
    }
    pose
}

/// One simulation step: rate-limit the ego heading, clamp speed to v_pref,
/// advance with wall sliding, then advance every pedestrian open-loop.
pub fn step_world(world: &mut WorldState<'_>, cmd: Command, cfg: &SimConfig) -> StepOutcome {
    let dt = world.dt;
    let max_turn = cfg.turn_rate * dt;
    let delta = crate::world::wrap_angle(cmd.heading - world.ego.heading);
    let heading = crate::world::wrap_angle(world.ego.heading + delta.clamp(-max_turn, max_turn));
    let speed = cmd.speed.clamp(0.0, world.ego.v_pref);

    let old = world.ego.pos;
    let (new_pos, wall_contact) =
        advance_with_walls(world.grid, old, world.ego.radius, Vec2::from_angle(heading), speed * dt);
    world.ego.pos = new_pos;
    world.ego.vel = (new_pos - old) / dt;
    world.ego.heading = heading;

    let t = world.time();
    for (state, policy) in world.pedestrians.iter_mut() {
        advance_pedestrian(world.grid, state, policy, t, dt);
    }
    world.ticks += 1;
    StepOutcome { wall_contact }
}
