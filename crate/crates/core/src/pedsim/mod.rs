//! Pedestrian spawning and scripted motion policies.
//!
//! Pedestrians are open-loop obstacles: they never avoid anyone, and only
//! the ego is collision-scored. Hard kinds (circle walking, random walking)
//! draw their speeds around the configured mean; simple kinds move at the
//! mean exactly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::world::{AgentState, Command, OccupancyGrid, Vec2};

/// Crowd generation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PedParams {
    pub count: u32,
    pub mean_speed: f64,
    pub hard_policy_fraction: f64,
    pub seed: u64,
}

impl Default for PedParams {
    fn default() -> Self {
        PedParams { count: 14, mean_speed: 1.5, hard_policy_fraction: 0.4, seed: 0 }
    }
}

/// Motion policy of one pedestrian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PedPolicy {
    Static,
    Linear {
        velocity: Vec2,
    },
    /// Shuttle between two mutually visible endpoints; swap on arrival.
    Cycle {
        a: Vec2,
        b: Vec2,
        speed: f64,
        heading_to_b: bool,
    },
    CircleWalk {
        center: Vec2,
        radius: f64,
        /// signed rad/s
        angular_rate: f64,
    },
    /// Heading and speed re-sampled every `period` seconds from a hash of
    /// (seed, epoch, bounce nonce); wall contact bumps the nonce.
    RandomWalk {
        seed: u64,
        base_speed: f64,
        period: f64,
        bounce_nonce: u32,
    },
}

impl PedPolicy {
    pub fn is_hard(&self) -> bool {
        matches!(self, PedPolicy::CircleWalk { .. } | PedPolicy::RandomWalk { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            PedPolicy::Static => "static",
            PedPolicy::Linear { .. } => "linear",
            PedPolicy::Cycle { .. } => "cycle",
            PedPolicy::CircleWalk { .. } => "circle_walk",
            PedPolicy::RandomWalk { .. } => "random_walk",
        }
    }
}

const SPAWN_RETRIES: usize = 400;
pub const PED_RADIUS_RANGE: (f64, f64) = (0.2, 0.4);

fn rw_draw(seed: u64, epoch: u64, nonce: u32) -> (f64, f64) {
    let mut r = rng::stream(seed, "rw-epoch", epoch.wrapping_add((nonce as u64) << 40));
    let heading: f64 = r.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let factor: f64 = r.gen_range(0.5..1.5);
    (heading, factor)
}

/// Spawn exactly `params.count` pedestrians on free, pairwise-disjoint
/// discs. round(count * hard_policy_fraction) get hard kinds, split evenly
/// between circle and random walking (remainder to circle walking); the
/// rest split evenly among static / linear / cycle in that order.
pub fn spawn_pedestrians(
    grid: &OccupancyGrid,
    params: &PedParams,
) -> Result<Vec<(AgentState, PedPolicy)>> {
    let count = params.count as usize;
    let n_hard = (params.count as f64 * params.hard_policy_fraction).round() as usize;
    let n_hard = n_hard.min(count);
    let n_random = n_hard / 2;
    let n_circle = n_hard - n_random;
    let n_simple = count - n_hard;
    let base = n_simple / 3;
    let rem = n_simple % 3;
    let n_static = base + usize::from(rem >= 1);
    let n_linear = base + usize::from(rem >= 2);
    let n_cycle = base;

    #[derive(Clone, Copy, PartialEq)]
    enum Kind {
        Circle,
        Random,
        StaticK,
        LinearK,
        CycleK,
    }
    let mut kinds = Vec::with_capacity(count);
    kinds.extend(std::iter::repeat(Kind::Circle).take(n_circle));
    kinds.extend(std::iter::repeat(Kind::Random).take(n_random));
    kinds.extend(std::iter::repeat(Kind::StaticK).take(n_static));
    kinds.extend(std::iter::repeat(Kind::LinearK).take(n_linear));
    kinds.extend(std::iter::repeat(Kind::CycleK).take(n_cycle));

    let mut rng = rng::stream(params.seed, "ped-spawn", 0);
    let extent_x = grid.width_cells() as f64 * grid.resolution();
    let extent_y = grid.height_cells() as f64 * grid.resolution();
    let mut placed: Vec<(Vec2, f64)> = Vec::with_capacity(count);
    let mut out = Vec::with_capacity(count);

    for (i, kind) in kinds.into_iter().enumerate() {
        let radius = rng.gen_range(PED_RADIUS_RANGE.0..PED_RADIUS_RANGE.1);
        let mut pos = None;
        for _ in 0..SPAWN_RETRIES {
            let cand = Vec2::new(
                grid.origin().x + rng.gen_range(0.0..extent_x),
                grid.origin().y + rng.gen_range(0.0..extent_y),
            );
            let wall_ok = crate::world::min_clearance(
                grid,
                &[],
                &AgentState::new(cand, radius, 1.0, 0.0),
                false,
            ) >= 0.0;
            let ped_ok = placed.iter().all(|(p, r)| cand.dist(*p) >= radius + r);
            if wall_ok && ped_ok {
                pos = Some(cand);
                break;
            }
        }
        let pos = pos.ok_or(Error::SpawnFailure { retries: SPAWN_RETRIES })?;
        placed.push((pos, radius));

        let hard_speed = params.mean_speed * rng.gen_range(0.5..1.5);
        let heading: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let (speed, policy) = match kind {
            Kind::Circle => {
                let r_circ = rng.gen_range(1.0..3.0);
                let theta: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                (
                    hard_speed,
                    PedPolicy::CircleWalk {
                        center: pos + Vec2::from_angle(theta) * r_circ,
                        radius: r_circ,
                        angular_rate: sign * hard_speed / r_circ,
                    },
                )
            }
            Kind::Random => {
                let period = rng.gen_range(1.0..3.0);
                (
                    hard_speed,
                    PedPolicy::RandomWalk {
                        seed: rng::substream(params.seed, "ped-rw", i as u64),
                        base_speed: hard_speed,
                        period,
                        bounce_nonce: 0,
                    },
                )
            }
            Kind::StaticK => (params.mean_speed, PedPolicy::Static),
            Kind::LinearK => (
                params.mean_speed,
                PedPolicy::Linear { velocity: Vec2::from_angle(heading) * params.mean_speed },
            ),
            Kind::CycleK => {
                let b = sample_cycle_endpoint(grid, pos, &mut rng);
                (
                    params.mean_speed,
                    PedPolicy::Cycle { a: pos, b, speed: params.mean_speed, heading_to_b: true },
                )
            }
        };
        let mut state = AgentState::new(pos, radius, speed, heading);
        state.local_goal = pos;
        out.push((state, policy));
    }
    Ok(out)
}

/// A far free point with line of sight from `from`: >= 3 m away when
/// possible, otherwise the farthest visible candidate seen.
fn sample_cycle_endpoint(
    grid: &OccupancyGrid,
    from: Vec2,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vec2 {
    let extent_x = grid.width_cells() as f64 * grid.resolution();
    let extent_y = grid.height_cells() as f64 * grid.resolution();
    let mut best = from;
    let mut best_d = 0.0;
    for _ in 0..200 {
        let cand = Vec2::new(
            grid.origin().x + rng.gen_range(0.0..extent_x),
            grid.origin().y + rng.gen_range(0.0..extent_y),
        );
        if !grid.is_free(cand) || !segment_clear(grid, from, cand) {
            continue;
        }
        let d = from.dist(cand);
        if d >= 3.0 {
            return cand;
        }
        if d > best_d {
            best_d = d;
            best = cand;
        }
    }
    best
}

/// Sampled visibility check along the segment (half-resolution steps).
pub fn segment_clear(grid: &OccupancyGrid, a: Vec2, b: Vec2) -> bool {
    let d = b - a;
    let len = d.norm();
    let steps = (len / (grid.resolution() * 0.5)).ceil() as usize;
    for k in 0..=steps {
        let t = if steps == 0 { 0.0 } else { k as f64 / steps as f64 };
        if !grid.is_free(a + d * t) {
            return false;
        }
    }
    true
}

/// Pure policy step: the command a pedestrian would issue at world time `t`.
pub fn step_policy(policy: &PedPolicy, state: &AgentState, t: f64, dt: f64) -> Command {
    match policy {
        PedPolicy::Static => Command::new(0.0, state.heading),
        PedPolicy::Linear { velocity } => Command::new(velocity.norm(), velocity.angle()),
        PedPolicy::Cycle { a, b, speed, heading_to_b } => {
            let target = if *heading_to_b { *b } else { *a };
            let to = target - state.pos;
            if to.norm() < 1e-9 {
                Command::new(0.0, state.heading)
            } else {
                Command::new(*speed, to.angle())
            }
        }
        PedPolicy::CircleWalk { center, radius, angular_rate } => {
            let rel = state.pos - *center;
            let theta = if rel.norm() < 1e-9 { 0.0 } else { rel.angle() };
            let target = *center + Vec2::from_angle(theta + angular_rate * dt) * *radius;
            let chord = target - state.pos;
            Command::new(chord.norm() / dt, chord.angle())
        }
        PedPolicy::RandomWalk { seed, base_speed, period, bounce_nonce } => {
            let epoch = (t / period).floor() as u64;
            let (heading, factor) = rw_draw(*seed, epoch, *bounce_nonce);
            Command::new(base_speed * factor, heading)
        }
    }
}

/// Integrate one pedestrian by one step, handling wall contact per kind:
/// linear reflects its velocity, cycle slides, random walking re-samples,
/// circle walking passes through. Deterministic; no RNG draws.
pub fn advance_pedestrian(
    grid: &OccupancyGrid,
    state: &mut AgentState,
    policy: &mut PedPolicy,
    t: f64,
    dt: f64,
) {
    let cmd = step_policy(policy, state, t, dt);
    let old = state.pos;
    let step = Vec2::from_angle(cmd.heading) * (cmd.speed * dt);
    let proposed = old + step;

    let mut new_pos = proposed;
    match policy {
        PedPolicy::Static => {}
        PedPolicy::CircleWalk { .. } => {
            // passes through walls; the circle is fixed in the world
        }
        PedPolicy::Linear { velocity } => {
            if !grid.is_free(proposed) {
                let x_ok = grid.is_free(Vec2::new(proposed.x, old.y));
                let y_ok = grid.is_free(Vec2::new(old.x, proposed.y));
                new_pos = Vec2::new(
                    if x_ok { proposed.x } else { old.x },
                    if y_ok { proposed.y } else { old.y },
                );
                if !x_ok {
                    velocity.x = -velocity.x;
                }
                if !y_ok {
                    velocity.y = -velocity.y;
                }
            }
        }
        PedPolicy::Cycle { a, b, heading_to_b, .. } => {
            if !grid.is_free(proposed) {
                let x_ok = grid.is_free(Vec2::new(proposed.x, old.y));
                let y_ok = grid.is_free(Vec2::new(old.x, proposed.y));
                new_pos = Vec2::new(
                    if x_ok { proposed.x } else { old.x },
                    if y_ok { proposed.y } else { old.y },
                );
            }
            let target = if *heading_to_b { *b } else { *a };
            if new_pos.dist(target) <= state.radius {
                *heading_to_b = !*heading_to_b;
            }
        }
        PedPolicy::RandomWalk { bounce_nonce, .. } => {
            if !grid.is_free(proposed) {
                new_pos = old;
                *bounce_nonce = bounce_nonce.wrapping_add(1);
            }
        }
    }

    state.vel = (new_pos - old) / dt;
    state.pos = new_pos;
    state.heading = cmd.heading;
}
