//! Noiseless 360-degree raycasting against grid walls (DDA traversal) and
//! pedestrian discs (closed-form ray-circle intersection).

use crate::world::{AgentState, Cell, LaserScan, OccupancyGrid, Pose2D, Vec2};

/// Distance along the ray from `origin` with unit direction `dir` to the
/// first occupied cell boundary, or `r_max` if nothing is hit sooner.
fn cast_grid(grid: &OccupancyGrid, origin: Vec2, dir: Vec2, r_max: f64) -> f64 {
    let res = grid.resolution();
    let (mut cx, mut cy) = grid.world_to_cell(origin);
    if !grid.cell_is_free(cx, cy) {
        return 1e-6;
    }
    let step_x: i64 = if dir.x > 0.0 { 1 } else { -1 };
    let step_y: i64 = if dir.y > 0.0 { 1 } else { -1 };
    let next_boundary = |c: i64, step: i64, o: f64, orig: f64| -> f64 {
        let edge = o + (c + (step > 0) as i64) as f64 * res;
        edge - orig
    };
    let mut t_max_x = if dir.x.abs() < 1e-15 {
        f64::INFINITY
    } else {
        next_boundary(cx, step_x, grid.origin().x, origin.x) / dir.x
    };
    let mut t_max_y = if dir.y.abs() < 1e-15 {
        f64::INFINITY
    } else {
        next_boundary(cy, step_y, grid.origin().y, origin.y) / dir.y
    };
    let t_delta_x = if dir.x.abs() < 1e-15 { f64::INFINITY } else { res / dir.x.abs() };
    let t_delta_y = if dir.y.abs() < 1e-15 { f64::INFINITY } else { res / dir.y.abs() };

    loop {
        let t = t_max_x.min(t_max_y);
        if t > r_max {
            return r_max;
        }
        if t_max_x <= t_max_y {
            cx += step_x;
            t_max_x += t_delta_x;
        } else {
            cy += step_y;
            t_max_y += t_delta_y;
        }
        if !grid.in_bounds(cx, cy) || grid.cell(cx as usize, cy as usize) == Cell::Occupied {
            return t;
        }
    }
}

/// Smallest non-negative ray parameter hitting the disc, if any.
fn cast_circle(origin: Vec2, dir: Vec2, center: Vec2, radius: f64) -> Option<f64> {
    let oc = origin - center;
    let b = oc.dot(dir);
    let c = oc.norm_sq() - radius * radius;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let t0 = -b - sq;
    let t1 = -b + sq;
    if t0 >= 0.0 {
        Some(t0)
    } else if t1 >= 0.0 {
        Some(0.0) // origin inside the disc
    } else {
        None
    }
}

/// Exact scan from the ego pose: bearing i = heading + 2*pi*i/n; each range
/// is the nearest wall or pedestrian-disc hit, clamped to (0, r_max].
pub fn raycast_scan(
    grid: &OccupancyGrid,
    ego_pose: Pose2D,
    pedestrians: &[AgentState],
    n: usize,
    r_max: f64,
) -> LaserScan {
    let origin = ego_pose.position();
    let relevant: Vec<&AgentState> =
        pedestrians.iter().filter(|p| p.pos.dist(origin) <= r_max + p.radius).collect();
    let ranges = (0..n)
        .map(|i| {
            let bearing = ego_pose.heading + std::f64::consts::TAU * i as f64 / n as f64;
            let dir = Vec2::from_angle(bearing);
            let mut t = cast_grid(grid, origin, dir, r_max);
            for ped in &relevant {
                if let Some(tc) = cast_circle(origin, dir, ped.pos, ped.radius) {
                    if tc < t {
                        t = tc;
                    }
                }
            }
            t.clamp(1e-6, r_max)
        })
        .collect();
    LaserScan { ranges, r_max, frame_pose: ego_pose }
}
