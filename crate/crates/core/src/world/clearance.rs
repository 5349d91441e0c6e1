//! Signed clearance queries against walls and agent discs.

use crate::world::{AgentState, Cell, OccupancyGrid, Vec2};

/// Signed distance from point `p` to the axis-aligned box [min, max].
/// Negative inside (depth to the nearest face).
fn point_box_signed(p: Vec2, min: Vec2, max: Vec2) -> f64 {
    let dx = (min.x - p.x).max(p.x - max.x);
    let dy = (min.y - p.y).max(p.y - max.y);
    if dx > 0.0 || dy > 0.0 {
        Vec2::new(dx.max(0.0), dy.max(0.0)).norm()
    } else {
        // inside: negative depth to the nearest face
        dx.max(dy)
    }
}

/// Distance from `p` to the nearest occupied cell rectangle, signed
/// (negative when `p` is inside an occupied cell).
///
/// Expanding ring search: every cell in Chebyshev ring `r` around `p`'s cell
/// is at least `(r-1) * resolution` away, so the search stops as soon as the
/// ring lower bound cannot beat the best hit. The boundary ring is always
/// occupied, so the search terminates.
pub fn nearest_wall_distance(grid: &OccupancyGrid, p: Vec2) -> f64 {
    let res = grid.resolution();
    let (pcx, pcy) = grid.world_to_cell(p);
    let mut best = f64::INFINITY;
    let max_ring = (grid.width_cells().max(grid.height_cells())) as i64 + 2;
    for ring in 0..=max_ring {
        if best.is_finite() && (ring - 1).max(0) as f64 * res >= best {
            break;
        }
        let mut visit = |cx: i64, cy: i64| {
            // out-of-bounds space counts as occupied (closed world), but the
            // boundary ring already covers it geometrically.
            if !grid.in_bounds(cx, cy) {
                return;
            }
            if grid.cell(cx as usize, cy as usize) == Cell::Occupied {
                let (min, max) = grid.cell_rect(cx as usize, cy as usize);
                let d = point_box_signed(p, min, max);
                if d < best {
                    best = d;
                }
            }
        };
        if ring == 0 {
            visit(pcx, pcy);
            continue;
        }
        for dx in -ring..=ring {
            visit(pcx + dx, pcy - ring);
            visit(pcx + dx, pcy + ring);
        }
        for dy in (-ring + 1)..=(ring - 1) {
            visit(pcx - ring, pcy + dy);
            visit(pcx + ring, pcy + dy);
        }
    }
    best
}

/// Signed clearance from the ego surface to the nearest relevant obstacle
/// surface: (distance from ego center to nearest obstacle surface) minus
/// `ego.radius`. Negative means penetration.
///
/// With `dynamic_only` set, only the other agents are considered; otherwise
/// both occupied grid cells and agents count.
pub fn min_clearance(
    grid: &OccupancyGrid,
    others: &[AgentState],
    ego: &AgentState,
    dynamic_only: bool,
) -> f64 {
    let mut surface = f64::INFINITY;
    if !dynamic_only {
        surface = nearest_wall_distance(grid, ego.pos);
    }
    for other in others {
        let d = ego.pos.dist(other.pos) - other.radius;
        if d < surface {
            surface = d;
        }
    }
    surface - ego.radius
}
