//! Deterministic procedural generator of room/corridor worlds.
//!
//! Four knobs drive the structure: room count, room size, corridor width,
//! and convexity (corridor bend style). Identical parameters produce
//! bit-identical grids.

mod rooms;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::world::{Cell, OccupancyGrid, Pose2D, Vec2};

/// Physical range corridors clear widths map onto (meters).
pub const CORRIDOR_WIDTH_RANGE: (f64, f64) = (0.8, 2.0);
/// Physical range room linear dimensions map onto (meters).
pub const ROOM_DIM_RANGE: (f64, f64) = (2.0, 6.0);
/// Default square world side (meters).
pub const DEFAULT_WORLD_EXTENT: f64 = 20.0;
/// Default grid resolution (meters per cell).
pub const DEFAULT_RESOLUTION: f64 = 0.1;

/// Corridor bend style. 1 routes staircase zigzags; Inf allows at most one
/// 90-degree bend (straight or L). Values in between interpolate via the
/// max-bend budget `ceil(8 / k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convexity {
    K(u8),
    Inf,
}

impl Convexity {
    /// The five admitted levels, easiest corridor style first.
    pub const LEVELS: [Convexity; 5] =
        [Convexity::K(1), Convexity::K(2), Convexity::K(3), Convexity::K(4), Convexity::Inf];

    pub fn max_bends(self) -> usize {
        match self {
            Convexity::K(k) => ((8 + k as usize - 1) / k as usize).max(1),
            Convexity::Inf => 1,
        }
    }

    /// Index into [`Convexity::LEVELS`].
    pub fn level_index(self) -> usize {
        match self {
            Convexity::K(k) => (k as usize - 1).min(3),
            Convexity::Inf => 4,
        }
    }

    /// Accepts `1..4`, `inf`, and the `100` spelling some tables use.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "100" | "\u{221e}" => Ok(Convexity::Inf),
            other => match other.parse::<u8>() {
                Ok(k @ 1..=4) => Ok(Convexity::K(k)),
                _ => Err(Error::InvalidParams(format!("bad convexity {s:?}"))),
            },
        }
    }
}

impl std::fmt::Display for Convexity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Convexity::K(k) => write!(f, "{k}"),
            Convexity::Inf => write!(f, "inf"),
        }
    }
}

/// Map generation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapParams {
    pub room_number: u32,
    /// Scalar in [0, 1] scaling room linear dimensions over [`ROOM_DIM_RANGE`].
    pub room_size: f64,
    /// Scalar in [0, 1] scaling corridor clear widths over [`CORRIDOR_WIDTH_RANGE`].
    pub corridor_width: f64,
    pub convexity: Convexity,
    pub world_extent: f64,
    pub resolution: f64,
    pub seed: u64,
}

impl Default for MapParams {
    fn default() -> Self {
        MapParams {
            room_number: 4,
            room_size: 0.75,
            corridor_width: 0.75,
            convexity: Convexity::Inf,
            world_extent: DEFAULT_WORLD_EXTENT,
            resolution: DEFAULT_RESOLUTION,
            seed: 0,
        }
    }
}

impl MapParams {
    /// Physical corridor clear width in meters.
    pub fn corridor_clear_width(&self) -> f64 {
        let (lo, hi) = CORRIDOR_WIDTH_RANGE;
        lo + self.corridor_width * (hi - lo)
    }

    fn validate(&self) -> Result<()> {
        if self.room_number < 1 {
            return Err(Error::InvalidParams("room_number must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.room_size) {
            return Err(Error::InvalidParams("room_size must lie in [0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.corridor_width) {
            return Err(Error::InvalidParams("corridor_width must lie in [0, 1]".into()));
        }
        if !(self.world_extent > 0.0) || !(self.resolution > 0.0) {
            return Err(Error::InvalidParams("world_extent and resolution must be > 0".into()));
        }
        Ok(())
    }
}

/// An axis-aligned room rectangle in world meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Room {
    pub min: Vec2,
    pub max: Vec2,
}

impl Room {
    pub fn center(&self) -> Vec2 {
        (self.min + self.max) * 0.5
    }

    pub fn area(&self) -> f64 {
        (self.max.x - self.min.x) * (self.max.y - self.min.y)
    }
}

/// A corridor: an axis-aligned polyline between two room centers plus its
/// clear width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corridor {
    pub rooms: (usize, usize),
    pub polyline: Vec<Vec2>,
    pub width: f64,
}

impl Corridor {
    /// Number of 90-degree direction changes between consecutive segments.
    pub fn bend_count(&self) -> usize {
        let mut bends = 0;
        let mut prev_dir: Option<(i8, i8)> = None;
        for w in self.polyline.windows(2) {
            let d = w[1] - w[0];
            if d.norm() < 1e-12 {
                continue;
            }
            let sign = |v: f64| if v > 1e-12 { 1i8 } else if v < -1e-12 { -1 } else { 0 };
            let dir = (sign(d.x), sign(d.y));
            if let Some(p) = prev_dir {
                if p != dir {
                    bends += 1;
                }
            }
            prev_dir = Some(dir);
        }
        bends
    }

    /// True when every segment changes exactly one coordinate.
    pub fn is_axis_aligned(&self) -> bool {
        self.polyline.windows(2).all(|w| {
            let d = w[1] - w[0];
            d.x.abs() < 1e-12 || d.y.abs() < 1e-12
        })
    }
}

/// Rooms, corridors, and which room pairs they join.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomGraph {
    pub rooms: Vec<Room>,
    pub corridors: Vec<Corridor>,
    pub adjacency: Vec<(usize, usize)>,
}

/// Generate a closed world with exactly `room_number` rooms connected by
/// corridors. Pure function of `params` (including the seed).
pub fn generate_map(params: &MapParams) -> Result<(OccupancyGrid, RoomGraph)> {
    params.validate()?;
    let cells_per_side = (params.world_extent / params.resolution).round() as usize;
    let mut grid = OccupancyGrid::closed(cells_per_side, cells_per_side, params.resolution, Vec2::ZERO)?;
    // start fully occupied; rooms and corridors carve free space
    for cy in 0..cells_per_side {
        for cx in 0..cells_per_side {
            grid.set(cx, cy, Cell::Occupied);
        }
    }

    let rooms = rooms::place_rooms(params)?;
    for room in &rooms {
        carve_rect_center_in(&mut grid, room.min, room.max);
    }

    let (adjacency, corridors) = if rooms.len() >= 2 {
        let adjacency = rooms::connect_rooms(params, &rooms);
        let width = params.corridor_clear_width();
        let corridors: Vec<Corridor> = adjacency
            .iter()
            .enumerate()
            .map(|(k, &(i, j))| Corridor {
                rooms: (i, j),
                polyline: rooms::route_corridor(
                    rooms[i].center(),
                    rooms[j].center(),
                    params.convexity,
                    &mut rng::stream(params.seed, "mapgen-corridor", k as u64),
                ),
                width,
            })
            .collect();
        (adjacency, corridors)
    } else {
        (Vec::new(), Vec::new())
    };

    for corridor in &corridors {
        for seg in corridor.polyline.windows(2) {
            carve_slab(&mut grid, seg[0], seg[1], corridor.width);
        }
    }

    Ok((grid, RoomGraph { rooms, corridors, adjacency }))
}

/// Carve cells whose center lies inside [min, max).
fn carve_rect_center_in(grid: &mut OccupancyGrid, min: Vec2, max: Vec2) {
    let (cx0, cy0) = grid.world_to_cell(min);
    let (cx1, cy1) = grid.world_to_cell(max);
    for cy in cy0.max(0)..=cy1.min(grid.height_cells() as i64 - 1) {
        for cx in cx0.max(0)..=cx1.min(grid.width_cells() as i64 - 1) {
            let c = grid.cell_center(cx as usize, cy as usize);
            if c.x >= min.x && c.x < max.x && c.y >= min.y && c.y < max.y {
                grid.carve(cx as usize, cy as usize);
            }
        }
    }
}

/// Carve every cell intersecting the axis-aligned slab of width `width`
/// around segment [a, b], with square end caps. Intersection carving keeps
/// the realized clear width at least `width`.
fn carve_slab(grid: &mut OccupancyGrid, a: Vec2, b: Vec2, width: f64) {
    let h = width / 2.0;
    let min = Vec2::new(a.x.min(b.x) - h, a.y.min(b.y) - h);
    let max = Vec2::new(a.x.max(b.x) + h, a.y.max(b.y) + h);
    let (cx0, cy0) = grid.world_to_cell(min);
    let (cx1, cy1) = grid.world_to_cell(max);
    for cy in cy0.max(0)..=cy1.min(grid.height_cells() as i64 - 1) {
        for cx in cx0.max(0)..=cx1.min(grid.width_cells() as i64 - 1) {
            let (cmin, cmax) = grid.cell_rect(cx as usize, cy as usize);
            if cmin.x < max.x && cmax.x > min.x && cmin.y < max.y && cmax.y > min.y {
                grid.carve(cx as usize, cy as usize);
            }
        }
    }
}

/// Start/goal selection: the pair of room centers with maximal grid
/// shortest-path distance (8-connected, diagonal cost sqrt(2)). For a
/// single-room world, the two free cells at maximal 4-connected BFS
/// distance.
pub fn longest_path(grid: &OccupancyGrid, graph: &RoomGraph) -> Result<(Pose2D, Pose2D)> {
    let (a, b) = if graph.rooms.len() <= 1 {
        single_room_diameter(grid)?
    } else {
        let centers: Vec<(usize, usize)> = graph
            .rooms
            .iter()
            .map(|r| {
                let (cx, cy) = grid.world_to_cell(r.center());
                (cx as usize, cy as usize)
            })
            .collect();
        let mut best: Option<(f64, Vec2, Vec2)> = None;
        for i in 0..centers.len() {
            let dist = dijkstra_distances(grid, centers[i]);
            for j in (i + 1)..centers.len() {
                let idx = centers[j].1 * grid.width_cells() + centers[j].0;
                let d = dist[idx].ok_or_else(|| {
                    Error::Disconnected(format!("rooms {i} and {j} are not connected"))
                })?;
                let len = (d.0 as f64 + d.1 as f64 * std::f64::consts::SQRT_2) * grid.resolution();
                if best.as_ref().map_or(true, |(bl, _, _)| len > *bl) {
                    best = Some((len, graph.rooms[i].center(), graph.rooms[j].center()));
                }
            }
        }
        let (_, pa, pb) = best.ok_or(Error::Disconnected("no room pair".into()))?;
        (pa, pb)
    };
    let heading = (b - a).angle();
    Ok((Pose2D::new(a.x, a.y, heading), Pose2D::new(b.x, b.y, heading)))
}

fn single_room_diameter(grid: &OccupancyGrid) -> Result<(Vec2, Vec2)> {
    // all-pairs BFS over a compact free-cell subgraph
    let w = grid.width_cells();
    let free: Vec<(usize, usize)> = (0..grid.height_cells())
        .flat_map(|cy| (0..w).map(move |cx| (cx, cy)))
        .filter(|&(cx, cy)| grid.cell(cx, cy) == Cell::Free)
        .collect();
    if free.is_empty() {
        return Err(Error::Disconnected("no free cells".into()));
    }
    let mut compact = vec![u32::MAX; w * grid.height_cells()];
    for (i, &(cx, cy)) in free.iter().enumerate() {
        compact[cy * w + cx] = i as u32;
    }
    let neighbors: Vec<[u32; 4]> = free
        .iter()
        .map(|&(cx, cy)| {
            let mut n = [u32::MAX; 4];
            for (k, (dx, dy)) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)].iter().enumerate() {
                let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
                if grid.cell_is_free(nx, ny) {
                    n[k] = compact[ny as usize * w + nx as usize];
                }
            }
            n
        })
        .collect();
    let n = free.len();
    let mut best = (0u32, 0usize, 0usize);
    let mut dist = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for a in 0..n {
        dist.iter_mut().for_each(|d| *d = u32::MAX);
        dist[a] = 0;
        queue.clear();
        queue.push_back(a as u32);
        while let Some(c) = queue.pop_front() {
            let d = dist[c as usize];
            for nb in neighbors[c as usize] {
                if nb != u32::MAX && dist[nb as usize] == u32::MAX {
                    dist[nb as usize] = d + 1;
                    queue.push_back(nb);
                }
            }
        }
        for (b, d) in dist.iter().enumerate() {
            if *d != u32::MAX && *d > best.0 {
                best = (*d, a, b);
            }
        }
    }
    let (acx, acy) = free[best.1];
    let (bcx, bcy) = free[best.2];
    Ok((grid.cell_center(acx, acy), grid.cell_center(bcx, bcy)))
}

/// 4-connected BFS hop counts from `start` over free cells.
pub fn bfs_hops(grid: &OccupancyGrid, start: (usize, usize)) -> Vec<Option<u32>> {
    let w = grid.width_cells();
    let mut dist = vec![None; w * grid.height_cells()];
    if grid.cell(start.0, start.1) != Cell::Free {
        return dist;
    }
    let mut queue = std::collections::VecDeque::new();
    dist[start.1 * w + start.0] = Some(0);
    queue.push_back(start);
    while let Some((cx, cy)) = queue.pop_front() {
        let d = dist[cy * w + cx].unwrap();
        for (dx, dy) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
            let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
            if grid.cell_is_free(nx, ny) && dist[ny as usize * w + nx as usize].is_none() {
                dist[ny as usize * w + nx as usize] = Some(d + 1);
                queue.push_back((nx as usize, ny as usize));
            }
        }
    }
    dist
}

/// Dijkstra over free cells, 8-connected; diagonal steps allowed only when
/// both adjacent cardinals are free (no corner cutting). Distances returned
/// as (straight, diagonal) step counts for exact arithmetic.
pub fn dijkstra_distances(grid: &OccupancyGrid, start: (usize, usize)) -> Vec<Option<(u32, u32)>> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let w = grid.width_cells();
    let mut dist: Vec<Option<(u32, u32)>> = vec![None; w * grid.height_cells()];
    if grid.cell(start.0, start.1) != Cell::Free {
        return dist;
    }
    let cost = |s: u32, d: u32| -> f64 { s as f64 + d as f64 * std::f64::consts::SQRT_2 };
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
    let start_idx = start.1 * w + start.0;
    dist[start_idx] = Some((0, 0));
    heap.push(Reverse((0, start_idx)));
    while let Some(Reverse((key, idx))) = heap.pop() {
        let (s, d) = match dist[idx] {
            Some(sd) => sd,
            None => continue,
        };
        if (cost(s, d).to_bits()) != key {
            continue; // stale entry
        }
        let (cx, cy) = ((idx % w) as i64, (idx / w) as i64);
        for (dx, dy) in
            [(1i64, 0i64), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)]
        {
            let (nx, ny) = (cx + dx, cy + dy);
            if !grid.cell_is_free(nx, ny) {
                continue;
            }
            let diagonal = dx != 0 && dy != 0;
            if diagonal && !(grid.cell_is_free(cx + dx, cy) && grid.cell_is_free(cx, cy + dy)) {
                continue;
            }
            let (ns, nd) = if diagonal { (s, d + 1) } else { (s + 1, d) };
            let nidx = ny as usize * w + nx as usize;
            let better = match dist[nidx] {
                None => true,
                Some((os, od)) => cost(ns, nd) < cost(os, od),
            };
            if better {
                dist[nidx] = Some((ns, nd));
                heap.push(Reverse((cost(ns, nd).to_bits(), nidx)));
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests;
