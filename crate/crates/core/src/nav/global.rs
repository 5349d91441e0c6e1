//! Global grid planner: exact euclidean obstacle inflation followed by
//! 8-connected A* with sqrt(2) diagonals and deterministic tie-breaking.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::world::{Cell, OccupancyGrid, Pose2D, Vec2};

/// Occupancy after inflating obstacles by a metric radius. Derived once per
/// (grid, radius) and reused by the planner and its oracles.
#[derive(Debug, Clone)]
pub struct InflatedGrid {
    width: usize,
    height: usize,
    resolution: f64,
    origin: Vec2,
    blocked: Vec<bool>,
}

impl InflatedGrid {
    /// Cells whose center lies within `radius` of any occupied cell center
    /// become blocked. Exact squared euclidean distance transform
    /// (per-column scan + per-row parabola envelope).
    pub fn from_grid(grid: &OccupancyGrid, radius: f64) -> Self {
        let (w, h) = (grid.width_cells(), grid.height_cells());
        let inf = f64::INFINITY;

        // per-column: squared distance to nearest occupied cell in the column
        let mut col_sq = vec![inf; w * h];
        for cx in 0..w {
            let mut last: Option<i64> = None;
            for cy in 0..h {
                if grid.cell(cx, cy) == Cell::Occupied {
                    last = Some(cy as i64);
                    col_sq[cy * w + cx] = 0.0;
                } else if let Some(o) = last {
                    let d = cy as i64 - o;
                    col_sq[cy * w + cx] = (d * d) as f64;
                }
            }
            last = None;
            for cy in (0..h).rev() {
                if grid.cell(cx, cy) == Cell::Occupied {
                    last = Some(cy as i64);
                } else if let Some(o) = last {
                    let d = o - cy as i64;
                    let v = (d * d) as f64;
                    if v < col_sq[cy * w + cx] {
                        col_sq[cy * w + cx] = v;
                    }
                }
            }
        }

        // The boundary ring is always occupied, so every column has a finite
        // distance and the envelope never sees infinities.
        debug_assert!(col_sq.iter().all(|v| v.is_finite()));

        // per-row lower envelope of parabolas rooted at (x', col_sq[x'])
        let mut dist_sq = vec![0.0f64; w * h];
        let mut v = vec![0usize; w];
        let mut z = vec![0.0f64; w + 1];
        for cy in 0..h {
            let f = |x: usize| col_sq[cy * w + x];
            let mut k = 0usize;
            v[0] = 0;
            z[0] = -inf;
            z[1] = inf;
            for q in 1..w {
                let mut s;
                loop {
                    let p = v[k];
                    s = ((f(q) + (q * q) as f64) - (f(p) + (p * p) as f64))
                        / (2.0 * (q as f64 - p as f64));
                    if s <= z[k] {
                        k -= 1;
                    } else {
                        break;
                    }
                }
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = inf;
            }
            let mut k = 0usize;
            for q in 0..w {
                while z[k + 1] < q as f64 {
                    k += 1;
                }
                let p = v[k];
                let dx = q as f64 - p as f64;
                dist_sq[cy * w + q] = dx * dx + f(p);
            }
        }

        let r_cells_sq = (radius / grid.resolution()).powi(2);
        let blocked = (0..w * h).map(|i| dist_sq[i] <= r_cells_sq + 1e-12).collect();
        InflatedGrid {
            width: w,
            height: h,
            resolution: grid.resolution(),
            origin: grid.origin(),
            blocked,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn is_blocked(&self, cx: i64, cy: i64) -> bool {
        if cx < 0 || cy < 0 || cx as usize >= self.width || cy as usize >= self.height {
            return true;
        }
        self.blocked[cy as usize * self.width + cx as usize]
    }

    pub fn world_to_cell(&self, p: Vec2) -> (i64, i64) {
        (
            ((p.x - self.origin.x) / self.resolution).floor() as i64,
            ((p.y - self.origin.y) / self.resolution).floor() as i64,
        )
    }

    pub fn cell_center(&self, cx: usize, cy: usize) -> Vec2 {
        Vec2::new(
            self.origin.x + (cx as f64 + 0.5) * self.resolution,
            self.origin.y + (cy as f64 + 0.5) * self.resolution,
        )
    }
}

/// A cell path from start to goal with its exact step composition.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalPlan {
    pub poses: Vec<Pose2D>,
    pub straight_steps: u32,
    pub diagonal_steps: u32,
    pub resolution: f64,
}

impl GlobalPlan {
    /// Total metric length: (straight + sqrt(2) * diagonal) * resolution.
    pub fn length(&self) -> f64 {
        (self.straight_steps as f64 + self.diagonal_steps as f64 * std::f64::consts::SQRT_2)
            * self.resolution
    }
}

const NEIGHBORS: [(i64, i64); 8] =
    [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

fn octile(a: (i64, i64), b: (i64, i64)) -> f64 {
    let dx = (a.0 - b.0).abs() as f64;
    let dy = (a.1 - b.1).abs() as f64;
    dx.max(dy) + (std::f64::consts::SQRT_2 - 1.0) * dx.min(dy)
}

/// Shortest 8-connected path on the inflated grid. `inflation_radius` is
/// the total metric inflation (robot radius plus any safety margin).
/// Diagonal moves are disallowed when either adjacent cardinal is blocked.
/// Ties break on (f, h, cell index).
pub fn plan_global(
    grid: &OccupancyGrid,
    start: Pose2D,
    goal: Pose2D,
    inflation_radius: f64,
) -> Result<GlobalPlan> {
    let inflated = InflatedGrid::from_grid(grid, inflation_radius);
    plan_on_inflated(&inflated, start, goal)
}

/// Planner core, callable with a pre-built inflated grid.
pub fn plan_on_inflated(
    inflated: &InflatedGrid,
    start: Pose2D,
    goal: Pose2D,
) -> Result<GlobalPlan> {
    let w = inflated.width();
    let start_c = inflated.world_to_cell(start.position());
    let goal_c = inflated.world_to_cell(goal.position());
    if inflated.is_blocked(start_c.0, start_c.1) || inflated.is_blocked(goal_c.0, goal_c.1) {
        return Err(Error::NoPath);
    }
    let idx = |c: (i64, i64)| c.1 as usize * w + c.0 as usize;
    let goal_idx = idx(goal_c);

    let mut g: Vec<Option<(u32, u32)>> = vec![None; w * inflated.height()];
    let mut parent: Vec<usize> = vec![usize::MAX; w * inflated.height()];
    let cost = |s: u32, d: u32| s as f64 + d as f64 * std::f64::consts::SQRT_2;

    let mut heap: BinaryHeap<Reverse<(u64, u64, usize)>> = BinaryHeap::new();
    g[idx(start_c)] = Some((0, 0));
    let h0 = octile(start_c, goal_c);
    heap.push(Reverse((h0.to_bits(), h0.to_bits(), idx(start_c))));

    while let Some(Reverse((fbits, _, cur))) = heap.pop() {
        let (s, d) = g[cur].expect("queued node has a g-score");
        let cur_c = ((cur % w) as i64, (cur / w) as i64);
        let f_now = cost(s, d) + octile(cur_c, goal_c);
        if f_now.to_bits() != fbits {
            continue; // stale heap entry
        }
        if cur == goal_idx {
            return Ok(reconstruct(inflated, &parent, start_c, goal_c, (s, d), start, goal));
        }
        for (dx, dy) in NEIGHBORS {
            let n = (cur_c.0 + dx, cur_c.1 + dy);
            if inflated.is_blocked(n.0, n.1) {
                continue;
            }
            let diagonal = dx != 0 && dy != 0;
            if diagonal
                && (inflated.is_blocked(cur_c.0 + dx, cur_c.1)
                    || inflated.is_blocked(cur_c.0, cur_c.1 + dy))
            {
                continue;
            }
            let (ns, nd) = if diagonal { (s, d + 1) } else { (s + 1, d) };
            let nidx = idx(n);
            let better = match g[nidx] {
                None => true,
                Some((os, od)) => cost(ns, nd) < cost(os, od),
            };
            if better {
                g[nidx] = Some((ns, nd));
                parent[nidx] = cur;
                let h = octile(n, goal_c);
                let f = cost(ns, nd) + h;
                heap.push(Reverse((f.to_bits(), h.to_bits(), nidx)));
            }
        }
    }
    Err(Error::NoPath)
}

fn reconstruct(
    inflated: &InflatedGrid,
    parent: &[usize],
    start_c: (i64, i64),
    goal_c: (i64, i64),
    steps: (u32, u32),
    start: Pose2D,
    goal: Pose2D,
) -> GlobalPlan {
    let w = inflated.width();
    let mut cells = vec![goal_c];
    let mut cur = goal_c.1 as usize * w + goal_c.0 as usize;
    let start_idx = start_c.1 as usize * w + start_c.0 as usize;
    while cur != start_idx {
        cur = parent[cur];
        cells.push(((cur % w) as i64, (cur / w) as i64));
    }
    cells.reverse();
    let n = cells.len();
    let poses: Vec<Pose2D> = cells
        .iter()
        .enumerate()
        .map(|(i, &(cx, cy))| {
            let p = inflated.cell_center(cx as usize, cy as usize);
            let heading = if i + 1 < n {
                let q = inflated.cell_center(cells[i + 1].0 as usize, cells[i + 1].1 as usize);
                (q - p).angle()
            } else if n >= 2 {
                let q = inflated.cell_center(cells[i - 1].0 as usize, cells[i - 1].1 as usize);
                (p - q).angle()
            } else {
                (goal.position() - start.position()).angle()
            };
            Pose2D::new(p.x, p.y, heading)
        })
        .collect();
    GlobalPlan {
        poses,
        straight_steps: steps.0,
        diagonal_steps: steps.1,
        resolution: inflated.resolution,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty(w: usize, h: usize) -> OccupancyGrid {
        OccupancyGrid::closed(w, h, 0.1, Vec2::ZERO).unwrap()
    }

    /// Uniform-cost search over the same inflated grid with the same
    /// neighbor rule; returns exact (straight, diagonal) step counts.
    pub(super) fn bfs_oracle(
        inflated: &InflatedGrid,
        start: (i64, i64),
        goal: (i64, i64),
    ) -> Option<(u32, u32)> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;
        let w = inflated.width();
        if inflated.is_blocked(start.0, start.1) || inflated.is_blocked(goal.0, goal.1) {
            return None;
        }
        let mut dist: Vec<Option<(u32, u32)>> = vec![None; w * inflated.height()];
        let cost = |sd: (u32, u32)| sd.0 as f64 + sd.1 as f64 * std::f64::consts::SQRT_2;
        let mut heap = BinaryHeap::new();
        dist[start.1 as usize * w + start.0 as usize] = Some((0, 0));
        heap.push(Reverse((0u64, (start.0, start.1))));
        while let Some(Reverse((key, c))) = heap.pop() {
            let sd = dist[c.1 as usize * w + c.0 as usize].unwrap();
            if cost(sd).to_bits() != key {
                continue;
            }
            for (dx, dy) in NEIGHBORS {
                let n = (c.0 + dx, c.1 + dy);
                if inflated.is_blocked(n.0, n.1) {
                    continue;
                }
                let diagonal = dx != 0 && dy != 0;
                if diagonal
                    && (inflated.is_blocked(c.0 + dx, c.1) || inflated.is_blocked(c.0, c.1 + dy))
                {
                    continue;
                }
                let nsd = if diagonal { (sd.0, sd.1 + 1) } else { (sd.0 + 1, sd.1) };
                let ni = n.1 as usize * w + n.0 as usize;
                if dist[ni].map_or(true, |o| cost(nsd) < cost(o)) {
                    dist[ni] = Some(nsd);
                    heap.push(Reverse((cost(nsd).to_bits(), n)));
                }
            }
        }
        dist[goal.1 as usize * w + goal.0 as usize]
    }

    #[test]
    fn straight_path_on_empty_grid() {
        let grid = empty(20, 20);
        // no inflation beyond a sliver so the 1-cell walls stay 1 cell
        let plan = plan_global(
            &grid,
            Pose2D::new(0.15, 0.15, 0.0),
            Pose2D::new(0.15, 0.55, 0.0),
            0.0,
        )
        .unwrap();
        assert_eq!(plan.poses.len(), 5);
        assert_eq!(plan.straight_steps, 4);
        assert_eq!(plan.diagonal_steps, 0);
        assert!((plan.length() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn sealed_goal_has_no_path() {
        let mut grid = empty(40, 40);
        // wall off a pocket around (2.0, 2.0)
        for cx in 15..25 {
            grid.set(cx, 15, Cell::Occupied);
            grid.set(cx, 25, Cell::Occupied);
        }
        for cy in 15..26 {
            grid.set(15, cy, Cell::Occupied);
            grid.set(24, cy, Cell::Occupied);
        }
        let r = plan_global(&grid, Pose2D::new(0.5, 0.5, 0.0), Pose2D::new(2.0, 2.0, 0.0), 0.0);
        assert!(matches!(r, Err(Error::NoPath)));
    }

    #[test]
    fn u_shaped_wall_matches_oracle() {
        let mut grid = empty(60, 60);
        for cy in 10..50 {
            grid.set(30, cy, Cell::Occupied);
        }
        let start = Pose2D::new(1.5, 3.0, 0.0);
        let goal = Pose2D::new(4.5, 3.0, 0.0);
        let inflation = 0.25;
        let plan = plan_global(&grid, start, goal, inflation).unwrap();
        let inflated = InflatedGrid::from_grid(&grid, inflation);
        let oracle = bfs_oracle(
            &inflated,
            inflated.world_to_cell(start.position()),
            inflated.world_to_cell(goal.position()),
        )
        .unwrap();
        assert_eq!((plan.straight_steps, plan.diagonal_steps), oracle);
    }

    #[test]
    fn optimal_on_random_generated_maps() {
        use crate::mapgen::{generate_map, longest_path, MapParams};
        for seed in 0..15 {
            let params = MapParams { room_number: 4, seed, ..MapParams::default() };
            let (grid, graph) = generate_map(&params).unwrap();
            let (start, goal) = longest_path(&grid, &graph).unwrap();
            let inflation = 0.25;
            let plan = match plan_global(&grid, start, goal, inflation) {
                Ok(p) => p,
                Err(Error::NoPath) => continue,
                Err(e) => panic!("{e}"),
            };
            let inflated = InflatedGrid::from_grid(&grid, inflation);
            let oracle = bfs_oracle(
                &inflated,
                inflated.world_to_cell(start.position()),
                inflated.world_to_cell(goal.position()),
            )
            .unwrap();
            assert_eq!((plan.straight_steps, plan.diagonal_steps), oracle, "seed {seed}");
            // contract: consecutive poses grid-adjacent, endpoints at cell centers
            for w2 in plan.poses.windows(2) {
                let d = (w2[1].position() - w2[0].position()).norm();
                assert!(d < 0.15, "non-adjacent consecutive poses");
            }
            assert!(plan.poses.first().unwrap().position().dist(start.position()) < 0.08);
            assert!(plan.poses.last().unwrap().position().dist(goal.position()) < 0.08);
        }
    }

    #[test]
    fn inflation_blocks_narrow_passages() {
        let mut grid = empty(40, 40);
        // a 3-cell-wide slit in a wall
        for cy in 1..39 {
            if !(18..21).contains(&cy) {
                grid.set(20, cy, Cell::Occupied);
            }
        }
        let start = Pose2D::new(1.0, 1.95, 0.0);
        let goal = Pose2D::new(3.0, 1.95, 0.0);
        assert!(plan_global(&grid, start, goal, 0.0).is_ok());
        // 0.3 m inflation seals a 0.3 m slit
        assert!(matches!(plan_global(&grid, start, goal, 0.3), Err(Error::NoPath)));
    }

    #[test]
    fn edt_matches_brute_force() {
        use rand::Rng;
        let mut rng = crate::rng::stream(5, "edt-test", 0);
        for _ in 0..5 {
            let mut grid = empty(30, 24);
            for _ in 0..40 {
                let cx = rng.gen_range(1..29);
                let cy = rng.gen_range(1..23);
                grid.set(cx, cy, Cell::Occupied);
            }
            let radius = rng.gen_range(0.05..0.6);
            let inflated = InflatedGrid::from_grid(&grid, radius);
            for cy in 0..24i64 {
                for cx in 0..30i64 {
                    // brute force nearest occupied center
                    let mut best = f64::INFINITY;
                    for oy in 0..24usize {
                        for ox in 0..30usize {
                            if grid.cell(ox, oy) == Cell::Occupied {
                                let d2 = ((ox as i64 - cx).pow(2) + (oy as i64 - cy).pow(2)) as f64;
                                best = best.min(d2);
                            }
                        }
                    }
                    let want = best.sqrt() * grid.resolution() <= radius + 1e-12;
                    assert_eq!(inflated.is_blocked(cx, cy), want, "cell ({cx},{cy}) r={radius}");
                }
            }
        }
    }
}
