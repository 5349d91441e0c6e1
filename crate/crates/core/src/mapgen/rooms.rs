//! Room placement, connectivity, and corridor routing.
//!
//! Rooms are placed one per leaf of a seeded BSP partition of the interior.
//! Leaf margins are sized for the *maximum* corridor width, so the layout
//! for a given seed does not depend on `room_size` or `corridor_width`;
//! varying either knob only rescales rooms / corridor slabs in place. That
//! is what makes the monotone-geometry contracts hold exactly.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rng;
use crate::world::Vec2;

use super::{Convexity, MapParams, Room, CORRIDOR_WIDTH_RANGE, ROOM_DIM_RANGE};

/// Margin kept between a room and its BSP leaf boundary. Adjacent rooms end
/// up separated by at least twice this, which leaves space for the widest
/// corridor plus a wall cell.
fn leaf_margin() -> f64 {
    CORRIDOR_WIDTH_RANGE.1 / 2.0 + 0.1
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    min: Vec2,
    max: Vec2,
}

impl Rect {
    fn size(&self) -> Vec2 {
        self.max - self.min
    }
}

pub fn place_rooms(params: &MapParams) -> Result<Vec<Room>> {
    let margin = leaf_margin();
    let min_leaf = ROOM_DIM_RANGE.0 + 2.0 * margin;
    let inset = params.resolution * 2.0;
    let interior = Rect {
        min: Vec2::new(inset, inset),
        max: Vec2::new(params.world_extent - inset, params.world_extent - inset),
    };
    if interior.size().x < min_leaf || interior.size().y < min_leaf {
        return Err(Error::PackingFailure(format!(
            "world extent {} cannot hold a single {:.1} m leaf",
            params.world_extent, min_leaf
        )));
    }

    let mut rng = rng::stream(params.seed, "mapgen-bsp", 0);
    let mut leaves = vec![interior];
    while leaves.len() < params.room_number as usize {
        // split the leaf with the longest side that still admits two
        // children of at least min_leaf
        let mut candidates: Vec<usize> = (0..leaves.len()).collect();
        candidates.sort_by(|&a, &b| {
            let la = leaves[a].size().x.max(leaves[a].size().y);
            let lb = leaves[b].size().x.max(leaves[b].size().y);
            lb.partial_cmp(&la).unwrap().then(a.cmp(&b))
        });
        let mut split_done = false;
        for idx in candidates {
            let leaf = leaves[idx];
            let size = leaf.size();
            let along_x = size.x >= size.y;
            let len = if along_x { size.x } else { size.y };
            if len < 2.0 * min_leaf {
                continue;
            }
            let frac = rng.gen_range(0.4..0.6);
            let cut = (len * frac).clamp(min_leaf, len - min_leaf);
            let (a, b) = if along_x {
                (
                    Rect { min: leaf.min, max: Vec2::new(leaf.min.x + cut, leaf.max.y) },
                    Rect { min: Vec2::new(leaf.min.x + cut, leaf.min.y), max: leaf.max },
                )
            } else {
                (
                    Rect { min: leaf.min, max: Vec2::new(leaf.max.x, leaf.min.y + cut) },
                    Rect { min: Vec2::new(leaf.min.x, leaf.min.y + cut), max: leaf.max },
                )
            };
            leaves[idx] = a;
            leaves.push(b);
            split_done = true;
            break;
        }
        if !split_done {
            return Err(Error::PackingFailure(format!(
                "cannot partition {}x{} m into {} rooms (min leaf {:.1} m)",
                params.world_extent, params.world_extent, params.room_number, min_leaf
            )));
        }
    }

    // One room per leaf. Target dimensions scale with room_size; the leaf
    // caps them when it is too small.
    let (dim_lo, dim_hi) = ROOM_DIM_RANGE;
    let rooms = leaves
        .iter()
        .map(|leaf| {
            let inner = Rect {
                min: leaf.min + Vec2::new(margin, margin),
                max: leaf.max - Vec2::new(margin, margin),
            };
            let avail = inner.size();
            let u_w: f64 = rng.gen_range(0.5..1.0);
            let u_h: f64 = rng.gen_range(0.5..1.0);
            let t_x: f64 = rng.gen();
            let t_y: f64 = rng.gen();
            let w = (dim_lo + (dim_hi - dim_lo) * params.room_size * u_w).min(avail.x);
            let h = (dim_lo + (dim_hi - dim_lo) * params.room_size * u_h).min(avail.y);
            let min = Vec2::new(
                inner.min.x + t_x * (avail.x - w),
                inner.min.y + t_y * (avail.y - h),
            );
            Room { min, max: min + Vec2::new(w, h) }
        })
        .collect();
    Ok(rooms)
}

/// Spanning tree over room centers (Prim on jitter-weighted distances) plus
/// floor(n/4) extra short edges for loops.
pub fn connect_rooms(params: &MapParams, rooms: &[Room]) -> Vec<(usize, usize)> {
    let n = rooms.len();
    let mut rng = rng::stream(params.seed, "mapgen-connect", 0);
    let mut weight = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rooms[i].center().dist(rooms[j].center()) * rng.gen_range(0.85..1.15);
            weight[i][j] = w;
            weight[j][i] = w;
        }
    }

    let mut in_tree = vec![false; n];
    in_tree[0] = true;
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n - 1);
    for _ in 1..n {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            if !in_tree[i] {
                continue;
            }
            for j in 0..n {
                if in_tree[j] {
                    continue;
                }
                let cand = (weight[i][j], i, j);
                if best.map_or(true, |b| cand.0 < b.0 || (cand.0 == b.0 && (cand.1, cand.2) < (b.1, b.2))) {
                    best = Some(cand);
                }
            }
        }
        let (_, i, j) = best.expect("graph is complete");
        in_tree[j] = true;
        edges.push((i.min(j), i.max(j)));
    }

    let extras = n / 4;
    if extras > 0 {
        let mut non_tree: Vec<(f64, usize, usize)> = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if !edges.contains(&(i, j)) {
                    non_tree.push((weight[i][j], i, j));
                }
            }
        }
        non_tree.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then((a.1, a.2).cmp(&(b.1, b.2))));
        for &(_, i, j) in non_tree.iter().take(extras) {
            edges.push((i, j));
        }
    }
    edges
}

/// Axis-aligned polyline from `a` to `b` with the bend budget implied by
/// `convexity`: an alternating staircase whose chunk sizes carry seeded
/// jitter. Returns at least `[a, b]`.
pub fn route_corridor(a: Vec2, b: Vec2, convexity: Convexity, rng: &mut ChaCha8Rng) -> Vec<Vec2> {
    let d = b - a;
    let bends = convexity.max_bends();
    // aligned centers route straight regardless of style
    if d.x.abs() < 1e-9 || d.y.abs() < 1e-9 {
        return vec![a, b];
    }
    let nseg = bends + 1;
    let along_x_first = d.x.abs() >= d.y.abs();
    let (n_first, n_second) = (nseg - nseg / 2, nseg / 2);
    let chunks = |total: f64, count: usize, rng: &mut ChaCha8Rng| -> Vec<f64> {
        if count == 0 {
            return Vec::new();
        }
        let raw: Vec<f64> = (0..count).map(|_| rng.gen_range(0.6..1.4)).collect();
        let sum: f64 = raw.iter().sum();
        raw.into_iter().map(|u| total * u / sum).collect()
    };
    let (first_total, second_total) = if along_x_first { (d.x, d.y) } else { (d.y, d.x) };
    let first = chunks(first_total, n_first, rng);
    let second = chunks(second_total, n_second, rng);

    let mut points = vec![a];
    let mut cur = a;
    let (mut fi, mut si) = (0usize, 0usize);
    for k in 0..nseg {
        let first_axis_turn = k % 2 == 0;
        let step = if first_axis_turn {
            let v = first[fi];
            fi += 1;
            if along_x_first { Vec2::new(v, 0.0) } else { Vec2::new(0.0, v) }
        } else {
            let v = second[si];
            si += 1;
            if along_x_first { Vec2::new(0.0, v) } else { Vec2::new(v, 0.0) }
        };
        cur = cur + step;
        points.push(cur);
    }
    // kill accumulated float drift on the final vertex
    *points.last_mut().unwrap() = b;
    points
}
