//! Occupancy grid: the discretized static world.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cell {
    Free,
    Occupied,
}

/// Row-major occupancy grid. Cell (0,0) is the corner at `origin`; cell
/// (cx, cy) covers the world rectangle
/// `[origin + (cx, cy)*res, origin + (cx+1, cy+1)*res)`.
///
/// The outer boundary ring is always occupied: worlds are closed.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    width_cells: usize,
    height_cells: usize,
    resolution: f64,
    origin: Vec2,
    cells: Vec<Cell>,
}

impl OccupancyGrid {
    /// All-free interior with an occupied boundary ring.
    pub fn closed(width_cells: usize, height_cells: usize, resolution: f64, origin: Vec2) -> Result<Self> {
        if width_cells < 3 || height_cells < 3 {
            return Err(Error::InvalidParams("grid needs at least 3x3 cells".into()));
        }
        if !(resolution > 0.0) {
            return Err(Error::InvalidParams("resolution must be > 0".into()));
        }
        let mut grid = OccupancyGrid {
            width_cells,
            height_cells,
            resolution,
            origin,
            cells: vec![Cell::Free; width_cells * height_cells],
        };
        grid.seal_boundary();
        Ok(grid)
    }

    /// Build from raw cells (used by the file loader); re-seals the boundary.
    pub fn from_cells(
        width_cells: usize,
        height_cells: usize,
        resolution: f64,
        origin: Vec2,
        cells: Vec<Cell>,
    ) -> Result<Self> {
        if cells.len() != width_cells * height_cells {
            return Err(Error::InvalidParams(format!(
                "cell count {} != {}x{}",
                cells.len(),
                width_cells,
                height_cells
            )));
        }
        let mut grid = OccupancyGrid { width_cells, height_cells, resolution, origin, cells };
        if !(resolution > 0.0) {
            return Err(Error::InvalidParams("resolution must be > 0".into()));
        }
        if width_cells < 3 || height_cells < 3 {
            return Err(Error::InvalidParams("grid needs at least 3x3 cells".into()));
        }
        grid.seal_boundary();
        Ok(grid)
    }

    fn seal_boundary(&mut self) {
        let (w, h) = (self.width_cells, self.height_cells);
        for cx in 0..w {
            self.set(cx, 0, Cell::Occupied);
            self.set(cx, h - 1, Cell::Occupied);
        }
        for cy in 0..h {
            self.set(0, cy, Cell::Occupied);
            self.set(w - 1, cy, Cell::Occupied);
        }
    }

    pub fn width_cells(&self) -> usize {
        self.width_cells
    }

    pub fn height_cells(&self) -> usize {
        self.height_cells
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    #[inline]
    fn idx(&self, cx: usize, cy: usize) -> usize {
        cy * self.width_cells + cx
    }

    #[inline]
    pub fn cell(&self, cx: usize, cy: usize) -> Cell {
        self.cells[self.idx(cx, cy)]
    }

    #[inline]
    pub fn set(&mut self, cx: usize, cy: usize, v: Cell) {
        let i = self.idx(cx, cy);
        self.cells[i] = v;
    }

    /// Carve a cell free unless it lies on the boundary ring.
    pub fn carve(&mut self, cx: usize, cy: usize) {
        if cx == 0 || cy == 0 || cx + 1 >= self.width_cells || cy + 1 >= self.height_cells {
            return;
        }
        self.set(cx, cy, Cell::Free);
    }

    #[inline]
    pub fn in_bounds(&self, cx: i64, cy: i64) -> bool {
        cx >= 0 && cy >= 0 && (cx as usize) < self.width_cells && (cy as usize) < self.height_cells
    }

    /// World point -> containing cell indices (may be out of bounds).
    pub fn world_to_cell(&self, p: Vec2) -> (i64, i64) {
        (
            ((p.x - self.origin.x) / self.resolution).floor() as i64,
            ((p.y - self.origin.y) / self.resolution).floor() as i64,
        )
    }

    /// Center of cell (cx, cy) in world coordinates.
    pub fn cell_center(&self, cx: usize, cy: usize) -> Vec2 {
        Vec2::new(
            self.origin.x + (cx as f64 + 0.5) * self.resolution,
            self.origin.y + (cy as f64 + 0.5) * self.resolution,
        )
    }

    /// World rectangle [min, max) of cell (cx, cy).
    pub fn cell_rect(&self, cx: usize, cy: usize) -> (Vec2, Vec2) {
        let min = Vec2::new(
            self.origin.x + cx as f64 * self.resolution,
            self.origin.y + cy as f64 * self.resolution,
        );
        (min, Vec2::new(min.x + self.resolution, min.y + self.resolution))
    }

    /// True iff `p` maps to an in-bounds cell flagged free. Out-of-bounds
    /// points report occupied (closed-world convention). Total function.
    pub fn is_free(&self, p: Vec2) -> bool {
        let (cx, cy) = self.world_to_cell(p);
        self.in_bounds(cx, cy) && self.cell(cx as usize, cy as usize) == Cell::Free
    }

    #[inline]
    pub fn cell_is_free(&self, cx: i64, cy: i64) -> bool {
        self.in_bounds(cx, cy) && self.cell(cx as usize, cy as usize) == Cell::Free
    }

    pub fn free_cell_count(&self) -> usize {
        self.cells.iter().filter(|c| **c == Cell::Free).count()
    }

    /// Fraction of all cells that are free.
    pub fn free_fraction(&self) -> f64 {
        self.free_cell_count() as f64 / self.cells.len() as f64
    }

    /// Flood fill (4-connected) from `seed`; returns the number of reached
    /// free cells. Equals `free_cell_count` iff the free space is connected.
    pub fn flood_fill_count(&self, seed: (usize, usize)) -> usize {
        if self.cell(seed.0, seed.1) != Cell::Free {
            return 0;
        }
        let mut seen = vec![false; self.cells.len()];
        let mut stack = vec![seed];
        seen[self.idx(seed.0, seed.1)] = true;
        let mut count = 0usize;
        while let Some((cx, cy)) = stack.pop() {
            count += 1;
            for (dx, dy) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
                if self.cell_is_free(nx, ny) && !seen[self.idx(nx as usize, ny as usize)] {
                    seen[self.idx(nx as usize, ny as usize)] = true;
                    stack.push((nx as usize, ny as usize));
                }
            }
        }
        count
    }

    /// First free cell in row-major order, if any.
    pub fn any_free_cell(&self) -> Option<(usize, usize)> {
        self.cells
            .iter()
            .position(|c| *c == Cell::Free)
            .map(|i| (i % self.width_cells, i / self.width_cells))
    }

    /// Number of 4-connected free components.
    pub fn free_component_count(&self) -> usize {
        let mut seen = vec![false; self.cells.len()];
        let mut components = 0usize;
        for start in 0..self.cells.len() {
            if self.cells[start] != Cell::Free || seen[start] {
                continue;
            }
            components += 1;
            let mut stack = vec![(start % self.width_cells, start / self.width_cells)];
            seen[start] = true;
            while let Some((cx, cy)) = stack.pop() {
                for (dx, dy) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                    let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
                    if self.cell_is_free(nx, ny) && !seen[self.idx(nx as usize, ny as usize)] {
                        seen[self.idx(nx as usize, ny as usize)] = true;
                        stack.push((nx as usize, ny as usize));
                    }
                }
            }
        }
        components
    }
}
