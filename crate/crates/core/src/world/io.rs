//! Grid persistence: a P5 grey-map raster (one byte per cell, 0 = occupied,
//! 255 = free) plus a JSON sidecar carrying resolution, origin, seed, and
//! the generation parameters. Files written by [`save_grid`] round-trip
//! bit-exactly through [`load_grid`] + [`save_grid`].

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::world::{Cell, OccupancyGrid, Vec2};

pub const GRID_FORMAT_VERSION: u32 = 1;

/// Sidecar metadata next to the raster. `params` and `room_graph` hold
/// whatever the producing stage wants to record (map generation parameters,
/// the room/corridor graph); they ride along untyped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSidecar {
    pub format_version: u32,
    pub width_cells: usize,
    pub height_cells: usize,
    pub resolution: f64,
    pub origin: [f64; 2],
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub params: Value,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub room_graph: Value,
}

impl GridSidecar {
    pub fn for_grid(grid: &OccupancyGrid, seed: u64) -> Self {
        GridSidecar {
            format_version: GRID_FORMAT_VERSION,
            width_cells: grid.width_cells(),
            height_cells: grid.height_cells(),
            resolution: grid.resolution(),
            origin: [grid.origin().x, grid.origin().y],
            seed,
            params: Value::Null,
            room_graph: Value::Null,
        }
    }
}

/// Serialize the raster: header `P5\n<w> <h>\n255\n`, then rows cy = 0
/// upward, one byte per cell.
pub fn grid_to_pgm(grid: &OccupancyGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(32 + grid.cells().len());
    out.extend_from_slice(
        format!("P5\n{} {}\n255\n", grid.width_cells(), grid.height_cells()).as_bytes(),
    );
    for cell in grid.cells() {
        out.push(match cell {
            Cell::Free => 255,
            Cell::Occupied => 0,
        });
    }
    out
}

fn parse_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<Cell>)> {
    // Strict tokenizer for the canonical header; tolerates arbitrary
    // whitespace between tokens per the PGM spec.
    let mut pos = 0usize;
    let mut token = |bytes: &[u8]| -> Result<String> {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::GridFormat("truncated header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token(bytes)? != "P5" {
        return Err(Error::GridFormat("not a P5 grey-map".into()));
    }
    let w: usize =
        token(bytes)?.parse().map_err(|_| Error::GridFormat("bad width".into()))?;
    let h: usize =
        token(bytes)?.parse().map_err(|_| Error::GridFormat("bad height".into()))?;
    let maxval: usize =
        token(bytes)?.parse().map_err(|_| Error::GridFormat("bad maxval".into()))?;
    if maxval != 255 {
        return Err(Error::GridFormat(format!("unsupported maxval {maxval}")));
    }
    pos += 1; // single whitespace byte after maxval
    let data = &bytes[pos.min(bytes.len())..];
    if data.len() != w * h {
        return Err(Error::GridFormat(format!(
            "payload {} bytes, expected {}",
            data.len(),
            w * h
        )));
    }
    let cells = data
        .iter()
        .map(|b| if *b == 0 { Cell::Occupied } else { Cell::Free })
        .collect();
    Ok((w, h, cells))
}

pub fn save_grid(
    grid: &OccupancyGrid,
    sidecar: &GridSidecar,
    pgm_path: &Path,
    json_path: &Path,
) -> Result<()> {
    let mut f = fs::File::create(pgm_path)?;
    f.write_all(&grid_to_pgm(grid))?;
    let mut j = fs::File::create(json_path)?;
    j.write_all(serde_json::to_string_pretty(sidecar)?.as_bytes())?;
    j.write_all(b"\n")?;
    Ok(())
}

pub fn load_grid(pgm_path: &Path, json_path: &Path) -> Result<(OccupancyGrid, GridSidecar)> {
    let sidecar: GridSidecar = serde_json::from_str(&fs::read_to_string(json_path)?)?;
    let (w, h, cells) = parse_pgm(&fs::read(pgm_path)?)?;
    if w != sidecar.width_cells || h != sidecar.height_cells {
        return Err(Error::GridFormat(format!(
            "raster {w}x{h} disagrees with sidecar {}x{}",
            sidecar.width_cells, sidecar.height_cells
        )));
    }
    let grid = OccupancyGrid::from_cells(
        w,
        h,
        sidecar.resolution,
        Vec2::new(sidecar.origin[0], sidecar.origin[1]),
        cells,
    )?;
    Ok((grid, sidecar))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let mut grid = OccupancyGrid::closed(17, 11, 0.1, Vec2::new(-0.5, 0.25)).unwrap();
        grid.set(5, 5, Cell::Occupied);
        grid.set(9, 3, Cell::Occupied);
        let mut sidecar = GridSidecar::for_grid(&grid, 1234);
        sidecar.params = serde_json::json!({"room_number": 3, "convexity": "inf"});

        let pgm = dir.path().join("map.pgm");
        let json = dir.path().join("map.json");
        save_grid(&grid, &sidecar, &pgm, &json).unwrap();
        let bytes1 = (std::fs::read(&pgm).unwrap(), std::fs::read(&json).unwrap());

        let (grid2, sidecar2) = load_grid(&pgm, &json).unwrap();
        assert_eq!(grid, grid2);
        assert_eq!(sidecar, sidecar2);

        let pgm2 = dir.path().join("map2.pgm");
        let json2 = dir.path().join("map2.json");
        save_grid(&grid2, &sidecar2, &pgm2, &json2).unwrap();
        let bytes2 = (std::fs::read(&pgm2).unwrap(), std::fs::read(&json2).unwrap());
        assert_eq!(bytes1, bytes2);
    }

    #[test]
    fn rejects_mismatched_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let grid = OccupancyGrid::closed(8, 8, 0.1, Vec2::ZERO).unwrap();
        let mut sidecar = GridSidecar::for_grid(&grid, 0);
        sidecar.width_cells = 9;
        let pgm = dir.path().join("m.pgm");
        let json = dir.path().join("m.json");
        save_grid(&grid, &sidecar, &pgm, &json).unwrap();
        assert!(load_grid(&pgm, &json).is_err());
    }
}
