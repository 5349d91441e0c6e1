//! The seven environment variables, their advisory ranges, difficulty
//! directions, and the assembled per-episode environment configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapgen::{Convexity, MapParams};
use crate::pedsim::PedParams;

/// The seven generation knobs, in the fixed tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableName {
    RoomNumber,
    RoomSize,
    CorridorWidth,
    Convexity,
    PedCount,
    PedSpeed,
    PedPolicy,
}

impl VariableName {
    pub const ALL: [VariableName; 7] = [
        VariableName::RoomNumber,
        VariableName::RoomSize,
        VariableName::CorridorWidth,
        VariableName::Convexity,
        VariableName::PedCount,
        VariableName::PedSpeed,
        VariableName::PedPolicy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VariableName::RoomNumber => "room_number",
            VariableName::RoomSize => "room_size",
            VariableName::CorridorWidth => "corridor_width",
            VariableName::Convexity => "convexity",
            VariableName::PedCount => "ped_count",
            VariableName::PedSpeed => "ped_speed",
            VariableName::PedPolicy => "ped_policy",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        VariableName::ALL
            .iter()
            .copied()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::MissingVariable(s.to_string()))
    }

    /// Position in the fixed order (tie-break key).
    pub fn index(self) -> usize {
        VariableName::ALL.iter().position(|v| *v == self).unwrap()
    }

    /// Advisory (min, max) range in physical units. Convexity uses its
    /// level index 0..4 as the axis.
    pub fn advisory_range(self) -> (f64, f64) {
        match self {
            VariableName::RoomNumber => (0.0, 4.0),
            VariableName::RoomSize => (0.5, 1.0),
            VariableName::CorridorWidth => (0.5, 1.0),
            VariableName::Convexity => (0.0, 4.0),
            VariableName::PedCount => (10.0, 18.0),
            VariableName::PedSpeed => (1.0, 2.0),
            VariableName::PedPolicy => (0.0, 0.8),
        }
    }

    /// (easiest, hardest) endpoints. Room size and corridor width are
    /// easiest at their max (big rooms, wide corridors); everything else
    /// is easiest at its min.
    pub fn difficulty_endpoints(self) -> (f64, f64) {
        let (lo, hi) = self.advisory_range();
        match self {
            VariableName::RoomSize | VariableName::CorridorWidth => (hi, lo),
            _ => (lo, hi),
        }
    }

    /// Physical value at difficulty fraction `f` (0 = easiest, 1 = hardest).
    pub fn value_at_difficulty(self, f: f64) -> f64 {
        let (easy, hard) = self.difficulty_endpoints();
        easy + (hard - easy) * f.clamp(0.0, 1.0)
    }
}

impl std::fmt::Display for VariableName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One concrete environment configuration, as raw variable values. Values
/// stay unquantized here; conversion to generator parameters rounds and
/// clamps (room_number to at least one room).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub room_number: f64,
    pub room_size: f64,
    pub corridor_width: f64,
    /// convexity level index on the [0, 4] axis over [1, 2, 3, 4, inf]
    pub convexity: f64,
    pub ped_count: f64,
    pub ped_speed: f64,
    pub ped_policy: f64,
}

impl EnvConfig {
    /// Every variable at the midpoint of its advisory range.
    pub fn baseline() -> Self {
        let mid = |v: VariableName| {
            let (lo, hi) = v.advisory_range();
            (lo + hi) / 2.0
        };
        EnvConfig {
            room_number: mid(VariableName::RoomNumber),
            room_size: mid(VariableName::RoomSize),
            corridor_width: mid(VariableName::CorridorWidth),
            convexity: mid(VariableName::Convexity),
            ped_count: mid(VariableName::PedCount),
            ped_speed: mid(VariableName::PedSpeed),
            ped_policy: mid(VariableName::PedPolicy),
        }
    }

    pub fn get(&self, v: VariableName) -> f64 {
        match v {
            VariableName::RoomNumber => self.room_number,
            VariableName::RoomSize => self.room_size,
            VariableName::CorridorWidth => self.corridor_width,
            VariableName::Convexity => self.convexity,
            VariableName::PedCount => self.ped_count,
            VariableName::PedSpeed => self.ped_speed,
            VariableName::PedPolicy => self.ped_policy,
        }
    }

    pub fn set(&mut self, v: VariableName, value: f64) {
        match v {
            VariableName::RoomNumber => self.room_number = value,
            VariableName::RoomSize => self.room_size = value,
            VariableName::CorridorWidth => self.corridor_width = value,
            VariableName::Convexity => self.convexity = value,
            VariableName::PedCount => self.ped_count = value,
            VariableName::PedSpeed => self.ped_speed = value,
            VariableName::PedPolicy => self.ped_policy = value,
        }
    }

    pub fn with(&self, v: VariableName, value: f64) -> Self {
        let mut c = *self;
        c.set(v, value);
        c
    }

    /// Map-generator parameters. Rooms clamp to >= 1 (a single room is the
    /// easiest static world); convexity rounds onto its five levels.
    pub fn to_map_params(&self, world_extent: f64, resolution: f64, seed: u64) -> MapParams {
        let level = (self.convexity.round() as usize).min(4);
        MapParams {
            room_number: (self.room_number.round() as i64).max(1) as u32,
            room_size: self.room_size.clamp(0.0, 1.0),
            corridor_width: self.corridor_width.clamp(0.0, 1.0),
            convexity: Convexity::LEVELS[level],
            world_extent,
            resolution,
            seed,
        }
    }

    pub fn to_ped_params(&self, seed: u64) -> PedParams {
        PedParams {
            count: self.ped_count.round().max(0.0) as u32,
            mean_speed: self.ped_speed.max(0.0),
            hard_policy_fraction: self.ped_policy.clamp(0.0, 1.0),
            seed,
        }
    }
}
