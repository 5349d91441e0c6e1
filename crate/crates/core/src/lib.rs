//! Deterministic 2D navigation laboratory.
//!
//! Everything needed to generate room/corridor worlds with pedestrian
//! crowds, run a hierarchical navigation stack through them (global grid
//! planner -> gap waypoint planner -> collision-avoidance policy), score
//! each step with a unified performance metric, rank environment variables
//! by how much they hurt a policy, and schedule an evolutionary difficulty
//! curriculum on top of that ranking.
//!
//! All randomness flows from a single 64-bit master seed through named
//! substreams (see [`rng`]), so every pipeline stage is reproducible
//! bit-for-bit.

pub mod curriculum;
pub mod env;
pub mod error;
pub mod eval;
pub mod mapgen;
pub mod nav;
pub mod pedsim;
pub mod perf;
pub mod policy;
pub mod rng;
pub mod sim;
pub mod world;

pub use error::{Error, Result};
pub use world::{AgentState, Command, LaserScan, OccupancyGrid, Pose2D, Vec2};
