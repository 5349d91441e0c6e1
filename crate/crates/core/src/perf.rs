//! The unified per-step performance score used both as the reward signal
//! and as the evaluation metric.
//!
//! Cases, checked top-down:
//!   1                         if the agent is at its goal
//!   -0.25                     if it penetrates a static obstacle
//!   -(1 - e^(d_min - 0.3))    if the nearest moving agent is within 0.3 m
//!   0                         otherwise
//!
//! The static and dynamic cases can hold at once (the prose treats them as
//! exclusive); when both apply the more negative one wins, which keeps
//! pedestrian contact strictly worse than wall contact near d_min ~ 0.
//! Note the source equation gates the dynamic case on `g_min` but scores it
//! with `d_min`; both are read as the dynamic-agent clearance here.

use crate::error::{Error, Result};

pub const WALL_PENALTY: f64 = -0.25;
pub const PROXIMITY_BAND: f64 = 0.3;

/// Per-step scoring inputs. Clearances are signed surface-to-surface
/// distances; negative means penetration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerfInputs {
    pub at_goal: bool,
    pub g_min_static: f64,
    pub d_min_dynamic: f64,
}

impl PerfInputs {
    pub fn new(at_goal: bool, g_min_static: f64, d_min_dynamic: f64) -> Self {
        PerfInputs { at_goal, g_min_static, d_min_dynamic }
    }
}

/// Score one step. Total function; output always lies in [-1, 1].
pub fn perf_step(inputs: &PerfInputs) -> f64 {
    if inputs.at_goal {
        return 1.0;
    }
    let wall = (inputs.g_min_static < 0.0).then_some(WALL_PENALTY);
    let ped = (inputs.d_min_dynamic <= PROXIMITY_BAND)
        .then(|| -(1.0 - (inputs.d_min_dynamic - PROXIMITY_BAND).exp()));
    match (wall, ped) {
        (Some(w), Some(p)) => w.min(p),
        (Some(w), None) => w,
        (None, Some(p)) => p,
        (None, None) => 0.0,
    }
}

/// Arithmetic mean of a per-step score trace.
pub fn episode_perf(trace: &[f64]) -> Result<f64> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    Ok(trace.iter().sum::<f64>() / trace.len() as f64)
}
