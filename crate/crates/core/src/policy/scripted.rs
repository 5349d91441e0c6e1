//! Scripted goal-seeking baseline with conflict-weighted deflection.
//!
//! Heads toward the local goal at preferred speed, deflecting away from any
//! agent that is close and on a converging course. Conflicts are weighted
//! by time-to-closest-approach and proximity; an agent dead ahead breaks
//! the tie to the right. Deterministic and rotation-equivariant.

use serde::{Deserialize, Serialize};

use crate::policy::{EgoPolicy, PolicyInput};
use crate::world::{Command, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScriptedConfig {
    /// surface distance below which another agent is considered at all
    pub avoid_range: f64,
    /// look-ahead horizon for closest-approach prediction (s)
    pub horizon: f64,
    /// predicted miss distance below which a conflict registers
    pub safe_margin: f64,
    /// deflection magnitude per unit conflict weight (rad)
    pub max_deflection: f64,
    /// slowdown floor near conflicts
    pub min_speed_frac: f64,
    /// distance over which the ego decelerates into its goal (m)
    pub arrive_radius: f64,
}

impl Default for ScriptedConfig {
    fn default() -> Self {
        ScriptedConfig {
            avoid_range: 1.0,
            horizon: 2.0,
            safe_margin: 0.3,
            max_deflection: std::f64::consts::FRAC_PI_2,
            min_speed_frac: 0.3,
            arrive_radius: 0.5,
        }
    }
}

/// One evaluation of the scripted rule.
pub fn act_scripted(input: &PolicyInput, cfg: &ScriptedConfig) -> Command {
    let ego = &input.ego;
    let to_goal = ego.local_goal - ego.pos;
    let goal_dist = to_goal.norm();
    if goal_dist < 1e-9 {
        return Command::new(0.0, ego.heading);
    }
    let goal_heading = to_goal.angle();

    let mut deflection = 0.0;
    let mut slow = 1.0_f64;
    for other in &input.others {
        let rel = other.pos - ego.pos;
        let dist_surf = rel.norm() - ego.radius - other.radius;
        if dist_surf > cfg.avoid_range {
            continue;
        }
        let vrel = other.vel - ego.vel;
        let vv = vrel.norm_sq();
        let ttca = if vv > 1e-9 { (-(rel.dot(vrel)) / vv).clamp(0.0, cfg.horizon) } else { 0.0 };
        let approach = rel + vrel * ttca;
        let miss = approach.norm() - ego.radius - other.radius;
        if miss < cfg.safe_margin || dist_surf < cfg.safe_margin {
            let urgency = 1.0 - dist_surf.clamp(0.0, cfg.avoid_range) / cfg.avoid_range;
            let weight = (1.0 - ttca / cfg.horizon) * urgency;
            let side = to_goal.cross(rel);
            let steer = if side.abs() < 1e-9 { -1.0 } else { -side.signum() };
            deflection += steer * weight * cfg.max_deflection;
            slow = slow.min((dist_surf / cfg.avoid_range).clamp(cfg.min_speed_frac, 1.0));
        }
    }
    let heading = goal_heading + deflection.clamp(-cfg.max_deflection, cfg.max_deflection);
    let arrive = (goal_dist / cfg.arrive_radius).min(1.0);
    Command::new(ego.v_pref * slow * arrive, heading)
}

/// The baseline policy object.
#[derive(Debug, Clone, Default)]
pub struct ScriptedPolicy {
    pub config: ScriptedConfig,
}

impl EgoPolicy for ScriptedPolicy {
    fn act(&self, input: &PolicyInput) -> Command {
        act_scripted(input, &self.config)
    }

    fn name(&self) -> &'static str {
        "scripted"
    }
}
