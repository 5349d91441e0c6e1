//! The collision-avoidance policy boundary: a uniform interface, a scripted
//! baseline, a small trainable policy, and the population-search trainer.

mod learned;
mod scripted;
mod train;

pub use learned::{act_learned, LearnedPolicy, PolicyParams, FEATURE_COUNT, PARAM_VERSION};
pub use scripted::{act_scripted, ScriptedConfig, ScriptedPolicy};
pub use train::{train_policy, EnvSchedule, TrainLogEntry, TrainReport, TrainerConfig};

use crate::world::{AgentState, Command, Vec2};

/// What the ego can see of another agent: position, (estimated) velocity,
/// radius — the observable 5-vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservedAgent {
    pub pos: Vec2,
    pub vel: Vec2,
    pub radius: f64,
}

/// Policy input: the full ego state (local goal already set to the selected
/// waypoint) plus the observable states of agents within sensor range,
/// sorted by distance ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyInput {
    pub ego: AgentState,
    pub others: Vec<ObservedAgent>,
}

impl PolicyInput {
    pub fn new(ego: AgentState, mut others: Vec<ObservedAgent>) -> Self {
        others.sort_by(|a, b| {
            a.pos.dist(ego.pos).partial_cmp(&b.pos.dist(ego.pos)).unwrap()
        });
        PolicyInput { ego, others }
    }
}

/// A collision-avoidance policy: pure map from input to command.
pub trait EgoPolicy: Sync {
    fn act(&self, input: &PolicyInput) -> Command;

    fn name(&self) -> &'static str {
        "policy"
    }
}

/// Test/diagnostic policy that never moves.
pub struct StaticPolicy;

impl EgoPolicy for StaticPolicy {
    fn act(&self, input: &PolicyInput) -> Command {
        Command::new(0.0, input.ego.heading)
    }

    fn name(&self) -> &'static str {
        "static"
    }
}
