//! The small trainable policy: a linear map over a fixed feature vector
//! with squashed outputs.
//!
//! Features (23): goal distance, goal bearing relative to the ego heading,
//! nearest-agent clearance, then the 4 nearest agents' relative states in
//! the ego frame (dx, dy, dvx, dvy, radius), zero-padded. Outputs: speed in
//! [0, v_pref] via a logistic, and a heading delta in [-pi/4, pi/4] via
//! tanh, so zero parameters give centered outputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::{EgoPolicy, PolicyInput};
use crate::world::{wrap_angle, Command};

pub const K_NEAREST: usize = 4;
pub const FEATURE_COUNT: usize = 3 + K_NEAREST * 5;
/// Two heads, each FEATURE_COUNT weights plus a bias.
pub const PARAM_COUNT: usize = 2 * (FEATURE_COUNT + 1);
pub const PARAM_VERSION: &str = "linear-v1";

pub const MAX_HEADING_DELTA: f64 = std::f64::consts::FRAC_PI_4;
const DIST_CAP: f64 = 5.0;

/// Trainable parameter vector plus provenance metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub version: String,
    pub params: Vec<f64>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curriculum_trace: Option<String>,
}

impl PolicyParams {
    pub fn zeros(seed: u64) -> Self {
        PolicyParams {
            version: PARAM_VERSION.to_string(),
            params: vec![0.0; PARAM_COUNT],
            seed,
            curriculum_trace: None,
        }
    }

    /// Training initialization: proportional steering toward the local goal
    /// plus a moderate forward-speed bias. Search refines from a policy that
    /// already walks instead of one that must discover walking (a zero start
    /// collapses into the absorbing stand-still optimum).
    pub fn navigation_prior(seed: u64) -> Self {
        let mut p = Self::zeros(seed);
        let n = FEATURE_COUNT + 1;
        p.params[FEATURE_COUNT] = 0.5; // speed head bias: sigmoid(0.5) ~ 0.62 v_pref
        p.params[n + 1] = 1.5; // turn head, goal-bearing coefficient
        p
    }

    pub fn validate(&self) -> Result<()> {
        if self.params.len() != PARAM_COUNT {
            return Err(Error::InvalidParams(format!(
                "parameter vector has {} entries, layout {} needs {}",
                self.params.len(),
                PARAM_VERSION,
                PARAM_COUNT
            )));
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFiniteParams);
        }
        Ok(())
    }
}

pub(crate) fn features(input: &PolicyInput) -> [f64; FEATURE_COUNT] {
    let ego = &input.ego;
    let mut x = [0.0; FEATURE_COUNT];
    let to_goal = ego.local_goal - ego.pos;
    x[0] = to_goal.norm().min(DIST_CAP);
    x[1] = wrap_angle(to_goal.angle() - ego.heading);
    let clearance = input
        .others
        .first()
        .map(|o| (o.pos.dist(ego.pos) - o.radius - ego.radius).clamp(-1.0, DIST_CAP))
        .unwrap_or(DIST_CAP);
    x[2] = clearance;
    for (k, other) in input.others.iter().take(K_NEAREST).enumerate() {
        let rel = (other.pos - ego.pos).rotated(-ego.heading);
        let relv = (other.vel - ego.vel).rotated(-ego.heading);
        let base = 3 + 5 * k;
        x[base] = rel.x.clamp(-DIST_CAP, DIST_CAP);
        x[base + 1] = rel.y.clamp(-DIST_CAP, DIST_CAP);
        x[base + 2] = relv.x;
        x[base + 3] = relv.y;
        x[base + 4] = other.radius;
    }
    x
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Evaluate the policy. Fails on a malformed or non-finite parameter vector.
pub fn act_learned(params: &PolicyParams, input: &PolicyInput) -> Result<Command> {
    params.validate()?;
    let x = features(input);
    let head = |w: &[f64]| -> f64 {
        w[..FEATURE_COUNT].iter().zip(x.iter()).map(|(a, b)| a * b).sum::<f64>()
            + w[FEATURE_COUNT]
    };
    let n = FEATURE_COUNT + 1;
    let speed = input.ego.v_pref * sigmoid(head(&params.params[..n]));
    let delta = MAX_HEADING_DELTA * head(&params.params[n..]).tanh();
    Ok(Command::new(speed, input.ego.heading + delta))
}

/// A validated learned policy usable wherever a baseline is.
#[derive(Debug, Clone)]
pub struct LearnedPolicy {
    params: PolicyParams,
}

impl LearnedPolicy {
    pub fn new(params: PolicyParams) -> Result<Self> {
        params.validate()?;
        Ok(LearnedPolicy { params })
    }

    pub fn params(&self) -> &PolicyParams {
        &self.params
    }
}

impl EgoPolicy for LearnedPolicy {
    fn act(&self, input: &PolicyInput) -> Command {
        act_learned(&self.params, input).expect("params validated at construction")
    }

    fn name(&self) -> &'static str {
        "learned"
    }
}
