//! Synthetic probes with known closed-form responses, used to calibrate
//! the measurement machinery (and by the linearity harness).

use rand::Rng;

use crate::env::{EnvConfig, VariableName};
use crate::error::Result;
use crate::eval::EnvProbe;
use crate::rng;

/// Scores every step the same regardless of the environment.
pub struct ConstantProbe {
    pub value: f64,
}

impl EnvProbe for ConstantProbe {
    fn episode_scores(&self, _env: &EnvConfig, _map: u64, _ep: u64) -> Result<Vec<f64>> {
        Ok(vec![self.value; 100])
    }
}

/// Mean step score is exactly `intercept + slope * value(variable)`,
/// insensitive to every other variable. Episodes are constant traces, so
/// pooled means hit the affine response to round-off.
pub struct AffineResponseProbe {
    pub variable: VariableName,
    pub slope: f64,
    pub intercept: f64,
}

impl EnvProbe for AffineResponseProbe {
    fn episode_scores(&self, env: &EnvConfig, _map: u64, _ep: u64) -> Result<Vec<f64>> {
        let score = self.intercept + self.slope * env.get(self.variable);
        Ok(vec![score; 100])
    }
}

/// Episode-driven affine response: episodes have seeded random lengths and
/// carry zero-mean per-episode noise around the affine response, modeling
/// what a real batch of episodes delivers to the estimator.
pub struct NoisyAffineProbe {
    pub variable: VariableName,
    pub slope: f64,
    pub intercept: f64,
    pub noise_std: f64,
    pub min_steps: usize,
    pub max_steps: usize,
}

impl EnvProbe for NoisyAffineProbe {
    fn episode_scores(&self, env: &EnvConfig, map_seed: u64, episode_seed: u64) -> Result<Vec<f64>> {
        let mut r = rng::stream(map_seed ^ episode_seed, "noisy-affine", 0);
        let len = r.gen_range(self.min_steps..=self.max_steps);
        // sum of 12 uniforms, shifted: approximately standard normal
        let gauss: f64 = (0..12).map(|_| r.gen_range(0.0..1.0)).sum::<f64>() - 6.0;
        let score = self.intercept + self.slope * env.get(self.variable) + gauss * self.noise_std;
        Ok(vec![score; len])
    }
}
