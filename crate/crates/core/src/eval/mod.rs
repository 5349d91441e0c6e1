//! Policy sensitivity measurement: extreme sampling per environment
//! variable, delta ranking, and linear response fits.

pub mod synthetic;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{EnvConfig, VariableName};
use crate::error::{Error, Result};
use crate::mapgen::{generate_map, longest_path};
use crate::policy::EgoPolicy;
use crate::rng;
use crate::sim::{run_episode, SeedBundle, SimConfig};

/// One variable's sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: VariableName,
    pub min: f64,
    pub max: f64,
}

impl VariableSpec {
    pub fn advisory(name: VariableName) -> Self {
        let (min, max) = name.advisory_range();
        VariableSpec { name, min, max }
    }

    /// All seven variables over their advisory ranges.
    pub fn default_specs() -> Vec<VariableSpec> {
        VariableName::ALL.iter().map(|v| VariableSpec::advisory(*v)).collect()
    }
}

/// Measurement budget per configuration: `iterations` counts total
/// simulation steps spread across episodes over `maps_per_extreme` maps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub maps_per_extreme: usize,
    pub iterations: usize,
}

impl Default for Budget {
    fn default() -> Self {
        // desk scale: ~200 episodes of <=300 steps over 50 maps
        Budget { maps_per_extreme: 50, iterations: 60_000 }
    }
}

impl Budget {
    fn validate(&self) -> Result<()> {
        if self.maps_per_extreme == 0 || self.iterations == 0 {
            return Err(Error::BudgetTooSmall("maps and iterations must be positive".into()));
        }
        if self.iterations < self.maps_per_extreme {
            return Err(Error::BudgetTooSmall(format!(
                "{} iterations cannot cover one episode on each of {} maps",
                self.iterations, self.maps_per_extreme
            )));
        }
        Ok(())
    }

    fn steps_per_map(&self) -> usize {
        (self.iterations + self.maps_per_extreme - 1) / self.maps_per_extreme
    }
}

/// Variables ordered by how much their hard extreme hurts the policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifficultyRanking {
    /// (variable, mean PerfScore at min-level minus at max-level), sorted
    /// descending with the fixed name order breaking ties
    pub entries: Vec<(VariableName, f64)>,
}

impl DifficultyRanking {
    pub fn order(&self) -> Vec<VariableName> {
        self.entries.iter().map(|(v, _)| *v).collect()
    }
}

/// Mean response at sampled levels plus the fitted line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableResponse {
    pub variable: VariableName,
    pub levels: Vec<f64>,
    pub means: Vec<f64>,
    pub episode_counts: Vec<usize>,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

/// Anything that can score an episode in a configured environment. The
/// simulation probe is the production implementation; synthetic probes
/// drive the calibration harnesses.
pub trait EnvProbe: Sync {
    /// Per-step scores of one episode on the map drawn from `map_seed`.
    fn episode_scores(
        &self,
        env: &EnvConfig,
        map_seed: u64,
        episode_seed: u64,
    ) -> Result<Vec<f64>>;
}

/// Probe backed by the real generator + simulator + policy stack.
pub struct SimProbe<'a> {
    pub policy: &'a dyn EgoPolicy,
    pub sim: SimConfig,
    pub world_extent: f64,
    pub resolution: f64,
}

impl<'a> SimProbe<'a> {
    pub fn new(policy: &'a dyn EgoPolicy, sim: SimConfig) -> Self {
        SimProbe {
            policy,
            sim,
            world_extent: crate::mapgen::DEFAULT_WORLD_EXTENT,
            resolution: crate::mapgen::DEFAULT_RESOLUTION,
        }
    }
}

impl EnvProbe for SimProbe<'_> {
    fn episode_scores(
        &self,
        env: &EnvConfig,
        map_seed: u64,
        episode_seed: u64,
    ) -> Result<Vec<f64>> {
        let params = env.to_map_params(self.world_extent, self.resolution, map_seed);
        let (grid, graph) = generate_map(&params)?;
        let (start, goal) = longest_path(&grid, &graph)?;
        let margin = self.sim.r_robot + 0.05;
        let start = crate::sim::nudge_to_feasible(&grid, start, margin);
        let goal = crate::sim::nudge_to_feasible(&grid, goal, margin);
        let peds = env.to_ped_params(episode_seed);
        let seeds = SeedBundle { master: 0, map: map_seed, peds: episode_seed, episode: episode_seed };
        let result = run_episode(&grid, &peds, self.policy, start, goal, &self.sim, seeds)?;
        Ok(result.perf_trace)
    }
}

/// Pooled per-step mean over the budget: each map receives an equal step
/// allowance and runs episodes until it is exhausted. Work fans out over
/// maps; the reduction is ordered, so the result is deterministic.
pub fn measure_mean(
    probe: &dyn EnvProbe,
    env: &EnvConfig,
    budget: &Budget,
    seed: u64,
    label: &str,
) -> Result<(f64, usize)> {
    budget.validate()?;
    let allowance = budget.steps_per_map();
    let per_map: Result<Vec<(f64, usize, usize)>> = (0..budget.maps_per_extreme)
        .into_par_iter()
        .map(|map_idx| {
            let map_seed = rng::substream(seed, &format!("{label}-map"), map_idx as u64);
            let mut sum = 0.0;
            let mut steps = 0usize;
            let mut episodes = 0usize;
            while steps < allowance {
                let episode_seed = rng::substream(
                    seed,
                    &format!("{label}-ep"),
                    (map_idx as u64) << 20 | episodes as u64,
                );
                let scores = probe.episode_scores(env, map_seed, episode_seed)?;
                sum += scores.iter().sum::<f64>();
                steps += scores.len().max(1);
                episodes += 1;
            }
            Ok((sum, steps, episodes))
        })
        .collect();
    let per_map = per_map?;
    let (mut sum, mut steps, mut episodes) = (0.0, 0usize, 0usize);
    for (s, n, e) in per_map {
        sum += s;
        steps += n;
        episodes += e;
    }
    if steps == 0 {
        return Err(Error::BudgetTooSmall("no steps executed".into()));
    }
    Ok((sum / steps as f64, episodes))
}

/// For each variable: hold everything else at `baseline`, measure the
/// pooled mean score at the range min and max, and rank by the difference.
pub fn evaluate_extremes(
    probe: &dyn EnvProbe,
    variables: &[VariableSpec],
    budget: &Budget,
    baseline: &EnvConfig,
    seed: u64,
) -> Result<DifficultyRanking> {
    let mut deltas = BTreeMap::new();
    for spec in variables {
        let mut means = [0.0; 2];
        for (slot, value) in [(0usize, spec.min), (1, spec.max)] {
            let env = baseline.with(spec.name, value);
            let label = format!("eval-{}-{}", spec.name.as_str(), slot);
            let (mean, _) = measure_mean(probe, &env, budget, seed, &label)?;
            means[slot] = mean;
        }
        deltas.insert(spec.name, means[0] - means[1]);
    }
    rank_from_deltas(&deltas)
}

/// Pure ranking: descending by delta, ties in the fixed name order.
pub fn rank_from_deltas(deltas: &BTreeMap<VariableName, f64>) -> Result<DifficultyRanking> {
    for v in VariableName::ALL {
        if !deltas.contains_key(&v) {
            return Err(Error::MissingVariable(v.as_str().to_string()));
        }
    }
    let mut entries: Vec<(VariableName, f64)> =
        VariableName::ALL.iter().map(|v| (*v, deltas[v])).collect();
    entries.sort_by(|a, b| {
        b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.index().cmp(&b.0.index()))
    });
    Ok(DifficultyRanking { entries })
}

/// Least-squares line through (x, y); returns (slope, intercept).
fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-15 {
        return (0.0, sy / n);
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// Sample `points` uniform levels across the variable's range (others at
/// baseline), measure the pooled mean at each, and fit a line.
pub fn fit_response(
    probe: &dyn EnvProbe,
    spec: &VariableSpec,
    points: usize,
    budget: &Budget,
    baseline: &EnvConfig,
    seed: u64,
) -> Result<VariableResponse> {
    if points < 2 {
        return Err(Error::InvalidParams("fit needs at least 2 points".into()));
    }
    let mut levels = Vec::with_capacity(points);
    let mut means = Vec::with_capacity(points);
    let mut counts = Vec::with_capacity(points);
    for k in 0..points {
        let value = spec.min + (spec.max - spec.min) * k as f64 / (points - 1) as f64;
        let env = baseline.with(spec.name, value);
        let label = format!("fit-{}-{}", spec.name.as_str(), k);
        let (mean, episodes) = measure_mean(probe, &env, budget, seed, &label)?;
        levels.push(value);
        means.push(mean);
        counts.push(episodes);
    }
    let (slope, intercept) = fit_line(&levels, &means);
    let residual = levels
        .iter()
        .zip(&means)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(VariableResponse {
        variable: spec.name,
        levels,
        means,
        episode_counts: counts,
        slope,
        intercept,
        residual,
    })
}
