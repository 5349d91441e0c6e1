//! Gradient-free policy search over scheduler-emitted environments.
//!
//! Each generation evaluates an antithetic population of parameter
//! perturbations on a shared batch of environments (common seeds keep the
//! comparison paired), moves the parameters along the fitness-weighted
//! average of the perturbations, and reports the rolling episode score into
//! the curriculum scheduler.

use std::collections::VecDeque;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curriculum::{advance, emit_env_config, AdvanceRecord, CurriculumState};
use crate::env::EnvConfig;
use crate::error::{Error, Result};
use crate::mapgen::{generate_map, longest_path};
use crate::pedsim::PedParams;
use crate::policy::{LearnedPolicy, PolicyParams};
use crate::rng;
use crate::sim::{run_episode, SeedBundle, SimConfig};
use crate::world::{OccupancyGrid, Pose2D};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainerConfig {
    /// population size; rounded up to an even count for antithetic pairs
    pub population: usize,
    pub generations: usize,
    pub episodes_per_member: usize,
    /// perturbation scale
    pub sigma: f64,
    pub learning_rate: f64,
    /// rolling episode window reported to the scheduler
    pub perf_window: usize,
    pub sim: SimConfig,
    pub world_extent: f64,
    pub resolution: f64,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            population: 12,
            generations: 20,
            episodes_per_member: 2,
            sigma: 0.3,
            learning_rate: 0.6,
            perf_window: crate::curriculum::DEFAULT_PERF_WINDOW,
            sim: SimConfig::default(),
            world_extent: crate::mapgen::DEFAULT_WORLD_EXTENT,
            resolution: crate::mapgen::DEFAULT_RESOLUTION,
        }
    }
}

/// Where training environments come from.
#[derive(Debug, Clone)]
pub enum EnvSchedule {
    Curriculum(CurriculumState),
    Fixed(EnvConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainLogEntry {
    pub generation: usize,
    /// population mean episode score this generation
    pub mean_perf: f64,
    /// rolling window mean fed to the scheduler
    pub window_mean: f64,
    pub env: EnvConfig,
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub params: PolicyParams,
    pub log: Vec<TrainLogEntry>,
    pub curriculum_trace: Vec<AdvanceRecord>,
    pub final_state: Option<CurriculumState>,
}

struct EpisodeEnv {
    grid: OccupancyGrid,
    start: Pose2D,
    goal: Pose2D,
    peds: PedParams,
    seeds: SeedBundle,
}

fn build_envs(env: &EnvConfig, cfg: &TrainerConfig, seed: u64, generation: usize) -> Result<Vec<EpisodeEnv>> {
    (0..cfg.episodes_per_member)
        .map(|e| {
            let idx = (generation * cfg.episodes_per_member + e) as u64;
            let map_seed = rng::substream(seed, "train-map", idx);
            let ped_seed = rng::substream(seed, "train-ped", idx);
            let params = env.to_map_params(cfg.world_extent, cfg.resolution, map_seed);
            let (grid, graph) = generate_map(&params)?;
            let (start, goal) = longest_path(&grid, &graph)?;
            let margin = cfg.sim.r_robot + 0.05;
            let start = crate::sim::nudge_to_feasible(&grid, start, margin);
            let goal = crate::sim::nudge_to_feasible(&grid, goal, margin);
            Ok(EpisodeEnv {
                grid,
                start,
                goal,
                peds: env.to_ped_params(ped_seed),
                seeds: SeedBundle { master: seed, map: map_seed, peds: ped_seed, episode: idx },
            })
        })
        .collect()
}

fn member_fitness(params: &PolicyParams, envs: &[EpisodeEnv], sim: &SimConfig) -> Result<Vec<f64>> {
    let policy = LearnedPolicy::new(params.clone())?;
    envs.iter()
        .map(|e| {
            let r = run_episode(&e.grid, &e.peds, &policy, e.start, e.goal, sim, e.seeds)?;
            Ok(r.mean_perf)
        })
        .collect()
}

/// Run the search. Zero generations returns the parameters unchanged.
/// Deterministic in (initial, schedule, config, seed).
pub fn train_policy(
    initial: &PolicyParams,
    schedule: EnvSchedule,
    cfg: &TrainerConfig,
    seed: u64,
) -> Result<TrainReport> {
    initial.validate()?;
    cfg.sim.validate()?;
    let dim = initial.params.len();
    let pop_pairs = (cfg.population + 1) / 2;
    let mut theta = initial.params.clone();
    let mut state = match &schedule {
        EnvSchedule::Curriculum(s) => Some(s.clone()),
        EnvSchedule::Fixed(_) => None,
    };
    let mut log = Vec::new();
    let mut trace = Vec::new();
    let mut window: VecDeque<f64> = VecDeque::new();

    for g in 0..cfg.generations {
        let env = match (&schedule, &state) {
            (EnvSchedule::Fixed(e), _) => *e,
            (_, Some(s)) => emit_env_config(s),
            _ => unreachable!(),
        };
        let envs = build_envs(&env, cfg, seed, g)?;

        // antithetic noise
        let mut noise_rng = rng::stream(seed, "es-noise", g as u64);
        let noise: Vec<Vec<f64>> = (0..pop_pairs)
            .map(|_| (0..dim).map(|_| standard_normal(&mut noise_rng)).collect())
            .collect();
        let members: Vec<Vec<f64>> = noise
            .iter()
            .flat_map(|eps| {
                let plus: Vec<f64> =
                    theta.iter().zip(eps).map(|(t, e)| t + cfg.sigma * e).collect();
                let minus: Vec<f64> =
                    theta.iter().zip(eps).map(|(t, e)| t - cfg.sigma * e).collect();
                [plus, minus]
            })
            .collect();

        let scores: Result<Vec<Vec<f64>>> = members
            .par_iter()
            .map(|m| {
                let params = PolicyParams { params: m.clone(), ..initial.clone() };
                member_fitness(&params, &envs, &cfg.sim)
            })
            .collect();
        let scores = scores?;
        let fitness: Vec<f64> =
            scores.iter().map(|s| s.iter().sum::<f64>() / s.len().max(1) as f64).collect();
        if fitness.iter().any(|f| !f.is_finite()) {
            return Err(Error::Divergence(format!("non-finite fitness at generation {g}")));
        }

        // centered-rank weights: the success/failure ordering drives the
        // update even when score magnitudes are dominated by collisions
        let weights = centered_ranks(&fitness);
        let mean = fitness.iter().sum::<f64>() / fitness.len() as f64;
        let scale = cfg.learning_rate / (members.len() as f64 * cfg.sigma);
        for (pair, eps) in noise.iter().enumerate() {
            let w = weights[2 * pair] - weights[2 * pair + 1];
            for (t, e) in theta.iter_mut().zip(eps) {
                *t += scale * w * e;
            }
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Divergence(format!("non-finite parameters at generation {g}")));
        }

        // rolling episode window -> scheduler
        for member_scores in &scores {
            for s in member_scores {
                window.push_back(*s);
                if window.len() > cfg.perf_window {
                    window.pop_front();
                }
            }
        }
        let window_mean = window.iter().sum::<f64>() / window.len().max(1) as f64;
        if let Some(s) = &state {
            let next = advance(s, window_mean);
            if next != *s {
                trace.push(AdvanceRecord::new(s, &next, window_mean));
            }
            state = Some(next);
        }
        log.push(TrainLogEntry { generation: g, mean_perf: mean, window_mean, env });
    }

    Ok(TrainReport {
        params: PolicyParams {
            params: theta,
            seed,
            version: initial.version.clone(),
            curriculum_trace: initial.curriculum_trace.clone(),
        },
        log,
        curriculum_trace: trace,
        final_state: state,
    })
}

/// Box-Muller from two uniform draws.
fn standard_normal(rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Fitness -> weights in [-0.5, 0.5] by rank, average rank on ties (so a
/// flat population produces a zero update).
fn centered_ranks(fitness: &[f64]) -> Vec<f64> {
    let n = fitness.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| fitness[a].partial_cmp(&fitness[b]).unwrap().then(a.cmp(&b)));
    let mut weights = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && fitness[order[j + 1]] == fitness[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0;
        for &idx in &order[i..=j] {
            weights[idx] = avg_rank / (n - 1) as f64 - 0.5;
        }
        i = j + 1;
    }
    weights
}
