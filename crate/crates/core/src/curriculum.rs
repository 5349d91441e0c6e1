//! Evolutionary curriculum scheduler.
//!
//! Targets the hardest-ranked variable first. Every time the recent mean
//! score clears the threshold the target's level steps up; topping out
//! completes one curriculum iteration, which bumps every other variable one
//! level. After two iterations the target rotates to the next-ranked
//! variable. Past the last variable the curriculum reports complete.

use serde::{Deserialize, Serialize};

use crate::env::{EnvConfig, VariableName};
use crate::eval::DifficultyRanking;

pub const DEFAULT_LEVELS: usize = 5;
pub const DEFAULT_THRESHOLD: f64 = 0.75;
/// Episodes in the rolling window the trainer feeds into [`advance`].
pub const DEFAULT_PERF_WINDOW: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurriculumState {
    pub ranking: DifficultyRanking,
    /// index into the ranking of the variable being escalated
    pub target_index: usize,
    /// the target's level, 0..levels-1
    pub target_level: usize,
    /// level of every variable (the target's entry mirrors target_level)
    pub levels: Vec<usize>,
    /// completed sweeps of the current target (rotation happens after 2)
    pub iterations_on_target: usize,
    pub global_round: usize,
    pub complete: bool,
    /// number of discrete levels per variable
    pub level_count: usize,
    pub threshold: f64,
}

impl CurriculumState {
    pub fn target(&self) -> VariableName {
        self.ranking.entries[self.target_index].0
    }

    fn level_of(&self, v: VariableName) -> usize {
        let pos = self.ranking.entries.iter().position(|(n, _)| *n == v).unwrap();
        self.levels[pos]
    }
}

/// Start a curriculum: hardest-ranked variable targeted at level 0, all
/// other variables at their easiest.
pub fn init_curriculum(ranking: DifficultyRanking) -> CurriculumState {
    init_with(ranking, DEFAULT_LEVELS, DEFAULT_THRESHOLD)
}

pub fn init_with(ranking: DifficultyRanking, level_count: usize, threshold: f64) -> CurriculumState {
    let n = ranking.entries.len();
    CurriculumState {
        ranking,
        target_index: 0,
        target_level: 0,
        levels: vec![0; n],
        iterations_on_target: 0,
        global_round: 0,
        complete: false,
        level_count: level_count.max(2),
        threshold,
    }
}

/// One scheduling decision. Below threshold: no change. Otherwise escalate
/// the target; at its max level, complete the sweep (bump all others), and
/// after the second sweep rotate to the next ranked variable. Pure.
pub fn advance(state: &CurriculumState, recent_mean_perf: f64) -> CurriculumState {
    let mut s = state.clone();
    if s.complete || recent_mean_perf < s.threshold {
        return s;
    }
    let max_level = s.level_count - 1;
    if s.target_level < max_level {
        s.target_level += 1;
        s.levels[s.target_index] = s.target_level;
        return s;
    }
    // curriculum iteration complete: raise the rest of the world
    s.iterations_on_target += 1;
    for (i, level) in s.levels.iter_mut().enumerate() {
        if i != s.target_index {
            *level = (*level + 1).min(max_level);
        }
    }
    if s.iterations_on_target < 2 {
        s.target_level = 0;
        s.levels[s.target_index] = 0;
    } else {
        s.iterations_on_target = 0;
        s.target_index += 1;
        if s.target_index >= s.ranking.entries.len() {
            s.complete = true;
            s.global_round += 1;
            s.target_index = s.ranking.entries.len() - 1;
            s.target_level = max_level;
        } else {
            s.target_level = 0;
            s.levels[s.target_index] = 0;
        }
    }
    s
}

/// Assemble the concrete environment for the current levels: each
/// variable's level maps affinely from its easiest endpoint to its hardest.
pub fn emit_env_config(state: &CurriculumState) -> EnvConfig {
    let mut env = EnvConfig::baseline();
    let denom = (state.level_count - 1) as f64;
    for v in VariableName::ALL {
        let level = state.level_of(v);
        env.set(v, v.value_at_difficulty(level as f64 / denom));
    }
    env
}

/// The all-hardest configuration (every variable at its final level).
pub fn hardest_env_config() -> EnvConfig {
    let mut env = EnvConfig::baseline();
    for v in VariableName::ALL {
        env.set(v, v.value_at_difficulty(1.0));
    }
    env
}

/// One scheduler decision, recorded for replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvanceRecord {
    pub perf: f64,
    pub before_target: VariableName,
    pub before_level: usize,
    pub after_target: VariableName,
    pub after_level: usize,
    pub complete: bool,
}

impl AdvanceRecord {
    pub fn new(before: &CurriculumState, after: &CurriculumState, perf: f64) -> Self {
        AdvanceRecord {
            perf,
            before_target: before.target(),
            before_level: before.target_level,
            after_target: after.target(),
            after_level: after.target_level,
            complete: after.complete,
        }
    }
}
