use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::episode::{run_episode, EpisodeConfig, Trajectory};
use crate::encoding::BeliefLevel;
use crate::error::HarnessError;

/// Seed for item `index` of a stream rooted at `master` (splitmix64 finalizer).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeStats {
    pub scores: Vec<u32>,
    pub median: f64,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(N)`.
    pub sem: f64,
}

impl EpisodeStats {
    pub fn from_scores(scores: Vec<u32>) -> EpisodeStats {
        let n = scores.len();
        if n == 0 {
            return EpisodeStats {
                scores,
                median: f64::NAN,
                mean: f64::NAN,
                sem: f64::NAN,
            };
        }
        let mut sorted = scores.clone();
        sorted.sort_unstable();
        let median = if n % 2 == 1 {
            sorted[n / 2] as f64
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
        };
        let sum: u64 = scores.iter().map(|&s| s as u64).sum();
        let mean = sum as f64 / n as f64;
        let sem = if n > 1 {
            let ss: f64 = scores.iter().map(|&s| (s as f64 - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        EpisodeStats {
            scores,
            median,
            mean,
            sem,
        }
    }

    pub fn n(&self) -> usize {
        self.scores.len()
    }
}

/// Result of a batch run. Trajectories are kept only when asked for.
#[derive(Clone, Debug)]
pub struct BatchResult {
    pub stats: EpisodeStats,
    pub trajectories: Vec<Trajectory>,
}

/// Config of episode `index`: the template with its seed replaced.
pub fn episode_config(template: &EpisodeConfig, index: u64) -> EpisodeConfig {
    EpisodeConfig {
        seed: derive_seed(template.seed, index),
        ..template.clone()
    }
}

/// Runs `episodes` games on `parallelism` threads. Per-episode seeds derive
/// from `template.seed` and the episode index, and results are gathered in
/// index order, so the output does not depend on `parallelism`.
pub fn run_batch(template: &EpisodeConfig, episodes: usize, parallelism: usize) -> Result<EpisodeStats, HarnessError> {
    Ok(run_batch_with(template, episodes, parallelism, false)?.stats)
}

pub fn run_batch_with(
    template: &EpisodeConfig,
    episodes: usize,
    parallelism: usize,
    keep_trajectories: bool,
) -> Result<BatchResult, HarnessError> {
    if episodes == 0 {
        return Err(HarnessError::Config("episodes must be at least 1".into()));
    }
    template.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let results: Vec<Trajectory> = pool.install(|| {
        (0..episodes as u64)
            .into_par_iter()
            .map(|i| run_episode(&episode_config(template, i)))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let stats = EpisodeStats::from_scores(results.iter().map(|t| t.final_score).collect());
    Ok(BatchResult {
        stats,
        trajectories: if keep_trajectories { results } else { Vec::new() },
    })
}

pub const STATS_CSV_HEADER: &str = "players,policy,beta,level,N,median,mean,sem";

/// One stats CSV row, matching [`STATS_CSV_HEADER`].
pub fn stats_csv_row(template: &EpisodeConfig, stats: &EpisodeStats) -> String {
    let level = match template.level {
        BeliefLevel::Own => 0,
        BeliefLevel::Nested => 1,
    };
    let policy = (0..template.num_players)
        .map(|s| template.policy_for(s).label())
        .collect::<Vec<_>>();
    let policy = if policy.iter().all(|p| *p == policy[0]) {
        policy[0].clone()
    } else {
        policy.join("+")
    };
    let mut row = String::new();
    write!(
        row,
        "{},{},{},{},{},{:.1},{:.4},{:.4}",
        template.num_players,
        policy,
        template.reward.beta,
        level,
        stats.n(),
        stats.median,
        stats.mean,
        stats.sem
    )
    .expect("write to string");
    row
}

/// Header plus one row.
pub fn stats_csv(template: &EpisodeConfig, stats: &EpisodeStats) -> String {
    format!("{STATS_CSV_HEADER}\n{}\n", stats_csv_row(template, stats))
}
